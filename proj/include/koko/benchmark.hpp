#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "koko/ast.hpp"
#include "koko/document.hpp"
#include "koko/index.hpp"

namespace koko {

struct BenchQuery {
  std::string id;
  std::string family;  ///< "path", "tree", "span" or "imported"
  std::map<std::string, std::string> params;
  std::string text;
  Query query;
};

struct BenchmarkSuite {
  std::string name;
  std::uint64_t seed = 0;
  std::string composition;
  std::vector<BenchQuery> queries;
};

/// 240 path queries (5 per setting over length 2-5, attribute mix PL /
/// PL+POS / PL+POS+text, wildcard or not, rooted or not) and 110 tree
/// patterns of 3-10 labels. Paths are sampled from the corpus, with the
/// k-th query of a setting drawn from frequency band k mod 3 (frequent,
/// medium, rare). Throws FormatError when the corpus is too small.
BenchmarkSuite generate_tree_suite(std::uint64_t seed, const Corpus& corpus);

/// 100 span queries each with 1, 3 and 5 atoms, built around token
/// positions of a sampled sentence: path and word atoms separated by
/// elastic atoms, e.g. `v = //verb + ^ + /root/xcomp + ^ + "happy"`.
BenchmarkSuite generate_span_suite(std::uint64_t seed, const Corpus& corpus);

/// Reads a JSON array of {"id", "text", "params"?} objects.
BenchmarkSuite import_suite(const std::string& path);

/// |answers| / |candidates|, 1.0 when both are empty, clamped to [0,1].
double effectiveness(std::size_t candidates, std::size_t answers);

struct BenchOptions {
  bool oracle = false;  ///< also run the oracle and compare
  unsigned jobs = 1;    ///< queries evaluated in parallel
};

struct QueryReport {
  std::string id;
  std::string family;
  std::map<std::string, std::string> params;
  double lookup_ms = 0;
  double match_ms = 0;
  double match_ms_no_gsp = 0;
  std::size_t candidates = 0;
  std::size_t answers = 0;  ///< sentences with at least one match
  std::size_t tuples = 0;
  double dpli_effectiveness = 1.0;
  double final_effectiveness = 1.0;
  std::uint64_t iterations_gsp = 0;
  std::uint64_t iterations_no_gsp = 0;
  bool gsp_equal = true;
  /// Set when the oracle ran.
  std::optional<bool> oracle_equal;
  std::optional<bool> complete;  ///< oracle answers within the DPLI candidates
  std::optional<std::size_t> oracle_answers;
  std::string diff;
  std::string error;
};

struct BenchReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::string composition;
  std::size_t corpus_sentences = 0;
  std::vector<QueryReport> queries;
};

BenchReport run_suite(const BenchmarkSuite& suite, const Corpus& corpus, const IndexBundle& bundle,
                      const BenchOptions& opt = {});

/// Report with a header, one object per query and per-setting averages.
nlohmann::json to_json(const BenchReport& r);

}  // namespace koko
