#pragma once

#include <cstdint>
#include <vector>

#include "koko/ast.hpp"
#include "koko/document.hpp"
#include "koko/dpli.hpp"
#include "koko/evidence.hpp"
#include "koko/gsp.hpp"
#include "koko/index.hpp"
#include "koko/normalize.hpp"
#include "koko/resources.hpp"

namespace koko {

struct EngineOptions {
  bool use_gsp = true;
  unsigned jobs = 1;
  EvidenceConfig evidence;
};

struct EngineStats {
  std::size_t candidate_sentences = 0;
  std::size_t answer_sentences = 0;
  std::uint64_t iterations = 0;
  double lookup_ms = 0;
  double match_ms = 0;
  double aggregate_ms = 0;
};

/// Bindings produced by the extract stage, before any scoring.
struct MatchResult {
  NormalizedQuery normalized;
  std::vector<SentenceId> candidates;  ///< DPLI candidate sentences
  std::vector<Match> matches;          ///< ascending sid, enumeration order within a sentence
  EngineStats stats;
};

/// Normalize, look up candidates, validate them sentence by sentence.
/// Sentences are split across `jobs` threads and merged in sid order.
MatchResult match_query(const Query& q, const Corpus& corpus, const IndexBundle& bundle,
                        const EngineOptions& opt = {});

/// The named variables of each match.
std::vector<Binding> named_bindings(const NormalizedQuery& n, const std::vector<Match>& matches);

struct QueryResult {
  MatchResult match;
  std::vector<ResultTuple> tuples;  ///< every binding, passed or not
};

/// The full pipeline: match_query followed by evidence aggregation.
QueryResult run_query(const Query& q, const Corpus& corpus, const IndexBundle& bundle, const Resources& res,
                      const EngineOptions& opt = {});

}  // namespace koko
