#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "koko/document.hpp"
#include "koko/dpli.hpp"
#include "koko/normalize.hpp"

namespace koko {

/// Bindings of one tuple: one span per variable of the normalized query
/// (node variables bind the one-token span of their token).
struct Match {
  SentenceId sid = 0;
  std::vector<Span> spans;

  bool operator==(const Match&) const = default;
};

struct SkipPlan {
  std::vector<int> skipped;        ///< variable indices, in selection order
  std::vector<std::uint64_t> cost;  ///< per variable; 0 for variables outside horizontal conditions

  bool operator==(const SkipPlan&) const = default;
};

struct SentenceResult {
  std::vector<Match> matches;
  std::uint64_t iterations = 0;  ///< candidates tried over all loop levels
  SkipPlan plan;
};

/// t(t+1)/2 for elastic variables, the sentence's candidate count for
/// index-backed variables, the base's count for subtrees, 0 for compositions.
std::uint64_t estimate_cost(const NormalizedQuery& n, const BindingTable& t, int var, SentenceId sid,
                            std::size_t sentence_length);

/// Evaluates one query against single sentences. Holds the per-query
/// structures (horizontal conditions, checks) shared by all sentences.
class Executor {
 public:
  explicit Executor(const NormalizedQuery& n);

  /// Greedy skip selection: variables in descending cost order (ties by
  /// definition order) are skipped when they sit strictly inside a horizontal
  /// condition and no neighbor is already skipped.
  SkipPlan plan(const BindingTable& t, SentenceId sid, std::size_t sentence_length) const;

  /// Nested loops over unskipped variables in definition order, skipped
  /// variables derived from the gap between their neighbors, every check
  /// run as soon as its variables are bound. Tuples are distinct on the
  /// named variables.
  SentenceResult evaluate(const Sentence& s, const BindingTable& t, const SkipPlan& plan) const;

  /// plan() followed by evaluate(); with `use_gsp` false the plan is empty.
  SentenceResult run(const Sentence& s, const BindingTable& t, bool use_gsp = true) const;

  const NormalizedQuery& query() const { return n_; }

 private:
  struct Schedule;
  bool build_schedule(const std::vector<char>& skipped, Schedule& out) const;

  const NormalizedQuery& n_;
  std::vector<std::vector<int>> neighbors_;  // per variable, across horizontal conditions
  std::vector<std::pair<int, int>> gap_of_;  // interior position: (left, right) neighbor
};

/// Text printed by `koko explain --stage gsp` for one sentence.
std::string explain_gsp(const NormalizedQuery& n, const SentenceResult& with_gsp, const SentenceResult& without,
                        SentenceId sid);

}  // namespace koko
