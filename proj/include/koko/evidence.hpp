#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "koko/ast.hpp"
#include "koko/document.hpp"
#include "koko/normalize.hpp"
#include "koko/resources.hpp"

namespace koko {

struct SentenceEvidence {
  SentenceId sid = 0;
  double conf = 0.0;

  bool operator==(const SentenceEvidence&) const = default;
};

struct ConditionScore {
  std::size_t index = 0;
  SatCondition cond;
  double weight = 1.0;
  std::vector<SentenceEvidence> sentences;  ///< empty for value-only conditions
  double m = 0.0;                           ///< in [0,1]

  bool operator==(const ConditionScore&) const = default;
};

struct EvidenceScore {
  std::string var;
  std::string value;
  std::vector<ConditionScore> conditions;
  double total = 0.0;
  std::optional<double> threshold;
  bool passed = true;
  std::string exclusion;  ///< the excluding condition that fired, if any

  bool operator==(const EvidenceScore&) const = default;
};

/// The tokens a descriptor may match in one clause, ordered by distance from
/// the value outward. `gaps[k]` is the number of tokens between the value and
/// word k; without gaps every match counts as adjacent.
struct ClauseWindow {
  std::vector<std::string> words;
  std::vector<int> gaps;
  double score = 1.0;
};

/// 1 / (1 + distance)
double near_score(std::size_t distance);

/// max_i sum_j k_i * l_j / (1 + g_ij) where d_i occurs in order (with gaps,
/// case-insensitive) in window j and g_ij is the gap to its nearest match.
double conf_descriptor(const ExpansionSet& expansions, const std::vector<ClauseWindow>& windows);

/// Fills total and passed from the clause weights and the per-condition m_i.
/// Passing means total >= threshold, or total > 0 when the clause has none.
EvidenceScore aggregate_scores(const SatisfyingClause& clause, const std::vector<double>& m);

struct EvidenceConfig {
  bool near_sum = false;  ///< sum (clamped) instead of max across sentences
};

/// Evaluates conditions for a value against the document it came from.
/// Caches expansions, clause decompositions and per-value scores; safe to
/// share between threads.
class EvidenceEvaluator {
 public:
  EvidenceEvaluator(const Corpus& corpus, const Resources& resources, EvidenceConfig config = {});

  ConditionScore evaluate(const SatCondition& cond, const std::vector<std::string>& value, std::size_t doc) const;
  /// Every condition of the clause, aggregated. Cached per (doc, clause, value).
  EvidenceScore score(const SatisfyingClause& clause, const std::vector<std::string>& value, std::size_t doc) const;
  /// The first excluding condition that holds, if any.
  std::optional<std::size_t> excluded_by(const std::vector<SatCondition>& excluding, const std::string& var,
                                         const std::vector<std::string>& value, std::size_t doc) const;

  std::size_t document_index(SentenceId sid) const;
  const Corpus& corpus() const { return corpus_; }

 private:
  const ExpansionSet& expansions(const std::string& descriptor) const;
  const std::vector<Clause>& clauses(const Sentence& s) const;
  double similarity(const std::vector<std::string>& value, const std::string& arg) const;

  const Corpus& corpus_;
  const Resources& res_;
  EvidenceConfig config_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, ExpansionSet> expansion_cache_;
  mutable std::unordered_map<SentenceId, std::vector<Clause>> clause_cache_;
  mutable std::map<std::tuple<std::size_t, std::string, std::string>, EvidenceScore> score_cache_;
};

/// Named-variable bindings of one tuple.
struct Binding {
  SentenceId sid = 0;
  std::vector<std::pair<std::string, Span>> vars;

  const Span* find(const std::string& name) const;
  bool operator==(const Binding&) const = default;
};

struct ResultTuple {
  SentenceId sid = 0;
  std::string doc_id;
  std::vector<std::string> values;  ///< one per output variable
  std::vector<Span> spans;          ///< one per output variable
  std::vector<EvidenceScore> scores;
  bool passed = true;
  std::string exclusion;

  bool operator==(const ResultTuple&) const = default;
};

/// What finalization needs from a query, whichever form it came in.
struct ResultSpec {
  std::vector<OutputVar> outputs;
  std::vector<SatisfyingClause> satisfying;
  std::vector<SatCondition> excluding;

  static ResultSpec of(const Query& q);
  static ResultSpec of(const NormalizedQuery& n);
};

/// Scores every binding and marks it passed or failed. Order is preserved.
std::vector<ResultTuple> finalize_results(const ResultSpec& spec, const std::vector<Binding>& bindings,
                                          const EvidenceEvaluator& ev);

/// Text printed by `koko explain --stage satisfy`.
std::string explain_score(const EvidenceScore& s);

}  // namespace koko
