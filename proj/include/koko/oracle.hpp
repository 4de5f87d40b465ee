#pragma once

#include <optional>
#include <string>
#include <vector>

#include "koko/ast.hpp"
#include "koko/document.hpp"
#include "koko/evidence.hpp"
#include "koko/resources.hpp"

namespace koko {

/// Brute-force reference evaluation. Node variables are found by walking
/// head links down from their anchors, span variables by trying every span
/// of the sentence; no index and no planner is involved. Meant for corpora
/// of a few thousand sentences.
std::vector<Binding> oracle_match(const Query& q, const Corpus& corpus, unsigned jobs = 1);

struct OracleResult {
  std::vector<Binding> bindings;
  std::vector<ResultTuple> tuples;
  std::vector<SentenceId> answer_sentences;  ///< ascending
};

OracleResult oracle_evaluate(const Query& q, const Corpus& corpus, const Resources& res,
                             const EvidenceConfig& config = {}, unsigned jobs = 1);

/// Compares two result bags as multisets of (sid, values, spans, totals,
/// passed, exclusion). Returns a description of the first difference.
std::optional<std::string> diff_results(const std::vector<ResultTuple>& engine, const std::vector<ResultTuple>& oracle);

/// One line per tuple, the same key diff_results compares.
std::string tuple_key(const ResultTuple& t);

}  // namespace koko
