#include "koko/evidence.hpp"

#include <algorithm>
#include <sstream>

#include "koko/error.hpp"
#include "koko/parser.hpp"
#include "koko/text_util.hpp"

namespace koko {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Start positions where `needle` occurs as consecutive tokens.
std::vector<int> occurrences(const Sentence& s, const std::vector<std::string>& needle) {
  std::vector<int> out;
  if (needle.empty() || needle.size() > s.size()) return out;
  const int last = static_cast<int>(s.size() - needle.size());
  for (int i = 0; i <= last; ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < needle.size() && ok; ++k) ok = s.token(i + k).text == needle[k];
    if (ok) out.push_back(i);
  }
  return out;
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty()) return true;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

// First position p (nearest to the value) from which `seq` occurs in order.
std::optional<std::size_t> in_order_from(const std::vector<std::string>& words, const std::vector<std::string>& seq) {
  if (seq.empty()) return std::nullopt;
  for (std::size_t p = 0; p < words.size(); ++p) {
    if (!iequals(words[p], seq[0])) continue;
    std::size_t k = 1;
    for (std::size_t q = p + 1; q < words.size() && k < seq.size(); ++q)
      if (iequals(words[q], seq[k])) ++k;
    if (k == seq.size()) return p;
    return std::nullopt;  // later starts can only see fewer words
  }
  return std::nullopt;
}

std::string clause_key(const SatisfyingClause& c) {
  std::ostringstream os;
  os << c.var;
  for (const auto& w : c.conditions) os << '\x1f' << to_string(w.cond) << '\x1e' << format_number(w.weight);
  if (c.threshold) os << '\x1d' << format_number(*c.threshold);
  return os.str();
}

std::string join_key(const std::vector<std::string>& words) {
  std::string k;
  for (const auto& w : words) k += w + '\x1f';
  return k;
}

}  // namespace

double near_score(std::size_t distance) { return 1.0 / (1.0 + static_cast<double>(distance)); }

double conf_descriptor(const ExpansionSet& expansions, const std::vector<ClauseWindow>& windows) {
  double best = 0.0;
  for (const auto& e : expansions) {
    double sum = 0.0;
    for (const auto& w : windows) {
      auto p = in_order_from(w.words, e.words);
      if (!p) continue;
      int gap = w.gaps.empty() ? 0 : std::max(0, w.gaps[*p]);
      sum += e.score * w.score / (1.0 + gap);
    }
    best = std::max(best, sum);
  }
  return best;
}

EvidenceScore aggregate_scores(const SatisfyingClause& clause, const std::vector<double>& m) {
  if (m.size() != clause.conditions.size()) throw Error("aggregate_scores: one confidence per condition expected");
  EvidenceScore s;
  s.var = clause.var;
  s.threshold = clause.threshold;
  for (std::size_t i = 0; i < m.size(); ++i) {
    ConditionScore c;
    c.index = i;
    c.cond = clause.conditions[i].cond;
    c.weight = clause.conditions[i].weight;
    c.m = clamp01(m[i]);
    s.total += c.weight * c.m;
    s.conditions.push_back(std::move(c));
  }
  if (clause.conditions.empty())
    s.passed = true;
  else
    s.passed = clause.threshold ? s.total >= *clause.threshold : s.total > 0.0;
  return s;
}

EvidenceEvaluator::EvidenceEvaluator(const Corpus& corpus, const Resources& resources, EvidenceConfig config)
    : corpus_(corpus), res_(resources), config_(config) {}

std::size_t EvidenceEvaluator::document_index(SentenceId sid) const {
  return static_cast<std::size_t>(&corpus_.document_of(sid) - corpus_.documents().data());
}

const ExpansionSet& EvidenceEvaluator::expansions(const std::string& descriptor) const {
  {
    std::lock_guard lock(mu_);
    auto it = expansion_cache_.find(descriptor);
    if (it != expansion_cache_.end()) return it->second;
  }
  ExpansionSet e = res_.expansion->expand(descriptor);
  std::lock_guard lock(mu_);
  return expansion_cache_.emplace(descriptor, std::move(e)).first->second;
}

const std::vector<Clause>& EvidenceEvaluator::clauses(const Sentence& s) const {
  {
    std::lock_guard lock(mu_);
    auto it = clause_cache_.find(s.sid());
    if (it != clause_cache_.end()) return it->second;
  }
  auto c = res_.decomposer->decompose(s);
  std::lock_guard lock(mu_);
  return clause_cache_.emplace(s.sid(), std::move(c)).first->second;
}

double EvidenceEvaluator::similarity(const std::vector<std::string>& value, const std::string& arg) const {
  auto target = split_whitespace(arg);
  if (res_.vectors) {
    if (auto cos = res_.vectors->phrase_similarity(value, target)) return clamp01(*cos);
  }
  double best = 0.0;
  for (const auto& e : expansions(arg)) {
    if (e.words.empty()) continue;
    // every word in order anywhere in the value
    std::size_t k = 0;
    for (std::size_t q = 0; q < value.size() && k < e.words.size(); ++q)
      if (iequals(value[q], e.words[k])) ++k;
    if (k == e.words.size()) best = std::max(best, e.score);
  }
  return clamp01(best);
}

ConditionScore EvidenceEvaluator::evaluate(const SatCondition& cond, const std::vector<std::string>& value,
                                           std::size_t doc) const {
  ConditionScore out;
  out.cond = cond;
  const std::string text = detokenize(value);
  const auto& sentences = corpus_.documents().at(doc).sentences;
  const auto lit = split_whitespace(cond.arg);

  switch (cond.kind) {
    case CondKind::Contains:
      out.m = contains_run(value, lit) ? 1.0 : 0.0;
      return out;
    case CondKind::Mentions:
      out.m = text.find(cond.arg) != std::string::npos ? 1.0 : 0.0;
      return out;
    case CondKind::Matches:
      try {
        out.m = regex_full_match(cond.arg, text) ? 1.0 : 0.0;
      } catch (const std::regex_error& e) {
        throw QueryError("invalid regex '" + cond.arg + "': " + e.what());
      }
      return out;
    case CondKind::InDict:
      out.m = res_.dictionaries.contains(cond.arg, text) ? 1.0 : 0.0;
      return out;
    case CondKind::SimilarTo:
      out.m = similarity(value, cond.arg);
      return out;
    case CondKind::FollowedBy:
    case CondKind::PrecededBy: {
      const bool after = cond.kind == CondKind::FollowedBy;
      for (const auto& s : sentences) {
        bool hit = false;
        for (int start : occurrences(s, value)) {
          int end = start + static_cast<int>(value.size()) - 1;
          int from = after ? end + 1 : start - static_cast<int>(lit.size());
          if (lit.empty() || from < 0 || from + lit.size() > s.size()) continue;
          bool ok = true;
          for (std::size_t k = 0; k < lit.size() && ok; ++k) ok = s.token(from + k).text == lit[k];
          if (ok) {
            hit = true;
            break;
          }
        }
        if (hit) out.sentences.push_back({s.sid(), 1.0});
      }
      out.m = out.sentences.empty() ? 0.0 : 1.0;
      return out;
    }
    case CondKind::Near: {
      double agg = 0.0;
      for (const auto& s : sentences) {
        auto xs = occurrences(s, value);
        auto ys = occurrences(s, lit);
        if (xs.empty() || ys.empty()) continue;
        std::size_t best = s.size();
        for (int a0 : xs) {
          int a1 = a0 + static_cast<int>(value.size()) - 1;
          for (int b0 : ys) {
            int b1 = b0 + static_cast<int>(lit.size()) - 1;
            int d = b0 > a1 ? b0 - a1 - 1 : (a0 > b1 ? a0 - b1 - 1 : 0);
            best = std::min(best, static_cast<std::size_t>(d));
          }
        }
        double conf = near_score(best);
        out.sentences.push_back({s.sid(), conf});
        agg = config_.near_sum ? agg + conf : std::max(agg, conf);
      }
      out.m = clamp01(agg);
      return out;
    }
    case CondKind::DescriptorRight:
    case CondKind::DescriptorLeft: {
      const bool right = cond.kind == CondKind::DescriptorRight;
      ExpansionSet exp = expansions(cond.arg);
      if (!right)
        for (auto& e : exp) std::reverse(e.words.begin(), e.words.end());
      double sum = 0.0;
      for (const auto& s : sentences) {
        auto xs = occurrences(s, value);
        if (xs.empty()) continue;
        const auto& cs = clauses(s);
        double conf = 0.0;
        for (int a0 : xs) {
          int a1 = a0 + static_cast<int>(value.size()) - 1;
          std::vector<ClauseWindow> windows;
          for (const auto& c : cs) {
            ClauseWindow w;
            w.score = c.score;
            std::vector<TokenId> toks;
            for (TokenId t : c.tokens)
              if (right ? static_cast<int>(t) > a1 : static_cast<int>(t) < a0) toks.push_back(t);
            std::sort(toks.begin(), toks.end());
            if (!right) std::reverse(toks.begin(), toks.end());
            for (TokenId t : toks) {
              w.words.push_back(s.token(t).text);
              w.gaps.push_back(right ? static_cast<int>(t) - a1 - 1 : a0 - static_cast<int>(t) - 1);
            }
            if (!w.words.empty()) windows.push_back(std::move(w));
          }
          conf = std::max(conf, conf_descriptor(exp, windows));
        }
        if (conf > 0) out.sentences.push_back({s.sid(), conf});
        sum += conf;
      }
      out.m = clamp01(sum);
      return out;
    }
  }
  return out;
}

EvidenceScore EvidenceEvaluator::score(const SatisfyingClause& clause, const std::vector<std::string>& value,
                                       std::size_t doc) const {
  auto key = std::make_tuple(doc, clause_key(clause), join_key(value));
  {
    std::lock_guard lock(mu_);
    auto it = score_cache_.find(key);
    if (it != score_cache_.end()) return it->second;
  }
  std::vector<ConditionScore> parts;
  std::vector<double> m;
  for (const auto& wc : clause.conditions) {
    parts.push_back(evaluate(wc.cond, value, doc));
    m.push_back(parts.back().m);
  }
  EvidenceScore s = aggregate_scores(clause, m);
  s.value = detokenize(value);
  for (std::size_t i = 0; i < parts.size(); ++i) s.conditions[i].sentences = std::move(parts[i].sentences);
  std::lock_guard lock(mu_);
  score_cache_.emplace(key, s);
  return s;
}

std::optional<std::size_t> EvidenceEvaluator::excluded_by(const std::vector<SatCondition>& excluding,
                                                          const std::string& var,
                                                          const std::vector<std::string>& value,
                                                          std::size_t doc) const {
  for (std::size_t i = 0; i < excluding.size(); ++i) {
    if (excluding[i].var != var) continue;
    if (evaluate(excluding[i], value, doc).m > 0.0) return i;
  }
  return std::nullopt;
}

const Span* Binding::find(const std::string& name) const {
  for (const auto& [n, s] : vars)
    if (n == name) return &s;
  return nullptr;
}

ResultSpec ResultSpec::of(const Query& q) { return {q.outputs, q.satisfying, q.excluding}; }
ResultSpec ResultSpec::of(const NormalizedQuery& n) { return {n.outputs, n.satisfying, n.excluding}; }

std::vector<ResultTuple> finalize_results(const ResultSpec& spec, const std::vector<Binding>& bindings,
                                          const EvidenceEvaluator& ev) {
  const Corpus& corpus = ev.corpus();
  std::vector<ResultTuple> out;
  out.reserve(bindings.size());
  for (const auto& b : bindings) {
    const Sentence& s = corpus.sentence(b.sid);
    const std::size_t doc = ev.document_index(b.sid);
    auto words_of = [&](const std::string& var) -> std::vector<std::string> {
      const Span* sp = b.find(var);
      if (!sp) throw QueryError("no binding for variable '" + var + "'");
      return s.words(sp->start, sp->end);
    };
    ResultTuple t;
    t.sid = b.sid;
    t.doc_id = corpus.documents()[doc].doc_id;
    for (const auto& o : spec.outputs) {
      const Span* sp = b.find(o.name);
      if (!sp) throw QueryError("no binding for output '" + o.name + "'");
      t.spans.push_back(*sp);
      t.values.push_back(s.text(sp->start, sp->end));
    }
    for (const auto& clause : spec.satisfying) {
      if (!b.find(clause.var)) continue;
      EvidenceScore sc = ev.score(clause, words_of(clause.var), doc);
      if (!sc.passed) t.passed = false;
      t.scores.push_back(std::move(sc));
    }
    for (const auto& cond : spec.excluding) {
      if (!b.find(cond.var)) continue;
      if (ev.evaluate(cond, words_of(cond.var), doc).m > 0.0) {
        t.passed = false;
        t.exclusion = to_string(cond);
        for (auto& sc : t.scores)
          if (sc.var == cond.var) {
            sc.passed = false;
            sc.exclusion = t.exclusion;
          }
        break;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string explain_score(const EvidenceScore& s) {
  std::ostringstream os;
  os << "value " << quote(s.value) << " (" << s.var << ")\n";
  for (const auto& c : s.conditions) {
    os << "  [" << c.index << "] " << to_string(c.cond) << "\n";
    for (const auto& e : c.sentences) os << "      sid " << e.sid << ": " << format_number(e.conf) << "\n";
    os << "      m = " << format_number(c.m) << ", w = " << format_number(c.weight)
       << ", w*m = " << format_number(c.weight * c.m) << "\n";
  }
  os << "  total = " << format_number(s.total);
  if (s.threshold) os << ", threshold = " << format_number(*s.threshold);
  os << ", " << (s.passed ? "passed" : "failed");
  if (!s.exclusion.empty()) os << " (excluded by " << s.exclusion << ")";
  os << "\n";
  return os.str();
}

}  // namespace koko
