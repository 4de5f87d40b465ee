#include "koko/engine.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace koko {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

MatchResult match_query(const Query& q, const Corpus& corpus, const IndexBundle& bundle, const EngineOptions& opt) {
  MatchResult r;
  r.normalized = normalize(q);
  const NormalizedQuery& n = r.normalized;

  auto t0 = std::chrono::steady_clock::now();
  BindingTable table = candidate_bindings(n, bundle);
  r.stats.lookup_ms = ms_since(t0);
  r.candidates = table.sentences;
  r.stats.candidate_sentences = table.sentences.size();

  t0 = std::chrono::steady_clock::now();
  Executor exec(n);
  const auto& sids = table.sentences;
  std::vector<SentenceResult> per(sids.size());
  auto work = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      if (sids[i] >= corpus.sentence_count()) continue;
      per[i] = exec.run(corpus.sentence(sids[i]), table, opt.use_gsp);
    }
  };
  unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1 || sids.size() < 2 * jobs) {
    work(0, sids.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (sids.size() + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
      std::size_t from = j * chunk, to = std::min(sids.size(), from + chunk);
      if (from < to) pool.emplace_back(work, from, to);
    }
    for (auto& th : pool) th.join();
  }
  for (auto& sr : per) {
    r.stats.iterations += sr.iterations;
    if (!sr.matches.empty()) ++r.stats.answer_sentences;
    for (auto& m : sr.matches) r.matches.push_back(std::move(m));
  }
  r.stats.match_ms = ms_since(t0);
  return r;
}

std::vector<Binding> named_bindings(const NormalizedQuery& n, const std::vector<Match>& matches) {
  std::vector<int> named;
  for (std::size_t i = 0; i < n.vars.size(); ++i)
    if (!n.vars[i].hidden()) named.push_back(static_cast<int>(i));
  std::vector<Binding> out;
  out.reserve(matches.size());
  for (const auto& m : matches) {
    Binding b;
    b.sid = m.sid;
    for (int i : named) b.vars.emplace_back(n.vars[i].name, m.spans[i]);
    out.push_back(std::move(b));
  }
  return out;
}

QueryResult run_query(const Query& q, const Corpus& corpus, const IndexBundle& bundle, const Resources& res,
                      const EngineOptions& opt) {
  QueryResult r;
  r.match = match_query(q, corpus, bundle, opt);
  auto t0 = std::chrono::steady_clock::now();
  EvidenceEvaluator ev(corpus, res, opt.evidence);
  r.tuples = finalize_results(ResultSpec::of(r.match.normalized), named_bindings(r.match.normalized, r.match.matches), ev);
  r.match.stats.aggregate_ms = ms_since(t0);
  return r;
}

}  // namespace koko
