#include "koko/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <random>
#include <thread>

#include "koko/engine.hpp"
#include "koko/error.hpp"
#include "koko/labels.hpp"
#include "koko/oracle.hpp"
#include "koko/parser.hpp"
#include "koko/text_util.hpp"

namespace koko {

namespace {

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

struct Occ {
  SentenceId sid;
  TokenId tid;
};

/// Token ids from the sentence root down to `tid`.
std::vector<TokenId> chain_of(const Sentence& s, TokenId tid) {
  std::vector<TokenId> c;
  for (std::optional<TokenId> t = tid; t; t = s.token(*t).head) c.push_back(*t);
  std::reverse(c.begin(), c.end());
  return c;
}

bool quotable(const std::string& w) { return w.find_first_of("\"\\") == std::string::npos && !w.empty(); }

std::string pl_name(const Token& t) { return to_lower(t.label); }

std::string pos_name(const Token& t) {
  std::string p = to_lower(t.pos);
  return classify_label(p) == LabelClass::PosTag ? p : pl_name(t);
}

/// Keys (label paths) sorted by descending frequency and split into three bands.
class Bands {
 public:
  void add(const std::string& key, Occ o) { occ_[key].push_back(o); }
  bool empty() const { return occ_.empty(); }

  void finish() {
    keys_.clear();
    for (const auto& [k, v] : occ_) keys_.push_back(k);
    std::stable_sort(keys_.begin(), keys_.end(),
                     [&](const std::string& a, const std::string& b) { return occ_[a].size() > occ_[b].size(); });
  }

  Occ sample(Rng& rng, int band) {
    std::size_t n = keys_.size();
    std::size_t lo = n * band / 3, hi = n * (band + 1) / 3;
    if (lo >= hi) lo = 0, hi = n;
    const auto& v = occ_[keys_[lo + uniform(rng, hi - lo)]];
    return v[uniform(rng, v.size())];
  }

 private:
  std::map<std::string, std::vector<Occ>> occ_;
  std::vector<std::string> keys_;
};

BenchQuery make_query(std::string id, std::string family, std::map<std::string, std::string> params,
                      const std::string& outputs, const std::string& defs) {
  BenchQuery q;
  q.id = std::move(id);
  q.family = std::move(family);
  q.params = std::move(params);
  q.text = "extract " + outputs + " from \"synthetic\" if (\n  /ROOT:{\n" + defs + "\n  }\n)\n";
  q.query = parse_query(q.text);
  return q;
}

std::string pad(std::size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

void require_corpus(const Corpus& corpus, std::size_t min_sentences) {
  if (corpus.sentence_count() < min_sentences)
    throw FormatError("corpus too small to sample benchmark queries: " + std::to_string(corpus.sentence_count()) +
                      " sentences, need at least " + std::to_string(min_sentences));
}

// ---------------------------------------------------------------- tree suite

enum class Attr { PL, PLPos, PLPosText };
const char* attr_name(Attr a) {
  switch (a) {
    case Attr::PL: return "PL";
    case Attr::PLPos: return "PL+POS";
    case Attr::PLPosText: return "PL+POS+text";
  }
  return "?";
}

std::string path_text(const Sentence& s, const std::vector<TokenId>& steps, bool rooted, Attr attr, bool wildcard,
                      Rng& rng) {
  const std::size_t L = steps.size();
  std::vector<std::string> labels(L);
  std::vector<char> use_pos(L, 0);
  if (attr != Attr::PL) {
    for (std::size_t i = 0; i < L; ++i) use_pos[i] = coin(rng, 0.5);
    use_pos[uniform(rng, L)] = 1;
  }
  for (std::size_t i = 0; i < L; ++i) {
    const Token& t = s.token(steps[i]);
    labels[i] = use_pos[i] ? pos_name(t) : pl_name(t);
  }
  std::optional<std::size_t> word_step;
  if (attr == Attr::PLPosText && quotable(s.token(steps[L - 1]).text)) {
    word_step = L - 1;
    labels[L - 1] = quote(s.token(steps[L - 1]).text);
  }
  if (wildcard) {
    std::size_t w = uniform(rng, word_step ? L - 1 : L);
    labels[w] = "*";
  }
  std::string out;
  for (std::size_t i = 0; i < L; ++i) out += (i == 0 && !rooted ? "//" : "/") + labels[i];
  return out;
}

}  // namespace

BenchmarkSuite generate_tree_suite(std::uint64_t seed, const Corpus& corpus) {
  require_corpus(corpus, 10);
  Rng rng(seed);
  BenchmarkSuite suite;
  suite.name = "tree";
  suite.seed = seed;
  suite.composition =
      "240 path queries (5 per setting: length 2-5 x PL, PL+POS, PL+POS+text x wildcard or not x rooted or not) + "
      "110 tree patterns (3-10 labels, 14 each for 3-8 and 13 each for 9-10)";

  // label-path statistics: rooted[L] keys are full paths of depth L-1 tokens,
  // floating[L] keys are the last L labels above any token.
  std::map<std::size_t, Bands> rooted, floating;
  for (SentenceId sid = 0; sid < corpus.sentence_count(); ++sid) {
    const Sentence& s = corpus.sentence(sid);
    for (TokenId tid = 0; tid < s.size(); ++tid) {
      auto c = chain_of(s, tid);
      for (std::size_t L = 1; L <= std::min<std::size_t>(5, c.size()); ++L) {
        std::string key;
        for (std::size_t i = c.size() - L; i < c.size(); ++i) key += '/' + pl_name(s.token(c[i]));
        floating[L].add(key, {sid, tid});
        if (L == c.size()) rooted[L].add(key, {sid, tid});
      }
    }
  }
  for (auto* m : {&rooted, &floating})
    for (auto& [L, b] : *m) b.finish();

  std::size_t n = 0;
  for (std::size_t L = 2; L <= 5; ++L) {
    for (Attr attr : {Attr::PL, Attr::PLPos, Attr::PLPosText}) {
      for (bool wildcard : {false, true}) {
        for (bool is_rooted : {true, false}) {
          Bands& bands = is_rooted ? rooted[L] : floating[L];
          if (bands.empty())
            throw FormatError("corpus too small to sample benchmark queries: no token at path length " +
                              std::to_string(L));
          for (int k = 0; k < 5; ++k) {
            Occ o = bands.sample(rng, k % 3);
            const Sentence& s = corpus.sentence(o.sid);
            auto c = chain_of(s, o.tid);
            std::vector<TokenId> steps(c.end() - static_cast<long>(L), c.end());
            std::string path = path_text(s, steps, is_rooted, attr, wildcard, rng);
            suite.queries.push_back(make_query("tree-" + pad(n++), "path",
                                               {{"length", std::to_string(L)},
                                                {"attributes", attr_name(attr)},
                                                {"wildcard", wildcard ? "yes" : "no"},
                                                {"rooted", is_rooted ? "yes" : "no"},
                                                {"band", std::to_string(k % 3)}},
                                               "v:Str", "    v = " + path));
          }
        }
      }
    }
  }

  Bands& anchors = floating[1];
  for (std::size_t size = 3, made = 0; size <= 10; ++size) {
    std::size_t count = size <= 8 ? 14 : 13;
    for (std::size_t k = 0; k < count; ++k, ++made) {
      bool done = false;
      for (int attempt = 0; attempt < 2000 && !done; ++attempt) {
        Occ o = anchors.sample(rng, static_cast<int>(made % 3));
        const Sentence& s = corpus.sentence(o.sid);
        auto c = chain_of(s, o.tid);
        std::size_t p = std::min<std::size_t>(2, c.size());
        std::size_t r = size - p;
        // grow a connected set of r descendants below the anchor
        std::vector<std::pair<TokenId, std::size_t>> frontier;  // (token, parent var)
        for (TokenId ch : s.children(o.tid)) frontier.push_back({ch, 0});
        std::vector<std::pair<TokenId, std::size_t>> picked;
        while (picked.size() < r && !frontier.empty()) {
          std::size_t i = uniform(rng, frontier.size());
          auto f = frontier[i];
          frontier.erase(frontier.begin() + static_cast<long>(i));
          picked.push_back(f);
          for (TokenId ch : s.children(f.first)) frontier.push_back({ch, picked.size()});
        }
        if (picked.size() < r) continue;
        bool is_rooted = c.size() == p && coin(rng, 0.5);
        std::string defs = "    x = " + std::string(is_rooted ? "/" : "//");
        if (p == 2) defs += pl_name(s.token(c[c.size() - 2])) + "/";
        defs += pl_name(s.token(o.tid));
        std::string outputs = "x:Str";
        for (std::size_t i = 0; i < picked.size(); ++i) {
          std::string name = "c" + std::to_string(i + 1);
          std::string parent = picked[i].second == 0 ? "x" : "c" + std::to_string(picked[i].second);
          defs += ",\n    " + name + " = " + parent + "/" + pl_name(s.token(picked[i].first));
          outputs += ", " + name + ":Str";
        }
        suite.queries.push_back(make_query("tree-" + pad(n++), "tree",
                                           {{"labels", std::to_string(size)},
                                            {"rooted", is_rooted ? "yes" : "no"},
                                            {"band", std::to_string(made % 3)}},
                                           outputs, defs));
        done = true;
      }
      if (!done)
        throw FormatError("corpus too small to sample a tree pattern with " + std::to_string(size) + " labels");
    }
  }
  return suite;
}

namespace {

// ---------------------------------------------------------------- span suite

std::string node_atom(const Sentence& s, TokenId tid, Rng& rng) {
  auto c = chain_of(s, tid);
  const Token& t = s.token(tid);
  double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (r < 0.35) return "//" + pl_name(t);
  if (r < 0.6) return "//" + pos_name(t);
  if (r < 0.8 && c.size() >= 2) return "//" + pl_name(s.token(c[c.size() - 2])) + "/" + pl_name(t);
  if (c.size() <= 3) {
    std::string p;
    for (TokenId x : c) p += "/" + pl_name(s.token(x));
    return p;
  }
  return "//" + pl_name(t);
}

std::string token_atom(const Sentence& s, TokenId tid, Rng& rng, char& shape) {
  const std::string& w = s.token(tid).text;
  if (quotable(w) && coin(rng, 0.4)) {
    shape = 'W';
    return quote(w);
  }
  shape = 'P';
  return node_atom(s, tid, rng);
}

std::string elastic_atom(int gap, Rng& rng) {
  double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (r < 0.8) return "^";
  if (r < 0.92) return "^[@max=" + std::to_string(gap + static_cast<int>(uniform(rng, 3))) + "]";
  if (r < 0.96) return "^[@min=" + std::to_string(std::min(gap, 1)) + "]";
  return "^[@regex=\"[^;]*\"]";  // kept rare: it is the expensive elastic form
}

}  // namespace

BenchmarkSuite generate_span_suite(std::uint64_t seed, const Corpus& corpus) {
  require_corpus(corpus, 10);
  Rng rng(seed);
  BenchmarkSuite suite;
  suite.name = "span";
  suite.seed = seed;
  suite.composition = "300 span queries: 100 each with 1, 3 and 5 atoms";

  // sentences bucketed by frequency band of their root verb
  Bands by_root;
  for (SentenceId sid = 0; sid < corpus.sentence_count(); ++sid) {
    const Sentence& s = corpus.sentence(sid);
    if (s.size() >= 3) by_root.add(s.token(s.root_tid()).text, {sid, s.root_tid()});
  }
  if (by_root.empty()) throw FormatError("corpus too small to sample span queries: no sentence of 3 tokens");
  by_root.finish();

  std::size_t n = 0;
  for (int atoms : {1, 3, 5}) {
    for (int k = 0; k < 100; ++k) {
      Occ o = by_root.sample(rng, k % 3);
      const Sentence& s = corpus.sentence(o.sid);
      const std::size_t len = s.size();
      std::string def, shape;
      if (atoms == 1) {
        int kind = k % 5;
        TokenId t = static_cast<TokenId>(uniform(rng, len));
        if (kind <= 1) {
          def = node_atom(s, t, rng);
          shape = "P";
        } else if (kind <= 3 && quotable(s.token(t).text)) {
          def = quote(s.token(t).text);
          shape = "W";
        } else if (!s.entities().empty() && coin(rng, 0.5)) {
          def = "^[@etype=" + quote(s.entities()[uniform(rng, s.entities().size())].etype) + "]";
          shape = "E";
        } else {
          def = "^[@max=" + std::to_string(1 + uniform(rng, 3)) + "]";
          shape = "E";
        }
      } else {
        std::size_t picks = atoms == 3 ? 2 : 3;
        std::vector<TokenId> pos(len);
        for (std::size_t i = 0; i < len; ++i) pos[i] = static_cast<TokenId>(i);
        std::shuffle(pos.begin(), pos.end(), rng);
        pos.resize(picks);
        std::sort(pos.begin(), pos.end());
        for (std::size_t i = 0; i < picks; ++i) {
          if (i > 0) {
            def += " + " + elastic_atom(static_cast<int>(pos[i] - pos[i - 1]) - 1, rng) + " + ";
            shape += '^';
          }
          char c = 'P';
          def += token_atom(s, pos[i], rng, c);
          shape += c;
        }
      }
      suite.queries.push_back(make_query("span-" + pad(n++), "span",
                                         {{"atoms", std::to_string(atoms)}, {"shape", shape},
                                          {"band", std::to_string(k % 3)}},
                                         "v:Str", "    v = " + def));
    }
  }
  return suite;
}

BenchmarkSuite import_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open query list " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (!j.is_array()) throw FormatError(path + ": expected a JSON array of queries");
  BenchmarkSuite suite;
  suite.name = "imported";
  suite.composition = std::to_string(j.size()) + " imported queries from " + path;
  std::size_t n = 0;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("text") || !e["text"].is_string())
      throw FormatError(path + ": query " + std::to_string(n) + " has no \"text\"");
    BenchQuery q;
    q.id = e.value("id", "imported-" + pad(n));
    q.family = e.value("family", "imported");
    if (e.contains("params") && e["params"].is_object())
      for (const auto& [k, v] : e["params"].items()) q.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
    q.text = e["text"].get<std::string>();
    q.query = parse_query(q.text);
    suite.queries.push_back(std::move(q));
    ++n;
  }
  return suite;
}

double effectiveness(std::size_t candidates, std::size_t answers) {
  if (candidates == 0) return answers == 0 ? 1.0 : 0.0;
  return std::min(1.0, static_cast<double>(answers) / static_cast<double>(candidates));
}

namespace {

std::vector<std::string> match_keys(const NormalizedQuery& n, const std::vector<Match>& ms) {
  std::vector<std::string> keys;
  for (const auto& b : named_bindings(n, ms)) {
    std::string k = std::to_string(b.sid);
    for (const auto& [name, sp] : b.vars) k += ' ' + name + '=' + std::to_string(sp.start) + '-' + std::to_string(sp.end);
    keys.push_back(std::move(k));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<SentenceId> sentences_of(const std::vector<Match>& ms) {
  std::vector<SentenceId> v;
  for (const auto& m : ms)
    if (v.empty() || v.back() != m.sid) v.push_back(m.sid);
  return v;
}

QueryReport run_one(const BenchQuery& bq, const Corpus& corpus, const IndexBundle& bundle, const BenchOptions& opt,
                    const Resources& res) {
  QueryReport r;
  r.id = bq.id;
  r.family = bq.family;
  r.params = bq.params;
  try {
    EngineOptions eo;
    MatchResult with = match_query(bq.query, corpus, bundle, eo);
    eo.use_gsp = false;
    MatchResult without = match_query(bq.query, corpus, bundle, eo);
    r.lookup_ms = with.stats.lookup_ms;
    r.match_ms = with.stats.match_ms;
    r.match_ms_no_gsp = without.stats.match_ms;
    r.candidates = with.stats.candidate_sentences;
    r.answers = with.stats.answer_sentences;
    r.tuples = with.matches.size();
    r.iterations_gsp = with.stats.iterations;
    r.iterations_no_gsp = without.stats.iterations;
    r.gsp_equal = match_keys(with.normalized, with.matches) == match_keys(without.normalized, without.matches);
    r.dpli_effectiveness = effectiveness(r.candidates, r.answers);
    auto returned = sentences_of(with.matches);
    r.final_effectiveness = effectiveness(returned.size(), r.answers);
    if (opt.oracle) {
      EvidenceEvaluator ev(corpus, res);
      auto tuples = finalize_results(ResultSpec::of(with.normalized), named_bindings(with.normalized, with.matches), ev);
      OracleResult o = oracle_evaluate(bq.query, corpus, res);
      auto d = diff_results(tuples, o.tuples);
      r.oracle_equal = !d.has_value();
      if (d) r.diff = *d;
      r.oracle_answers = o.answer_sentences.size();
      r.complete = std::includes(with.candidates.begin(), with.candidates.end(), o.answer_sentences.begin(),
                                 o.answer_sentences.end());
      // final effectiveness against the ground truth: true answers among returned sentences
      std::vector<SentenceId> common;
      std::set_intersection(returned.begin(), returned.end(), o.answer_sentences.begin(), o.answer_sentences.end(),
                            std::back_inserter(common));
      r.final_effectiveness = effectiveness(returned.size(), common.size());
    }
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

BenchReport run_suite(const BenchmarkSuite& suite, const Corpus& corpus, const IndexBundle& bundle,
                      const BenchOptions& opt) {
  BenchReport rep;
  rep.suite = suite.name;
  rep.seed = suite.seed;
  rep.composition = suite.composition;
  rep.corpus_sentences = corpus.sentence_count();
  rep.queries.resize(suite.queries.size());
  Resources res;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < suite.queries.size(); i = next++)
      rep.queries[i] = run_one(suite.queries[i], corpus, bundle, opt, res);
  };
  unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rep;
}

nlohmann::json to_json(const BenchReport& r) {
  nlohmann::json j;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["composition"] = r.composition;
  j["corpus_sentences"] = r.corpus_sentences;
  nlohmann::json qs = nlohmann::json::array();
  // per-setting aggregates: path/tree by family+length/labels, span by atom count
  std::map<std::string, std::vector<const QueryReport*>> groups;
  for (const auto& q : r.queries) {
    nlohmann::json o;
    o["id"] = q.id;
    o["family"] = q.family;
    o["params"] = q.params;
    o["lookup_ms"] = q.lookup_ms;
    o["match_ms"] = q.match_ms;
    o["match_ms_no_gsp"] = q.match_ms_no_gsp;
    o["candidates"] = q.candidates;
    o["answers"] = q.answers;
    o["tuples"] = q.tuples;
    o["effectiveness"] = q.dpli_effectiveness;
    o["final_effectiveness"] = q.final_effectiveness;
    o["iterations_gsp"] = q.iterations_gsp;
    o["iterations_no_gsp"] = q.iterations_no_gsp;
    o["gsp_equal"] = q.gsp_equal;
    if (q.oracle_equal) {
      o["oracle_equal"] = *q.oracle_equal;
      o["complete"] = q.complete.value_or(false);
      o["oracle_answers"] = q.oracle_answers.value_or(0);
    }
    if (!q.diff.empty()) o["diff"] = q.diff;
    if (!q.error.empty()) o["error"] = q.error;
    qs.push_back(std::move(o));
    std::string key = q.family;
    for (const char* p : {"length", "labels", "atoms"}) {
      auto it = q.params.find(p);
      if (it != q.params.end()) key += std::string(" ") + p + "=" + it->second;
    }
    groups[key].push_back(&q);
  }
  j["queries"] = std::move(qs);
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& [key, v] : groups) {
    std::vector<double> lookup, match, nogsp, eff, it, itn;
    for (const auto* q : v) {
      lookup.push_back(q->lookup_ms);
      match.push_back(q->match_ms);
      nogsp.push_back(q->match_ms_no_gsp);
      eff.push_back(q->dpli_effectiveness);
      it.push_back(static_cast<double>(q->iterations_gsp));
      itn.push_back(static_cast<double>(q->iterations_no_gsp));
    }
    summary.push_back({{"setting", key},
                       {"queries", v.size()},
                       {"mean_lookup_ms", mean(lookup)},
                       {"mean_match_ms", mean(match)},
                       {"mean_match_ms_no_gsp", mean(nogsp)},
                       {"mean_effectiveness", mean(eff)},
                       {"mean_iterations_gsp", mean(it)},
                       {"mean_iterations_no_gsp", mean(itn)}});
  }
  j["summary"] = std::move(summary);
  return j;
}

}  // namespace koko
