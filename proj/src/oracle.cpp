#include "koko/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <thread>

#include "koko/error.hpp"
#include "koko/labels.hpp"
#include "koko/text_util.hpp"

namespace koko {

namespace {

// Positions 0..n of a sentence as a bit set.
class Bits {
 public:
  explicit Bits(std::size_t n = 0) : n_(n), w_((n + 63) / 64, 0) {}
  void set(std::size_t i) { w_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return i < n_ && (w_[i / 64] >> (i % 64)) & 1; }
  void set_range(std::size_t a, std::size_t b) {  // inclusive
    for (std::size_t i = a; i <= b && i < n_; ++i) set(i);
  }
  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }
  Bits& operator|=(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  template <typename F>
  void each(F f) const {
    for (std::size_t k = 0; k < w_.size(); ++k)
      for (std::uint64_t w = w_[k]; w; w &= w - 1) f(k * 64 + static_cast<std::size_t>(__builtin_ctzll(w)));
  }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> w_;
};

bool label_ok(const StepLabel& l, const Token& tok) {
  if (l.kind == StepLabel::Kind::Wildcard) return true;
  if (l.kind == StepLabel::Kind::Word) return tok.text == l.text;
  return classify_label(l.text) == LabelClass::PosTag ? iequals(tok.pos, l.text) : iequals(tok.label, l.text);
}

bool conditions_ok(const std::vector<NodeCondition>& cs, const Token& tok) {
  for (const auto& c : cs) {
    switch (c.key) {
      case NodeCondition::Key::Text:
        if (tok.text != c.value) return false;
        break;
      case NodeCondition::Key::Pos:
        if (!iequals(tok.pos, c.value)) return false;
        break;
      case NodeCondition::Key::Etype:
        if (!tok.etype || !entity_type_matches(c.value, *tok.etype)) return false;
        break;
      case NodeCondition::Key::Regex:
        if (!regex_full_match(c.value, tok.text)) return false;
        break;
    }
  }
  return true;
}

// Variables a definition depends on.
void refs_of(const SpanExpr& e, std::set<std::string>& out) {
  for (const auto& a : e) {
    if (auto* p = std::get_if<PathExpr>(&a)) {
      if (p->base) out.insert(*p->base);
    } else if (auto* v = std::get_if<VarRef>(&a)) {
      out.insert(v->name);
    } else if (auto* s = std::get_if<SubtreeRef>(&a)) {
      out.insert(s->var);
    }
  }
}

std::set<std::string> refs_of(const VarDef& d) {
  std::set<std::string> out;
  if (auto* p = std::get_if<PathExpr>(&d.def)) {
    if (p->base) out.insert(*p->base);
  } else {
    refs_of(std::get<SpanExpr>(d.def), out);
  }
  return out;
}

struct Item {
  std::string name;
  const VarDef* def = nullptr;  // null: entity variable
  std::string etype;            // entity type, or the type checked for a typed definition
  bool named = true;
};

class SentenceOracle {
 public:
  SentenceOracle(const Query& q, const std::vector<Item>& items, const Sentence& s)
      : q_(q), items_(items), s_(s), n_(s.size()) {}

  std::vector<Binding> run() {
    if (!prefilter()) return {};
    descend(0);
    return std::move(out_);
  }

 private:
  const Query& q_;
  const std::vector<Item>& items_;
  const Sentence& s_;
  std::size_t n_;
  std::map<std::string, Span> bound_;
  std::set<std::vector<Span>> seen_;
  std::vector<Binding> out_;
  std::map<const PathExpr*, std::vector<char>> abs_cache_;
  std::map<const ElasticAtom*, std::vector<Bits>> elastic_cache_;

  // Tokens reached from `anchor` (-1: above the sentence root).
  std::vector<char> reach(const std::vector<Step>& steps, int anchor) const {
    std::vector<char> cur(n_, 0);
    bool at_virtual = anchor < 0;
    if (!at_virtual) cur[anchor] = 1;
    for (const auto& st : steps) {
      std::vector<char> next(n_, 0);
      auto visit = [&](TokenId from_child) {
        // from_child: a token one level below the current context
        std::vector<TokenId> stack{from_child};
        while (!stack.empty()) {
          TokenId t = stack.back();
          stack.pop_back();
          if (label_ok(st.label, s_.token(t)) && conditions_ok(st.conditions, s_.token(t))) next[t] = 1;
          if (st.axis == Axis::Descendant)
            for (TokenId c : s_.children(t)) stack.push_back(c);
        }
      };
      if (at_virtual) {
        if (n_ > 0) visit(s_.root_tid());
        at_virtual = false;
      } else {
        for (TokenId t = 0; t < n_; ++t)
          if (cur[t])
            for (TokenId c : s_.children(t)) visit(c);
      }
      cur = std::move(next);
    }
    return cur;
  }

  const std::vector<char>& absolute(const PathExpr& p) {
    auto it = abs_cache_.find(&p);
    if (it == abs_cache_.end()) it = abs_cache_.emplace(&p, reach(p.steps, -1)).first;
    return it->second;
  }

  // nullopt when the base is unbound or not a single token.
  std::optional<std::vector<char>> path_tokens(const PathExpr& p) {
    if (!p.base) return absolute(p);
    auto it = bound_.find(*p.base);
    if (it == bound_.end() || it->second.size() != 1) return std::nullopt;
    return reach(p.steps, it->second.start);
  }

  bool is_mention(int a, int b, const std::string& type) const {
    for (const auto& m : s_.entities())
      if (m.span.start == a && m.span.end == b && entity_type_matches(type, m.etype)) return true;
    return false;
  }

  bool within_mention(const Span& sp, const std::string& type) const {
    if (sp.empty()) return false;
    for (const auto& m : s_.entities())
      if (m.span.start <= sp.start && sp.end <= m.span.end && entity_type_matches(type, m.etype)) return true;
    return false;
  }

  const std::vector<Bits>& elastic_next(const ElasticAtom& e) {
    auto it = elastic_cache_.find(&e);
    if (it != elastic_cache_.end()) return it->second;
    std::vector<Bits> next(n_ + 1, Bits(n_ + 1));
    for (std::size_t p = 0; p <= n_; ++p) {
      std::size_t lo = static_cast<std::size_t>(e.min.value_or(0));
      std::size_t hi = e.max ? static_cast<std::size_t>(*e.max) : n_;
      for (std::size_t sz = lo; sz <= hi && p + sz <= n_; ++sz) {
        int a = static_cast<int>(p), b = static_cast<int>(p + sz) - 1;
        if (e.etype && !is_mention(a, b, *e.etype)) continue;
        if (e.regex && !regex_full_match(*e.regex, s_.text(a, b))) continue;
        next[p].set(p + sz);
      }
    }
    return elastic_cache_.emplace(&e, std::move(next)).first->second;
  }

  // Positions reachable after matching atom `a` from any position in `from`.
  Bits advance(const SpanAtom& a, const Bits& from) {
    Bits to(n_ + 1);
    if (auto* p = std::get_if<PathExpr>(&a)) {
      auto toks = path_tokens(*p);
      if (!toks) return to;
      from.each([&](std::size_t i) {
        if (i < n_ && (*toks)[i]) to.set(i + 1);
      });
    } else if (auto* v = std::get_if<VarRef>(&a)) {
      auto it = bound_.find(v->name);
      if (it != bound_.end() && from.test(static_cast<std::size_t>(it->second.start)))
        to.set(static_cast<std::size_t>(it->second.end + 1));
    } else if (auto* st = std::get_if<SubtreeRef>(&a)) {
      auto it = bound_.find(st->var);
      if (it != bound_.end() && it->second.size() == 1) {
        const auto& m = s_.meta()[static_cast<TokenId>(it->second.start)];
        if (from.test(m.left)) to.set(m.right + 1);
      }
    } else if (auto* lit = std::get_if<TokenLiteral>(&a)) {
      const auto& w = lit->words;
      from.each([&](std::size_t i) {
        if (i + w.size() > n_) return;
        for (std::size_t k = 0; k < w.size(); ++k)
          if (s_.token(static_cast<TokenId>(i + k)).text != w[k]) return;
        to.set(i + w.size());
      });
    } else {
      const auto& e = std::get<ElasticAtom>(a);
      if (!e.regex && !e.etype && !e.max) {
        // unbounded: everything from the first start plus min
        std::size_t first = n_ + 1;
        from.each([&](std::size_t i) { first = std::min(first, i); });
        if (first <= n_) to.set_range(first + static_cast<std::size_t>(e.min.value_or(0)), n_);
      } else {
        const auto& next = elastic_next(e);
        from.each([&](std::size_t i) { to |= next[i]; });
      }
    }
    return to;
  }

  std::vector<Span> spans_of(const SpanExpr& e) {
    std::vector<Span> out;
    for (std::size_t start = 0; start <= n_; ++start) {
      Bits cur(n_ + 1);
      cur.set(start);
      for (const auto& a : e) {
        cur = advance(a, cur);
        if (!cur.any()) break;
      }
      cur.each([&](std::size_t end1) {
        out.push_back(Span{s_.sid(), static_cast<int>(start), static_cast<int>(end1) - 1});
      });
    }
    return out;
  }

  // Atoms that need no binding must occur somewhere for anything to match.
  bool prefilter() {
    auto atoms_ok = [&](const SpanExpr& e) {
      for (const auto& a : e) {
        if (auto* p = std::get_if<PathExpr>(&a)) {
          if (!p->base) {
            const auto& t = absolute(*p);
            if (std::find(t.begin(), t.end(), 1) == t.end()) return false;
          }
        } else if (std::holds_alternative<TokenLiteral>(a)) {
          Bits all(n_ + 1);
          all.set_range(0, n_);
          if (!advance(a, all).any()) return false;
        }
      }
      return true;
    };
    for (const auto& it : items_) {
      if (!it.def) {
        bool any = false;
        for (const auto& m : s_.entities()) any = any || entity_type_matches(it.etype, m.etype);
        if (!any) return false;
        continue;
      }
      if (auto* p = std::get_if<PathExpr>(&it.def->def)) {
        if (!p->base) {
          const auto& t = absolute(*p);
          if (std::find(t.begin(), t.end(), 1) == t.end()) return false;
        }
      } else if (!atoms_ok(std::get<SpanExpr>(it.def->def))) {
        return false;
      }
    }
    for (const auto& c : q_.extract.constraints)
      if (!atoms_ok(c.lhs) || !atoms_ok(c.rhs)) return false;
    return true;
  }

  std::vector<Span> candidates(const Item& it) {
    std::vector<Span> out;
    if (!it.def) {
      for (const auto& m : s_.entities())
        if (entity_type_matches(it.etype, m.etype)) out.push_back(Span{s_.sid(), m.span.start, m.span.end});
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    if (auto* p = std::get_if<PathExpr>(&it.def->def)) {
      auto toks = path_tokens(*p);
      if (toks)
        for (std::size_t t = 0; t < n_; ++t)
          if ((*toks)[t]) out.push_back(Span{s_.sid(), static_cast<int>(t), static_cast<int>(t)});
    } else {
      out = spans_of(std::get<SpanExpr>(it.def->def));
    }
    if (!it.etype.empty()) std::erase_if(out, [&](const Span& sp) { return !within_mention(sp, it.etype); });
    return out;
  }

  bool constraints_hold() {
    for (const auto& c : q_.extract.constraints) {
      auto lhs = spans_of(c.lhs);
      if (lhs.empty()) return false;
      auto rhs = spans_of(c.rhs);
      bool ok = false;
      for (const auto& a : lhs) {
        for (const auto& b : rhs) {
          ok = c.kind == SpanConstraint::Kind::Eq ? (a.start == b.start && a.end == b.end)
                                                  : (a.start >= b.start && a.end <= b.end);
          if (ok) break;
        }
        if (ok) break;
      }
      if (!ok) return false;
    }
    return true;
  }

  void descend(std::size_t i) {
    if (i == items_.size()) {
      if (!constraints_hold()) return;
      std::vector<Span> key;
      Binding b;
      b.sid = s_.sid();
      for (const auto& it : items_) {
        if (!it.named) continue;
        key.push_back(bound_.at(it.name));
        b.vars.emplace_back(it.name, bound_.at(it.name));
      }
      if (seen_.insert(std::move(key)).second) out_.push_back(std::move(b));
      return;
    }
    const Item& it = items_[i];
    for (const auto& sp : candidates(it)) {
      bound_[it.name] = sp;
      descend(i + 1);
    }
    bound_.erase(it.name);
  }
};

std::vector<Item> binding_order(const Query& q) {
  std::vector<const VarDef*> defs;
  for (const auto& b : q.extract.blocks)
    for (const auto& d : b.defs) defs.push_back(&d);
  auto defined = [&](const std::string& name) {
    return std::any_of(defs.begin(), defs.end(), [&](const VarDef* d) { return d->name == name; });
  };
  std::vector<Item> items;
  std::set<std::string> ready;
  for (const auto& o : q.outputs) {
    if (defined(o.name) || o.is_str()) continue;
    items.push_back({o.name, nullptr, o.type, true});
    ready.insert(o.name);
  }
  auto output_type = [&](const std::string& name) -> std::string {
    for (const auto& o : q.outputs)
      if (o.name == name && !o.is_str()) return o.type;
    return "";
  };
  std::vector<char> placed(defs.size(), 0);
  for (std::size_t round = 0; round < defs.size(); ++round) {
    for (std::size_t k = 0; k < defs.size(); ++k) {
      if (placed[k]) continue;
      auto refs = refs_of(*defs[k]);
      if (!std::all_of(refs.begin(), refs.end(), [&](const std::string& r) { return ready.count(r) > 0; })) continue;
      placed[k] = 1;
      ready.insert(defs[k]->name);
      items.push_back({defs[k]->name, defs[k], output_type(defs[k]->name), defs[k]->name.rfind("__", 0) != 0});
      break;
    }
  }
  for (std::size_t k = 0; k < defs.size(); ++k)
    if (!placed[k]) throw QueryError("variable '" + defs[k]->name + "' depends on an undefined variable");
  return items;
}

}  // namespace

std::vector<Binding> oracle_match(const Query& q, const Corpus& corpus, unsigned jobs) {
  const auto items = binding_order(q);
  const std::size_t total = corpus.sentence_count();
  std::vector<std::vector<Binding>> per(total);
  auto work = [&](std::size_t from, std::size_t to) {
    for (std::size_t sid = from; sid < to; ++sid) {
      const Sentence& s = corpus.sentence(static_cast<SentenceId>(sid));
      per[sid] = SentenceOracle(q, items, s).run();
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1 || total < 2 * jobs) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (total + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
      std::size_t from = j * chunk, to = std::min(total, from + chunk);
      if (from < to) pool.emplace_back(work, from, to);
    }
    for (auto& th : pool) th.join();
  }
  std::vector<Binding> out;
  for (auto& v : per)
    for (auto& b : v) out.push_back(std::move(b));
  return out;
}

OracleResult oracle_evaluate(const Query& q, const Corpus& corpus, const Resources& res, const EvidenceConfig& config,
                             unsigned jobs) {
  OracleResult r;
  r.bindings = oracle_match(q, corpus, jobs);
  for (const auto& b : r.bindings)
    if (r.answer_sentences.empty() || r.answer_sentences.back() != b.sid) r.answer_sentences.push_back(b.sid);
  EvidenceEvaluator ev(corpus, res, config);
  r.tuples = finalize_results(ResultSpec::of(q), r.bindings, ev);
  return r;
}

std::string tuple_key(const ResultTuple& t) {
  std::string k = std::to_string(t.sid);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    k += '\t' + t.values[i];
    if (i < t.spans.size()) k += '@' + std::to_string(t.spans[i].start) + '-' + std::to_string(t.spans[i].end);
  }
  for (const auto& s : t.scores) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", s.total);
    k += std::string("\t") + s.var + '=' + buf;
  }
  k += t.passed ? "\tpass" : "\tfail";
  if (!t.exclusion.empty()) k += "\texcluded:" + t.exclusion;
  return k;
}

std::optional<std::string> diff_results(const std::vector<ResultTuple>& engine, const std::vector<ResultTuple>& oracle) {
  std::vector<std::string> a, b;
  for (const auto& t : engine) a.push_back(tuple_key(t));
  for (const auto& t : oracle) b.push_back(tuple_key(t));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size() && a[i] == b[j]) ++i, ++j;
  if (i == a.size() && j == b.size()) return std::nullopt;
  if (j == b.size() || (i < a.size() && a[i] < b[j])) return "engine only: " + a[i];
  return "oracle only: " + b[j];
}

}  // namespace koko
