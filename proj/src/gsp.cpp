#include "koko/gsp.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "koko/labels.hpp"
#include "koko/text_util.hpp"

namespace koko {

namespace {

bool is_loopable(VarKind k) {
  return k == VarKind::Node || k == VarKind::Entity || k == VarKind::Literal || k == VarKind::Elastic;
}

bool horizontal(const NormVar& v) {
  return v.kind == VarKind::Composite && v.parts.size() > 1;
}

bool step_matches(const Step& st, const Token& tok) {
  switch (st.label.kind) {
    case StepLabel::Kind::Wildcard:
      break;
    case StepLabel::Kind::Word:
      if (tok.text != st.label.text) return false;
      break;
    case StepLabel::Kind::Name:
      if (classify_label(st.label.text) == LabelClass::PosTag) {
        if (!iequals(tok.pos, st.label.text)) return false;
      } else if (!iequals(tok.label, st.label.text)) {
        return false;
      }
      break;
  }
  for (const auto& c : st.conditions) {
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

// Backward walk over head links: step k matched at `tid`, steps before k
// matched on its ancestors. The anchor is either the virtual ROOT (base < 0)
// or the token `base`.
bool walk(const Sentence& s, const std::vector<Step>& steps, int k, TokenId tid, int base) {
  if (!step_matches(steps[k], s.token(tid))) return false;
  const auto& head = s.token(tid).head;
  if (k == 0) {
    if (base < 0) return steps[0].axis == Axis::Descendant || !head;
    if (steps[0].axis == Axis::Child) return head && static_cast<int>(*head) == base;
    for (auto h = head; h; h = s.token(*h).head)
      if (static_cast<int>(*h) == base) return true;
    return false;
  }
  if (steps[k].axis == Axis::Child) return head && walk(s, steps, k - 1, *head, base);
  for (auto h = head; h; h = s.token(*h).head)
    if (walk(s, steps, k - 1, *h, base)) return true;
  return false;
}

bool is_ancestor(const Sentence& s, TokenId anc, TokenId t) {
  for (auto h = s.token(t).head; h; h = s.token(*h).head)
    if (*h == anc) return true;
  return false;
}

enum class CheckKind { NodePath, NodeRelative, EntityDef, LiteralDef, ElasticDef, TypeCheck, ParentOf, AncestorOf, LeftOf, In, Eq };

struct Check {
  CheckKind kind;
  int a = -1;
  int b = -1;
};

enum class Mode { Loop, Subtree, Composite, Gap };

struct Level {
  int var = -1;
  Mode mode = Mode::Loop;
  int left = -1, right = -1;  // Gap neighbors, Subtree base in `left`
  std::vector<Check> checks;
};

}  // namespace

struct Executor::Schedule {
  std::vector<Level> levels;
};

std::uint64_t estimate_cost(const NormalizedQuery& n, const BindingTable& t, int var, SentenceId sid,
                            std::size_t sentence_length) {
  const auto& v = n.vars[var];
  switch (v.kind) {
    case VarKind::Elastic: {
      auto len = static_cast<std::uint64_t>(sentence_length);
      return len * (len + 1) / 2;
    }
    case VarKind::Node:
    case VarKind::Entity:
    case VarKind::Literal:
      return t.count_in(var, sid);
    case VarKind::Subtree:
      return t.count_in(n.index_of(v.of), sid);
    case VarKind::Composite:
      return 0;
  }
  return 0;
}

Executor::Executor(const NormalizedQuery& n) : n_(n) {
  neighbors_.resize(n.vars.size());
  gap_of_.assign(n.vars.size(), {-1, -1});
  for (const auto& v : n.vars) {
    if (!horizontal(v)) continue;
    for (std::size_t j = 0; j < v.parts.size(); ++j) {
      int me = n.index_of(v.parts[j]);
      if (j > 0) neighbors_[me].push_back(n.index_of(v.parts[j - 1]));
      if (j + 1 < v.parts.size()) neighbors_[me].push_back(n.index_of(v.parts[j + 1]));
      if (j > 0 && j + 1 < v.parts.size() && gap_of_[me].first < 0)
        gap_of_[me] = {n.index_of(v.parts[j - 1]), n.index_of(v.parts[j + 1])};
    }
  }
}

bool Executor::build_schedule(const std::vector<char>& skipped, Schedule& out) const {
  const auto& vars = n_.vars;
  std::size_t nv = vars.size();
  std::vector<char> bound(nv, 0);
  std::vector<int> level_of(nv, -1);
  out.levels.clear();

  auto add = [&](Level l) {
    level_of[l.var] = static_cast<int>(out.levels.size());
    bound[l.var] = 1;
    out.levels.push_back(std::move(l));
  };
  auto derive_all = [&] {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < nv; ++i) {
        if (bound[i]) continue;
        const auto& v = vars[i];
        Level l;
        l.var = static_cast<int>(i);
        if (skipped[i]) {
          auto [lft, rgt] = gap_of_[i];
          if (!bound[lft] || !bound[rgt]) continue;
          l.mode = Mode::Gap;
          l.left = lft;
          l.right = rgt;
        } else if (v.kind == VarKind::Subtree) {
          int base = n_.index_of(v.of);
          if (!bound[base]) continue;
          l.mode = Mode::Subtree;
          l.left = base;
        } else if (v.kind == VarKind::Composite) {
          bool ready = true;
          for (const auto& p : v.parts) ready = ready && bound[n_.index_of(p)];
          if (!ready) continue;
          l.mode = Mode::Composite;
        } else {
          continue;
        }
        add(std::move(l));
        changed = true;
      }
    }
  };

  derive_all();
  for (std::size_t i = 0; i < nv; ++i) {
    if (bound[i] || skipped[i] || !is_loopable(vars[i].kind)) continue;
    Level l;
    l.var = static_cast<int>(i);
    add(std::move(l));
    derive_all();
  }
  for (std::size_t i = 0; i < nv; ++i)
    if (!bound[i]) return false;

  auto attach = [&](Check c) {
    int at = level_of[c.a];
    if (c.b >= 0) at = std::max(at, level_of[c.b]);
    out.levels[at].checks.push_back(c);
  };
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& v = vars[i];
    int me = static_cast<int>(i);
    switch (v.kind) {
      case VarKind::Node:
        if (v.base)
          attach({CheckKind::NodeRelative, me, n_.index_of(*v.base)});
        else
          attach({CheckKind::NodePath, me});
        break;
      case VarKind::Entity: attach({CheckKind::EntityDef, me}); break;
      case VarKind::Literal: attach({CheckKind::LiteralDef, me}); break;
      case VarKind::Elastic: attach({CheckKind::ElasticDef, me}); break;
      default: break;
    }
    if (v.type_check) attach({CheckKind::TypeCheck, me});
  }
  for (const auto& c : n_.constraints) {
    CheckKind k = CheckKind::LeftOf;
    switch (c.kind) {
      case ConstraintKind::ParentOf: k = CheckKind::ParentOf; break;
      case ConstraintKind::AncestorOf: k = CheckKind::AncestorOf; break;
      case ConstraintKind::LeftOf: k = CheckKind::LeftOf; break;
      case ConstraintKind::In: k = CheckKind::In; break;
      case ConstraintKind::Eq: k = CheckKind::Eq; break;
    }
    attach({k, n_.index_of(c.lhs), n_.index_of(c.rhs)});
  }
  return true;
}

SkipPlan Executor::plan(const BindingTable& t, SentenceId sid, std::size_t sentence_length) const {
  SkipPlan p;
  std::size_t nv = n_.vars.size();
  p.cost.assign(nv, 0);
  std::vector<int> order;
  for (std::size_t i = 0; i < nv; ++i) {
    if (neighbors_[i].empty()) continue;
    p.cost[i] = estimate_cost(n_, t, static_cast<int>(i), sid, sentence_length);
    if (is_loopable(n_.vars[i].kind)) order.push_back(static_cast<int>(i));
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p.cost[a] > p.cost[b]; });
  std::vector<char> skipped(nv, 0);
  Schedule scratch;
  for (int v : order) {
    if (gap_of_[v].first < 0) continue;  // only at a condition boundary
    bool free = true;
    for (int nb : neighbors_[v]) free = free && !skipped[nb];
    if (!free) continue;
    skipped[v] = 1;
    if (!build_schedule(skipped, scratch)) {
      skipped[v] = 0;  // derivation would be cyclic
      continue;
    }
    p.skipped.push_back(v);
  }
  return p;
}

namespace {

class Evaluator {
 public:
  Evaluator(const NormalizedQuery& n, const BindingTable& t, const Sentence& s, const std::vector<Level>& levels)
      : n_(n), t_(t), s_(s), levels_(levels), spans_(n.vars.size()) {
    for (std::size_t i = 0; i < n.vars.size(); ++i) named_.push_back(!n.vars[i].hidden());
  }

  void run(SentenceResult& out) {
    out_ = &out;
    descend(0);
  }

 private:
  const NormalizedQuery& n_;
  const BindingTable& t_;
  const Sentence& s_;
  const std::vector<Level>& levels_;
  std::vector<Span> spans_;
  std::vector<char> named_;
  std::set<std::vector<Span>> seen_;
  SentenceResult* out_ = nullptr;

  Span mk(int start, int end) const { return Span{s_.sid(), start, end}; }

  void descend(std::size_t depth) {
    if (depth == levels_.size()) {
      emit();
      return;
    }
    const Level& l = levels_[depth];
    const auto& v = n_.vars[l.var];
    auto attempt = [&](Span sp) {
      ++out_->iterations;
      spans_[l.var] = sp;
      if (checks_pass(l)) descend(depth + 1);
    };
    switch (l.mode) {
      case Mode::Gap: {
        const Span& a = spans_[l.left];
        const Span& b = spans_[l.right];
        ++out_->iterations;
        if (b.start - 1 < a.end) return;  // neighbors overlap: no gap of size >= 0
        spans_[l.var] = mk(a.end + 1, b.start - 1);
        if (checks_pass(l)) descend(depth + 1);
        return;
      }
      case Mode::Subtree: {
        const auto& m = s_.meta()[static_cast<TokenId>(spans_[l.left].start)];
        attempt(mk(static_cast<int>(m.left), static_cast<int>(m.right)));
        return;
      }
      case Mode::Composite: {
        const Span& first = spans_[n_.index_of(v.parts.front())];
        const Span& last = spans_[n_.index_of(v.parts.back())];
        attempt(mk(first.start, last.end));
        return;
      }
      case Mode::Loop:
        break;
    }
    switch (v.kind) {
      case VarKind::Node:
        for (const auto& e : t_.nodes_in(l.var, s_.sid())) attempt(mk(static_cast<int>(e.tid), static_cast<int>(e.tid)));
        return;
      case VarKind::Entity:
      case VarKind::Literal:
        for (const auto& sp : t_.spans_in(l.var, s_.sid())) attempt(sp);
        return;
      case VarKind::Elastic: {
        int len = static_cast<int>(s_.size());
        int lo = v.elastic.min.value_or(0);
        int hi = v.elastic.max.value_or(len);
        for (int start = 0; start <= len; ++start)
          for (int size = lo; size <= hi && start + size <= len; ++size) attempt(mk(start, start + size - 1));
        return;
      }
      default:
        return;
    }
  }

  bool checks_pass(const Level& l) const {
    for (const auto& c : l.checks)
      if (!check(c)) return false;
    return true;
  }

  bool single_token(int var) const {
    return spans_[var].size() == 1;
  }

  bool check(const Check& c) const {
    const Span& a = spans_[c.a];
    switch (c.kind) {
      case CheckKind::NodePath:
        return single_token(c.a) && walk(s_, n_.vars[c.a].path.steps, static_cast<int>(n_.vars[c.a].path.steps.size()) - 1,
                                         static_cast<TokenId>(a.start), -1);
      case CheckKind::NodeRelative: {
        const auto& steps = n_.vars[c.a].rel_steps;
        return single_token(c.a) && walk(s_, steps, static_cast<int>(steps.size()) - 1, static_cast<TokenId>(a.start),
                                         spans_[c.b].start);
      }
      case CheckKind::EntityDef:
        for (const auto& m : s_.entities())
          if (m.span.start == a.start && m.span.end == a.end && entity_type_matches(n_.vars[c.a].etype, m.etype))
            return true;
        return false;
      case CheckKind::LiteralDef: {
        const auto& w = n_.vars[c.a].words;
        if (a.size() != static_cast<int>(w.size())) return false;
        for (int i = 0; i < a.size(); ++i)
          if (s_.token(static_cast<TokenId>(a.start + i)).text != w[i]) return false;
        return true;
      }
      case CheckKind::ElasticDef: {
        const auto& e = n_.vars[c.a].elastic;
        if (e.min && a.size() < *e.min) return false;
        if (e.max && a.size() > *e.max) return false;
        if (e.etype) {
          bool found = false;
          for (const auto& m : s_.entities())
            if (m.span.start == a.start && m.span.end == a.end && entity_type_matches(*e.etype, m.etype)) found = true;
          if (!found) return false;
        }
        if (e.regex && !regex_full_match(*e.regex, s_.text(a.start, a.end))) return false;
        return true;
      }
      case CheckKind::TypeCheck: {
        if (a.empty()) return false;
        for (const auto& m : s_.entities())
          if (m.span.start <= a.start && a.end <= m.span.end && entity_type_matches(*n_.vars[c.a].type_check, m.etype))
            return true;
        return false;
      }
      case CheckKind::ParentOf: {
        const Span& b = spans_[c.b];
        if (!single_token(c.a) || !single_token(c.b)) return false;
        const auto& h = s_.token(static_cast<TokenId>(b.start)).head;
        return h && static_cast<int>(*h) == a.start;
      }
      case CheckKind::AncestorOf: {
        const Span& b = spans_[c.b];
        if (!single_token(c.a) || !single_token(c.b)) return false;
        return is_ancestor(s_, static_cast<TokenId>(a.start), static_cast<TokenId>(b.start));
      }
      case CheckKind::LeftOf:
        return a.end + 1 == spans_[c.b].start;
      case CheckKind::In: {
        const Span& b = spans_[c.b];
        return a.start >= b.start && a.end <= b.end;
      }
      case CheckKind::Eq: {
        const Span& b = spans_[c.b];
        return a.start == b.start && a.end == b.end;
      }
    }
    return false;
  }

  void emit() {
    std::vector<Span> key;
    for (std::size_t i = 0; i < spans_.size(); ++i)
      if (named_[i]) key.push_back(spans_[i]);
    if (!seen_.insert(std::move(key)).second) return;
    out_->matches.push_back({s_.sid(), spans_});
  }
};

}  // namespace

SentenceResult Executor::evaluate(const Sentence& s, const BindingTable& t, const SkipPlan& plan) const {
  std::vector<char> skipped(n_.vars.size(), 0);
  for (int v : plan.skipped) skipped[v] = 1;
  Schedule sched;
  SentenceResult out;
  out.plan = plan;
  if (!build_schedule(skipped, sched)) {
    std::fill(skipped.begin(), skipped.end(), 0);
    build_schedule(skipped, sched);
    out.plan.skipped.clear();
  }
  Evaluator(n_, t, s, sched.levels).run(out);
  return out;
}

SentenceResult Executor::run(const Sentence& s, const BindingTable& t, bool use_gsp) const {
  SkipPlan p;
  if (use_gsp)
    p = plan(t, s.sid(), s.size());
  else
    p.cost.assign(n_.vars.size(), 0);
  return evaluate(s, t, p);
}

std::string explain_gsp(const NormalizedQuery& n, const SentenceResult& with_gsp, const SentenceResult& without,
                        SentenceId sid) {
  std::ostringstream out;
  out << "sentence " << sid << "\n  costs:";
  for (std::size_t i = 0; i < n.vars.size(); ++i)
    if (i < with_gsp.plan.cost.size() && with_gsp.plan.cost[i] > 0) out << " " << n.vars[i].name << "=" << with_gsp.plan.cost[i];
  out << "\n  skip:";
  for (int v : with_gsp.plan.skipped) out << " " << n.vars[v].name;
  out << "\n  iterations: " << with_gsp.iterations << " (without skipping: " << without.iterations << ")\n";
  out << "  tuples: " << with_gsp.matches.size() << "\n";
  return out.str();
}

}  // namespace koko
