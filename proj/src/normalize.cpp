#include "koko/normalize.hpp"

#include <map>
#include <set>
#include <sstream>

#include "koko/error.hpp"
#include "koko/parser.hpp"
#include "koko/text_util.hpp"

namespace koko {

const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::Node: return "node";
    case VarKind::Entity: return "entity";
    case VarKind::Literal: return "literal";
    case VarKind::Elastic: return "elastic";
    case VarKind::Subtree: return "subtree";
    case VarKind::Composite: return "composite";
  }
  return "?";
}

const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::ParentOf: return "parentOf";
    case ConstraintKind::AncestorOf: return "ancestorOf";
    case ConstraintKind::LeftOf: return "leftOf";
    case ConstraintKind::In: return "in";
    case ConstraintKind::Eq: return "eq";
  }
  return "?";
}

int NormalizedQuery::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

const NormVar& NormalizedQuery::var(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw QueryError("unknown variable '" + name + "'");
  return vars[i];
}

bool NormalizedQuery::trivial_extract() const {
  if (!constraints.empty()) return false;
  for (const auto& v : vars)
    if (v.kind != VarKind::Entity) return false;
  return true;
}

namespace {

class Normalizer {
 public:
  explicit Normalizer(const Query& q) : q_(q) {}

  NormalizedQuery run() {
    n_.outputs = q_.outputs;
    n_.source = q_.source;
    n_.satisfying = q_.satisfying;
    n_.excluding = q_.excluding;

    std::set<std::string> defined;
    for (const auto& b : q_.extract.blocks)
      for (const auto& d : b.defs) defined.insert(d.name);

    for (const auto& o : q_.outputs) {
      if (defined.count(o.name)) continue;
      if (o.is_str()) throw QueryError("output variable '" + o.name + "' of type Str has no definition");
      NormVar v;
      v.name = o.name;
      v.kind = VarKind::Entity;
      v.etype = o.type;
      add(std::move(v));
    }

    for (const auto& b : q_.extract.blocks)
      for (const auto& d : b.defs) define(d);

    // Constraint operands first, then the constraints themselves, so that a
    // second normalization (where the operands are ordinary definitions)
    // produces the same constraint order.
    std::vector<std::pair<std::string, std::string>> operands;
    for (const auto& c : q_.extract.constraints) operands.emplace_back(operand(c.lhs), operand(c.rhs));
    for (std::size_t i = 0; i < operands.size(); ++i) {
      auto kind = q_.extract.constraints[i].kind == SpanConstraint::Kind::In ? ConstraintKind::In : ConstraintKind::Eq;
      n_.constraints.push_back({kind, operands[i].first, operands[i].second});
    }

    for (const auto& s : q_.satisfying) require(s.var);
    for (const auto& c : q_.excluding) require(c.var);
    return std::move(n_);
  }

 private:
  const Query& q_;
  NormalizedQuery n_;
  std::map<char, int> counters_;

  std::string fresh(char prefix) {
    std::string name;
    do {
      name = std::string("__") + prefix + std::to_string(++counters_[prefix]);
    } while (n_.index_of(name) >= 0 || declared(name));
    return name;
  }

  bool declared(const std::string& name) const {
    for (const auto& b : q_.extract.blocks)
      for (const auto& d : b.defs)
        if (d.name == name) return true;
    return false;
  }

  const NormVar& require(const std::string& name) const {
    int i = n_.index_of(name);
    if (i < 0) throw QueryError("variable '" + name + "' is used before it is defined");
    return n_.vars[i];
  }

  void add(NormVar v) {
    if (n_.index_of(v.name) >= 0) throw QueryError("variable '" + v.name + "' is defined twice");
    for (const auto& o : q_.outputs)
      if (o.name == v.name && !o.is_str() && v.kind != VarKind::Entity) v.type_check = o.type;
    n_.vars.push_back(std::move(v));
  }

  NormVar node_var(const std::string& name, const PathExpr& p) {
    NormVar v;
    v.name = name;
    v.kind = VarKind::Node;
    if (p.steps.empty()) throw QueryError("empty path for '" + name + "'");
    if (p.base) {
      const NormVar& base = require(*p.base);
      if (base.kind != VarKind::Node)
        throw QueryError("path base '" + *p.base + "' of '" + name + "' is not a node variable");
      v.base = *p.base;
      v.rel_steps = p.steps;
      v.path.steps = base.path.steps;
      v.path.steps.insert(v.path.steps.end(), p.steps.begin(), p.steps.end());
    } else {
      v.path.steps = p.steps;
    }
    return v;
  }

  void add_node(const std::string& name, const PathExpr& p) {
    NormVar v = node_var(name, p);
    std::optional<NormConstraint> c;
    if (v.base) {
      bool direct = v.rel_steps.size() == 1 && v.rel_steps[0].axis == Axis::Child;
      c = NormConstraint{direct ? ConstraintKind::ParentOf : ConstraintKind::AncestorOf, *v.base, name};
    }
    add(std::move(v));
    if (c) n_.constraints.push_back(*c);
  }

  // Variable standing for one atom of a multi-atom span expression.
  std::string atom_var(const SpanAtom& a) {
    if (auto* r = std::get_if<VarRef>(&a)) {
      require(r->name);
      return r->name;
    }
    if (auto* p = std::get_if<PathExpr>(&a)) {
      std::string name = fresh('p');
      add_node(name, *p);
      return name;
    }
    if (auto* s = std::get_if<SubtreeRef>(&a)) {
      std::string name = fresh('t');
      add_single(name, a);
      (void)s;
      return name;
    }
    if (std::holds_alternative<TokenLiteral>(a)) {
      std::string name = fresh('w');
      add_single(name, a);
      return name;
    }
    std::string name = fresh('v');
    add_single(name, a);
    return name;
  }

  // A definition whose span expression is a single atom.
  void add_single(const std::string& name, const SpanAtom& a) {
    NormVar v;
    v.name = name;
    if (auto* p = std::get_if<PathExpr>(&a)) {
      add_node(name, *p);
      return;
    }
    if (auto* r = std::get_if<VarRef>(&a)) {
      require(r->name);
      v.kind = VarKind::Composite;
      v.parts = {r->name};
    } else if (auto* s = std::get_if<SubtreeRef>(&a)) {
      const NormVar& base = require(s->var);
      if (base.kind != VarKind::Node) throw QueryError("subtree of '" + s->var + "' which is not a node variable");
      v.kind = VarKind::Subtree;
      v.of = s->var;
    } else if (auto* l = std::get_if<TokenLiteral>(&a)) {
      v.kind = VarKind::Literal;
      v.words = l->words;
    } else {
      v.kind = VarKind::Elastic;
      v.elastic = std::get<ElasticAtom>(a);
    }
    add(std::move(v));
  }

  void add_composite(const std::string& name, const SpanExpr& e) {
    std::vector<std::string> parts;
    for (const auto& a : e) parts.push_back(atom_var(a));
    NormVar v;
    v.name = name;
    v.kind = VarKind::Composite;
    v.parts = parts;
    add(std::move(v));
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
      n_.constraints.push_back({ConstraintKind::LeftOf, parts[i], parts[i + 1]});
  }

  void define(const VarDef& d) {
    if (auto* p = std::get_if<PathExpr>(&d.def)) {
      add_node(d.name, *p);
      return;
    }
    const auto& e = std::get<SpanExpr>(d.def);
    if (e.empty()) throw QueryError("empty definition of '" + d.name + "'");
    if (e.size() == 1)
      add_single(d.name, e[0]);
    else
      add_composite(d.name, e);
  }

  std::string operand(const SpanExpr& e) {
    if (e.empty()) throw QueryError("empty constraint operand");
    if (e.size() == 1) {
      if (auto* r = std::get_if<VarRef>(&e[0])) {
        require(r->name);
        return r->name;
      }
      return atom_var(e[0]);
    }
    std::string name = fresh('c');
    add_composite(name, e);
    return name;
  }
};

}  // namespace

NormalizedQuery normalize(const Query& q) {
  return Normalizer(q).run();
}

const std::vector<NormConstraint>& derived_constraints(const NormalizedQuery& n) {
  return n.constraints;
}

Query to_query(const NormalizedQuery& n) {
  Query q;
  q.outputs = n.outputs;
  q.source = n.source;
  q.satisfying = n.satisfying;
  q.excluding = n.excluding;
  Block b;
  for (const auto& v : n.vars) {
    VarDef d;
    d.name = v.name;
    switch (v.kind) {
      case VarKind::Entity:
        continue;
      case VarKind::Node: {
        PathExpr p;
        if (v.base) {
          p.base = v.base;
          p.steps = v.rel_steps;
        } else {
          p.steps = v.path.steps;
        }
        d.def = p;
        break;
      }
      case VarKind::Literal:
        d.def = SpanExpr{TokenLiteral{v.words}};
        break;
      case VarKind::Elastic:
        d.def = SpanExpr{v.elastic};
        break;
      case VarKind::Subtree:
        d.def = SpanExpr{SubtreeRef{v.of}};
        break;
      case VarKind::Composite: {
        SpanExpr e;
        for (const auto& p : v.parts) e.push_back(VarRef{p});
        d.def = e;
        break;
      }
    }
    b.defs.push_back(std::move(d));
  }
  if (!b.defs.empty()) q.extract.blocks.push_back(std::move(b));
  for (const auto& c : n.constraints) {
    if (c.kind != ConstraintKind::In && c.kind != ConstraintKind::Eq) continue;
    SpanConstraint sc;
    sc.kind = c.kind == ConstraintKind::In ? SpanConstraint::Kind::In : SpanConstraint::Kind::Eq;
    sc.lhs = {VarRef{c.lhs}};
    sc.rhs = {VarRef{c.rhs}};
    q.extract.constraints.push_back(std::move(sc));
  }
  return q;
}

std::string explain_normalized(const NormalizedQuery& n) {
  std::ostringstream out;
  out << "variables:\n";
  for (const auto& v : n.vars) {
    out << "  " << v.name << " " << to_string(v.kind) << " ";
    switch (v.kind) {
      case VarKind::Node:
        out << to_string(v.path);
        if (v.base) out << " (from " << v.base.value() << ": " << to_string(PathExpr{std::nullopt, v.rel_steps}) << ")";
        break;
      case VarKind::Entity:
        out << v.etype;
        break;
      case VarKind::Literal: {
        std::string joined;
        for (std::size_t i = 0; i < v.words.size(); ++i) joined += (i ? " " : "") + v.words[i];
        out << quote(joined);
        break;
      }
      case VarKind::Elastic:
        out << to_string(SpanExpr{v.elastic});
        break;
      case VarKind::Subtree:
        out << v.of << ".subtree";
        break;
      case VarKind::Composite:
        for (std::size_t i = 0; i < v.parts.size(); ++i) out << (i ? " + " : "") << v.parts[i];
        break;
    }
    if (v.type_check) out << " :" << *v.type_check;
    out << "\n";
  }
  out << "constraints:\n";
  for (const auto& c : n.constraints) out << "  " << c.lhs << " " << to_string(c.kind) << " " << c.rhs << "\n";
  return out.str();
}

}  // namespace koko
