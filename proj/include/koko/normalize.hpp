#pragma once

#include <optional>
#include <string>
#include <vector>

#include "koko/ast.hpp"

namespace koko {

enum class VarKind {
  Node,       ///< a dependency-tree token reached by a path
  Entity,     ///< an entity mention (output variable without a definition)
  Literal,    ///< a quoted token sequence
  Elastic,    ///< `^`: zero or more tokens
  Subtree,    ///< the subtree extent of a node variable
  Composite,  ///< concatenation of adjacent parts (a horizontal condition)
};

const char* to_string(VarKind k);

struct NormVar {
  std::string name;
  VarKind kind = VarKind::Node;

  /// Node: absolute path from ROOT (steps of the base followed by the relative steps).
  PathExpr path;
  /// Node with a variable base: the base name and the steps relative to it.
  std::optional<std::string> base;
  std::vector<Step> rel_steps;

  std::string etype;               ///< Entity
  std::vector<std::string> words;  ///< Literal
  ElasticAtom elastic;             ///< Elastic
  std::string of;                  ///< Subtree: the node variable
  std::vector<std::string> parts;  ///< Composite, left to right

  /// Typed output variable with a definition: its span must lie inside a mention of this type.
  std::optional<std::string> type_check;

  bool hidden() const { return name.rfind("__", 0) == 0; }
  bool operator==(const NormVar&) const = default;
};

enum class ConstraintKind { ParentOf, AncestorOf, LeftOf, In, Eq };

const char* to_string(ConstraintKind k);

struct NormConstraint {
  ConstraintKind kind = ConstraintKind::LeftOf;
  std::string lhs;
  std::string rhs;

  bool operator==(const NormConstraint&) const = default;
};

struct NormalizedQuery {
  std::vector<OutputVar> outputs;
  std::string source;
  /// Dependency order: every variable appears after the variables it refers to.
  std::vector<NormVar> vars;
  std::vector<NormConstraint> constraints;
  std::vector<SatisfyingClause> satisfying;
  std::vector<SatCondition> excluding;

  int index_of(const std::string& name) const;
  const NormVar& var(const std::string& name) const;
  /// True when the extract clause defines nothing and constrains nothing.
  bool trivial_extract() const;

  bool operator==(const NormalizedQuery&) const = default;
};

/// Absolute paths, explicit parentOf/ancestorOf/leftOf/in/eq constraints,
/// and synthesized hidden variables (`__v<k>` elastic, `__p<k>` path atom,
/// `__w<k>` literal, `__t<k>` subtree, `__c<k>` constraint operand).
/// Throws QueryError when a variable cannot be resolved.
NormalizedQuery normalize(const Query& q);

/// The constraint list used by validation.
const std::vector<NormConstraint>& derived_constraints(const NormalizedQuery& n);

/// Rebuilds a query from a normalized form; normalize(to_query(n)) == n.
Query to_query(const NormalizedQuery& n);

/// Stable text layout printed by `koko explain --stage normalize`.
std::string explain_normalized(const NormalizedQuery& n);

}  // namespace koko
