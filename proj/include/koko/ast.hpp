#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace koko {

enum class Axis { Child, Descendant };

struct NodeCondition {
  enum class Key { Regex, Pos, Etype, Text };
  Key key = Key::Text;
  std::string value;

  bool operator==(const NodeCondition&) const = default;
};

struct StepLabel {
  enum class Kind {
    Name,      ///< bare identifier: parse label or POS tag
    Word,      ///< quoted token
    Wildcard,  ///< *
  };
  Kind kind = Kind::Wildcard;
  std::string text;

  bool operator==(const StepLabel&) const = default;
};

struct Step {
  Axis axis = Axis::Child;
  StepLabel label;
  std::vector<NodeCondition> conditions;

  bool operator==(const Step&) const = default;
};

/// `//verb/dobj`, `a/dobj`, `b//"delicious"`. A missing base means the block anchor (ROOT).
struct PathExpr {
  std::optional<std::string> base;
  std::vector<Step> steps;

  bool operator==(const PathExpr&) const = default;
};

struct VarRef {
  std::string name;
  bool operator==(const VarRef&) const = default;
};

struct SubtreeRef {
  std::string var;
  bool operator==(const SubtreeRef&) const = default;
};

struct TokenLiteral {
  std::vector<std::string> words;
  bool operator==(const TokenLiteral&) const = default;
};

/// `^` with optional conditions. An unset max means "up to the sentence end".
struct ElasticAtom {
  std::optional<std::string> regex;
  std::optional<int> min;
  std::optional<int> max;
  std::optional<std::string> etype;

  bool operator==(const ElasticAtom&) const = default;
};

using SpanAtom = std::variant<PathExpr, VarRef, SubtreeRef, TokenLiteral, ElasticAtom>;
using SpanExpr = std::vector<SpanAtom>;

struct VarDef {
  std::string name;
  std::variant<PathExpr, SpanExpr> def;

  bool is_node() const { return std::holds_alternative<PathExpr>(def); }
  bool operator==(const VarDef&) const = default;
};

/// `/ROOT:{ ... }`
struct Block {
  std::vector<VarDef> defs;
  bool operator==(const Block&) const = default;
};

struct SpanConstraint {
  enum class Kind { In, Eq };
  Kind kind = Kind::In;
  SpanExpr lhs;
  SpanExpr rhs;

  bool operator==(const SpanConstraint&) const = default;
};

struct ExtractClause {
  std::vector<Block> blocks;
  std::vector<SpanConstraint> constraints;

  bool empty() const { return blocks.empty() && constraints.empty(); }
  bool operator==(const ExtractClause&) const = default;
};

enum class CondKind {
  Contains,         ///< str(x) contains "s"
  Mentions,         ///< str(x) mentions "s"
  Matches,          ///< str(x) matches "re"
  InDict,           ///< str(x) in dict("Name")
  FollowedBy,       ///< x "s"
  PrecededBy,       ///< "s" x
  Near,             ///< x near "s"
  SimilarTo,        ///< x similarTo "s"  (alias: ~)
  DescriptorRight,  ///< x [["d"]]
  DescriptorLeft,   ///< [["d"]] x
};

const char* to_string(CondKind k);

struct SatCondition {
  CondKind kind = CondKind::Contains;
  std::string var;
  std::string arg;

  bool is_boolean() const;
  bool operator==(const SatCondition&) const = default;
};

struct WeightedCondition {
  SatCondition cond;
  double weight = 1.0;

  bool operator==(const WeightedCondition&) const = default;
};

struct SatisfyingClause {
  std::string var;
  std::vector<WeightedCondition> conditions;
  std::optional<double> threshold;

  bool operator==(const SatisfyingClause&) const = default;
};

struct OutputVar {
  std::string name;
  std::string type;  ///< "Str" or an entity type name

  bool is_str() const { return type == "Str"; }
  bool operator==(const OutputVar&) const = default;
};

struct Query {
  std::vector<OutputVar> outputs;
  std::string source;
  ExtractClause extract;
  std::vector<SatisfyingClause> satisfying;
  std::vector<SatCondition> excluding;  ///< disjunction

  const SatisfyingClause* satisfying_for(const std::string& var) const;
  bool operator==(const Query&) const = default;
};

/// The universal entity type: matches mentions of every type.
inline constexpr const char* kAnyEntity = "Entity";
bool entity_type_matches(const std::string& wanted, const std::string& actual);

}  // namespace koko
