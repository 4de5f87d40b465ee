#include "koko/ast.hpp"

#include "koko/text_util.hpp"

namespace koko {

const char* to_string(CondKind k) {
  switch (k) {
    case CondKind::Contains: return "contains";
    case CondKind::Mentions: return "mentions";
    case CondKind::Matches: return "matches";
    case CondKind::InDict: return "in_dict";
    case CondKind::FollowedBy: return "followed_by";
    case CondKind::PrecededBy: return "preceded_by";
    case CondKind::Near: return "near";
    case CondKind::SimilarTo: return "similar_to";
    case CondKind::DescriptorRight: return "descriptor_right";
    case CondKind::DescriptorLeft: return "descriptor_left";
  }
  return "?";
}

bool SatCondition::is_boolean() const {
  switch (kind) {
    case CondKind::Contains:
    case CondKind::Mentions:
    case CondKind::Matches:
    case CondKind::InDict:
    case CondKind::FollowedBy:
    case CondKind::PrecededBy:
      return true;
    default:
      return false;
  }
}

const SatisfyingClause* Query::satisfying_for(const std::string& var) const {
  for (const auto& c : satisfying)
    if (c.var == var) return &c;
  return nullptr;
}

bool entity_type_matches(const std::string& wanted, const std::string& actual) {
  return wanted == kAnyEntity || iequals(wanted, actual);
}

}  // namespace koko
