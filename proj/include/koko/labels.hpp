#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace koko {

enum class LabelClass { ParseLabel, PosTag, Unknown };

/// Classifies a bare (unquoted) path label against the shipped vocabularies:
/// Stanford and Universal Dependencies relations for parse labels, the
/// universal and UD part-of-speech tags for POS. Comparison is
/// case-insensitive. Names in both lists (det, punct, aux, conj, num) are
/// parse labels; such POS tags are reachable through `*[@pos="..."]`.
LabelClass classify_label(std::string_view name);

const std::vector<std::string>& parse_label_vocabulary();
const std::vector<std::string>& pos_tag_vocabulary();

}  // namespace koko
