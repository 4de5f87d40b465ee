#pragma once

#include <string>
#include <string_view>

#include "koko/ast.hpp"

namespace koko {

/// Parses KOKO query text. `#` starts a comment line. Throws ParseError
/// (with line/column) on lexical, syntactic and declaration errors.
Query parse_query(std::string_view text);

/// Reads and parses a `.koko` file.
Query load_query(const std::string& path);

/// Canonical text form; parse_query(pretty_print(q)) == q.
std::string pretty_print(const Query& q);
std::string to_string(const PathExpr& p);
std::string to_string(const SpanExpr& e);
std::string to_string(const SatCondition& c);

}  // namespace koko
