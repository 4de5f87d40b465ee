#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace koko::detail {

enum class Tok {
  Ident,
  String,
  Number,
  Slash,        // /
  DoubleSlash,  // //
  Colon,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LDoubleBracket,  // [[
  RDoubleBracket,  // ]]
  Comma,
  Equals,
  Plus,
  Caret,
  Dot,
  At,
  Tilde,
  Star,
  End,
};

const char* tok_name(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;  ///< byte offset of the first character
  std::size_t length = 0;  ///< source length in bytes
};

/// Splits query text into tokens; throws ParseError on lexical errors.
std::vector<Token> lex(std::string_view text);

}  // namespace koko::detail
