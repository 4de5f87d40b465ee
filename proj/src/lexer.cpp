#include "lexer.hpp"

#include <cctype>

#include "koko/error.hpp"

namespace koko::detail {

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Number: return "number";
    case Tok::Slash: return "'/'";
    case Tok::DoubleSlash: return "'//'";
    case Tok::Colon: return "':'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LDoubleBracket: return "'[['";
    case Tok::RDoubleBracket: return "']]'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Caret: return "'^'";
    case Tok::Dot: return "'.'";
    case Tok::At: return "'@'";
    case Tok::Tilde: return "'~'";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  bool line_start = true;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      advance(1);
      line_start = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' && line_start) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    line_start = false;
    Token t;
    t.line = line;
    t.column = col;
    t.offset = i;
    auto simple = [&](Tok kind, std::size_t n) {
      t.kind = kind;
      t.text = std::string(text.substr(i, n));
      t.length = n;
      advance(n);
    };
    auto next = [&](std::size_t k) { return i + k < text.size() ? text[i + k] : '\0'; };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      simple(Tok::Ident, j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.' && j + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      simple(Tok::Number, j - i);
    } else if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        char d = text[j];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\' && j + 1 < text.size()) {
          char e = text[j + 1];
          if (e == '"' || e == '\\') {
            value += e;
          } else {
            value += d;
            value += e;
          }
          j += 2;
          continue;
        }
        value += d;
        ++j;
      }
      if (!closed) throw ParseError("unterminated string literal", line, col);
      t.kind = Tok::String;
      t.length = j + 1 - i;
      advance(t.length);
      t.text = std::move(value);
    } else if (c == '/') {
      if (next(1) == '/')
        simple(Tok::DoubleSlash, 2);
      else
        simple(Tok::Slash, 1);
    } else if (c == '[') {
      if (next(1) == '[')
        simple(Tok::LDoubleBracket, 2);
      else
        simple(Tok::LBracket, 1);
    } else if (c == ']') {
      if (next(1) == ']')
        simple(Tok::RDoubleBracket, 2);
      else
        simple(Tok::RBracket, 1);
    } else {
      switch (c) {
        case ':': simple(Tok::Colon, 1); break;
        case '{': simple(Tok::LBrace, 1); break;
        case '}': simple(Tok::RBrace, 1); break;
        case '(': simple(Tok::LParen, 1); break;
        case ')': simple(Tok::RParen, 1); break;
        case ',': simple(Tok::Comma, 1); break;
        case '=': simple(Tok::Equals, 1); break;
        case '+': simple(Tok::Plus, 1); break;
        case '^': simple(Tok::Caret, 1); break;
        case '.': simple(Tok::Dot, 1); break;
        case '@': simple(Tok::At, 1); break;
        case '~': simple(Tok::Tilde, 1); break;
        case '*': simple(Tok::Star, 1); break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  end.offset = text.size();
  out.push_back(end);
  return out;
}

}  // namespace koko::detail
