#include "koko/parser.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "koko/error.hpp"
#include "koko/labels.hpp"
#include "koko/text_util.hpp"
#include "lexer.hpp"

namespace koko {
namespace {

using detail::Tok;
using detail::Token;

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(detail::lex(text)) {}

  Query parse() {
    Query q;
    expect_keyword("extract");
    parse_outputs(q);
    expect_keyword("from");
    q.source = parse_source();
    expect_keyword("if");
    expect(Tok::LParen);
    parse_body(q.extract);
    expect(Tok::RParen);
    while (is_keyword("satisfying")) parse_satisfying(q);
    if (is_keyword("excluding")) {
      next();
      parse_excluding(q);
    }
    if (peek().kind != Tok::End) fail(peek(), std::string("unexpected ") + describe(peek()));
    check_outputs(q);
    return q;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> known_;    // outputs and variables defined so far
  std::set<std::string> defined_;  // variables with an extract-clause definition

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] static void fail(const Token& t, const std::string& what) {
    throw ParseError(what, t.line, t.column);
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::Ident) return "'" + t.text + "'";
    if (t.kind == Tok::String) return "string " + quote(t.text);
    if (t.kind == Tok::Number) return "number " + t.text;
    return detail::tok_name(t.kind);
  }

  bool is_keyword(std::string_view kw, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == kw;
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind)
      fail(peek(), std::string("expected ") + detail::tok_name(kind) + ", found " + describe(peek()));
    return next();
  }

  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
    next();
  }

  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return next().text;
  }

  double parse_number() {
    const Token& t = expect(Tok::Number);
    return std::stod(t.text);
  }

  int parse_int() {
    const Token& t = peek();
    double v = parse_number();
    if (v != static_cast<int>(v)) fail(t, "expected an integer");
    return static_cast<int>(v);
  }

  void check_regex(const Token& at, const std::string& pattern) {
    try {
      cached_regex(pattern);
    } catch (const std::regex_error& e) {
      fail(at, "invalid regular expression " + quote(pattern) + ": " + e.what());
    }
  }

  // extract a:Entity, b:Str
  void parse_outputs(Query& q) {
    do {
      const Token& at = peek();
      OutputVar v;
      v.name = expect_ident("an output variable");
      expect(Tok::Colon);
      v.type = expect_ident("an output type");
      if (known_.count(v.name)) fail(at, "duplicate output variable '" + v.name + "'");
      known_.insert(v.name);
      q.outputs.push_back(std::move(v));
    } while (peek().kind == Tok::Comma && (next(), true));
  }

  std::string parse_source() {
    if (peek().kind == Tok::String) return next().text;
    std::string s = expect_ident("a source");
    while (peek().kind == Tok::Dot) {
      next();
      s += "." + expect_ident("a source component");
    }
    return s;
  }

  void parse_body(ExtractClause& ex) {
    while (peek().kind != Tok::RParen && peek().kind != Tok::End) {
      if (peek().kind == Tok::Slash) {
        ex.blocks.push_back(parse_block());
      } else if (peek().kind == Tok::LParen) {
        ex.constraints.push_back(parse_constraint());
      } else {
        fail(peek(), "expected a /ROOT block or a constraint, found " + describe(peek()));
      }
      if (peek().kind == Tok::Comma) next();
    }
  }

  Block parse_block() {
    expect(Tok::Slash);
    const Token& anchor = peek();
    if (anchor.kind != Tok::Ident || !iequals(anchor.text, "root"))
      fail(anchor, "expected ROOT after '/', found " + describe(anchor));
    next();
    expect(Tok::Colon);
    expect(Tok::LBrace);
    Block b;
    if (peek().kind != Tok::RBrace) {
      do {
        if (peek().kind == Tok::RBrace) break;  // trailing comma
        b.defs.push_back(parse_def());
      } while (peek().kind == Tok::Comma && (next(), true));
    }
    expect(Tok::RBrace);
    return b;
  }

  VarDef parse_def() {
    const Token& at = peek();
    VarDef d;
    d.name = expect_ident("a variable name");
    if (defined_.count(d.name)) fail(at, "variable '" + d.name + "' is defined twice");
    expect(Tok::Equals);
    SpanExpr e = parse_span_expr();
    if (e.size() == 1 && std::holds_alternative<PathExpr>(e[0]))
      d.def = std::get<PathExpr>(std::move(e[0]));
    else
      d.def = std::move(e);
    for (const auto& name : referenced(d)) {
      if (name == d.name) fail(at, "variable '" + d.name + "' refers to itself");
    }
    defined_.insert(d.name);
    known_.insert(d.name);
    return d;
  }

  static std::vector<std::string> referenced(const VarDef& d) {
    std::vector<std::string> out;
    auto atom_refs = [&](const SpanAtom& a) {
      if (auto* p = std::get_if<PathExpr>(&a); p && p->base) out.push_back(*p->base);
      if (auto* v = std::get_if<VarRef>(&a)) out.push_back(v->name);
      if (auto* s = std::get_if<SubtreeRef>(&a)) out.push_back(s->var);
    };
    if (auto* p = std::get_if<PathExpr>(&d.def)) {
      if (p->base) out.push_back(*p->base);
    } else {
      for (const auto& a : std::get<SpanExpr>(d.def)) atom_refs(a);
    }
    return out;
  }

  SpanConstraint parse_constraint() {
    SpanConstraint c;
    expect(Tok::LParen);
    c.lhs = parse_span_expr();
    expect(Tok::RParen);
    if (is_keyword("in")) {
      c.kind = SpanConstraint::Kind::In;
    } else if (is_keyword("eq")) {
      c.kind = SpanConstraint::Kind::Eq;
    } else {
      fail(peek(), "expected 'in' or 'eq', found " + describe(peek()));
    }
    next();
    expect(Tok::LParen);
    c.rhs = parse_span_expr();
    expect(Tok::RParen);
    return c;
  }

  SpanExpr parse_span_expr() {
    SpanExpr e;
    parse_span_atom(e);
    while (peek().kind == Tok::Plus) {
      next();
      parse_span_atom(e);
    }
    return e;
  }

  void parse_span_atom(SpanExpr& out) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Slash:
      case Tok::DoubleSlash:
        out.push_back(parse_path(std::nullopt));
        return;
      case Tok::LParen: {
        next();
        SpanExpr inner = parse_span_expr();
        expect(Tok::RParen);
        for (auto& a : inner) out.push_back(std::move(a));
        return;
      }
      case Tok::String: {
        next();
        TokenLiteral lit{split_whitespace(t.text)};
        if (lit.words.empty()) fail(t, "empty token literal");
        out.push_back(std::move(lit));
        return;
      }
      case Tok::Caret:
        out.push_back(parse_elastic());
        return;
      case Tok::Ident:
        break;
      default:
        fail(t, "expected a span term, found " + describe(t));
    }
    // identifier forms
    if (t.text == "subtree" && peek(1).kind == Tok::LParen) {
      next();
      next();
      const Token& v = peek();
      std::string name = expect_ident("a variable");
      require_known(v, name);
      expect(Tok::RParen);
      out.push_back(SubtreeRef{name});
      return;
    }
    if (known_.count(t.text)) {
      next();
      if (peek().kind == Tok::Dot) {
        next();
        const Token& s = peek();
        if (expect_ident("'subtree'") != "subtree") fail(s, "expected 'subtree' after '.'");
        out.push_back(SubtreeRef{t.text});
      } else if (peek().kind == Tok::Slash || peek().kind == Tok::DoubleSlash) {
        out.push_back(parse_path(t.text));
      } else {
        out.push_back(VarRef{t.text});
      }
      return;
    }
    // A bare label: a relative path from the block anchor.
    if (classify_label(t.text) == LabelClass::Unknown) {
      if (peek(1).kind == Tok::Dot || peek(1).kind == Tok::Slash || peek(1).kind == Tok::DoubleSlash)
        fail(t, "undeclared variable '" + t.text + "'");
      fail(t, "undeclared variable or unknown label '" + t.text + "'");
    }
    PathExpr p;
    p.steps.push_back(parse_step(Axis::Child));
    parse_more_steps(p);
    out.push_back(std::move(p));
  }

  void require_known(const Token& at, const std::string& name) {
    if (!known_.count(name)) fail(at, "undeclared variable '" + name + "'");
  }

  PathExpr parse_path(std::optional<std::string> base) {
    PathExpr p;
    p.base = std::move(base);
    if (peek().kind != Tok::Slash && peek().kind != Tok::DoubleSlash)
      fail(peek(), "expected '/' or '//', found " + describe(peek()));
    parse_more_steps(p);
    return p;
  }

  void parse_more_steps(PathExpr& p) {
    while (peek().kind == Tok::Slash || peek().kind == Tok::DoubleSlash) {
      Axis axis = next().kind == Tok::Slash ? Axis::Child : Axis::Descendant;
      p.steps.push_back(parse_step(axis));
    }
  }

  Step parse_step(Axis axis) {
    Step s;
    s.axis = axis;
    const Token& t = peek();
    if (t.kind == Tok::Star) {
      next();
      s.label = {StepLabel::Kind::Wildcard, ""};
    } else if (t.kind == Tok::String) {
      next();
      if (t.text.empty() || split_whitespace(t.text).size() != 1) fail(t, "a quoted path step must be a single token");
      s.label = {StepLabel::Kind::Word, t.text};
    } else if (t.kind == Tok::Ident) {
      next();
      std::string name = t.text;
      // subtyped labels such as nmod:poss
      if (peek().kind == Tok::Colon && peek(1).kind == Tok::Ident && peek().offset == t.offset + t.length &&
          peek(1).offset == peek().offset + 1) {
        next();
        name += ":" + next().text;
      }
      if (classify_label(name) == LabelClass::Unknown) fail(t, "unknown label '" + name + "'");
      s.label = {StepLabel::Kind::Name, name};
    } else {
      fail(t, "expected a label, a quoted word or '*', found " + describe(t));
    }
    if (peek().kind == Tok::LBracket) {
      next();
      do {
        s.conditions.push_back(parse_node_condition());
      } while (peek().kind == Tok::Comma && (next(), true));
      expect(Tok::RBracket);
    }
    bool has_text = false;
    for (const auto& c : s.conditions)
      if (c.key == NodeCondition::Key::Text) has_text = true;
    if (has_text && s.label.kind == StepLabel::Kind::Word)
      fail(t, "a quoted step cannot also carry a text condition");
    return s;
  }

  NodeCondition parse_node_condition() {
    if (peek().kind == Tok::At) next();
    const Token& k = peek();
    std::string key = expect_ident("a condition key");
    NodeCondition c;
    if (key == "regex") {
      c.key = NodeCondition::Key::Regex;
    } else if (key == "pos") {
      c.key = NodeCondition::Key::Pos;
    } else if (key == "etype") {
      c.key = NodeCondition::Key::Etype;
    } else if (key == "text") {
      c.key = NodeCondition::Key::Text;
    } else {
      fail(k, "unknown node condition '" + key + "'");
    }
    expect(Tok::Equals);
    const Token& v = expect(Tok::String);
    c.value = v.text;
    if (c.key == NodeCondition::Key::Regex) check_regex(v, c.value);
    return c;
  }

  ElasticAtom parse_elastic() {
    const Token& caret = expect(Tok::Caret);
    ElasticAtom e;
    if (peek().kind != Tok::LBracket) return e;
    next();
    do {
      if (peek().kind == Tok::At) next();
      const Token& k = peek();
      std::string key = expect_ident("an elastic condition key");
      expect(Tok::Equals);
      if (key == "regex") {
        const Token& v = expect(Tok::String);
        check_regex(v, v.text);
        e.regex = v.text;
      } else if (key == "etype") {
        e.etype = expect(Tok::String).text;
      } else if (key == "min") {
        e.min = parse_int();
      } else if (key == "max") {
        e.max = parse_int();
      } else {
        fail(k, "unknown elastic condition '" + key + "'");
      }
    } while (peek().kind == Tok::Comma && (next(), true));
    expect(Tok::RBracket);
    if ((e.min && *e.min < 0) || (e.max && *e.max < 0)) fail(caret, "elastic bounds must be non-negative");
    if (e.min && e.max && *e.min > *e.max) fail(caret, "elastic @min exceeds @max");
    return e;
  }

  // satisfying x (cond {w}) or (cond {w}) [with threshold N]
  void parse_satisfying(Query& q) {
    next();
    const Token& at = peek();
    SatisfyingClause c;
    c.var = expect_ident("a variable");
    require_known(at, c.var);
    if (q.satisfying_for(c.var)) fail(at, "second satisfying clause for '" + c.var + "'");
    do {
      expect(Tok::LParen);
      const Token& ct = peek();
      WeightedCondition w;
      w.cond = parse_condition();
      if (w.cond.var != c.var)
        fail(ct, "condition on '" + w.cond.var + "' inside the satisfying clause of '" + c.var + "'");
      expect(Tok::LBrace);
      const Token& wt = peek();
      w.weight = parse_number();
      if (w.weight < 0.0 || w.weight > 1.0) fail(wt, "weight " + wt.text + " outside [0,1]");
      expect(Tok::RBrace);
      expect(Tok::RParen);
      c.conditions.push_back(std::move(w));
    } while (is_keyword("or") && (next(), true));
    if (is_keyword("with")) {
      next();
      expect_keyword("threshold");
      c.threshold = parse_number();
    }
    q.satisfying.push_back(std::move(c));
  }

  void parse_excluding(Query& q) {
    do {
      expect(Tok::LParen);
      q.excluding.push_back(parse_condition());
      expect(Tok::RParen);
    } while (is_keyword("or") && (next(), true));
  }

  std::string parse_var_use() {
    const Token& at = peek();
    std::string name = expect_ident("a variable");
    require_known(at, name);
    return name;
  }

  bool at_similar() const {
    return peek().kind == Tok::Tilde || is_keyword("similarTo") || is_keyword("SimilarTo");
  }

  std::string parse_descriptor() {
    expect(Tok::LDoubleBracket);
    const Token& d = expect(Tok::String);
    if (split_whitespace(d.text).empty()) fail(d, "empty descriptor");
    expect(Tok::RDoubleBracket);
    return d.text;
  }

  SatCondition parse_condition() {
    SatCondition c;
    const Token& t = peek();
    if (is_keyword("str") && peek(1).kind == Tok::LParen) {
      next();
      next();
      c.var = parse_var_use();
      expect(Tok::RParen);
      const Token& op = peek();
      if (is_keyword("contains")) {
        next();
        c.kind = CondKind::Contains;
        c.arg = expect(Tok::String).text;
      } else if (is_keyword("mentions")) {
        next();
        c.kind = CondKind::Mentions;
        c.arg = expect(Tok::String).text;
      } else if (is_keyword("matches")) {
        next();
        c.kind = CondKind::Matches;
        const Token& r = expect(Tok::String);
        check_regex(r, r.text);
        c.arg = r.text;
      } else if (is_keyword("in")) {
        next();
        expect_keyword("dict");
        expect(Tok::LParen);
        c.kind = CondKind::InDict;
        c.arg = expect(Tok::String).text;
        expect(Tok::RParen);
      } else if (at_similar()) {
        next();
        c.kind = CondKind::SimilarTo;
        c.arg = expect(Tok::String).text;
      } else {
        fail(op, "expected contains, mentions, matches, in dict or similarTo, found " + describe(op));
      }
      return c;
    }
    if (t.kind == Tok::String) {
      next();
      c.kind = CondKind::PrecededBy;
      c.arg = t.text;
      c.var = parse_var_use();
      return c;
    }
    if (t.kind == Tok::LDoubleBracket) {
      c.kind = CondKind::DescriptorLeft;
      c.arg = parse_descriptor();
      c.var = parse_var_use();
      return c;
    }
    c.var = parse_var_use();
    const Token& op = peek();
    if (is_keyword("near")) {
      next();
      c.kind = CondKind::Near;
      c.arg = expect(Tok::String).text;
    } else if (at_similar()) {
      next();
      c.kind = CondKind::SimilarTo;
      c.arg = expect(Tok::String).text;
    } else if (op.kind == Tok::String) {
      next();
      c.kind = CondKind::FollowedBy;
      c.arg = op.text;
    } else if (op.kind == Tok::LDoubleBracket) {
      c.kind = CondKind::DescriptorRight;
      c.arg = parse_descriptor();
    } else {
      fail(op, "expected a condition operator, found " + describe(op));
    }
    if ((c.kind == CondKind::FollowedBy || c.kind == CondKind::Near) && split_whitespace(c.arg).empty())
      fail(op, "empty literal");
    return c;
  }

  void check_outputs(const Query& q) {
    for (const auto& o : q.outputs) {
      if (o.is_str() && !defined_.count(o.name))
        fail(toks_.front(), "output variable '" + o.name + "' of type Str has no definition");
    }
  }
};

}  // namespace

Query parse_query(std::string_view text) {
  return Parser(text).parse();
}

Query load_query(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw QueryError("cannot open query file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_query(ss.str());
}

}  // namespace koko
