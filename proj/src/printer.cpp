#include <sstream>

#include "koko/parser.hpp"
#include "koko/text_util.hpp"

namespace koko {
namespace {

const char* key_name(NodeCondition::Key k) {
  switch (k) {
    case NodeCondition::Key::Regex: return "regex";
    case NodeCondition::Key::Pos: return "pos";
    case NodeCondition::Key::Etype: return "etype";
    case NodeCondition::Key::Text: return "text";
  }
  return "?";
}

std::string step_string(const Step& s) {
  std::string out = s.axis == Axis::Child ? "/" : "//";
  switch (s.label.kind) {
    case StepLabel::Kind::Name: out += s.label.text; break;
    case StepLabel::Kind::Word: out += quote(s.label.text); break;
    case StepLabel::Kind::Wildcard: out += "*"; break;
  }
  if (!s.conditions.empty()) {
    out += "[";
    for (std::size_t i = 0; i < s.conditions.size(); ++i) {
      if (i) out += ", ";
      out += "@";
      out += key_name(s.conditions[i].key);
      out += "=" + quote(s.conditions[i].value);
    }
    out += "]";
  }
  return out;
}

std::string elastic_string(const ElasticAtom& e) {
  std::vector<std::string> parts;
  if (e.regex) parts.push_back("@regex=" + quote(*e.regex));
  if (e.min) parts.push_back("@min=" + std::to_string(*e.min));
  if (e.max) parts.push_back("@max=" + std::to_string(*e.max));
  if (e.etype) parts.push_back("@etype=" + quote(*e.etype));
  if (parts.empty()) return "^";
  std::string out = "^[";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out + "]";
}

std::string atom_string(const SpanAtom& a) {
  struct V {
    std::string operator()(const PathExpr& p) const { return to_string(p); }
    std::string operator()(const VarRef& v) const { return v.name; }
    std::string operator()(const SubtreeRef& s) const { return s.var + ".subtree"; }
    std::string operator()(const TokenLiteral& l) const {
      std::string joined;
      for (std::size_t i = 0; i < l.words.size(); ++i) joined += (i ? " " : "") + l.words[i];
      return quote(joined);
    }
    std::string operator()(const ElasticAtom& e) const { return elastic_string(e); }
  };
  return std::visit(V{}, a);
}

}  // namespace

std::string to_string(const PathExpr& p) {
  std::string out = p.base ? *p.base : "";
  for (const auto& s : p.steps) out += step_string(s);
  return out;
}

std::string to_string(const SpanExpr& e) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) out += (i ? " + " : "") + atom_string(e[i]);
  return out;
}

std::string to_string(const SatCondition& c) {
  switch (c.kind) {
    case CondKind::Contains: return "str(" + c.var + ") contains " + quote(c.arg);
    case CondKind::Mentions: return "str(" + c.var + ") mentions " + quote(c.arg);
    case CondKind::Matches: return "str(" + c.var + ") matches " + quote(c.arg);
    case CondKind::InDict: return "str(" + c.var + ") in dict(" + quote(c.arg) + ")";
    case CondKind::FollowedBy: return c.var + " " + quote(c.arg);
    case CondKind::PrecededBy: return quote(c.arg) + " " + c.var;
    case CondKind::Near: return c.var + " near " + quote(c.arg);
    case CondKind::SimilarTo: return c.var + " similarTo " + quote(c.arg);
    case CondKind::DescriptorRight: return c.var + " [[" + quote(c.arg) + "]]";
    case CondKind::DescriptorLeft: return "[[" + quote(c.arg) + "]] " + c.var;
  }
  return "";
}

std::string pretty_print(const Query& q) {
  std::ostringstream out;
  out << "extract ";
  for (std::size_t i = 0; i < q.outputs.size(); ++i)
    out << (i ? ", " : "") << q.outputs[i].name << ":" << q.outputs[i].type;
  out << " from " << quote(q.source) << " if (";
  if (!q.extract.empty()) {
    out << "\n";
    for (const auto& b : q.extract.blocks) {
      out << "  /ROOT:{";
      for (std::size_t i = 0; i < b.defs.size(); ++i) {
        const auto& d = b.defs[i];
        out << (i ? ",\n" : "\n") << "    " << d.name << " = ";
        if (auto* p = std::get_if<PathExpr>(&d.def))
          out << to_string(*p);
        else
          out << to_string(std::get<SpanExpr>(d.def));
      }
      out << "\n  }\n";
    }
    for (const auto& c : q.extract.constraints) {
      out << "  (" << to_string(c.lhs) << ") " << (c.kind == SpanConstraint::Kind::In ? "in" : "eq") << " ("
          << to_string(c.rhs) << ")\n";
    }
  }
  out << ")\n";
  for (const auto& s : q.satisfying) {
    out << "satisfying " << s.var << "\n";
    for (std::size_t i = 0; i < s.conditions.size(); ++i) {
      out << "  (" << to_string(s.conditions[i].cond) << " {" << format_number(s.conditions[i].weight) << "})"
          << (i + 1 < s.conditions.size() ? " or\n" : "\n");
    }
    if (s.threshold) out << "with threshold " << format_number(*s.threshold) << "\n";
  }
  if (!q.excluding.empty()) {
    out << "excluding\n";
    for (std::size_t i = 0; i < q.excluding.size(); ++i)
      out << "  (" << to_string(q.excluding[i]) << ")" << (i + 1 < q.excluding.size() ? " or\n" : "\n");
  }
  return out.str();
}

}  // namespace koko
