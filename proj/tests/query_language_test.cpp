#include <gtest/gtest.h>

#include "koko/error.hpp"
#include "koko/parser.hpp"
#include "support.hpp"

using namespace koko;

namespace {

ParseError parse_error(const std::string& text) {
  try {
    parse_query(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return ParseError("none", 0, 0);
}

std::size_t count_blocks_defs(const Query& q) {
  std::size_t n = 0;
  for (const auto& b : q.extract.blocks) n += b.defs.size();
  return n;
}

}  // namespace

class FixtureQuery : public ::testing::TestWithParam<std::string> {};

TEST_P(FixtureQuery, ParsesAndRoundTrips) {
  Query q = load_query(test::query_file(GetParam()));
  std::string printed = pretty_print(q);
  Query again = parse_query(printed);
  EXPECT_EQ(again, q) << printed;
  EXPECT_EQ(pretty_print(again), printed);
}

INSTANTIATE_TEST_SUITE_P(AllFixtures, FixtureQuery, ::testing::ValuesIn(test::fixture_queries()));

TEST(QueryLanguage, EntityObjectSubtreeStructure) {
  Query q = load_query(test::query_file("entity_object_subtree"));
  ASSERT_EQ(q.outputs.size(), 2u);
  EXPECT_EQ(q.outputs[0], (OutputVar{"e", "Entity"}));
  EXPECT_EQ(q.outputs[1], (OutputVar{"d", "Str"}));
  EXPECT_EQ(q.source, "input.txt");
  ASSERT_EQ(q.extract.blocks.size(), 1u);
  EXPECT_EQ(count_blocks_defs(q), 4u);
  ASSERT_EQ(q.extract.constraints.size(), 1u);
  EXPECT_EQ(q.extract.constraints[0].kind, SpanConstraint::Kind::In);
  const VarDef& b = q.extract.blocks[0].defs[1];
  ASSERT_TRUE(b.is_node());
  const auto& p = std::get<PathExpr>(b.def);
  EXPECT_EQ(p.base, "a");
  EXPECT_EQ(to_string(p), "a/dobj");
  EXPECT_TRUE(q.satisfying.empty());
  EXPECT_TRUE(q.excluding.empty());
}

TEST(QueryLanguage, CafeQueryStructure) {
  Query q = load_query(test::query_file("cafes"));
  EXPECT_TRUE(q.extract.empty());
  ASSERT_EQ(q.satisfying.size(), 1u);
  const SatisfyingClause& c = q.satisfying[0];
  EXPECT_EQ(c.var, "x");
  ASSERT_EQ(c.conditions.size(), 5u);
  EXPECT_EQ(c.threshold, 0.8);
  EXPECT_EQ(c.conditions[2].cond.kind, CondKind::FollowedBy);
  EXPECT_EQ(c.conditions[2].cond.arg, ", a cafe");
  EXPECT_EQ(c.conditions[3].cond.kind, CondKind::DescriptorRight);
  EXPECT_DOUBLE_EQ(c.conditions[3].weight, 0.5);
  ASSERT_EQ(q.excluding.size(), 1u);
  EXPECT_EQ(q.excluding[0].kind, CondKind::Matches);
  EXPECT_EQ(q.excluding[0].arg, "[Ll]a Marzocco");
}

TEST(QueryLanguage, LongCafeQueryCounts) {
  Query q = load_query(test::query_file("cafes_full"));
  ASSERT_EQ(q.satisfying.size(), 1u);
  EXPECT_EQ(q.satisfying[0].conditions.size(), 17u);
  EXPECT_EQ(q.excluding.size(), 18u);
  auto dicts = std::count_if(q.excluding.begin(), q.excluding.end(),
                             [](const SatCondition& c) { return c.kind == CondKind::InDict; });
  EXPECT_EQ(dicts, 1);
  EXPECT_EQ(q.excluding.back().arg, "Location");
  EXPECT_EQ(q.satisfying[0].conditions[0].cond.arg, "Cafe");
  EXPECT_EQ(q.satisfying[0].conditions[1].cond.arg, "Caf\xC3\xA9");
  EXPECT_EQ(q.satisfying[0].conditions[8].cond.kind, CondKind::DescriptorLeft);
}

TEST(QueryLanguage, VerbObjectQueryHasHorizontalCondition) {
  Query q = load_query(test::query_file("entity_verb_object"));
  const auto& defs = q.extract.blocks.at(0).defs;
  ASSERT_EQ(defs.size(), 4u);
  ASSERT_FALSE(defs[3].is_node());
  const auto& e = std::get<SpanExpr>(defs[3].def);
  ASSERT_EQ(e.size(), 5u);
  EXPECT_TRUE(std::holds_alternative<VarRef>(e[0]));
  EXPECT_TRUE(std::holds_alternative<ElasticAtom>(e[1]));
  EXPECT_EQ(to_string(e), "a + ^ + b + ^ + c");
  const auto& b = std::get<PathExpr>(defs[0].def);
  ASSERT_EQ(b.steps.size(), 1u);
  EXPECT_EQ(b.steps[0].axis, Axis::Descendant);
  ASSERT_EQ(b.steps[0].conditions.size(), 1u);
  EXPECT_EQ(b.steps[0].conditions[0].key, NodeCondition::Key::Text);
  EXPECT_EQ(b.steps[0].conditions[0].value, "ate");
}

TEST(QueryLanguage, SimilarToAliases) {
  Query city = load_query(test::query_file("similar_city"));
  EXPECT_EQ(city.satisfying.at(0).conditions.at(0).cond.kind, CondKind::SimilarTo);
  EXPECT_FALSE(city.satisfying[0].threshold.has_value());
  Query choc = load_query(test::query_file("chocolate"));
  EXPECT_EQ(choc.satisfying.at(0).var, "v");
  EXPECT_EQ(choc.satisfying[0].conditions.at(0).cond.kind, CondKind::SimilarTo);
}

TEST(QueryLanguage, BareLabelIsChildStep) {
  Query q = load_query(test::query_file("date_of_birth"));
  const auto& p = std::get<PathExpr>(q.extract.blocks.at(0).defs.at(0).def);
  EXPECT_FALSE(p.base.has_value());
  ASSERT_EQ(p.steps.size(), 1u);
  EXPECT_EQ(p.steps[0].axis, Axis::Child);
  EXPECT_EQ(p.steps[0].label.text, "verb");
}

TEST(QueryLanguage, ElasticConditions) {
  Query q = parse_query(
      "extract x:Str from \"f\" if (\n"
      "  /ROOT:{ a = //verb, x = a + ^[@min=1, @max=3, @regex=\"[a-z]+\"] + \"pie\" }\n)\n");
  const auto& e = std::get<SpanExpr>(q.extract.blocks[0].defs[1].def);
  const auto& el = std::get<ElasticAtom>(e[1]);
  EXPECT_EQ(el.min, 1);
  EXPECT_EQ(el.max, 3);
  EXPECT_EQ(el.regex, "[a-z]+");
  EXPECT_EQ(std::get<TokenLiteral>(e[2]).words, std::vector<std::string>{"pie"});
  EXPECT_EQ(parse_query(pretty_print(q)), q);
}

TEST(QueryLanguage, CommentsAreIgnored) {
  Query a = parse_query("# leading comment\nextract x:Entity from \"f\" if ()\n");
  Query b = parse_query("extract x:Entity from \"f\" if ()");
  EXPECT_EQ(a, b);
}

TEST(QueryLanguage, ErrorsCarryPosition) {
  ParseError lex = parse_error("extract x:Entity from \"f\" if ()\nsatisfying x\n  (x $ \"a\" {1})");
  EXPECT_EQ(lex.line(), 3u);
  EXPECT_GT(lex.column(), 1u);
  ParseError kw = parse_error("extrakt x:Entity from \"f\" if ()");
  EXPECT_EQ(kw.line(), 1u);
  EXPECT_EQ(kw.column(), 1u);
}

TEST(QueryLanguage, SemanticErrors) {
  std::string undeclared = parse_error("extract x:Entity from \"f\" if ()\nsatisfying y (str(y) contains \"a\" {1})").what();
  EXPECT_NE(undeclared.find("y"), std::string::npos);
  std::string weight = parse_error("extract x:Entity from \"f\" if ()\nsatisfying x (str(x) contains \"a\" {1.5})").what();
  EXPECT_NE(weight.find("weight"), std::string::npos);
  parse_error("extract x:Entity from \"f\" if ()\nsatisfying x (str(x) contains \"a\" {-0.1})");
  parse_error("extract x:Str from \"f\" if ( /ROOT:{ x = ^[@min=3, @max=1] } )");
  parse_error("extract x:Entity from \"f\" if ()\nexcluding (str(x) matches \"[a-\")");
  parse_error("extract x:Entity from \"f\" if ( /ROOT:{ a = //verb, a = //noun } )");
}

TEST(QueryLanguage, PrintedConditions) {
  SatCondition c{CondKind::DescriptorLeft, "x", "coffee from"};
  EXPECT_EQ(to_string(c), "[[\"coffee from\"]] x");
  SatCondition n{CondKind::Near, "x", "game"};
  EXPECT_EQ(to_string(n), "x near \"game\"");
}
