#include <gtest/gtest.h>

#include "koko/engine.hpp"
#include "koko/error.hpp"
#include "koko/index.hpp"
#include "koko/normalize.hpp"
#include "koko/oracle.hpp"
#include "koko/parser.hpp"
#include "support.hpp"

using namespace koko;

namespace {

std::vector<std::string> constraint_lines(const NormalizedQuery& n) {
  std::vector<std::string> out;
  for (const auto& c : derived_constraints(n)) out.push_back(c.lhs + " " + to_string(c.kind) + " " + c.rhs);
  return out;
}

PathExpr rel(const std::string& base, const std::string& label) {
  PathExpr p;
  p.base = base;
  p.steps.push_back(Step{Axis::Child, StepLabel{StepLabel::Kind::Name, label}, {}});
  return p;
}

}  // namespace

TEST(Normalizer, VerbObjectConstraints) {
  NormalizedQuery n = normalize(load_query(test::query_file("entity_verb_object")));
  std::vector<std::string> want = {"b parentOf c",     "c ancestorOf d",   "a leftOf __v1",
                                   "__v1 leftOf b",    "b leftOf __v2",    "__v2 leftOf c"};
  EXPECT_EQ(constraint_lines(n), want);
  EXPECT_EQ(to_string(n.var("d").path), "//verb[@text=\"ate\"]/dobj//\"delicious\"");
  EXPECT_EQ(n.var("a").kind, VarKind::Entity);
  EXPECT_EQ(n.var("e").kind, VarKind::Composite);
  EXPECT_TRUE(n.var("__v1").hidden());
  EXPECT_FALSE(n.var("e").hidden());
}

TEST(Normalizer, EntityObjectSubtreeConstraints) {
  NormalizedQuery n = normalize(load_query(test::query_file("entity_object_subtree")));
  EXPECT_EQ(constraint_lines(n), (std::vector<std::string>{"a parentOf b", "b ancestorOf c", "b in e"}));
  EXPECT_EQ(to_string(n.var("c").path), "//verb/dobj//\"delicious\"");
  EXPECT_EQ(n.var("d").kind, VarKind::Subtree);
  EXPECT_EQ(n.var("d").of, "b");
}

TEST(Normalizer, DependencyOrder) {
  for (const auto& name : test::fixture_queries()) {
    NormalizedQuery n = normalize(load_query(test::query_file(name)));
    for (std::size_t i = 0; i < n.vars.size(); ++i) {
      const NormVar& v = n.vars[i];
      std::vector<std::string> refs = v.parts;
      if (v.base) refs.push_back(*v.base);
      if (!v.of.empty()) refs.push_back(v.of);
      for (const auto& r : refs) EXPECT_LT(n.index_of(r), static_cast<int>(i)) << name << ": " << v.name;
    }
  }
}

TEST(Normalizer, EmptyExtractHasNoConstraints) {
  NormalizedQuery n = normalize(load_query(test::query_file("cafes")));
  EXPECT_TRUE(derived_constraints(n).empty());
  EXPECT_TRUE(n.trivial_extract());
  ASSERT_EQ(n.vars.size(), 1u);
  EXPECT_EQ(n.vars[0].kind, VarKind::Entity);
}

TEST(Normalizer, AbsolutePathsAreAFixpoint) {
  Query q = parse_query("extract v:Str from \"f\" if ( /ROOT:{ v = //verb/dobj, w = /root/nsubj } )");
  NormalizedQuery n = normalize(q);
  EXPECT_TRUE(derived_constraints(n).empty());
  EXPECT_EQ(to_string(n.var("v").path), "//verb/dobj");
  EXPECT_EQ(to_string(n.var("w").path), "/root/nsubj");
}

TEST(Normalizer, IdempotentThroughQueryForm) {
  for (const auto& name : test::fixture_queries()) {
    NormalizedQuery n = normalize(load_query(test::query_file(name)));
    EXPECT_EQ(normalize(to_query(n)), n) << name;
  }
}

TEST(Normalizer, PreservesOracleResults) {
  Corpus c = test::corpus("two_sentences.tsv");
  IndexBundle b = build_indexes(c);
  Resources res;
  std::vector<std::pair<std::string, Query>> cases = {
      {"entity_object_subtree", load_query(test::query_file("entity_object_subtree"))},
      {"verb_object", parse_query("extract x:Str from \"f\" if ( /ROOT:{ v = /root, o = v/dobj, x = v + ^ + o } )")}};
  for (const auto& [name, q] : cases) {
    Query rebuilt = to_query(normalize(q));
    auto before = oracle_evaluate(q, c, res).tuples;
    auto after = oracle_evaluate(rebuilt, c, res).tuples;
    EXPECT_FALSE(before.empty()) << name;
    EXPECT_EQ(diff_results(after, before), std::nullopt) << name;
    EXPECT_EQ(diff_results(run_query(q, c, b, res).tuples, before), std::nullopt) << name;
  }
}

TEST(Normalizer, CyclicBasesAreRejected) {
  Query q;
  q.outputs = {{"a", "Str"}};
  q.source = "f";
  Block blk;
  blk.defs.push_back(VarDef{"a", rel("b", "dobj")});
  blk.defs.push_back(VarDef{"b", rel("a", "nsubj")});
  q.extract.blocks.push_back(blk);
  EXPECT_THROW(normalize(q), QueryError);
}

TEST(Normalizer, ExplainListsVariablesAndConstraints) {
  std::string text = explain_normalized(normalize(load_query(test::query_file("entity_verb_object"))));
  EXPECT_NE(text.find("d node //verb[@text=\"ate\"]/dobj//\"delicious\" (from c: //\"delicious\")"), std::string::npos)
      << text;
  EXPECT_NE(text.find("e composite a + __v1 + b + __v2 + c"), std::string::npos);
}
