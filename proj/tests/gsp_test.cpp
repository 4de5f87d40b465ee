#include <gtest/gtest.h>

#include "koko/engine.hpp"
#include "koko/gsp.hpp"
#include "koko/parser.hpp"
#include "koko/synth.hpp"
#include "support.hpp"

using namespace koko;

namespace {

/// Table sized for `n` with no candidates anywhere.
BindingTable empty_table(const NormalizedQuery& n) {
  BindingTable t;
  t.indexed.assign(n.vars.size(), 0);
  t.nodes.resize(n.vars.size());
  t.spans.resize(n.vars.size());
  return t;
}

PostingList postings(std::initializer_list<std::pair<SentenceId, TokenId>> ids) {
  PostingList out;
  for (auto [sid, tid] : ids) out.push_back(PostingEntry{sid, tid, tid, tid, 2});
  return out;
}

std::vector<std::string> skipped_names(const NormalizedQuery& n, const SkipPlan& p) {
  std::vector<std::string> out;
  for (int v : p.skipped) out.push_back(n.vars[v].name);
  return out;
}

std::vector<std::vector<Span>> sorted_spans(std::vector<Match> ms) {
  std::vector<std::vector<Span>> out;
  for (auto& m : ms) out.push_back(std::move(m.spans));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(CostModel, ElasticAndIndexedVariables) {
  NormalizedQuery n = normalize(load_query(test::query_file("entity_verb_object")));
  BindingTable t = empty_table(n);
  int d = n.index_of("d");
  t.indexed[d] = 1;
  t.nodes[d] = postings({{0, 3}, {1, 9}, {23, 5}, {23, 10}, {35, 3}});
  EXPECT_EQ(estimate_cost(n, t, n.index_of("__v1"), 1, 13), 91u);
  EXPECT_EQ(estimate_cost(n, t, d, 23, 40), 2u);
  EXPECT_EQ(estimate_cost(n, t, d, 0, 40), 1u);
  EXPECT_EQ(estimate_cost(n, t, d, 7, 40), 0u);
  EXPECT_EQ(estimate_cost(n, t, n.index_of("e"), 23, 40), 0u);
}

TEST(CostModel, SubtreeCostsFollowTheirNode) {
  NormalizedQuery n = normalize(load_query(test::query_file("entity_object_subtree")));
  BindingTable t = empty_table(n);
  int b = n.index_of("b");
  t.indexed[b] = 1;
  t.nodes[b] = postings({{4, 1}, {4, 6}, {4, 8}});
  EXPECT_EQ(estimate_cost(n, t, n.index_of("d"), 4, 20), 3u);
}

TEST(SkipPlan, LongSentenceSkipsBothElastics) {
  Corpus c = test::corpus("two_sentences.tsv");
  IndexBundle b = build_indexes(c);
  NormalizedQuery n = normalize(load_query(test::query_file("entity_verb_object")));
  BindingTable t = candidate_bindings(n, b);
  Executor ex(n);
  SkipPlan p = ex.plan(t, 0, c.sentence(0).size());
  EXPECT_EQ(skipped_names(n, p), (std::vector<std::string>{"__v1", "__v2"}));
  EXPECT_EQ(p.cost[n.index_of("__v1")], 17u * 18u / 2u);
}

TEST(SkipPlan, SingleAtomSkipsNothing) {
  NormalizedQuery n = normalize(parse_query("extract x:Str from \"f\" if ( /ROOT:{ a = //verb, x = a } )"));
  Executor ex(n);
  EXPECT_TRUE(ex.plan(empty_table(n), 0, 30).skipped.empty());
  NormalizedQuery lone = normalize(parse_query("extract x:Str from \"f\" if ( /ROOT:{ x = ^ } )"));
  EXPECT_TRUE(Executor(lone).plan(empty_table(lone), 0, 30).skipped.empty());
}

TEST(SkipPlan, CheapElasticBetweenCostlyNeighbors) {
  NormalizedQuery n =
      normalize(parse_query("extract x:Str from \"f\" if ( /ROOT:{ a = //verb, b = //noun, x = a + ^ + b } )"));
  BindingTable t = empty_table(n);
  for (const char* v : {"a", "b"}) {
    t.indexed[n.index_of(v)] = 1;
    t.nodes[n.index_of(v)] = postings({{0, 0}, {0, 1}});
  }
  SkipPlan p = Executor(n).plan(t, 0, 1);
  int elastic = -1;
  for (std::size_t i = 0; i < n.vars.size(); ++i)
    if (n.vars[i].kind == VarKind::Elastic) elastic = static_cast<int>(i);
  ASSERT_GE(elastic, 0);
  EXPECT_EQ(p.cost[elastic], 1u);
  // The endpoints have no neighbor on one side, so only the elastic can go.
  EXPECT_EQ(p.skipped, std::vector<int>{elastic});
}

TEST(Executor, EntityObjectSubtreeTuple) {
  Corpus c = test::corpus("two_sentences.tsv");
  IndexBundle b = build_indexes(c);
  Query q = load_query(test::query_file("entity_object_subtree"));
  MatchResult r = match_query(q, c, b);
  auto bindings = named_bindings(r.normalized, r.matches);
  ASSERT_EQ(bindings.size(), 2u);
  const Binding& first = bindings[0];
  EXPECT_EQ(first.sid, 0u);
  EXPECT_EQ(*first.find("e"), (Span{0, 3, 5}));
  EXPECT_EQ(*first.find("d"), (Span{0, 2, 9}));
  EXPECT_EQ(c.sentence(0).text(2, 9), "a chocolate ice cream, which was delicious");
}

TEST(Executor, PlanDoesNotChangeMatches) {
  Corpus c(synth_corpus({300, 21, 10}));
  IndexBundle b = build_indexes(c);
  const char* queries[] = {
      "extract x:Str from \"f\" if ( /ROOT:{ a = //verb, o = a/dobj, x = a + ^ + o } )",
      "extract x:Str from \"f\" if ( /ROOT:{ a = /root/nsubj, v = /root, o = //pobj, x = a + ^ + v + ^ + o } )",
      "extract x:Str from \"f\" if ( /ROOT:{ a = //det, x = a + ^[@max=2] + \"the\" } )",
      "extract e:Entity, x:Str from \"f\" if ( /ROOT:{ v = /root, x = e + ^ + v } )",
  };
  for (const char* text : queries) {
    NormalizedQuery n = normalize(parse_query(text));
    BindingTable t = candidate_bindings(n, b);
    Executor ex(n);
    std::uint64_t with = 0, without = 0;
    for (SentenceId sid : t.sentences) {
      const Sentence& s = c.sentence(sid);
      SentenceResult g = ex.run(s, t, true);
      SentenceResult plain = ex.run(s, t, false);
      EXPECT_TRUE(plain.plan.skipped.empty());
      EXPECT_EQ(sorted_spans(g.matches), sorted_spans(plain.matches)) << text << " sid " << sid;
      with += g.iterations;
      without += plain.iterations;
    }
    EXPECT_LE(with, without) << text;
  }
}

TEST(Executor, ExplainReportsBothRuns) {
  Corpus c = test::corpus("two_sentences.tsv");
  IndexBundle b = build_indexes(c);
  NormalizedQuery n = normalize(load_query(test::query_file("entity_verb_object")));
  BindingTable t = candidate_bindings(n, b);
  Executor ex(n);
  std::string text = explain_gsp(n, ex.run(c.sentence(0), t, true), ex.run(c.sentence(0), t, false), 0);
  EXPECT_NE(text.find("__v1"), std::string::npos) << text;
  EXPECT_NE(text.find("__v2"), std::string::npos);
}
