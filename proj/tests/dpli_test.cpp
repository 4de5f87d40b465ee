#include <gtest/gtest.h>

#include <set>

#include "koko/dpli.hpp"
#include "koko/engine.hpp"
#include "koko/error.hpp"
#include "koko/oracle.hpp"
#include "koko/parser.hpp"
#include "support.hpp"

using namespace koko;

namespace {

PathExpr path_of(const std::string& def) {
  Query q = parse_query("extract v:Str from \"f\" if ( /ROOT:{ v = " + def + " } )");
  return std::get<PathExpr>(q.extract.blocks[0].defs[0].def);
}

std::set<std::string> rows(const PostingList& l) {
  std::set<std::string> out;
  for (const auto& e : l) out.insert(to_string(e));
  return out;
}

std::vector<std::string> names(const NormalizedQuery& n, const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int i : idx) out.push_back(n.vars[i].name);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Decompose, AteObjectDelicious) {
  DecomposedPath d = decompose(path_of("//verb[text=\"ate\"]/dobj//\"delicious\""));
  EXPECT_EQ(pl_string(d), "//*/dobj//*");
  EXPECT_EQ(pos_string(d), "//verb/*//*");
  EXPECT_EQ(word_string(d), "//\"ate\"/*//\"delicious\"");
  EXPECT_EQ(d.length(), 3u);
  EXPECT_EQ(d.word_steps, (std::vector<int>{0, 2}));
}

TEST(Decompose, RootedLabels) {
  DecomposedPath d = decompose(path_of("/root/nsubj"));
  EXPECT_EQ(pl_string(d), "/root/nsubj");
  EXPECT_EQ(pos_string(d), "/*/*");
  EXPECT_EQ(word_string(d), "/*/*");
  EXPECT_TRUE(d.word_steps.empty());
}

TEST(Decompose, SingleWord) {
  DecomposedPath d = decompose(path_of("//\"delicious\""));
  EXPECT_EQ(pl_string(d), "//*");
  EXPECT_EQ(pos_string(d), "//*");
  EXPECT_EQ(word_string(d), "//\"delicious\"");
  EXPECT_TRUE(is_universal(d.pl));
  EXPECT_FALSE(is_universal(d.word));
}

TEST(Decompose, UnknownLabel) {
  EXPECT_THROW(decompose(path_of("//frobnicate")), QueryError);
}

class TwoSentenceLookup : public ::testing::Test {
 protected:
  Corpus corpus = test::corpus("two_sentences.tsv");
  IndexBundle b = build_indexes(corpus);
};

TEST_F(TwoSentenceLookup, WordPathJoin) {
  DecomposedPath d = decompose(path_of("//verb[text=\"ate\"]/dobj//\"delicious\""));
  EXPECT_EQ(rows(join_word_path(d, b.word)), (std::set<std::string>{"(1,3,3-3,2)", "(0,9,9-9,3)"}));
  DecomposedPath absent = decompose(path_of("//\"ate\"//\"absent\""));
  EXPECT_TRUE(join_word_path(absent, b.word).empty());
  DecomposedPath too_shallow = decompose(path_of("//\"ate\"/*/*/*//\"delicious\""));
  EXPECT_EQ(rows(join_word_path(too_shallow, b.word)), (std::set<std::string>{}));
}

TEST_F(TwoSentenceLookup, JoinAllKeepsOnlyTrueObjectDescendant) {
  DecomposedPath d = decompose(path_of("//verb[text=\"ate\"]/dobj//\"delicious\""));
  Leg p1{false, b.pl.lookup(d.pl)}, p2{false, b.pos.lookup(d.pos)}, q{false, join_word_path(d, b.word)};
  PostingList all = join_all(p1, p2, q, d, b);
  EXPECT_TRUE(rows(all).count("(0,9,9-9,3)"));
  // Naive tree matching over both sentences: every "delicious" below a dobj child of a verb "ate".
  std::set<std::string> oracle;
  for (SentenceId sid = 0; sid < corpus.sentence_count(); ++sid) {
    const Sentence& s = corpus.sentence(sid);
    for (TokenId t = 0; t < s.size(); ++t) {
      if (s.token(t).text != "delicious") continue;
      for (auto h = s.token(t).head; h; h = s.token(*h).head) {
        auto g = s.token(*h).head;
        if (s.token(*h).label == "dobj" && g && s.token(*g).text == "ate" && s.token(*g).pos == "VERB")
          oracle.insert(to_string(s.posting(t)));
      }
    }
  }
  for (const auto& r : oracle) EXPECT_TRUE(rows(all).count(r)) << r;
  EXPECT_TRUE(join_all(Leg{false, {}}, p2, q, d, b).empty());
  EXPECT_TRUE(join_all(p1, Leg{false, {}}, q, d, b).empty());
  EXPECT_EQ(join_all(p1, p2, Leg{true, {}}, d, b), intersect(p1.list, p2.list));
}

TEST_F(TwoSentenceLookup, SemiJoins) {
  PostingList ate = b.word.lookup("ate");
  PostingList delicious = b.word.lookup("delicious");
  EXPECT_EQ(semi_join_below(delicious, ate, 2).size(), 2u);
  EXPECT_EQ(rows(semi_join_below(delicious, ate, 3)), (std::set<std::string>{"(0,9,9-9,3)"}));
  EXPECT_EQ(rows(semi_join_above(ate, delicious, 3)), (std::set<std::string>{"(0,1,0-16,0)"}));
}

TEST(Dominance, VerbObjectHasOneDominantPath) {
  NormalizedQuery n = normalize(load_query(test::query_file("entity_verb_object")));
  Dominance d = dominant_paths(n);
  EXPECT_EQ(names(n, d.dominant), std::vector<std::string>{"d"});
  EXPECT_EQ(d.dominated.size(), 2u);
  EXPECT_EQ(names(n, d.dominated.at(n.index_of("b"))), std::vector<std::string>{"d"});
  EXPECT_EQ(names(n, d.dominated.at(n.index_of("c"))), std::vector<std::string>{"d"});
}

TEST(Dominance, SubtreeQueryDominatedByDeepestPath) {
  NormalizedQuery n = normalize(load_query(test::query_file("entity_object_subtree")));
  Dominance d = dominant_paths(n);
  EXPECT_EQ(names(n, d.dominant), std::vector<std::string>{"c"});
  EXPECT_TRUE(d.dominated.count(n.index_of("a")));
  EXPECT_TRUE(d.dominated.count(n.index_of("b")));
}

TEST(Dominance, IncomparablePathsAreBothDominant) {
  NormalizedQuery n = normalize(parse_query("extract a:Str from \"f\" if ( /ROOT:{ a = //verb/dobj, b = //noun/amod } )"));
  Dominance d = dominant_paths(n);
  EXPECT_EQ(names(n, d.dominant), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(d.dominated.empty());
}

TEST_F(TwoSentenceLookup, CandidatesMatchOracleAnswers) {
  Query q = load_query(test::query_file("entity_object_subtree"));
  NormalizedQuery n = normalize(q);
  BindingTable t = candidate_bindings(n, b);
  // Sentence 1's "delicious" also sits below the object of "ate", so both sentences qualify.
  EXPECT_EQ(t.sentences, (std::vector<SentenceId>{0, 1}));
  Resources res;
  auto oracle = oracle_evaluate(q, corpus, res);
  for (SentenceId sid : oracle.answer_sentences) EXPECT_TRUE(std::binary_search(t.sentences.begin(), t.sentences.end(), sid));
  int e = n.index_of("e");
  ASSERT_EQ(t.spans_in(e, 0).size(), 1u);
  EXPECT_EQ(t.spans_in(e, 0)[0], (Span{0, 3, 5}));
  EXPECT_EQ(t.count_in(e, 1), 2u);
}

TEST(Candidates, FigureOneSentenceOnly) {
  Corpus c = test::corpus("ice_cream.tsv");
  IndexBundle b = build_indexes(c);
  BindingTable t = candidate_bindings(normalize(load_query(test::query_file("entity_object_subtree"))), b);
  EXPECT_EQ(t.sentences, std::vector<SentenceId>{0});
}

TEST_F(TwoSentenceLookup, MissingLabelEmptiesTable) {
  NormalizedQuery n = normalize(parse_query("extract v:Str from \"f\" if ( /ROOT:{ v = //verb/iobj } )"));
  BindingTable t = candidate_bindings(n, b);
  EXPECT_TRUE(t.sentences.empty());
  EXPECT_TRUE(t.nodes.at(n.index_of("v")).empty());
}

TEST_F(TwoSentenceLookup, EmptyExtractConsidersEverySentence) {
  NormalizedQuery n = normalize(load_query(test::query_file("cafes")));
  BindingTable t = candidate_bindings(n, b);
  EXPECT_EQ(t.sentences, (std::vector<SentenceId>{0, 1}));
}

TEST_F(TwoSentenceLookup, ExplainShowsThreePatterns) {
  NormalizedQuery n = normalize(load_query(test::query_file("entity_verb_object")));
  std::string text = explain_dpli(n, candidate_bindings(n, b));
  EXPECT_NE(text.find("//*/dobj//*"), std::string::npos) << text;
  EXPECT_NE(text.find("//verb/*//*"), std::string::npos);
  EXPECT_NE(text.find("//\"ate\"/*//\"delicious\""), std::string::npos);
}

TEST(Candidates, FalseCandidateIsDroppedByValidation) {
  // The word join only knows that "pie" lies somewhere below "ate", so the
  // grandchild "pie" of sentence 0 survives the index stage.
  Corpus c = test::corpus_from(
      "0\t0\tI\tPRON\tnsubj\t1\tO\n"
      "0\t1\tate\tVERB\troot\t-1\tO\n"
      "0\t2\tcake\tNOUN\tdobj\t1\tO\n"
      "0\t3\twith\tADP\tprep\t2\tO\n"
      "0\t4\tpie\tNOUN\tpobj\t3\tO\n"
      "0\t5\t.\tPUNCT\tpunct\t1\tO\n"
      "\n"
      "1\t0\tWe\tPRON\tnsubj\t1\tO\n"
      "1\t1\tate\tVERB\troot\t-1\tO\n"
      "1\t2\t.\tPUNCT\tpunct\t1\tO\n");
  IndexBundle b = build_indexes(c);
  Query q = parse_query("extract v:Str from \"f\" if ( /ROOT:{ v = //\"ate\"/\"pie\" } )");
  BindingTable t = candidate_bindings(normalize(q), b);
  EXPECT_EQ(t.sentences, std::vector<SentenceId>{0});
  Resources res;
  EXPECT_TRUE(oracle_evaluate(q, c, res).answer_sentences.empty());
  auto result = match_query(q, c, b);
  EXPECT_TRUE(result.matches.empty());
  EXPECT_EQ(result.stats.answer_sentences, 0u);
}
