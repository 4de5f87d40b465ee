#include <gtest/gtest.h>

#include "koko/error.hpp"
#include "koko/resources.hpp"
#include "support.hpp"

using namespace koko;

namespace {

std::vector<std::pair<std::string, double>> flat(const ExpansionSet& s) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& e : s) out.emplace_back(e.phrase(), e.score);
  return out;
}

std::vector<std::vector<TokenId>> clause_tokens(const std::vector<Clause>& cs) {
  std::vector<std::vector<TokenId>> out;
  for (const auto& c : cs) out.push_back(c.tokens);
  return out;
}

const char* kPieAndTea =
    "0\t0\tI\tPRON\tnsubj\t1\tO\n"
    "0\t1\tate\tVERB\troot\t-1\tO\n"
    "0\t2\ta\tDET\tdet\t3\tO\n"
    "0\t3\tpie\tNOUN\tdobj\t1\tO\n"
    "0\t4\tand\tCCONJ\tcc\t1\tO\n"
    "0\t5\tshe\tPRON\tnsubj\t6\tO\n"
    "0\t6\tdrank\tVERB\tconj\t1\tO\n"
    "0\t7\ttea\tNOUN\tdobj\t6\tO\n";

}  // namespace

TEST(Expansion, Identity) {
  EXPECT_EQ(flat(IdentityExpansion().expand("serves coffee")),
            (std::vector<std::pair<std::string, double>>{{"serves coffee", 1.0}}));
}

TEST(Expansion, StaticTable) {
  auto t = StaticExpansionTable::load(test::data("expansions.tsv"));
  EXPECT_EQ(flat(t.expand("serves coffee")),
            (std::vector<std::pair<std::string, double>>{{"serves coffee", 1.0}, {"sells espresso", 0.8}}));
  EXPECT_EQ(flat(t.expand("  serves   coffee ")), flat(t.expand("serves coffee")));
  EXPECT_EQ(flat(t.expand("pours tea")), (std::vector<std::pair<std::string, double>>{{"pours tea", 1.0}}));
}

TEST(Expansion, StaticTableErrors) {
  test::TempDir dir;
  EXPECT_THROW(StaticExpansionTable::load(dir.write("a.tsv", "serves coffee\tsells espresso\n")), ResourceError);
  EXPECT_THROW(StaticExpansionTable::load(dir.write("b.tsv", "serves coffee\tsells espresso\t1.5\n")), ResourceError);
  EXPECT_THROW(StaticExpansionTable::load(dir.file("missing.tsv")), ResourceError);
}

TEST(Embedding, CosinesAndNeighbors) {
  auto m = EmbeddingModel::load(test::data("vectors.txt"));
  EXPECT_EQ(m.size(), 5u);
  EXPECT_NEAR(m.cosine("serves", "sells"), 0.9, 1e-5);
  EXPECT_NEAR(m.cosine("coffee", "espresso"), 0.8, 1e-5);
  EXPECT_NEAR(m.cosine("serves", "coffee"), 0.0, 1e-6);
  auto n = m.neighbors("serves", 1);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0].first, "sells");
  EXPECT_FALSE(m.phrase_similarity({"unknown"}, {"coffee"}).has_value());
  EXPECT_NEAR(*m.phrase_similarity({"espresso"}, {"coffee"}), 0.8, 1e-5);
}

TEST(Embedding, ExpansionTopOne) {
  auto model = std::make_shared<EmbeddingModel>(EmbeddingModel::load(test::data("vectors.txt")));
  EmbeddingExpansion exp(model, 1);
  auto got = flat(exp.expand("serves coffee"));
  std::vector<std::pair<std::string, double>> want = {
      {"serves coffee", 1.0}, {"sells coffee", 0.9}, {"serves espresso", 0.8}, {"sells espresso", 0.72}};
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got[i].first, want[i].first);
    EXPECT_NEAR(got[i].second, want[i].second, 1e-5);
  }
  EmbeddingExpansion by_min(model, 1, 10, Composition::Min);
  EXPECT_NEAR(flat(by_min.expand("serves coffee")).back().second, 0.8, 1e-5);
  EXPECT_EQ(flat(EmbeddingExpansion(model, 0).expand("serves coffee")),
            (std::vector<std::pair<std::string, double>>{{"serves coffee", 1.0}}));
  EXPECT_EQ(EmbeddingExpansion(model, 1, 2).expand("serves coffee").size(), 2u);
}

TEST(Embedding, BadFiles) {
  test::TempDir dir;
  EXPECT_THROW(EmbeddingModel::load(dir.write("v.txt", "a 1 2\nb 1\n")), ResourceError);
  EXPECT_THROW(EmbeddingModel::load(dir.write("w.txt", "a 1 x\n")), ResourceError);
  EXPECT_EQ(EmbeddingModel::load(dir.write("h.txt", "1 2\na 1 0\n")).size(), 1u);
}

TEST(Dictionary, LookupAndErrors) {
  DictionaryStore d;
  d.load("Location", test::data("location.txt"));
  EXPECT_TRUE(d.has("Location"));
  EXPECT_TRUE(d.contains("Location", "Portland"));
  EXPECT_TRUE(d.contains("Location", "San Francisco"));
  EXPECT_FALSE(d.contains("Location", "Verve"));
  try {
    d.contains("Cities", "Portland");
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("Cities"), std::string::npos);
  }
  EXPECT_THROW(d.load("Nope", test::data("missing.txt")), ResourceError);
}

TEST(Decomposer, IdentityAndClauses) {
  Corpus c = test::corpus_from(kPieAndTea);
  auto id = IdentityDecomposer().decompose(c.sentence(0));
  ASSERT_EQ(id.size(), 1u);
  EXPECT_EQ(id[0].tokens.size(), 8u);
  EXPECT_EQ(id[0].score, 1.0);
  auto parts = ClauseDecomposer().decompose(c.sentence(0));
  EXPECT_EQ(clause_tokens(parts), (std::vector<std::vector<TokenId>>{{0, 1, 2, 3}, {5, 6, 7}}));
  Corpus one = test::corpus_from("0\t0\tHello\tINTJ\troot\t-1\tO\n");
  EXPECT_EQ(ClauseDecomposer().decompose(one.sentence(0)).size(), 1u);
}

TEST(Decomposer, RelativeClauseAfterComma) {
  Corpus c = test::corpus("two_sentences.tsv");
  auto parts = ClauseDecomposer().decompose(c.sentence(0));
  ASSERT_GE(parts.size(), 3u);
  EXPECT_EQ(parts[0].tokens, (std::vector<TokenId>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(parts[1].tokens.front(), 7u);
}

TEST(Decomposer, FileAndFactory) {
  Corpus c = test::corpus_from(kPieAndTea);
  test::TempDir dir;
  auto path = dir.write("clauses.tsv", "0\t0.5\t5,6,7\n");
  auto parts = make_decomposer("file:" + path)->decompose(c.sentence(0));
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0].tokens, (std::vector<TokenId>{5, 6, 7}));
  EXPECT_EQ(parts[0].score, 0.5);
  EXPECT_EQ(make_decomposer("identity")->decompose(c.sentence(0)).size(), 1u);
  EXPECT_EQ(make_decomposer("clauses")->decompose(c.sentence(0)).size(), 2u);
  EXPECT_THROW(make_decomposer("bogus"), ResourceError);
}

TEST(Manifest, LoadsEverySlot) {
  test::TempDir dir;
  std::filesystem::copy_file(test::data("location.txt"), dir.file("location.txt"));
  std::filesystem::copy_file(test::data("vectors.txt"), dir.file("vectors.txt"));
  auto path = dir.write("manifest.json",
                        R"({"dictionaries": {"Location": "location.txt"}, "vectors": "vectors.txt", "topk": 1,
                            "decomposer": "clauses"})");
  Resources r;
  apply_resource_manifest(path, r);
  EXPECT_TRUE(r.dictionaries.contains("Location", "Oakland"));
  ASSERT_TRUE(r.vectors);
  EXPECT_EQ(r.expansion->expand("serves coffee").size(), 4u);
  EXPECT_THROW(apply_resource_manifest(dir.write("bad.json", "{"), r), ResourceError);
  EXPECT_THROW(apply_resource_manifest(dir.file("none.json"), r), ResourceError);
}
