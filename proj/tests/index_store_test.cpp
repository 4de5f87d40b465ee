#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "koko/error.hpp"
#include "koko/index.hpp"
#include "koko/synth.hpp"
#include "support.hpp"

using namespace koko;

namespace {

std::set<std::string> rows(const PostingList& l) {
  std::set<std::string> out;
  for (const auto& e : l) out.insert(to_string(e));
  return out;
}

std::set<std::string> entity_rows(const std::vector<EntityEntry>& l) {
  std::set<std::string> out;
  for (const auto& e : l)
    out.insert(e.surface + " (" + std::to_string(e.sid) + "," + std::to_string(e.left) + "-" +
               std::to_string(e.right) + ")");
  return out;
}

PostingList pl_row(const IndexBundle& b, const std::vector<std::string>& labels) {
  auto id = b.pl.find(labels);
  if (!id) return {};
  return b.pl.nodes()[*id].postings;
}

HierarchyPattern pattern(std::initializer_list<std::pair<Axis, const char*>> steps) {
  HierarchyPattern p;
  for (auto [axis, label] : steps) p.push_back(PatternStep{axis, label ? std::optional<std::string>(label) : std::nullopt});
  return p;
}

}  // namespace

class TwoSentenceIndex : public ::testing::Test {
 protected:
  Corpus corpus = test::corpus("two_sentences.tsv");
  IndexBundle b = build_indexes(corpus);
};

TEST_F(TwoSentenceIndex, WordRows) {
  EXPECT_EQ(rows(b.word.lookup("I")), (std::set<std::string>{"(0,0,0-0,1)"}));
  EXPECT_EQ(rows(b.word.lookup("ate")), (std::set<std::string>{"(1,1,0-12,0)", "(0,1,0-16,0)", "(0,13,12-15,1)"}));
  EXPECT_EQ(rows(b.word.lookup("delicious")), (std::set<std::string>{"(1,3,3-3,2)", "(0,9,9-9,3)"}));
  EXPECT_EQ(rows(b.word.lookup("cream")), (std::set<std::string>{"(0,5,2-9,1)"}));
  EXPECT_TRUE(b.word.lookup("zzz-absent").empty());
  const auto& ate = b.word.lookup("ate");
  EXPECT_TRUE(std::is_sorted(ate.begin(), ate.end()));
}

TEST_F(TwoSentenceIndex, EntityRows) {
  EXPECT_EQ(entity_rows(b.entity.lookup_entities()),
            (std::set<std::string>{"cheesecake (1,4-4)", "grocery store (1,10-11)", "chocolate ice cream (0,3-5)"}));
  EXPECT_EQ(b.entity.lookup_entities("Entity").size(), 3u);
  EXPECT_TRUE(b.entity.lookup_entities("Person").empty());
  ASSERT_EQ(b.entity.lookup_surface("grocery store").size(), 1u);
  EXPECT_EQ(b.entity.lookup_surface("grocery store")[0].etype, "Entity");
}

TEST_F(TwoSentenceIndex, ParseLabelRows) {
  EXPECT_EQ(rows(pl_row(b, {"root"})), (std::set<std::string>{"(1,1,0-12,0)", "(0,1,0-16,0)"}));
  EXPECT_EQ(rows(pl_row(b, {"root", "nsubj"})), (std::set<std::string>{"(1,0,0-0,1)", "(0,0,0-0,1)"}));
  EXPECT_EQ(rows(pl_row(b, {"root", "dobj"})), (std::set<std::string>{"(1,4,2-11,1)", "(0,5,2-9,1)"}));
  EXPECT_EQ(rows(pl_row(b, {"root", "dobj", "det"})), (std::set<std::string>{"(1,2,2-2,2)", "(0,2,2-2,2)"}));
  EXPECT_EQ(rows(pl_row(b, {"root", "dobj", "amod"})), (std::set<std::string>{"(1,3,3-3,2)"}));
  EXPECT_EQ(rows(pl_row(b, {"root", "dobj", "nn"})), (std::set<std::string>{"(0,3,3-3,2)", "(0,4,4-4,2)"}));
  EXPECT_FALSE(b.pl.find({"root", "iobj"}).has_value());
}

TEST_F(TwoSentenceIndex, HierarchyLookups) {
  PostingList root = b.pl.lookup(pattern({{Axis::Child, "root"}}));
  EXPECT_EQ(rows(root), (std::set<std::string>{"(1,1,0-12,0)", "(0,1,0-16,0)"}));
  PostingList under_dobj = b.pl.lookup(pattern({{Axis::Descendant, nullptr}, {Axis::Child, "dobj"}, {Axis::Descendant, nullptr}}));
  std::set<std::string> want;
  for (const auto* c : {&corpus}) {
    for (SentenceId sid = 0; sid < c->sentence_count(); ++sid) {
      const Sentence& s = c->sentence(sid);
      for (TokenId t = 0; t < s.size(); ++t) {
        auto path = test::brute_label_path(s, t);
        bool below = false;
        for (std::size_t i = 1; i + 1 < path.size(); ++i) below |= path[i] == "dobj";
        if (below) want.insert(to_string(s.posting(t)));
      }
    }
  }
  EXPECT_EQ(rows(under_dobj), want);
  EXPECT_TRUE(b.pl.lookup(pattern({{Axis::Descendant, "iobj"}})).empty());
  EXPECT_EQ(b.pos.lookup(pattern({{Axis::Child, "VERB"}})).size(), 2u);
}

TEST_F(TwoSentenceIndex, SaveLoadRoundTrip) {
  test::TempDir dir;
  save_bundle(b, dir.str());
  for (const char* f : {"manifest.json", "word.idx", "entity.idx", "pl.idx", "pos.idx"})
    EXPECT_TRUE(std::filesystem::exists(dir.file(f))) << f;
  IndexBundle loaded = load_bundle(dir.str(), corpus_fingerprint(corpus.documents()));
  EXPECT_EQ(loaded, b);
  EXPECT_EQ(rows(loaded.word.lookup("delicious")), rows(b.word.lookup("delicious")));
}

TEST_F(TwoSentenceIndex, LoadRejectsWrongVersion) {
  test::TempDir dir;
  save_bundle(b, dir.str());
  std::fstream f(dir.file("word.idx"), std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(4);
  f.put(static_cast<char>(kIndexFormatVersion + 1));
  f.close();
  try {
    load_bundle(dir.str());
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
  }
}

TEST_F(TwoSentenceIndex, LoadRejectsTruncation) {
  test::TempDir dir;
  save_bundle(b, dir.str());
  auto size = std::filesystem::file_size(dir.file("pl.idx"));
  std::filesystem::resize_file(dir.file("pl.idx"), size - 3);
  EXPECT_THROW(load_bundle(dir.str()), FormatError);
}

TEST_F(TwoSentenceIndex, LoadRejectsForeignCorpus) {
  test::TempDir dir;
  save_bundle(b, dir.str());
  auto other = load_corpus(test::data("cafes.tsv"));
  EXPECT_THROW(load_bundle(dir.str(), corpus_fingerprint(other)), FormatError);
  EXPECT_THROW(load_bundle(dir.file("missing")), FormatError);
}

TEST(IndexStore, EntityTypeFilter) {
  Corpus c = test::corpus_from(
      "0\t0\tAnna\tPROPN\tnsubj\t1\tB-Person\n"
      "0\t1\tvisited\tVERB\troot\t-1\tO\n"
      "0\t2\tParis\tPROPN\tdobj\t1\tB-GPE\n");
  IndexBundle b = build_indexes(c);
  auto people = b.entity.lookup_entities("Person");
  ASSERT_EQ(people.size(), 1u);
  EXPECT_EQ(people[0].surface, "Anna");
  EXPECT_EQ(b.entity.lookup_entities().size(), 2u);
  EXPECT_EQ(b.entity.lookup_entities("Entity").size(), 2u);
  EXPECT_TRUE(b.entity.lookup_entities("Date").empty());
}

TEST(IndexStore, EmptyCorpus) {
  IndexBundle b = build_indexes(Corpus{});
  EXPECT_EQ(b.word.size(), 0u);
  EXPECT_EQ(b.pl.node_count(), 0u);
  test::TempDir dir;
  save_bundle(b, dir.str());
  EXPECT_EQ(load_bundle(dir.str()), b);
}

TEST(IndexStore, InvariantsOnSyntheticCorpus) {
  Corpus c(synth_corpus({500, 3, 10}));
  IndexBundle b = build_indexes(c);
  std::size_t pl_postings = 0;
  for (const auto& n : b.pl.nodes()) {
    pl_postings += n.postings.size();
    EXPECT_TRUE(std::is_sorted(n.postings.begin(), n.postings.end()));
    for (std::size_t i = 1; i < n.children.size(); ++i)
      EXPECT_LT(b.pl.nodes()[n.children[i - 1]].label, b.pl.nodes()[n.children[i]].label);
  }
  EXPECT_EQ(pl_postings, c.token_count());
  EXPECT_EQ(b.word.total_postings(), c.token_count());
  for (SentenceId sid = 0; sid < c.sentence_count(); sid += 37) {
    const Sentence& s = c.sentence(sid);
    for (TokenId t = 0; t < s.size(); ++t) {
      auto id = b.pl.find(test::brute_label_path(s, t));
      ASSERT_TRUE(id.has_value());
      const auto& list = b.pl.nodes()[*id].postings;
      EXPECT_TRUE(std::binary_search(list.begin(), list.end(), s.posting(t)));
      const auto& words = b.word.lookup(s.token(t).text);
      EXPECT_TRUE(std::binary_search(words.begin(), words.end(), s.posting(t)));
    }
  }
}

TEST(IndexStore, LargeRoundTrip) {
  Corpus c(synth_corpus({10000, 11, 25}));
  IndexBundle b = build_indexes(c, 2);
  test::TempDir dir;
  save_bundle(b, dir.str());
  EXPECT_EQ(load_bundle(dir.str(), corpus_fingerprint(c.documents())), b);
}

TEST(IndexStore, JobsDoNotChangeTheResult) {
  Corpus c(synth_corpus({800, 4, 10}));
  EXPECT_EQ(build_indexes(c, 1), build_indexes(c, 4));
}

TEST(IndexStore, RepeatedSentencesShareNodes) {
  Corpus once(template_mix_corpus(1, 50, 9));
  Corpus many(template_mix_corpus(200, 50, 9));
  EXPECT_EQ(build_indexes(many).pl.node_count(), build_indexes(once).pl.node_count());
}
