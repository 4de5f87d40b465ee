#include <gtest/gtest.h>

#include <map>

#include "koko/benchmark.hpp"
#include "koko/error.hpp"
#include "koko/parser.hpp"
#include "koko/synth.hpp"
#include "support.hpp"

using namespace koko;

namespace {

const Corpus& shared_corpus() {
  static const Corpus c(synth_corpus({600, 7, 10}));
  return c;
}

std::map<std::string, int> count_by(const BenchmarkSuite& s, const std::string& param) {
  std::map<std::string, int> out;
  for (const auto& q : s.queries) ++out[q.family + ":" + (q.params.count(param) ? q.params.at(param) : "-")];
  return out;
}

}  // namespace

TEST(Benchmark, TreeSuiteComposition) {
  BenchmarkSuite s = generate_tree_suite(7, shared_corpus());
  ASSERT_EQ(s.queries.size(), 350u);
  auto lengths = count_by(s, "length");
  for (int L = 2; L <= 5; ++L) EXPECT_EQ(lengths["path:" + std::to_string(L)], 60) << L;
  auto labels = count_by(s, "labels");
  int trees = 0;
  for (int n = 3; n <= 10; ++n) {
    EXPECT_GE(labels["tree:" + std::to_string(n)], 13) << n;
    trees += labels["tree:" + std::to_string(n)];
  }
  EXPECT_EQ(trees, 110);
  for (const auto& q : s.queries) EXPECT_EQ(parse_query(q.text), q.query) << q.id;
}

TEST(Benchmark, SpanSuiteComposition) {
  BenchmarkSuite s = generate_span_suite(7, shared_corpus());
  ASSERT_EQ(s.queries.size(), 300u);
  auto atoms = count_by(s, "atoms");
  EXPECT_EQ(atoms["span:1"], 100);
  EXPECT_EQ(atoms["span:3"], 100);
  EXPECT_EQ(atoms["span:5"], 100);
  for (const auto& q : s.queries) {
    const auto& defs = q.query.extract.blocks.at(0).defs;
    if (std::holds_alternative<PathExpr>(defs.back().def)) {
      EXPECT_EQ(q.params.at("atoms"), "1") << q.text;
      continue;
    }
    const auto& span = std::get<SpanExpr>(defs.back().def);
    int elastic = 0;
    for (const auto& a : span) elastic += std::holds_alternative<ElasticAtom>(a);
    const int atoms = std::stoi(q.params.at("atoms"));
    EXPECT_EQ(static_cast<int>(span.size()), atoms) << q.text;
    if (atoms > 1) EXPECT_EQ(elastic, atoms / 2) << q.text;
  }
}

TEST(Benchmark, Deterministic) {
  auto a = generate_span_suite(3, shared_corpus());
  auto b = generate_span_suite(3, shared_corpus());
  auto c = generate_span_suite(4, shared_corpus());
  ASSERT_EQ(a.queries.size(), b.queries.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.queries.size(); ++i) {
    EXPECT_EQ(a.queries[i].text, b.queries[i].text);
    differs |= a.queries[i].text != c.queries[i].text;
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(generate_tree_suite(3, shared_corpus()).queries.back().text,
            generate_tree_suite(3, shared_corpus()).queries.back().text);
}

TEST(Benchmark, Effectiveness) {
  EXPECT_EQ(effectiveness(4, 4), 1.0);
  EXPECT_EQ(effectiveness(4, 2), 0.5);
  EXPECT_EQ(effectiveness(0, 0), 1.0);
  EXPECT_EQ(effectiveness(2, 5), 1.0);
}

TEST(Benchmark, TooSmallCorpus) {
  Corpus tiny = test::corpus("two_sentences.tsv");
  EXPECT_THROW(generate_tree_suite(1, tiny), FormatError);
  EXPECT_THROW(generate_span_suite(1, tiny), FormatError);
}

TEST(Benchmark, ImportAndRun) {
  test::TempDir dir;
  auto path = dir.write("suite.json", R"json([
    {"id": "subtree", "text": "extract x:Str from \"f\" if ( /ROOT:{ v = /root, x = v + ^ + \".\" } )"},
    {"id": "objects", "family": "mine", "params": {"length": 2}, "text": "extract x:Str from \"f\" if ( /ROOT:{ x = /root/dobj } )"}
  ])json");
  BenchmarkSuite s = import_suite(path);
  ASSERT_EQ(s.queries.size(), 2u);
  EXPECT_EQ(s.queries[0].family, "imported");
  EXPECT_EQ(s.queries[1].family, "mine");
  EXPECT_EQ(s.queries[1].params.at("length"), "2");
  IndexBundle b = build_indexes(shared_corpus());
  BenchReport r = run_suite(s, shared_corpus(), b, {true, 2});
  ASSERT_EQ(r.queries.size(), 2u);
  for (const auto& q : r.queries) {
    EXPECT_TRUE(q.error.empty()) << q.error;
    EXPECT_EQ(q.oracle_equal, true) << q.diff;
    EXPECT_EQ(q.complete, true);
    EXPECT_TRUE(q.gsp_equal);
    EXPECT_EQ(q.final_effectiveness, 1.0);
    EXPECT_LE(q.answers, q.candidates);
  }
  auto j = to_json(r);
  EXPECT_EQ(j["queries"].size(), 2u);
  EXPECT_TRUE(j.contains("summary"));
  EXPECT_THROW(import_suite(dir.write("bad.json", "{}")), FormatError);
}
