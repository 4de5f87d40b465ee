#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "koko/benchmark.hpp"
#include "koko/engine.hpp"
#include "koko/error.hpp"
#include "koko/index.hpp"
#include "koko/oracle.hpp"
#include "koko/parser.hpp"
#include "koko/synth.hpp"
#include "koko/text_util.hpp"

namespace koko::cli {

namespace {

using nlohmann::json;

/// Pipeline stage reported with an error.
struct Stage {
  std::string name = "setup";
};

Resources load_resources(const RunConfig& c, Stage& st) {
  st.name = "resources";
  if (!c.expansions.empty() && !c.vectors.empty())
    throw ResourceError("--expansions and --vectors both fill the expansion provider; give one");
  Resources r;
  if (const char* manifest = std::getenv("KOKO_RESOURCES"); manifest && *manifest)
    apply_resource_manifest(manifest, r);
  if (!c.expansions.empty())
    r.expansion = std::make_shared<StaticExpansionTable>(StaticExpansionTable::load(c.expansions));
  if (!c.vectors.empty()) {
    auto model = std::make_shared<const EmbeddingModel>(EmbeddingModel::load(c.vectors));
    r.vectors = model;
    r.expansion = std::make_shared<EmbeddingExpansion>(model, c.topk);
  }
  for (const auto& d : c.dicts) {
    auto eq = d.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == d.size())
      throw ResourceError("--dict expects NAME=FILE, got '" + d + "'");
    r.dictionaries.load(d.substr(0, eq), d.substr(eq + 1));
  }
  if (!c.decomposer.empty()) r.decomposer = make_decomposer(c.decomposer);
  return r;
}

struct Loaded {
  Corpus corpus;
  IndexBundle bundle;
};

Loaded load_corpus_and_index(const RunConfig& c, Stage& st, std::ostream& err) {
  st.name = "load";
  auto docs = load_corpus(c.corpus);
  std::string fp = corpus_fingerprint(docs);
  Loaded l{Corpus(std::move(docs)), {}};
  st.name = "index";
  if (!c.index_dir.empty()) {
    l.bundle = load_bundle(c.index_dir, fp);
  } else {
    l.bundle = build_indexes(l.corpus, c.jobs);
  }
  if (l.corpus.sentence_count() == 0) err << "koko: warning: the corpus is empty\n";
  return l;
}

Query load_query_file(const RunConfig& c, Stage& st) {
  st.name = "parse";
  return load_query(c.query);
}

EngineOptions engine_options(const RunConfig& c) {
  EngineOptions o;
  o.jobs = c.jobs;
  o.evidence.near_sum = c.near_sum;
  return o;
}

json score_json(const EvidenceScore& s) {
  json conds = json::array();
  for (const auto& cs : s.conditions)
    conds.push_back({{"condition", to_string(cs.cond)}, {"weight", cs.weight}, {"m", cs.m}});
  json j{{"total", s.total}, {"passed", s.passed}, {"conditions", conds}};
  if (s.threshold) j["threshold"] = *s.threshold;
  return j;
}

/// One output row: a distinct value tuple within a document.
struct Row {
  const ResultTuple* first = nullptr;
  std::size_t count = 0;
  std::string key;
};

std::vector<Row> dedupe(const std::vector<ResultTuple>& tuples, bool include_failed) {
  std::vector<Row> rows;
  std::map<std::string, std::size_t> at;
  for (const auto& t : tuples) {
    if (!t.passed && !include_failed) continue;
    std::string key = t.doc_id;
    for (const auto& v : t.values) key += '\x1f' + v;
    auto [it, fresh] = at.emplace(key, rows.size());
    if (fresh) {
      std::string order;
      for (const auto& v : t.values) order += v + '\x1f';
      rows.push_back({&t, 0, order});
    }
    ++rows[it->second].count;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.first->sid != b.first->sid) return a.first->sid < b.first->sid;
    return a.key < b.key;
  });
  return rows;
}

void print_rows(const std::vector<Row>& rows, const std::vector<OutputVar>& outputs, const std::string& format,
                std::ostream& out) {
  if (format == "tsv") {
    out << "sid\tdoc_id\tcount";
    for (const auto& o : outputs) out << '\t' << o.name;
    out << "\tpassed\n";
    for (const auto& r : rows) {
      const ResultTuple& t = *r.first;
      out << t.sid << '\t' << t.doc_id << '\t' << r.count;
      for (const auto& v : t.values) out << '\t' << v;
      out << '\t' << (t.passed ? "yes" : "no") << '\n';
    }
    return;
  }
  for (const auto& r : rows) {
    const ResultTuple& t = *r.first;
    json values = json::object();
    for (std::size_t i = 0; i < outputs.size() && i < t.values.size(); ++i) values[outputs[i].name] = t.values[i];
    json j{{"sid", t.sid}, {"doc_id", t.doc_id}, {"count", r.count}, {"values", values}};
    if (!t.scores.empty()) {
      json scores = json::object();
      for (const auto& s : t.scores) scores[s.var] = score_json(s);
      j["scores"] = scores;
    }
    j["passed"] = t.passed;
    if (!t.exclusion.empty()) j["excluded_by"] = t.exclusion;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------- subcommands

int cmd_index(const RunConfig& c, Stage& st, std::ostream& out, std::ostream& err) {
  st.name = "load";
  auto docs = load_corpus(c.corpus);
  Corpus corpus(std::move(docs));
  if (corpus.sentence_count() == 0) err << "koko: warning: the corpus is empty; writing an empty index\n";
  st.name = "index";
  IndexBundle b = build_indexes(corpus, c.jobs);
  save_bundle(b, c.index_dir);
  double ratio = b.token_count == 0 ? 0.0 : 1.0 - static_cast<double>(b.pl.node_count()) / b.token_count;
  out << "sentences\t" << b.sentence_count << "\n"
      << "tokens\t" << b.token_count << "\n"
      << "word keys\t" << b.word.size() << "\n"
      << "entity mentions\t" << b.entity.entries().size() << "\n"
      << "PL nodes\t" << b.pl.node_count() << "\n"
      << "POS nodes\t" << b.pos.node_count() << "\n"
      << "PL compression\t" << format_number(ratio) << "\n";
  return kOk;
}

int cmd_query(const RunConfig& c, bool include_failed, Stage& st, std::ostream& out, std::ostream& err) {
  Query q = load_query_file(c, st);
  Resources res = load_resources(c, st);
  Loaded l = load_corpus_and_index(c, st, err);
  st.name = "normalize";
  normalize(q);
  st.name = "evaluate";
  QueryResult r = run_query(q, l.corpus, l.bundle, res, engine_options(c));
  print_rows(dedupe(r.tuples, include_failed), q.outputs, c.format, out);
  return kOk;
}

int cmd_explain(const RunConfig& c, std::vector<std::string> stages, std::optional<SentenceId> only,
                const std::optional<std::string>& value, Stage& st, std::ostream& out, std::ostream& err) {
  if (stages.empty()) stages = {"normalize", "dpli", "gsp", "satisfy"};
  Query q = load_query_file(c, st);
  Resources res = load_resources(c, st);
  Loaded l = load_corpus_and_index(c, st, err);
  st.name = "normalize";
  NormalizedQuery n = normalize(q);
  BindingTable table;
  bool have_table = false;
  for (const auto& stage : stages) {
    st.name = stage;
    out << "== " << stage << "\n";
    if (stage == "normalize") {
      out << explain_normalized(n);
    } else if (stage == "dpli" || stage == "gsp") {
      if (!have_table) table = candidate_bindings(n, l.bundle), have_table = true;
      if (stage == "dpli") {
        out << explain_dpli(n, table);
        continue;
      }
      Executor exec(n);
      for (SentenceId sid : table.sentences) {
        if (only && sid != *only) continue;
        const Sentence& s = l.corpus.sentence(sid);
        out << explain_gsp(n, exec.run(s, table, true), exec.run(s, table, false), sid);
      }
    } else if (stage == "satisfy") {
      QueryResult r = run_query(q, l.corpus, l.bundle, res, engine_options(c));
      for (const auto& row : dedupe(r.tuples, true)) {
        const ResultTuple& t = *row.first;
        if (only && t.sid != *only) continue;
        if (value && std::find(t.values.begin(), t.values.end(), *value) == t.values.end()) continue;
        out << "sid " << t.sid << " (" << row.count << "x):";
        for (const auto& v : t.values) out << ' ' << quote(v);
        out << (t.passed ? "  passed" : "  rejected");
        if (!t.exclusion.empty()) out << " by " << t.exclusion;
        out << "\n";
        for (const auto& s : t.scores) out << explain_score(s);
      }
    } else {
      throw QueryError("unknown stage '" + stage + "' (normalize, dpli, gsp, satisfy)");
    }
  }
  return kOk;
}

int cmd_verify(const RunConfig& c, Stage& st, std::ostream& out, std::ostream& err) {
  Query q = load_query_file(c, st);
  Resources res = load_resources(c, st);
  Loaded l = load_corpus_and_index(c, st, err);
  st.name = "evaluate";
  EngineOptions eo = engine_options(c);
  QueryResult engine = run_query(q, l.corpus, l.bundle, res, eo);
  st.name = "oracle";
  OracleResult oracle = oracle_evaluate(q, l.corpus, res, eo.evidence, c.jobs);
  if (auto d = diff_results(engine.tuples, oracle.tuples)) {
    out << "MISMATCH " << *d << "\n";
    return kMismatch;
  }
  bool complete = std::includes(engine.match.candidates.begin(), engine.match.candidates.end(),
                                oracle.answer_sentences.begin(), oracle.answer_sentences.end());
  if (!complete) {
    out << "MISMATCH oracle answer sentence outside the index candidates\n";
    return kMismatch;
  }
  out << "OK " << engine.tuples.size() << " tuples, " << oracle.answer_sentences.size() << " answer sentences, "
      << engine.match.candidates.size() << " candidates\n";
  return kOk;
}

int cmd_bench(const RunConfig& c, const std::string& suite_name, std::size_t synth, const std::string& report,
              bool with_oracle, Stage& st, std::ostream& out, std::ostream& err) {
  Corpus corpus;
  IndexBundle bundle;
  if (!c.corpus.empty()) {
    Loaded l = load_corpus_and_index(c, st, err);
    corpus = std::move(l.corpus);
    bundle = std::move(l.bundle);
  } else {
    st.name = "synthesize";
    corpus = Corpus(synth_corpus({synth, c.seed, 10}));
    bundle = build_indexes(corpus, c.jobs);
  }
  st.name = "generate";
  BenchmarkSuite suite;
  if (suite_name == "tree") suite = generate_tree_suite(c.seed, corpus);
  else if (suite_name == "span") suite = generate_span_suite(c.seed, corpus);
  else suite = import_suite(suite_name);
  st.name = "bench";
  BenchReport rep = run_suite(suite, corpus, bundle, {with_oracle, c.jobs});
  json j = to_json(rep);
  if (!report.empty()) {
    std::ofstream f(report);
    if (!f) throw FormatError("cannot write report " + report);
    f << j.dump(2) << '\n';
  }
  out << "suite " << rep.suite << ", seed " << rep.seed << ", " << rep.queries.size() << " queries on "
      << rep.corpus_sentences << " sentences\n" << rep.composition << "\n";
  out << "setting\tqueries\tlookup_ms\tmatch_ms\tmatch_ms_no_gsp\teffectiveness\titer_gsp\titer_no_gsp\n";
  for (const auto& s : j["summary"])
    out << s["setting"].get<std::string>() << '\t' << s["queries"] << '\t' << s["mean_lookup_ms"] << '\t'
        << s["mean_match_ms"] << '\t' << s["mean_match_ms_no_gsp"] << '\t' << s["mean_effectiveness"] << '\t'
        << s["mean_iterations_gsp"] << '\t' << s["mean_iterations_no_gsp"] << '\n';
  int rc = kOk;
  for (const auto& q : rep.queries) {
    if (!q.error.empty()) {
      err << q.id << ": " << q.error << "\n";
      rc = kQueryError;
    } else if (!q.gsp_equal || (q.oracle_equal && !*q.oracle_equal) || (q.complete && !*q.complete)) {
      err << q.id << ": mismatch " << q.diff << "\n";
      if (rc == kOk) rc = kMismatch;
    }
  }
  return rc;
}

void add_resource_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--expansions", c.expansions, "Expansion table TSV (descriptor, expansion, score)");
  sub->add_option("--vectors", c.vectors, "Word vectors for similarTo and embedding expansion");
  sub->add_option("--topk", c.topk, "Neighbors per word for embedding expansion")->capture_default_str();
  sub->add_option("--dict", c.dicts, "Dictionary NAME=FILE, one entry per line (repeatable)");
  sub->add_option("--decomposer", c.decomposer, "identity, clauses or file:PATH");
  sub->add_flag("--near-sum", c.near_sum, "Sum near scores across sentences instead of taking the max");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"KOKO: declarative extraction over dependency-parsed text"};
  app.require_subcommand(1);
  RunConfig c;
  bool include_failed = false;
  std::vector<std::string> stages;
  std::optional<SentenceId> only;
  std::optional<std::string> value;
  std::string suite = "tree", report;
  std::size_t synth = 2000;
  bool with_oracle = false;

  auto* index = app.add_subcommand("index", "Build and save the indices of a corpus");
  index->add_option("--corpus", c.corpus, "Corpus TSV")->required();
  index->add_option("--index", c.index_dir, "Output index directory")->required();
  index->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str();

  auto* query = app.add_subcommand("query", "Run a query and print result rows");
  auto* explain = app.add_subcommand("explain", "Print the artifacts of each pipeline stage");
  auto* verify = app.add_subcommand("verify", "Compare engine output with the brute-force oracle");
  for (auto* sub : {query, explain, verify}) {
    sub->add_option("--query", c.query, "Query file")->required();
    sub->add_option("--corpus", c.corpus, "Corpus TSV")->required();
    sub->add_option("--index", c.index_dir, "Index directory built from the same corpus (built in memory if absent)");
    sub->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str();
    add_resource_flags(sub, c);
  }
  query->add_option("--format", c.format, "jsonl or tsv")->check(CLI::IsMember({"jsonl", "tsv"}))->capture_default_str();
  query->add_flag("--all", include_failed, "Also print rows rejected by the satisfying or excluding clauses");
  explain->add_option("--stage", stages, "normalize, dpli, gsp or satisfy (repeatable; default all)")
      ->check(CLI::IsMember({"normalize", "dpli", "gsp", "satisfy"}));
  explain->add_option("--sid", only, "Limit gsp and satisfy output to one sentence");
  explain->add_option("--value", value, "Limit satisfy output to rows with this value");

  auto* bench = app.add_subcommand("bench", "Generate and run a synthetic benchmark suite");
  bench->add_option("--suite", suite, "tree, span, or a JSON query list")->capture_default_str();
  bench->add_option("--seed", c.seed, "Seed for corpus synthesis and query generation")->capture_default_str();
  bench->add_option("--corpus", c.corpus, "Corpus TSV (a synthetic corpus is generated if absent)");
  bench->add_option("--index", c.index_dir, "Index directory for --corpus");
  bench->add_option("--synth", synth, "Sentences in the generated corpus")->capture_default_str();
  bench->add_option("--report", report, "Write the JSON report here");
  bench->add_flag("--oracle", with_oracle, "Also compare every query with the oracle");
  bench->add_option("--jobs", c.jobs, "Queries run in parallel")->capture_default_str();

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kFormatError;
  }
  c.jobs = std::max(1u, c.jobs);

  Stage st;
  try {
    if (*index) return cmd_index(c, st, out, err);
    if (*query) return cmd_query(c, include_failed, st, out, err);
    if (*explain) return cmd_explain(c, stages, only, value, st, out, err);
    if (*verify) return cmd_verify(c, st, out, err);
    if (*bench) return cmd_bench(c, suite, synth, report, with_oracle, st, out, err);
  } catch (const FormatError& e) {
    err << "koko: " << st.name << " error: " << e.what() << "\n";
    return kFormatError;
  } catch (const QueryError& e) {
    err << "koko: " << st.name << " error: " << e.what() << "\n";
    return kQueryError;
  } catch (const ResourceError& e) {
    err << "koko: " << st.name << " error: " << e.what() << "\n";
    return kQueryError;
  } catch (const std::exception& e) {
    err << "koko: " << st.name << " error: " << e.what() << "\n";
    return kFormatError;
  }
  return kOk;
}

}  // namespace koko::cli
