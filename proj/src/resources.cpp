#include "koko/resources.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "koko/error.hpp"
#include "koko/text_util.hpp"

namespace koko {

std::string Expansion::phrase() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) out += (i ? " " : "") + words[i];
  return out;
}

namespace {

// Descending score, then lexicographic phrase; the original first.
void order_expansions(ExpansionSet& set, const std::vector<std::string>& original) {
  std::stable_sort(set.begin(), set.end(), [](const Expansion& a, const Expansion& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.phrase() < b.phrase();
  });
  auto it = std::find_if(set.begin(), set.end(), [&](const Expansion& e) { return e.words == original; });
  if (it != set.end()) set.erase(it);
  set.insert(set.begin(), Expansion{original, 1.0});
}

}  // namespace

ExpansionSet IdentityExpansion::expand(const std::string& descriptor) const {
  return {Expansion{split_whitespace(descriptor), 1.0}};
}

StaticExpansionTable StaticExpansionTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open expansion table '" + path + "'");
  StaticExpansionTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3)
      throw ResourceError(path + ":" + std::to_string(lineno) + ": expected 3 tab-separated columns");
    double score;
    try {
      score = std::stod(cols[2]);
    } catch (const std::exception&) {
      throw ResourceError(path + ":" + std::to_string(lineno) + ": bad score '" + cols[2] + "'");
    }
    if (!(score > 0.0 && score <= 1.0))
      throw ResourceError(path + ":" + std::to_string(lineno) + ": score outside (0,1]");
    t.add(trim(cols[0]), trim(cols[1]), score);
  }
  return t;
}

void StaticExpansionTable::add(const std::string& descriptor, const std::string& expansion, double score) {
  rows_[descriptor].push_back({split_whitespace(expansion), score});
}

ExpansionSet StaticExpansionTable::expand(const std::string& descriptor) const {
  auto words = split_whitespace(descriptor);
  std::string key;
  for (std::size_t i = 0; i < words.size(); ++i) key += (i ? " " : "") + words[i];
  ExpansionSet out;
  auto it = rows_.find(key);
  if (it != rows_.end()) out = it->second;
  order_expansions(out, words);
  return out;
}

EmbeddingModel EmbeddingModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open vectors file '" + path + "'");
  EmbeddingModel m;
  std::string line;
  std::size_t lineno = 0, dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cols = split_whitespace(line);
    if (cols.empty()) continue;
    if (lineno == 1 && cols.size() == 2 && cols[0].find_first_not_of("0123456789") == std::string::npos &&
        cols[1].find_first_not_of("0123456789") == std::string::npos)
      continue;
    std::vector<float> v;
    try {
      for (std::size_t i = 1; i < cols.size(); ++i) v.push_back(std::stof(cols[i]));
    } catch (const std::exception&) {
      throw ResourceError(path + ":" + std::to_string(lineno) + ": bad number");
    }
    if (v.empty()) throw ResourceError(path + ":" + std::to_string(lineno) + ": missing vector");
    if (dim == 0) dim = v.size();
    if (v.size() != dim) throw ResourceError(path + ":" + std::to_string(lineno) + ": inconsistent dimension");
    m.add(cols[0], std::move(v));
  }
  return m;
}

void EmbeddingModel::add(const std::string& word, std::vector<float> v) {
  double norm = 0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm > 0)
    for (float& x : v) x = static_cast<float>(x / norm);
  auto it = index_.find(word);
  if (it != index_.end()) {
    vectors_[it->second] = std::move(v);
    return;
  }
  index_[word] = words_.size();
  words_.push_back(word);
  vectors_.push_back(std::move(v));
}

const std::vector<float>* EmbeddingModel::vec(const std::string& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

namespace {
double dot(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}
}  // namespace

double EmbeddingModel::cosine(const std::string& a, const std::string& b) const {
  auto* va = vec(a);
  auto* vb = vec(b);
  if (!va || !vb) return 0.0;
  return dot(*va, *vb);
}

std::vector<std::pair<std::string, double>> EmbeddingModel::neighbors(const std::string& word, std::size_t k) const {
  std::vector<std::pair<std::string, double>> out;
  auto* v = vec(word);
  if (!v || k == 0) return out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] == word) continue;
    out.emplace_back(words_[i], dot(*v, vectors_[i]));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::optional<double> EmbeddingModel::phrase_similarity(const std::vector<std::string>& a,
                                                        const std::vector<std::string>& b) const {
  auto mean = [&](const std::vector<std::string>& ws) -> std::optional<std::vector<double>> {
    std::vector<double> m;
    std::size_t n = 0;
    for (const auto& w : ws) {
      auto* v = vec(w);
      if (!v) v = vec(to_lower(w));
      if (!v) continue;
      if (m.empty()) m.assign(v->size(), 0.0);
      for (std::size_t i = 0; i < v->size(); ++i) m[i] += (*v)[i];
      ++n;
    }
    if (n == 0) return std::nullopt;
    return m;
  };
  auto ma = mean(a), mb = mean(b);
  if (!ma || !mb) return std::nullopt;
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < ma->size(); ++i) {
    d += (*ma)[i] * (*mb)[i];
    na += (*ma)[i] * (*ma)[i];
    nb += (*mb)[i] * (*mb)[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return d / std::sqrt(na * nb);
}

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> s = {
      "a",    "an",   "the",  "of",   "to",    "in",   "on",   "at",   "for",  "from", "by",   "with",
      "and",  "or",   "but",  "is",   "are",   "was",  "were", "be",   "been", "it",   "its",  "this",
      "that", "as",   "into", "than", "then",  "so",   "such", "very", "can",  "will", "do",   "does",
      "did",  "has",  "have", "had",  "their", "they", "he",   "she",  "we",   "you",  "i",    "his",
      "her",  "our",  "your", "not",  "no",    "up",   "out",  "about"};
  return s;
}

EmbeddingExpansion::EmbeddingExpansion(std::shared_ptr<const EmbeddingModel> model, std::size_t topk,
                                       std::size_t max_phrases, Composition comp,
                                       std::unordered_set<std::string> stopwords)
    : model_(std::move(model)), topk_(topk), max_phrases_(max_phrases), comp_(comp), stopwords_(std::move(stopwords)) {}

ExpansionSet EmbeddingExpansion::expand(const std::string& descriptor) const {
  auto words = split_whitespace(descriptor);
  std::vector<std::vector<std::pair<std::string, double>>> options;
  for (const auto& w : words) {
    std::vector<std::pair<std::string, double>> opt{{w, 1.0}};
    if (!stopwords_.count(to_lower(w)) && model_->has(w)) {
      for (auto& [nb, sim] : model_->neighbors(w, topk_))
        if (sim > 0) opt.emplace_back(nb, std::min(sim, 1.0));
    }
    options.push_back(std::move(opt));
  }
  ExpansionSet all{Expansion{{}, 1.0}};
  for (const auto& opt : options) {
    ExpansionSet next;
    for (const auto& partial : all) {
      for (const auto& [w, sim] : opt) {
        Expansion e = partial;
        e.words.push_back(w);
        e.score = comp_ == Composition::Product ? e.score * sim : std::min(e.score, sim);
        next.push_back(std::move(e));
      }
    }
    all = std::move(next);
  }
  order_expansions(all, words);
  if (max_phrases_ > 0 && all.size() > max_phrases_) all.resize(max_phrases_);
  return all;
}

void DictionaryStore::load(const std::string& name, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open dictionary '" + name + "' at '" + path + "'");
  std::unordered_set<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) entries.insert(line);
  }
  add(name, std::move(entries));
}

void DictionaryStore::add(const std::string& name, std::unordered_set<std::string> entries) {
  dicts_[name] = std::move(entries);
}

bool DictionaryStore::contains(const std::string& name, const std::string& entry) const {
  auto it = dicts_.find(name);
  if (it == dicts_.end()) throw ResourceError("unknown dictionary '" + name + "'");
  return it->second.count(entry) > 0;
}

std::vector<Clause> IdentityDecomposer::decompose(const Sentence& s) const {
  Clause c;
  for (TokenId t = 0; t < s.size(); ++t) c.tokens.push_back(t);
  return {c};
}

std::vector<Clause> ClauseDecomposer::decompose(const Sentence& s) const {
  static const std::unordered_set<std::string> conj = {"and", "or", "but"};
  static const std::unordered_set<std::string> rel = {"which", "who", "that", "whom", "whose"};
  std::vector<Clause> out;
  Clause cur;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = Clause{};
  };
  for (TokenId t = 0; t < s.size(); ++t) {
    const Token& tok = s.token(t);
    std::string w = to_lower(tok.text);
    bool delimiter = iequals(tok.pos, "cconj") || iequals(tok.label, "cc") || conj.count(w) || w == ";";
    if (!delimiter && w == "," && t + 1 < s.size() && rel.count(to_lower(s.token(t + 1).text))) delimiter = true;
    if (delimiter) {
      flush();
      continue;
    }
    cur.tokens.push_back(t);
  }
  flush();
  return out;
}

FileDecomposer::FileDecomposer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open clause file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw ResourceError(path + ":" + std::to_string(lineno) + ": expected sid, score, tids");
    try {
      Clause c;
      auto sid = static_cast<SentenceId>(std::stoul(cols[0]));
      c.score = std::stod(cols[1]);
      for (const auto& t : split(cols[2], ','))
        if (!trim(t).empty()) c.tokens.push_back(static_cast<TokenId>(std::stoul(t)));
      clauses_[sid].push_back(std::move(c));
    } catch (const std::exception&) {
      throw ResourceError(path + ":" + std::to_string(lineno) + ": malformed clause line");
    }
  }
}

std::vector<Clause> FileDecomposer::decompose(const Sentence& s) const {
  auto it = clauses_.find(s.sid());
  if (it == clauses_.end()) return IdentityDecomposer().decompose(s);
  std::vector<Clause> out;
  for (const auto& c : it->second) {
    Clause kept;
    kept.score = c.score;
    for (auto t : c.tokens)
      if (t < s.size()) kept.tokens.push_back(t);
    if (!kept.tokens.empty()) out.push_back(std::move(kept));
  }
  return out;
}

std::shared_ptr<Decomposer> make_decomposer(const std::string& spec) {
  if (spec == "identity") return std::make_shared<IdentityDecomposer>();
  if (spec == "clauses") return std::make_shared<ClauseDecomposer>();
  if (spec.rfind("file:", 0) == 0) return std::make_shared<FileDecomposer>(spec.substr(5));
  throw ResourceError("unknown decomposer '" + spec + "' (expected identity, clauses or file:PATH)");
}

void apply_resource_manifest(const std::string& path, Resources& r) {
  namespace fs = std::filesystem;
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open resource manifest '" + path + "'");
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw ResourceError("bad resource manifest '" + path + "': " + e.what());
  }
  fs::path dir = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (dir / p).string(); };
  try {
    if (m.contains("dictionaries"))
      for (const auto& [name, file] : m["dictionaries"].items()) r.dictionaries.load(name, resolve(file.get<std::string>()));
    if (m.contains("expansions"))
      r.expansion = std::make_shared<StaticExpansionTable>(StaticExpansionTable::load(resolve(m["expansions"].get<std::string>())));
    if (m.contains("vectors")) {
      auto model = std::make_shared<EmbeddingModel>(EmbeddingModel::load(resolve(m["vectors"].get<std::string>())));
      r.vectors = model;
      if (!m.contains("expansions"))
        r.expansion = std::make_shared<EmbeddingExpansion>(model, m.value("topk", std::size_t{5}));
    }
    if (m.contains("decomposer")) {
      std::string spec = m["decomposer"].get<std::string>();
      if (spec.rfind("file:", 0) == 0) spec = "file:" + resolve(spec.substr(5));
      r.decomposer = make_decomposer(spec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ResourceError("bad resource manifest '" + path + "': " + e.what());
  }
}

}  // namespace koko
