#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "koko/document.hpp"
#include "koko/resources.hpp"

namespace koko::test {

inline std::string data(const std::string& rel) { return std::string(KOKO_TEST_DATA) + "/" + rel; }
inline std::string query_file(const std::string& name) { return data("queries/" + name + ".koko"); }
inline Corpus corpus(const std::string& rel) { return Corpus(load_corpus(data(rel))); }

inline Corpus corpus_from(const std::string& tsv) {
  std::istringstream in(tsv);
  return Corpus(parse_corpus(in));
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("koko-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(file(name), std::ios::binary) << content;
    return file(name);
  }

 private:
  std::filesystem::path path_;
};

/// Every fixture query file, in a fixed order.
inline const std::vector<std::string>& fixture_queries() {
  static const std::vector<std::string> names = {
      "entity_object_subtree", "similar_city", "similar_country", "cafes",     "entity_verb_object",
      "chocolate",             "title",        "date_of_birth",   "cafes_full", "facilities",
      "teams"};
  return names;
}

// Independent reference computations, written against the definitions
// rather than the library code.

/// Quintuple of a token by scanning every token's ancestor chain.
inline PostingEntry brute_quintuple(const Sentence& s, TokenId tid) {
  PostingEntry e{s.sid(), tid, tid, tid, 0};
  for (TokenId t = 0; t < s.size(); ++t) {
    std::optional<TokenId> cur = t;
    while (cur && *cur != tid) cur = s.token(*cur).head;
    if (cur) e.left = std::min(e.left, t), e.right = std::max(e.right, t);
  }
  for (auto h = s.token(tid).head; h; h = s.token(*h).head) ++e.depth;
  return e;
}

/// Parse labels from the root down to `tid`.
inline std::vector<std::string> brute_label_path(const Sentence& s, TokenId tid) {
  std::vector<std::string> p;
  for (std::optional<TokenId> t = tid; t; t = s.token(*t).head) p.push_back(s.token(*t).label);
  std::reverse(p.begin(), p.end());
  return p;
}

/// Does `words` occur in `window` in order, allowing gaps (case-insensitive)?
inline bool occurs_in_order(const std::vector<std::string>& words, const std::vector<std::string>& window) {
  std::size_t i = 0;
  for (const auto& w : window) {
    if (i == words.size()) break;
    std::string a = w, b = words[i];
    std::transform(a.begin(), a.end(), a.begin(), ::tolower);
    std::transform(b.begin(), b.end(), b.begin(), ::tolower);
    if (a == b) ++i;
  }
  return i == words.size();
}

/// max_i sum_j k_i * l_j over expansions occurring in clause windows, all
/// matches adjacent to the value.
inline double brute_conf(const std::vector<std::pair<std::string, double>>& expansions,
                         const std::vector<std::pair<std::string, double>>& clauses) {
  auto split = [](const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> v;
    for (std::string w; in >> w;) v.push_back(w);
    return v;
  };
  double best = 0;
  for (const auto& [d, k] : expansions) {
    double sum = 0;
    for (const auto& [c, l] : clauses)
      if (occurs_in_order(split(d), split(c))) sum += k * l;
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace koko::test
