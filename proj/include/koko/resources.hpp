#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "koko/document.hpp"

namespace koko {

/// One expanded phrase d_i with its score k_i.
struct Expansion {
  std::vector<std::string> words;
  double score = 1.0;

  std::string phrase() const;
  bool operator==(const Expansion&) const = default;
};

/// Descending scores; the original descriptor first at 1.0.
using ExpansionSet = std::vector<Expansion>;

class ExpansionProvider {
 public:
  virtual ~ExpansionProvider() = default;
  virtual ExpansionSet expand(const std::string& descriptor) const = 0;
};

/// {(d, 1.0)}
class IdentityExpansion : public ExpansionProvider {
 public:
  ExpansionSet expand(const std::string& descriptor) const override;
};

/// TSV rows `descriptor <tab> expansion <tab> score`. Descriptors without
/// rows expand to themselves.
class StaticExpansionTable : public ExpansionProvider {
 public:
  static StaticExpansionTable load(const std::string& path);
  void add(const std::string& descriptor, const std::string& expansion, double score);
  ExpansionSet expand(const std::string& descriptor) const override;

 private:
  std::unordered_map<std::string, std::vector<Expansion>> rows_;
};

/// Plain-text vectors: `word v1 v2 ... vn` per line, unit-normalized at load.
/// A leading `count dim` header line is skipped.
class EmbeddingModel {
 public:
  static EmbeddingModel load(const std::string& path);
  void add(const std::string& word, std::vector<float> v);

  bool has(const std::string& word) const { return index_.count(word) > 0; }
  std::size_t size() const { return words_.size(); }
  double cosine(const std::string& a, const std::string& b) const;
  /// Up to k nearest other words by cosine; ties broken lexicographically.
  std::vector<std::pair<std::string, double>> neighbors(const std::string& word, std::size_t k) const;
  /// Cosine of the mean vectors of the known words, or nullopt when a side has none.
  std::optional<double> phrase_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) const;

 private:
  const std::vector<float>* vec(const std::string& w) const;
  std::vector<std::string> words_;
  std::vector<std::vector<float>> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Stopwords used to pick the content words of a descriptor.
const std::unordered_set<std::string>& default_stopwords();

enum class Composition { Product, Min };

/// Replaces each content word by itself or one of its top-k neighbors and
/// scores a phrase by composing the per-word similarities (1.0 for kept words).
class EmbeddingExpansion : public ExpansionProvider {
 public:
  EmbeddingExpansion(std::shared_ptr<const EmbeddingModel> model, std::size_t topk, std::size_t max_phrases = 10,
                     Composition comp = Composition::Product,
                     std::unordered_set<std::string> stopwords = default_stopwords());
  ExpansionSet expand(const std::string& descriptor) const override;

 private:
  std::shared_ptr<const EmbeddingModel> model_;
  std::size_t topk_;
  std::size_t max_phrases_;
  Composition comp_;
  std::unordered_set<std::string> stopwords_;
};

/// Named sets of strings with exact-match lookup.
class DictionaryStore {
 public:
  void load(const std::string& name, const std::string& path);
  void add(const std::string& name, std::unordered_set<std::string> entries);
  bool has(const std::string& name) const { return dicts_.count(name) > 0; }
  /// Throws ResourceError for an unknown dictionary.
  bool contains(const std::string& name, const std::string& entry) const;

 private:
  std::unordered_map<std::string, std::unordered_set<std::string>> dicts_;
};

/// A clause c_j: source token ids in order and its score l_j.
struct Clause {
  std::vector<TokenId> tokens;
  double score = 1.0;

  bool operator==(const Clause&) const = default;
};

class Decomposer {
 public:
  virtual ~Decomposer() = default;
  virtual std::vector<Clause> decompose(const Sentence& s) const = 0;
};

/// The whole sentence as one clause.
class IdentityDecomposer : public Decomposer {
 public:
  std::vector<Clause> decompose(const Sentence& s) const override;
};

/// Splits at coordinating conjunctions, semicolons, and commas followed by a
/// relative pronoun. Delimiters belong to no clause.
class ClauseDecomposer : public Decomposer {
 public:
  std::vector<Clause> decompose(const Sentence& s) const override;
};

/// Precomputed clauses: lines `sid <tab> score <tab> tid,tid,...`.
/// Sentences without lines fall back to the identity decomposition.
class FileDecomposer : public Decomposer {
 public:
  explicit FileDecomposer(const std::string& path);
  std::vector<Clause> decompose(const Sentence& s) const override;

 private:
  std::unordered_map<SentenceId, std::vector<Clause>> clauses_;
};

/// `identity`, `clauses` or `file:PATH`.
std::shared_ptr<Decomposer> make_decomposer(const std::string& spec);

struct Resources {
  std::shared_ptr<const ExpansionProvider> expansion = std::make_shared<IdentityExpansion>();
  std::shared_ptr<const EmbeddingModel> vectors;  ///< optional; enables vector similarity
  DictionaryStore dictionaries;
  std::shared_ptr<const Decomposer> decomposer = std::make_shared<IdentityDecomposer>();
};

/// JSON manifest: {"dictionaries": {"Name": "file"}, "expansions": "file",
/// "vectors": "file", "topk": 5, "decomposer": "clauses"}. Relative paths
/// resolve against the manifest's directory.
void apply_resource_manifest(const std::string& path, Resources& r);

}  // namespace koko
