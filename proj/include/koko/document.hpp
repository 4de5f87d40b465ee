#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace koko {

using SentenceId = std::uint32_t;
using TokenId = std::uint32_t;

struct Token {
  SentenceId sid = 0;
  TokenId tid = 0;
  std::string text;
  std::string pos;
  std::string label;
  std::optional<TokenId> head;       ///< none for the sentence root
  std::string iob = "O";             ///< raw IOB2 tag as read from the corpus
  std::optional<std::string> etype;  ///< entity type decoded from `iob`

  bool operator==(const Token&) const = default;
};

/// Inclusive token interval inside one sentence. An empty span has end == start - 1.
struct Span {
  SentenceId sid = 0;
  int start = 0;
  int end = -1;

  bool empty() const { return end < start; }
  int size() const { return end - start + 1; }
  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

/// Subtree extent and depth of one token.
struct NodeExtent {
  TokenId left = 0;
  TokenId right = 0;
  std::uint32_t depth = 0;

  bool operator==(const NodeExtent&) const = default;
};

/// Per-token extents, indexed by token id.
struct TreeMeta {
  std::vector<NodeExtent> nodes;

  const NodeExtent& operator[](TokenId tid) const { return nodes[tid]; }
  bool operator==(const TreeMeta&) const = default;
};

/// The quintuple (x, y, u-v, d) stored in every index.
struct PostingEntry {
  SentenceId sid = 0;
  TokenId tid = 0;
  TokenId left = 0;
  TokenId right = 0;
  std::uint32_t depth = 0;

  bool operator==(const PostingEntry&) const = default;
  auto operator<=>(const PostingEntry&) const = default;
};

std::string to_string(const PostingEntry& e);

struct EntityMention {
  std::string etype;
  Span span;
  std::string surface;

  bool operator==(const EntityMention&) const = default;
};

class Sentence {
 public:
  Sentence() = default;
  /// Takes ownership of the tokens and derives root, children and tree meta.
  /// Tokens must already satisfy the sentence invariants (see validate_sentence).
  Sentence(SentenceId sid, std::vector<Token> tokens);

  SentenceId sid() const { return sid_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const Token& token(TokenId tid) const { return tokens_[tid]; }
  std::size_t size() const { return tokens_.size(); }
  TokenId root_tid() const { return root_; }
  const TreeMeta& meta() const { return meta_; }
  const std::vector<TokenId>& children(TokenId tid) const { return children_[tid]; }
  const std::vector<EntityMention>& entities() const { return entities_; }
  PostingEntry posting(TokenId tid) const;

  /// Detokenized text of tokens [start, end].
  std::string text(int start, int end) const;
  std::vector<std::string> words(int start, int end) const;

  bool operator==(const Sentence& o) const { return sid_ == o.sid_ && tokens_ == o.tokens_; }

 private:
  SentenceId sid_ = 0;
  std::vector<Token> tokens_;
  TokenId root_ = 0;
  TreeMeta meta_;
  std::vector<std::vector<TokenId>> children_;
  std::vector<EntityMention> entities_;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::vector<Sentence> sentences;

  bool operator==(const AnnotatedDocument&) const = default;
};

/// Documents plus a sid -> sentence locator. Sentence ids are global and contiguous.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<AnnotatedDocument> docs);

  const std::vector<AnnotatedDocument>& documents() const { return docs_; }
  std::size_t sentence_count() const { return locator_.size(); }
  std::size_t token_count() const { return tokens_; }
  const Sentence& sentence(SentenceId sid) const;
  const AnnotatedDocument& document_of(SentenceId sid) const;

 private:
  std::vector<AnnotatedDocument> docs_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> locator_;
  std::size_t tokens_ = 0;
};

/// Checks the token invariants: contiguous tids, a single root labelled "root",
/// in-range heads, acyclic head relation. Returns an error message or nullopt.
std::optional<std::string> validate_sentence(const std::vector<Token>& tokens);

TreeMeta compute_tree_meta(const Sentence& s);

/// Quintuple parent test: same sentence, extent containment, depth exactly one apart.
bool is_parent(const PostingEntry& p, const PostingEntry& c);

/// Maximal IOB2 runs with their entity types.
std::vector<EntityMention> entity_spans(const Sentence& s);

/// Reads the 7-column corpus TSV. Throws CorpusError on malformed input.
std::vector<AnnotatedDocument> load_corpus(const std::string& path);
std::vector<AnnotatedDocument> parse_corpus(std::istream& in, const std::string& source_name = "<input>");
void write_corpus(std::ostream& out, const std::vector<AnnotatedDocument>& docs);

/// FNV-1a over the serialized corpus, as 16 hex digits.
std::string corpus_fingerprint(const std::vector<AnnotatedDocument>& docs);

/// Joins tokens with spaces, without a space before closing punctuation.
std::string detokenize(const std::vector<std::string>& words);

}  // namespace koko
