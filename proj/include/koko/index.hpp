#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "koko/ast.hpp"
#include "koko/document.hpp"

namespace koko {

inline constexpr std::uint32_t kIndexFormatVersion = 1;
/// Label of the virtual node above every sentence root in both hierarchy indices.
inline constexpr const char* kSuperRootLabel = "\xE2\x8A\xA4";  // ⊤

using PostingList = std::vector<PostingEntry>;

/// Exact surface string -> occurrences, sorted by (sid, tid).
class WordIndex {
 public:
  const PostingList& lookup(const std::string& word) const;
  std::size_t size() const { return map_.size(); }
  std::size_t total_postings() const;
  /// Keys in lexicographic order.
  std::vector<std::string> keys() const;

  PostingList& entry(const std::string& word) { return map_[word]; }
  bool operator==(const WordIndex& o) const { return map_ == o.map_; }

 private:
  std::unordered_map<std::string, PostingList> map_;
};

struct EntityEntry {
  std::string surface;
  SentenceId sid = 0;
  TokenId left = 0;
  TokenId right = 0;
  std::string etype;

  bool operator==(const EntityEntry&) const = default;
};

/// One entry per maximal IOB2 mention, sorted by (sid, left).
class EntityIndex {
 public:
  void add(EntityEntry e);
  void finish();

  const std::vector<EntityEntry>& entries() const { return entries_; }
  /// All mentions whose type matches `etype` (every mention when unset or "Entity").
  std::vector<EntityEntry> lookup_entities(const std::optional<std::string>& etype = std::nullopt) const;
  std::vector<EntityEntry> lookup_surface(const std::string& surface) const;

  bool operator==(const EntityIndex& o) const { return entries_ == o.entries_; }

 private:
  std::vector<EntityEntry> entries_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> by_surface_;
};

struct HierarchyNode {
  std::uint32_t id = 0;
  std::uint32_t parent = 0;  ///< the super-root is its own parent
  std::string label;
  std::vector<std::uint32_t> children;  ///< sorted by label
  PostingList postings;

  bool operator==(const HierarchyNode&) const = default;
};

struct PatternStep {
  Axis axis = Axis::Child;
  std::optional<std::string> label;  ///< unset: wildcard

  bool operator==(const PatternStep&) const = default;
};
using HierarchyPattern = std::vector<PatternStep>;

std::string to_string(const HierarchyPattern& p);

/// Merged dependency trees keyed by label paths. Node 0 is the virtual
/// super-root; every sentence root hangs below it.
class HierarchyIndex {
 public:
  enum class Kind { ParseLabel, Pos };

  explicit HierarchyIndex(Kind kind = Kind::ParseLabel);

  Kind kind() const { return kind_; }
  /// Adds every token of `s`; sentences must arrive in sid order.
  void add_sentence(const Sentence& s);
  void finish();

  /// Nodes excluding the super-root.
  std::size_t node_count() const { return nodes_.size() - 1; }
  const std::vector<HierarchyNode>& nodes() const { return nodes_; }
  std::vector<HierarchyNode>& mutable_nodes() { return nodes_; }

  /// Node reached by an exact label path from the super-root.
  std::optional<std::uint32_t> find(const std::vector<std::string>& labels) const;
  /// Labels from the super-root down to `id` (excluding the super-root).
  std::vector<std::string> path_of(std::uint32_t id) const;

  /// Node ids matched by the pattern: `/l` one edge, `//l` one or more edges, `*` any label.
  std::vector<std::uint32_t> match(const HierarchyPattern& p) const;
  /// Sorted union of the posting lists of all matched nodes.
  PostingList lookup(const HierarchyPattern& p) const;

  bool operator==(const HierarchyIndex& o) const { return kind_ == o.kind_ && nodes_ == o.nodes_; }

 private:
  Kind kind_;
  std::vector<HierarchyNode> nodes_;
  std::unordered_map<std::string, std::uint32_t> edge_;  // build-time (parent, label) -> child
  std::string key_of(const Token& t) const;
};

struct IndexBundle {
  WordIndex word;
  EntityIndex entity;
  HierarchyIndex pl{HierarchyIndex::Kind::ParseLabel};
  HierarchyIndex pos{HierarchyIndex::Kind::Pos};
  std::string fingerprint;
  std::uint32_t version = kIndexFormatVersion;
  std::size_t sentence_count = 0;
  std::size_t token_count = 0;

  bool operator==(const IndexBundle&) const = default;
};

/// Builds all four indices. `jobs` > 1 splits the word index build over threads;
/// the result does not depend on it.
IndexBundle build_indexes(const Corpus& corpus, unsigned jobs = 1);

/// Writes `manifest.json`, `word.idx`, `entity.idx`, `pl.idx`, `pos.idx` into `dir`.
void save_bundle(const IndexBundle& b, const std::string& dir);
/// Throws FormatError on a version mismatch, a truncated file, or (when
/// `expected_fingerprint` is given) a fingerprint mismatch.
IndexBundle load_bundle(const std::string& dir, const std::optional<std::string>& expected_fingerprint = std::nullopt);

}  // namespace koko
