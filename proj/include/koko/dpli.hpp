#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "koko/index.hpp"
#include "koko/normalize.hpp"

namespace koko {

/// A path split into its parse-label, POS-tag and word views. All three
/// share the axis skeleton of the source path; non-matching labels are `*`.
struct DecomposedPath {
  HierarchyPattern pl;
  HierarchyPattern pos;
  HierarchyPattern word;
  /// Step indices that carry a concrete word, ascending.
  std::vector<int> word_steps;

  std::size_t length() const { return pl.size(); }
  bool operator==(const DecomposedPath&) const = default;
};

/// Throws QueryError when a bare label is neither a parse label nor a POS tag.
DecomposedPath decompose(const PathExpr& p);

/// `//*/dobj//*`, `//verb/*//*`, `//"ate"/*//"delicious"`
std::string pl_string(const DecomposedPath& d);
std::string pos_string(const DecomposedPath& d);
std::string word_string(const DecomposedPath& d);

/// True for a pattern that matches every token: a single `//*` step.
bool is_universal(const HierarchyPattern& p);

/// Chained containment join over the concrete words of a word pattern:
/// an entry survives when an entry of the previous word in the same sentence
/// contains it and sits at least as many levels higher as there are steps
/// between the two words. Returns entries of the last concrete word. The
/// pattern must carry at least one word.
PostingList join_word_path(const DecomposedPath& d, const WordIndex& words);

/// Merge intersection on (sid, tid).
PostingList intersect(const PostingList& a, const PostingList& b);

/// Entries of `p` lying under some entry of `anc` in the same sentence with
/// depth(p) >= depth(anc) + min_delta.
PostingList semi_join_below(const PostingList& p, const PostingList& anc, std::uint32_t min_delta);

/// Entries of `p` lying above some entry of `desc` with depth(desc) >= depth(p) + min_delta.
PostingList semi_join_above(const PostingList& p, const PostingList& desc, std::uint32_t min_delta);

struct Leg {
  bool universal = false;
  PostingList list;
};

/// P1 join P2 on (sid, tid), then with Q: on (sid, tid) when the path ends in a
/// word, otherwise by containment below Q's entries with the remaining step count
/// as minimum depth delta. Universal legs are neutral.
PostingList join_all(const Leg& p1, const Leg& p2, const Leg& q, const DecomposedPath& d, const IndexBundle& b);

/// Node variables that are not the base (directly or transitively) of another
/// node variable, and for each dominated variable the dominant variables it
/// is a prefix of. Indices refer to NormalizedQuery::vars.
struct Dominance {
  std::vector<int> dominant;
  std::map<int, std::vector<int>> dominated;
};
Dominance dominant_paths(const NormalizedQuery& n);

struct PathLookup {
  std::string var;
  bool dominant = true;
  DecomposedPath decomposed;
  std::size_t p1 = 0, p2 = 0, q = 0, result = 0;
  bool p1_universal = false, p2_universal = false, q_universal = false;
};

/// Per-variable candidates from the indices plus the candidate sentence set.
struct BindingTable {
  /// Per variable (NormalizedQuery::vars order): has an index-backed candidate list.
  std::vector<char> indexed;
  std::vector<PostingList> nodes;        ///< node variables
  std::vector<std::vector<Span>> spans;  ///< entity and literal variables
  std::vector<SentenceId> sentences;     ///< ascending
  std::vector<PathLookup> lookups;

  std::span<const PostingEntry> nodes_in(int var, SentenceId sid) const;
  std::span<const Span> spans_in(int var, SentenceId sid) const;
  /// Number of candidates of an indexed variable in one sentence.
  std::size_t count_in(int var, SentenceId sid) const;
};

/// Candidate bindings: dominant paths go through the three
/// legs; dominated paths are semi-joined against their dominant candidates;
/// entity variables come from the entity index and literals from the word
/// index. Any empty leg empties the table.
BindingTable candidate_bindings(const NormalizedQuery& n, const IndexBundle& b);

/// Text printed by `koko explain --stage dpli`.
std::string explain_dpli(const NormalizedQuery& n, const BindingTable& t);

}  // namespace koko
