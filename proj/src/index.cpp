#include "koko/index.hpp"

#include <algorithm>
#include <thread>
#include <tuple>

#include "koko/text_util.hpp"

namespace koko {

namespace {
const PostingList kEmpty;
}

const PostingList& WordIndex::lookup(const std::string& word) const {
  auto it = map_.find(word);
  return it == map_.end() ? kEmpty : it->second;
}

std::size_t WordIndex::total_postings() const {
  std::size_t n = 0;
  for (const auto& [k, v] : map_) n += v.size();
  return n;
}

std::vector<std::string> WordIndex::keys() const {
  std::vector<std::string> out;
  out.reserve(map_.size());
  for (const auto& [k, v] : map_) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

void EntityIndex::add(EntityEntry e) {
  entries_.push_back(std::move(e));
}

void EntityIndex::finish() {
  std::stable_sort(entries_.begin(), entries_.end(), [](const EntityEntry& a, const EntityEntry& b) {
    return std::tie(a.sid, a.left) < std::tie(b.sid, b.left);
  });
  by_surface_.clear();
  for (std::uint32_t i = 0; i < entries_.size(); ++i) by_surface_[entries_[i].surface].push_back(i);
}

std::vector<EntityEntry> EntityIndex::lookup_entities(const std::optional<std::string>& etype) const {
  if (!etype) return entries_;
  std::vector<EntityEntry> out;
  for (const auto& e : entries_)
    if (entity_type_matches(*etype, e.etype)) out.push_back(e);
  return out;
}

std::vector<EntityEntry> EntityIndex::lookup_surface(const std::string& surface) const {
  std::vector<EntityEntry> out;
  auto it = by_surface_.find(surface);
  if (it == by_surface_.end()) return out;
  for (auto i : it->second) out.push_back(entries_[i]);
  return out;
}

std::string to_string(const HierarchyPattern& p) {
  std::string out;
  for (const auto& s : p) {
    out += s.axis == Axis::Child ? "/" : "//";
    out += s.label ? *s.label : "*";
  }
  return out;
}

HierarchyIndex::HierarchyIndex(Kind kind) : kind_(kind) {
  HierarchyNode top;
  top.id = 0;
  top.parent = 0;
  top.label = kSuperRootLabel;
  nodes_.push_back(std::move(top));
}

std::string HierarchyIndex::key_of(const Token& t) const {
  return to_lower(kind_ == Kind::ParseLabel ? t.label : t.pos);
}

void HierarchyIndex::add_sentence(const Sentence& s) {
  if (s.size() == 0) return;
  std::vector<std::uint32_t> node_of(s.size(), 0);
  // parents before children
  std::vector<TokenId> order{s.root_tid()};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (TokenId c : s.children(order[i])) order.push_back(c);
  for (TokenId tid : order) {
    const Token& t = s.token(tid);
    std::uint32_t parent = t.head ? node_of[*t.head] : 0;
    std::string label = key_of(t);
    std::string key = std::to_string(parent) + '\x1f' + label;
    auto it = edge_.find(key);
    std::uint32_t id;
    if (it == edge_.end()) {
      id = static_cast<std::uint32_t>(nodes_.size());
      HierarchyNode n;
      n.id = id;
      n.parent = parent;
      n.label = label;
      nodes_.push_back(std::move(n));
      nodes_[parent].children.push_back(id);
      edge_.emplace(std::move(key), id);
    } else {
      id = it->second;
    }
    node_of[tid] = id;
    nodes_[id].postings.push_back(s.posting(tid));
  }
}

void HierarchyIndex::finish() {
  for (auto& n : nodes_) {
    std::sort(n.children.begin(), n.children.end(),
              [&](std::uint32_t a, std::uint32_t b) { return nodes_[a].label < nodes_[b].label; });
    std::sort(n.postings.begin(), n.postings.end());
  }
  edge_.clear();
}

std::optional<std::uint32_t> HierarchyIndex::find(const std::vector<std::string>& labels) const {
  std::uint32_t cur = 0;
  for (const auto& l : labels) {
    auto key = to_lower(l);
    std::optional<std::uint32_t> next;
    for (auto c : nodes_[cur].children)
      if (nodes_[c].label == key) next = c;
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

std::vector<std::string> HierarchyIndex::path_of(std::uint32_t id) const {
  std::vector<std::string> out;
  while (id != 0) {
    out.push_back(nodes_[id].label);
    id = nodes_[id].parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::uint32_t> HierarchyIndex::match(const HierarchyPattern& p) const {
  std::vector<std::uint32_t> frontier{0};
  std::vector<char> seen(nodes_.size(), 0);
  for (const auto& step : p) {
    std::optional<std::string> want;
    if (step.label) want = to_lower(*step.label);
    std::vector<std::uint32_t> next;
    std::fill(seen.begin(), seen.end(), 0);
    auto visit = [&](std::uint32_t c) {
      if (!seen[c] && (!want || nodes_[c].label == *want)) {
        seen[c] = 1;
        next.push_back(c);
      }
    };
    if (step.axis == Axis::Child) {
      for (auto f : frontier)
        for (auto c : nodes_[f].children) visit(c);
    } else {
      // every proper descendant of a frontier node; walk each subtree once
      std::vector<char> expanded(nodes_.size(), 0);
      std::vector<std::uint32_t> stack;
      for (auto f : frontier) {
        if (expanded[f]) continue;
        expanded[f] = 1;
        stack.push_back(f);
        while (!stack.empty()) {
          auto n = stack.back();
          stack.pop_back();
          for (auto c : nodes_[n].children) {
            visit(c);
            if (!expanded[c]) {
              expanded[c] = 1;
              stack.push_back(c);
            }
          }
        }
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  if (p.empty()) return {};
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

PostingList HierarchyIndex::lookup(const HierarchyPattern& p) const {
  PostingList out;
  for (auto id : match(p)) out.insert(out.end(), nodes_[id].postings.begin(), nodes_[id].postings.end());
  std::sort(out.begin(), out.end());
  return out;
}

IndexBundle build_indexes(const Corpus& corpus, unsigned jobs) {
  IndexBundle b;
  b.sentence_count = corpus.sentence_count();
  b.token_count = corpus.token_count();
  b.fingerprint = corpus_fingerprint(corpus.documents());

  std::size_t n = corpus.sentence_count();
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, n / 256))));
  std::vector<std::unordered_map<std::string, PostingList>> parts(jobs);
  auto work = [&](unsigned j) {
    std::size_t lo = n * j / jobs, hi = n * (j + 1) / jobs;
    for (std::size_t sid = lo; sid < hi; ++sid) {
      const Sentence& s = corpus.sentence(static_cast<SentenceId>(sid));
      for (TokenId t = 0; t < s.size(); ++t) parts[j][s.token(t).text].push_back(s.posting(t));
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(work, j);
    for (auto& t : threads) t.join();
  }
  // chunks cover increasing sid ranges, so concatenation keeps (sid, tid) order
  for (auto& part : parts)
    for (auto& [word, list] : part) {
      auto& dst = b.word.entry(word);
      dst.insert(dst.end(), list.begin(), list.end());
    }

  for (SentenceId sid = 0; sid < n; ++sid) {
    const Sentence& s = corpus.sentence(sid);
    for (const auto& m : s.entities())
      b.entity.add({m.surface, sid, static_cast<TokenId>(m.span.start), static_cast<TokenId>(m.span.end), m.etype});
    b.pl.add_sentence(s);
    b.pos.add_sentence(s);
  }
  b.entity.finish();
  b.pl.finish();
  b.pos.finish();
  return b;
}

}  // namespace koko
