#include "koko/dpli.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "koko/error.hpp"
#include "koko/labels.hpp"
#include "koko/text_util.hpp"

namespace koko {

DecomposedPath decompose(const PathExpr& p) {
  DecomposedPath d;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    PatternStep pl{s.axis, std::nullopt}, pos{s.axis, std::nullopt}, word{s.axis, std::nullopt};
    if (s.label.kind == StepLabel::Kind::Name) {
      switch (classify_label(s.label.text)) {
        case LabelClass::ParseLabel: pl.label = to_lower(s.label.text); break;
        case LabelClass::PosTag: pos.label = to_lower(s.label.text); break;
        case LabelClass::Unknown: throw QueryError("cannot classify label '" + s.label.text + "'");
      }
    } else if (s.label.kind == StepLabel::Kind::Word) {
      word.label = s.label.text;
    }
    for (const auto& c : s.conditions) {
      if (c.key == NodeCondition::Key::Pos && !pos.label) pos.label = to_lower(c.value);
      if (c.key == NodeCondition::Key::Text && !word.label) word.label = c.value;
    }
    if (word.label) d.word_steps.push_back(static_cast<int>(i));
    d.pl.push_back(std::move(pl));
    d.pos.push_back(std::move(pos));
    d.word.push_back(std::move(word));
  }
  return d;
}

std::string pl_string(const DecomposedPath& d) { return to_string(d.pl); }
std::string pos_string(const DecomposedPath& d) { return to_string(d.pos); }

std::string word_string(const DecomposedPath& d) {
  std::string out;
  for (const auto& s : d.word) {
    out += s.axis == Axis::Child ? "/" : "//";
    out += s.label ? quote(*s.label) : "*";
  }
  return out;
}

bool is_universal(const HierarchyPattern& p) {
  return p.size() == 1 && p[0].axis == Axis::Descendant && !p[0].label;
}

namespace {

// Calls f(a_begin, a_end, b_begin, b_end) for every sid present in both lists.
template <class A, class B, class F>
void for_common_sids(const A& a, const B& b, F f) {
  auto ai = a.begin();
  auto bi = b.begin();
  while (ai != a.end() && bi != b.end()) {
    if (ai->sid < bi->sid) {
      ++ai;
    } else if (bi->sid < ai->sid) {
      ++bi;
    } else {
      SentenceId sid = ai->sid;
      auto ae = ai, be = bi;
      while (ae != a.end() && ae->sid == sid) ++ae;
      while (be != b.end() && be->sid == sid) ++be;
      f(ai, ae, bi, be);
      ai = ae;
      bi = be;
    }
  }
}

bool contains(const PostingEntry& outer, const PostingEntry& inner) {
  return outer.left <= inner.left && outer.right >= inner.right;
}

}  // namespace

PostingList semi_join_below(const PostingList& p, const PostingList& anc, std::uint32_t min_delta) {
  PostingList out;
  for_common_sids(p, anc, [&](auto pb, auto pe, auto ab, auto ae) {
    for (auto it = pb; it != pe; ++it) {
      for (auto a = ab; a != ae; ++a) {
        if (contains(*a, *it) && it->depth >= a->depth + min_delta) {
          out.push_back(*it);
          break;
        }
      }
    }
  });
  return out;
}

PostingList semi_join_above(const PostingList& p, const PostingList& desc, std::uint32_t min_delta) {
  PostingList out;
  for_common_sids(p, desc, [&](auto pb, auto pe, auto db, auto de) {
    for (auto it = pb; it != pe; ++it) {
      for (auto d = db; d != de; ++d) {
        if (contains(*it, *d) && d->depth >= it->depth + min_delta) {
          out.push_back(*it);
          break;
        }
      }
    }
  });
  return out;
}

PostingList intersect(const PostingList& a, const PostingList& b) {
  PostingList out;
  auto ai = a.begin();
  auto bi = b.begin();
  while (ai != a.end() && bi != b.end()) {
    auto ka = std::tie(ai->sid, ai->tid);
    auto kb = std::tie(bi->sid, bi->tid);
    if (ka < kb) {
      ++ai;
    } else if (kb < ka) {
      ++bi;
    } else {
      out.push_back(*ai);
      ++ai;
      ++bi;
    }
  }
  return out;
}

PostingList join_word_path(const DecomposedPath& d, const WordIndex& words) {
  if (d.word_steps.empty()) throw QueryError("word path without a concrete word");
  PostingList cur = words.lookup(*d.word[d.word_steps[0]].label);
  for (std::size_t k = 1; k < d.word_steps.size() && !cur.empty(); ++k) {
    auto delta = static_cast<std::uint32_t>(d.word_steps[k] - d.word_steps[k - 1]);
    cur = semi_join_below(words.lookup(*d.word[d.word_steps[k]].label), cur, delta);
  }
  return cur;
}

PostingList join_all(const Leg& p1, const Leg& p2, const Leg& q, const DecomposedPath& d, const IndexBundle& b) {
  PostingList p;
  if (p1.universal && p2.universal) {
    if (q.universal) return b.pl.lookup(d.pl);
    if (!d.word_steps.empty() && d.word_steps.back() + 1 == static_cast<int>(d.length())) return q.list;
    p = b.pl.lookup(HierarchyPattern{{Axis::Descendant, std::nullopt}});
  } else if (p1.universal) {
    p = p2.list;
  } else if (p2.universal) {
    p = p1.list;
  } else {
    p = intersect(p1.list, p2.list);
  }
  if (q.universal || p.empty()) return p;
  int last = d.word_steps.back();
  if (last + 1 == static_cast<int>(d.length())) return intersect(p, q.list);
  return semi_join_below(p, q.list, static_cast<std::uint32_t>(d.length() - 1 - last));
}

Dominance dominant_paths(const NormalizedQuery& n) {
  Dominance out;
  std::vector<char> is_base(n.vars.size(), 0);
  for (const auto& v : n.vars)
    if (v.kind == VarKind::Node && v.base) is_base[n.index_of(*v.base)] = 1;
  for (std::size_t i = 0; i < n.vars.size(); ++i) {
    const auto& v = n.vars[i];
    if (v.kind != VarKind::Node || is_base[i]) continue;
    out.dominant.push_back(static_cast<int>(i));
    for (auto b = v.base; b; b = n.var(*b).base) out.dominated[n.index_of(*b)].push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

template <class T>
std::span<const T> sid_slice(const std::vector<T>& v, SentenceId sid) {
  auto lo = std::lower_bound(v.begin(), v.end(), sid, [](const T& e, SentenceId s) { return e.sid < s; });
  auto hi = lo;
  while (hi != v.end() && hi->sid == sid) ++hi;
  return {lo, hi};
}

}  // namespace

std::span<const PostingEntry> BindingTable::nodes_in(int var, SentenceId sid) const {
  return sid_slice(nodes[var], sid);
}

std::span<const Span> BindingTable::spans_in(int var, SentenceId sid) const {
  return sid_slice(spans[var], sid);
}

std::size_t BindingTable::count_in(int var, SentenceId sid) const {
  return nodes_in(var, sid).size() + spans_in(var, sid).size();
}

namespace {

PostingList lookup_path(const NormVar& v, const IndexBundle& b, PathLookup& report) {
  report.var = v.name;
  report.decomposed = decompose(v.path);
  const auto& d = report.decomposed;
  Leg p1, p2, q;
  p1.universal = is_universal(d.pl);
  p2.universal = is_universal(d.pos);
  q.universal = d.word_steps.empty();
  if (!p1.universal) p1.list = b.pl.lookup(d.pl);
  if (!p2.universal) p2.list = b.pos.lookup(d.pos);
  if (!q.universal) q.list = join_word_path(d, b.word);
  report.p1 = p1.list.size();
  report.p2 = p2.list.size();
  report.q = q.list.size();
  report.p1_universal = p1.universal;
  report.p2_universal = p2.universal;
  report.q_universal = q.universal;
  PostingList out;
  if ((p1.universal || !p1.list.empty()) && (p2.universal || !p2.list.empty()) && (q.universal || !q.list.empty()))
    out = join_all(p1, p2, q, d, b);
  report.result = out.size();
  return out;
}

std::vector<Span> literal_spans(const std::vector<std::string>& words, const WordIndex& idx) {
  std::vector<Span> out;
  const auto& first = idx.lookup(words[0]);
  std::vector<std::pair<SentenceId, TokenId>> cur;
  for (const auto& e : first) cur.emplace_back(e.sid, e.tid);
  for (std::size_t k = 1; k < words.size() && !cur.empty(); ++k) {
    const auto& list = idx.lookup(words[k]);
    std::vector<std::pair<SentenceId, TokenId>> next;
    for (auto [sid, start] : cur) {
      PostingEntry probe;
      probe.sid = sid;
      probe.tid = static_cast<TokenId>(start + k);
      auto it = std::lower_bound(list.begin(), list.end(), probe, [](const PostingEntry& a, const PostingEntry& b) {
        return std::tie(a.sid, a.tid) < std::tie(b.sid, b.tid);
      });
      if (it != list.end() && it->sid == sid && it->tid == probe.tid) next.emplace_back(sid, start);
    }
    cur = std::move(next);
  }
  for (auto [sid, start] : cur)
    out.push_back({sid, static_cast<int>(start), static_cast<int>(start + words.size() - 1)});
  return out;
}

}  // namespace

BindingTable candidate_bindings(const NormalizedQuery& n, const IndexBundle& b) {
  BindingTable t;
  std::size_t nv = n.vars.size();
  t.indexed.assign(nv, 0);
  t.nodes.resize(nv);
  t.spans.resize(nv);
  bool empty = false;

  Dominance dom = dominant_paths(n);
  std::vector<PathLookup> dominant_reports;
  for (int i : dom.dominant) {
    PathLookup r;
    t.nodes[i] = lookup_path(n.vars[i], b, r);
    t.indexed[i] = 1;
    if (t.nodes[i].empty()) empty = true;
    t.lookups.push_back(std::move(r));
  }
  for (const auto& [i, over] : dom.dominated) {
    PathLookup r;
    r.dominant = false;
    PostingList list = lookup_path(n.vars[i], b, r);
    std::size_t k = n.vars[i].path.steps.size();
    for (int d : over) {
      if (list.empty()) break;
      std::size_t m = n.vars[d].path.steps.size();
      list = semi_join_above(list, t.nodes[d], static_cast<std::uint32_t>(m - k));
    }
    r.result = list.size();
    t.nodes[i] = std::move(list);
    t.indexed[i] = 1;
    if (t.nodes[i].empty()) empty = true;
    t.lookups.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& v = n.vars[i];
    if (v.kind == VarKind::Entity) {
      for (const auto& e : b.entity.lookup_entities(v.etype))
        t.spans[i].push_back({e.sid, static_cast<int>(e.left), static_cast<int>(e.right)});
    } else if (v.kind == VarKind::Literal) {
      t.spans[i] = literal_spans(v.words, b.word);
    } else {
      continue;
    }
    std::sort(t.spans[i].begin(), t.spans[i].end());
    t.indexed[i] = 1;
    if (t.spans[i].empty()) empty = true;
  }

  if (empty) {
    for (auto& l : t.nodes) l.clear();
    for (auto& l : t.spans) l.clear();
    return t;
  }

  bool any = false;
  std::vector<SentenceId> sids;
  if (!n.trivial_extract()) {
    for (std::size_t i = 0; i < nv; ++i) {
      if (!t.indexed[i]) continue;
      std::vector<SentenceId> mine;
      for (const auto& e : t.nodes[i]) mine.push_back(e.sid);
      for (const auto& s : t.spans[i]) mine.push_back(s.sid);
      mine.erase(std::unique(mine.begin(), mine.end()), mine.end());
      if (!any) {
        sids = std::move(mine);
        any = true;
      } else {
        std::vector<SentenceId> both;
        std::set_intersection(sids.begin(), sids.end(), mine.begin(), mine.end(), std::back_inserter(both));
        sids = std::move(both);
      }
    }
  }
  if (!any) {
    sids.resize(b.sentence_count);
    for (std::size_t s = 0; s < sids.size(); ++s) sids[s] = static_cast<SentenceId>(s);
  }
  t.sentences = std::move(sids);
  return t;
}

std::string explain_dpli(const NormalizedQuery& n, const BindingTable& t) {
  std::ostringstream out;
  auto leg = [](std::size_t size, bool universal) { return universal ? std::string("universal") : std::to_string(size); };
  out << "paths:\n";
  for (const auto& r : t.lookups) {
    out << "  " << r.var << (r.dominant ? " dominant" : " dominated") << "\n";
    out << "    pl   " << pl_string(r.decomposed) << "  [" << leg(r.p1, r.p1_universal) << "]\n";
    out << "    pos  " << pos_string(r.decomposed) << "  [" << leg(r.p2, r.p2_universal) << "]\n";
    out << "    word " << word_string(r.decomposed) << "  [" << leg(r.q, r.q_universal) << "]\n";
    out << "    candidates " << r.result << "\n";
  }
  out << "variables:\n";
  for (std::size_t i = 0; i < n.vars.size(); ++i) {
    if (!t.indexed[i]) continue;
    out << "  " << n.vars[i].name << " " << (t.nodes[i].size() + t.spans[i].size()) << "\n";
  }
  out << "sentences: " << t.sentences.size() << "\n";
  return out.str();
}

}  // namespace koko
