#include "koko/document.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "koko/error.hpp"
#include "koko/text_util.hpp"

namespace koko {

std::string to_string(const PostingEntry& e) {
  return "(" + std::to_string(e.sid) + "," + std::to_string(e.tid) + "," + std::to_string(e.left) + "-" +
         std::to_string(e.right) + "," + std::to_string(e.depth) + ")";
}

std::optional<std::string> validate_sentence(const std::vector<Token>& tokens) {
  if (tokens.empty()) return "empty sentence";
  std::optional<TokenId> root;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.tid != i) return "token id " + std::to_string(t.tid) + " out of sequence (expected " + std::to_string(i) + ")";
    if (!t.head) {
      if (root) return "more than one root (tokens " + std::to_string(*root) + " and " + std::to_string(i) + ")";
      root = t.tid;
      if (t.label != "root") return "root token " + std::to_string(i) + " must have label \"root\"";
    } else {
      if (*t.head >= tokens.size()) return "head " + std::to_string(*t.head) + " out of range at token " + std::to_string(i);
      if (*t.head == t.tid) return "token " + std::to_string(i) + " is its own head";
    }
  }
  if (!root) return "no root token";
  // every token must reach the root within |tokens| steps
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    TokenId cur = static_cast<TokenId>(i);
    std::size_t steps = 0;
    while (tokens[cur].head) {
      cur = *tokens[cur].head;
      if (++steps > tokens.size()) return "cyclic head relation through token " + std::to_string(i);
    }
  }
  return std::nullopt;
}

Sentence::Sentence(SentenceId sid, std::vector<Token> tokens) : sid_(sid), tokens_(std::move(tokens)) {
  children_.resize(tokens_.size());
  for (auto& t : tokens_) {
    t.sid = sid;
    if (t.head)
      children_[*t.head].push_back(t.tid);
    else
      root_ = t.tid;
  }
  meta_ = compute_tree_meta(*this);
  entities_ = entity_spans(*this);
}

PostingEntry Sentence::posting(TokenId tid) const {
  const auto& m = meta_[tid];
  return PostingEntry{sid_, tid, m.left, m.right, m.depth};
}

std::vector<std::string> Sentence::words(int start, int end) const {
  std::vector<std::string> out;
  for (int i = std::max(start, 0); i <= end && i < static_cast<int>(tokens_.size()); ++i) out.push_back(tokens_[i].text);
  return out;
}

std::string Sentence::text(int start, int end) const { return detokenize(words(start, end)); }

TreeMeta compute_tree_meta(const Sentence& s) {
  TreeMeta meta;
  const auto n = s.size();
  meta.nodes.resize(n);
  if (n == 0) return meta;
  // iterative post-order from the root
  std::vector<std::pair<TokenId, std::size_t>> stack;
  stack.emplace_back(s.root_tid(), 0);
  meta.nodes[s.root_tid()].depth = 0;
  while (!stack.empty()) {
    auto& [tid, next] = stack.back();
    const auto& kids = s.children(tid);
    if (next < kids.size()) {
      TokenId child = kids[next++];
      meta.nodes[child].depth = meta.nodes[tid].depth + 1;
      stack.emplace_back(child, 0);
      continue;
    }
    auto& m = meta.nodes[tid];
    m.left = m.right = tid;
    for (TokenId c : kids) {
      m.left = std::min(m.left, meta.nodes[c].left);
      m.right = std::max(m.right, meta.nodes[c].right);
    }
    stack.pop_back();
  }
  return meta;
}

bool is_parent(const PostingEntry& p, const PostingEntry& c) {
  return p.sid == c.sid && p.left <= c.left && p.right >= c.right && p.depth + 1 == c.depth;
}

std::vector<EntityMention> entity_spans(const Sentence& s) {
  std::vector<EntityMention> out;
  const auto& toks = s.tokens();
  std::size_t i = 0;
  while (i < toks.size()) {
    if (!toks[i].etype) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < toks.size() && toks[j].etype == toks[i].etype && toks[j].iob.rfind("I-", 0) == 0) ++j;
    EntityMention m;
    m.etype = *toks[i].etype;
    m.span = Span{s.sid(), static_cast<int>(i), static_cast<int>(j - 1)};
    m.surface = s.text(m.span.start, m.span.end);
    out.push_back(std::move(m));
    i = j;
  }
  return out;
}

Corpus::Corpus(std::vector<AnnotatedDocument> docs) : docs_(std::move(docs)) {
  for (std::uint32_t d = 0; d < docs_.size(); ++d) {
    for (std::uint32_t i = 0; i < docs_[d].sentences.size(); ++i) {
      locator_.emplace_back(d, i);
      tokens_ += docs_[d].sentences[i].size();
    }
  }
}

const Sentence& Corpus::sentence(SentenceId sid) const {
  auto [d, i] = locator_.at(sid);
  return docs_[d].sentences[i];
}

const AnnotatedDocument& Corpus::document_of(SentenceId sid) const { return docs_[locator_.at(sid).first]; }

namespace {

struct CorpusReader {
  std::string source;
  std::vector<AnnotatedDocument> docs;
  std::vector<Token> pending;
  std::size_t pending_line = 0;
  std::size_t next_sid = 0;
  std::string current_doc;

  AnnotatedDocument& doc() {
    if (docs.empty()) docs.push_back(AnnotatedDocument{current_doc.empty() ? "default" : current_doc, {}});
    return docs.back();
  }

  void flush() {
    if (pending.empty()) return;
    auto& d = doc();
    if (auto err = validate_sentence(pending)) throw CorpusError(d.doc_id, next_sid, pending_line, *err);
    d.sentences.emplace_back(static_cast<SentenceId>(next_sid), std::move(pending));
    pending.clear();
    ++next_sid;
  }

  void token_line(const std::string& line, std::size_t lineno) {
    auto cols = split(line, '\t');
    const std::string& doc_id = docs.empty() ? (current_doc.empty() ? "default" : current_doc) : docs.back().doc_id;
    auto fail = [&](const std::string& what) { throw CorpusError(doc_id, next_sid, lineno, what); };
    if (cols.size() != 7) fail("expected 7 tab-separated columns, found " + std::to_string(cols.size()));
    auto parse_uint = [&](const std::string& s, const char* what) -> long {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) fail(std::string("bad ") + what + " '" + s + "'");
      return std::stol(s);
    };
    if (pending.empty()) pending_line = lineno;
    long sid = parse_uint(cols[0], "sentence id");
    if (static_cast<std::size_t>(sid) != next_sid) fail("sentence id " + cols[0] + " out of sequence (expected " + std::to_string(next_sid) + ")");
    long tid = parse_uint(cols[1], "token id");
    if (static_cast<std::size_t>(tid) != pending.size()) fail("token id " + cols[1] + " out of sequence");
    Token t;
    t.sid = static_cast<SentenceId>(sid);
    t.tid = static_cast<TokenId>(tid);
    t.text = cols[2];
    t.pos = cols[3];
    t.label = cols[4];
    if (cols[5] != "-1") {
      long head = parse_uint(cols[5], "head");
      t.head = static_cast<TokenId>(head);
    }
    t.iob = cols[6];
    if (t.iob != "O") {
      if (t.iob.size() < 3 || (t.iob[0] != 'B' && t.iob[0] != 'I') || t.iob[1] != '-') fail("bad IOB2 tag '" + t.iob + "'");
      t.etype = t.iob.substr(2);
      if (t.iob[0] == 'I' && (pending.empty() || pending.back().etype != t.etype))
        fail("IOB2 violation: '" + t.iob + "' without a preceding B-/I- of the same type");
    }
    pending.push_back(std::move(t));
  }
};

}  // namespace

std::vector<AnnotatedDocument> parse_corpus(std::istream& in, const std::string& source_name) {
  CorpusReader r;
  r.source = source_name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      r.flush();
      continue;
    }
    if (line[0] == '#') {
      auto body = trim(std::string_view(line).substr(1));
      if (body.rfind("doc_id", 0) == 0) {
        auto eq = body.find('=');
        if (eq != std::string::npos) {
          r.flush();
          r.current_doc = trim(std::string_view(body).substr(eq + 1));
          r.docs.push_back(AnnotatedDocument{r.current_doc, {}});
        }
      }
      continue;
    }
    r.token_line(line, lineno);
  }
  r.flush();
  return std::move(r.docs);
}

std::vector<AnnotatedDocument> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open corpus file '" + path + "'");
  return parse_corpus(in, path);
}

void write_corpus(std::ostream& out, const std::vector<AnnotatedDocument>& docs) {
  for (const auto& d : docs) {
    out << "# doc_id = " << d.doc_id << '\n';
    for (const auto& s : d.sentences) {
      for (const auto& t : s.tokens()) {
        out << t.sid << '\t' << t.tid << '\t' << t.text << '\t' << t.pos << '\t' << t.label << '\t'
            << (t.head ? std::to_string(*t.head) : std::string("-1")) << '\t' << t.iob << '\n';
      }
      out << '\n';
    }
  }
}

std::string corpus_fingerprint(const std::vector<AnnotatedDocument>& docs) {
  std::ostringstream ss;
  write_corpus(ss, docs);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : ss.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string detokenize(const std::vector<std::string>& words) {
  static const std::string closers = ",.;:!?)]}%";
  std::string out;
  bool glue_next = false;
  for (const auto& w : words) {
    bool attach = !out.empty() && (glue_next || w.find_first_not_of(closers) == std::string::npos ||
                                   w.rfind("'", 0) == 0 || w == "n't");
    if (!out.empty() && !attach) out += ' ';
    out += w;
    glue_next = (w == "(" || w == "[" || w == "{");
  }
  return out;
}

}  // namespace koko
