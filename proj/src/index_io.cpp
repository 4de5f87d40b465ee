// On-disk layout of an index directory.
//
//   manifest.json  {"format_version", "fingerprint", "sentences", "tokens",
//                   "words", "entities", "pl_nodes", "pos_nodes"}
//   *.idx          "KOKO" | u32 version | u32 record count | records
//
// Every record is a u32 byte length followed by its payload. Integers are
// little-endian u32, strings are a u32 length plus UTF-8 bytes, and a posting
// is five u32 values (sid, tid, left, right, depth).
//
//   word.idx    record = string word | u32 n | n postings        (words sorted)
//   entity.idx  record = string surface | u32 sid | u32 left | u32 right | string etype
//   pl.idx      record = u32 id | u32 parent | string label | u32 n | n postings
//   pos.idx     same as pl.idx; record 0 is the super-root

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "koko/error.hpp"
#include "koko/index.hpp"

namespace koko {
namespace {

namespace fs = std::filesystem;

constexpr char kMagic[4] = {'K', 'O', 'K', 'O'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_ += s;
  }
  void posting(const PostingEntry& e) {
    u32(e.sid);
    u32(e.tid);
    u32(e.left);
    u32(e.right);
    u32(e.depth);
  }
  std::string take() {
    std::string out = std::move(buf_);
    buf_.clear();
    return out;
  }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string str() {
    auto n = u32();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  PostingEntry posting() {
    PostingEntry e;
    e.sid = u32();
    e.tid = u32();
    e.left = u32();
    e.right = u32();
    e.depth = u32();
    return e;
  }
  // Sub-reader over the next length-prefixed record.
  Reader record() {
    auto n = u32();
    need(n);
    Reader r(data_.substr(pos_, n), name_);
    pos_ += n;
    return r;
  }
  bool done() const { return pos_ == data_.size(); }
  void header() {
    need(4);
    if (data_.compare(0, 4, kMagic, 4) != 0) throw FormatError(name_ + ": bad magic");
    pos_ = 4;
    auto v = u32();
    if (v != kIndexFormatVersion)
      throw FormatError(name_ + ": index format version " + std::to_string(v) + ", expected " +
                        std::to_string(kIndexFormatVersion));
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw FormatError(name_ + ": truncated file");
  }
  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

void write_file(const fs::path& path, const std::vector<std::string>& records) {
  Writer w;
  std::string out(kMagic, 4);
  w.u32(kIndexFormatVersion);
  w.u32(static_cast<std::uint32_t>(records.size()));
  out += w.take();
  for (const auto& r : records) {
    w.u32(static_cast<std::uint32_t>(r.size()));
    out += w.take();
    out += r;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FormatError("cannot write " + path.string());
}

Reader read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  Reader r(ss.str(), path.filename().string());
  r.header();
  return r;
}

std::vector<std::string> hierarchy_records(const HierarchyIndex& h) {
  std::vector<std::string> out;
  for (const auto& n : h.nodes()) {
    Writer w;
    w.u32(n.id);
    w.u32(n.parent);
    w.str(n.label);
    w.u32(static_cast<std::uint32_t>(n.postings.size()));
    for (const auto& p : n.postings) w.posting(p);
    out.push_back(w.take());
  }
  return out;
}

void read_hierarchy(const fs::path& path, HierarchyIndex& h) {
  Reader r = read_file(path);
  auto count = r.u32();
  auto& nodes = h.mutable_nodes();
  nodes.clear();
  for (std::uint32_t i = 0; i < count; ++i) {
    Reader rec = r.record();
    HierarchyNode n;
    n.id = rec.u32();
    n.parent = rec.u32();
    n.label = rec.str();
    auto np = rec.u32();
    n.postings.reserve(np);
    for (std::uint32_t k = 0; k < np; ++k) n.postings.push_back(rec.posting());
    if (n.id != i || (i > 0 && n.parent >= i)) throw FormatError(path.filename().string() + ": bad node order");
    nodes.push_back(std::move(n));
  }
  if (nodes.empty()) throw FormatError(path.filename().string() + ": missing super-root");
  for (std::size_t i = 1; i < nodes.size(); ++i) nodes[nodes[i].parent].children.push_back(static_cast<std::uint32_t>(i));
  for (auto& n : nodes)
    std::sort(n.children.begin(), n.children.end(),
              [&](std::uint32_t a, std::uint32_t b) { return nodes[a].label < nodes[b].label; });
  if (!r.done()) throw FormatError(path.filename().string() + ": trailing bytes");
}

}  // namespace

void save_bundle(const IndexBundle& b, const std::string& dir) {
  fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw FormatError("cannot create " + dir + ": " + ec.message());

  std::vector<std::string> words;
  for (const auto& k : b.word.keys()) {
    Writer w;
    w.str(k);
    const auto& list = b.word.lookup(k);
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) w.posting(p);
    words.push_back(w.take());
  }
  write_file(root / "word.idx", words);

  std::vector<std::string> ents;
  for (const auto& e : b.entity.entries()) {
    Writer w;
    w.str(e.surface);
    w.u32(e.sid);
    w.u32(e.left);
    w.u32(e.right);
    w.str(e.etype);
    ents.push_back(w.take());
  }
  write_file(root / "entity.idx", ents);
  write_file(root / "pl.idx", hierarchy_records(b.pl));
  write_file(root / "pos.idx", hierarchy_records(b.pos));

  nlohmann::json m = {{"format_version", b.version},
                      {"fingerprint", b.fingerprint},
                      {"sentences", b.sentence_count},
                      {"tokens", b.token_count},
                      {"words", b.word.size()},
                      {"entities", b.entity.entries().size()},
                      {"pl_nodes", b.pl.node_count()},
                      {"pos_nodes", b.pos.node_count()}};
  std::ofstream f(root / "manifest.json");
  f << m.dump(2) << "\n";
  if (!f) throw FormatError("cannot write manifest in " + dir);
}

IndexBundle load_bundle(const std::string& dir, const std::optional<std::string>& expected_fingerprint) {
  fs::path root(dir);
  IndexBundle b;
  {
    std::ifstream f(root / "manifest.json");
    if (!f) throw FormatError("no index manifest in " + dir);
    nlohmann::json m;
    try {
      f >> m;
      b.version = m.at("format_version").get<std::uint32_t>();
      b.fingerprint = m.at("fingerprint").get<std::string>();
      b.sentence_count = m.at("sentences").get<std::size_t>();
      b.token_count = m.at("tokens").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("bad index manifest in " + dir + ": " + e.what());
    }
    if (b.version != kIndexFormatVersion)
      throw FormatError("index format version " + std::to_string(b.version) + ", expected " +
                        std::to_string(kIndexFormatVersion));
    if (expected_fingerprint && *expected_fingerprint != b.fingerprint)
      throw FormatError("index fingerprint " + b.fingerprint + " does not match corpus fingerprint " +
                        *expected_fingerprint);
  }
  {
    Reader r = read_file(root / "word.idx");
    auto count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      Reader rec = r.record();
      std::string word = rec.str();
      auto n = rec.u32();
      auto& list = b.word.entry(word);
      list.reserve(n);
      for (std::uint32_t k = 0; k < n; ++k) list.push_back(rec.posting());
    }
    if (!r.done()) throw FormatError("word.idx: trailing bytes");
  }
  {
    Reader r = read_file(root / "entity.idx");
    auto count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      Reader rec = r.record();
      EntityEntry e;
      e.surface = rec.str();
      e.sid = rec.u32();
      e.left = rec.u32();
      e.right = rec.u32();
      e.etype = rec.str();
      b.entity.add(std::move(e));
    }
    b.entity.finish();
    if (!r.done()) throw FormatError("entity.idx: trailing bytes");
  }
  read_hierarchy(root / "pl.idx", b.pl);
  read_hierarchy(root / "pos.idx", b.pos);
  return b;
}

}  // namespace koko
