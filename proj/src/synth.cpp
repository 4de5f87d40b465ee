#include "koko/synth.hpp"

#include <memory>
#include <random>
#include <set>

namespace koko {

namespace {

struct Node {
  std::string text, pos, label;
  std::string etype;  // set on every token of a mention
  std::vector<std::unique_ptr<Node>> left, right;
};

const std::vector<std::string> kVerbs = {"ate", "bought", "saw", "made", "liked", "found", "called", "visited",
                                         "opened", "sold", "wrote", "built", "served", "took", "gave", "met",
                                         "played", "won", "lost", "started", "loved", "ordered", "cooked", "read"};
const std::vector<std::string> kNouns = {"cake", "coffee", "book", "city", "team", "store", "pie", "game",
                                         "cream", "house", "friend", "menu", "market", "song", "road", "school",
                                         "letter", "garden", "chocolate", "river", "table", "car", "window", "bread",
                                         "cup", "shop", "film", "park", "office", "street"};
const std::vector<std::string> kAdjs = {"delicious", "big", "small", "old", "new", "good", "happy", "red",
                                        "famous", "local", "dark", "sweet", "quiet", "busy", "fresh"};
const std::vector<std::string> kAdvs = {"quickly", "often", "also", "never", "always", "slowly", "today", "again"};
const std::vector<std::string> kPreps = {"in", "at", "on", "with", "from", "near", "for", "after"};
const std::vector<std::string> kDets = {"the", "a", "some", "this", "every"};
const std::vector<std::string> kPron = {"I", "she", "he", "they", "we", "it"};
const std::vector<std::string> kAux = {"has", "will", "can", "did"};
const std::vector<std::string> kFirst = {"Anna", "Bob", "Cyd", "Maria", "John", "Li", "Omar", "Sara"};
const std::vector<std::string> kLast = {"Smith", "Charisse", "Jones", "Chen", "Garcia", "Brown"};
const std::vector<std::string> kOrgs = {"Blue", "Bottle", "Acme", "Stumptown", "Roasters", "Ritual", "United"};
const std::vector<std::string> kPlaces = {"Portland", "Tokyo", "Paris", "Beijing", "Oakland", "Berlin"};
const std::vector<std::string> kMonths = {"May", "June", "December", "March"};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::vector<Token> sentence(SentenceId sid) {
    auto root = clause("root", 0, true);
    root->right.push_back(leaf(".", "PUNCT", "punct"));
    std::vector<Token> out;
    flatten(*root, sid, out);
    return out;
  }

 private:
  std::mt19937_64 rng_;

  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  // Zipf-like: word i has weight 1 / (i + 1).
  const std::string& pick(const std::vector<std::string>& v) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = 1.0 / static_cast<double>(i + 1);
    std::discrete_distribution<std::size_t> d(w.begin(), w.end());
    return v[d(rng_)];
  }

  std::unique_ptr<Node> leaf(std::string text, std::string pos, std::string label) {
    auto n = std::make_unique<Node>();
    n->text = std::move(text);
    n->pos = std::move(pos);
    n->label = std::move(label);
    return n;
  }

  std::unique_ptr<Node> noun_phrase(const std::string& label, int depth) {
    double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    if (r < 0.12) {  // person
      auto head = leaf(pick(kLast), "PROPN", label);
      head->etype = "Person";
      auto first = leaf(pick(kFirst), "PROPN", "nn");
      first->etype = "Person";
      if (chance(0.5)) head->left.push_back(std::move(first));
      else { head->text = first->text; }
      return head;
    }
    if (r < 0.2) {  // organization
      auto head = leaf(pick(kOrgs), "PROPN", label);
      head->etype = "Organization";
      if (chance(0.6)) {
        auto mod = leaf(pick(kOrgs), "PROPN", "nn");
        mod->etype = "Organization";
        head->left.push_back(std::move(mod));
      }
      return head;
    }
    if (r < 0.26) {  // place
      auto head = leaf(pick(kPlaces), "PROPN", label);
      head->etype = "GPE";
      return head;
    }
    if (r < 0.3) {  // date
      auto head = leaf(std::to_string(1900 + std::uniform_int_distribution<int>(0, 120)(rng_)), "NUM", label);
      head->etype = "Date";
      auto m = leaf(pick(kMonths), "PROPN", "nn");
      m->etype = "Date";
      head->left.push_back(std::move(m));
      return head;
    }
    if (r < 0.38) return leaf(pick(kPron), "PRON", label);
    auto head = leaf(pick(kNouns), "NOUN", label);
    if (chance(0.7)) head->left.push_back(leaf(pick(kDets), "DET", "det"));
    int adjs = chance(0.35) ? (chance(0.3) ? 2 : 1) : 0;
    for (int i = 0; i < adjs; ++i) head->left.push_back(leaf(pick(kAdjs), "ADJ", "amod"));
    if (chance(0.2)) {
      auto nn = leaf(pick(kNouns), "NOUN", "nn");
      if (chance(0.3)) {
        nn->etype = "Entity";
        head->etype = "Entity";
      }
      head->left.push_back(std::move(nn));
    }
    if (depth < 3 && chance(0.15)) head->right.push_back(prep_phrase(depth + 1));
    if (depth < 2 && chance(0.08)) {
      auto rc = leaf(pick(kVerbs), "VERB", "rcmod");
      rc->left.push_back(leaf("that", "PRON", "nsubj"));
      if (chance(0.6)) rc->right.push_back(noun_phrase("dobj", depth + 2));
      head->right.push_back(leaf(",", "PUNCT", "punct"));
      head->right.push_back(std::move(rc));
    }
    return head;
  }

  std::unique_ptr<Node> prep_phrase(int depth) {
    auto p = leaf(pick(kPreps), "ADP", "prep");
    p->right.push_back(noun_phrase("pobj", depth + 1));
    return p;
  }

  std::unique_ptr<Node> clause(const std::string& label, int depth, bool top) {
    auto v = leaf(pick(kVerbs), "VERB", label);
    if (chance(0.9)) v->left.push_back(noun_phrase("nsubj", depth + 1));
    if (chance(0.2)) v->left.push_back(leaf(pick(kAux), "AUX", "aux"));
    if (chance(0.08)) v->left.push_back(leaf("not", "PART", "neg"));
    if (chance(0.7)) v->right.push_back(noun_phrase("dobj", depth + 1));
    if (chance(0.4)) v->right.push_back(prep_phrase(depth + 1));
    if (chance(0.2)) v->right.push_back(leaf(pick(kAdvs), "ADV", "advmod"));
    if (depth < 2 && chance(0.12)) {
      auto x = leaf(pick(kVerbs), "VERB", "xcomp");
      x->left.push_back(leaf("to", "PART", "aux"));
      if (chance(0.7)) x->right.push_back(noun_phrase("dobj", depth + 2));
      v->right.push_back(std::move(x));
    }
    if (top && chance(0.15)) {
      v->right.push_back(leaf("and", "CCONJ", "cc"));
      v->right.push_back(clause("conj", depth + 1, false));
    }
    return v;
  }

  // In-order: left dependents, the head, right dependents. Returns the head's index.
  std::size_t flatten(const Node& n, SentenceId sid, std::vector<Token>& out) {
    std::vector<std::size_t> kids;
    for (const auto& c : n.left) kids.push_back(flatten(*c, sid, out));
    std::size_t self = out.size();
    Token t;
    t.sid = sid;
    t.tid = static_cast<TokenId>(self);
    t.text = n.text;
    t.pos = n.pos;
    t.label = n.label;
    if (!n.etype.empty()) t.etype = n.etype;
    out.push_back(std::move(t));
    for (const auto& c : n.right) kids.push_back(flatten(*c, sid, out));
    for (std::size_t k : kids) out[k].head = static_cast<TokenId>(self);
    return self;
  }
};

// IOB2 tags. Multi-token mentions are a compound modifier directly followed
// by its head, so a token continues a mention iff its predecessor has the
// same type and attaches to it.
void assign_iob(std::vector<Token>& toks) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!toks[i].etype) {
      toks[i].iob = "O";
      continue;
    }
    bool cont = i > 0 && toks[i - 1].etype == toks[i].etype && toks[i - 1].head == toks[i].tid;
    toks[i].iob = (cont ? "I-" : "B-") + *toks[i].etype;
  }
}

std::vector<Token> make_sentence(Gen& g, SentenceId sid) {
  auto toks = g.sentence(sid);
  assign_iob(toks);
  return toks;
}

std::string surface(const std::vector<Token>& toks) {
  std::string s;
  for (const auto& t : toks) s += t.text + ' ' + t.label + ' ' + (t.head ? std::to_string(*t.head) : "-") + '|';
  return s;
}

}  // namespace

std::vector<AnnotatedDocument> synth_corpus(const SynthOptions& opt) {
  Gen g(opt.seed);
  std::vector<AnnotatedDocument> docs;
  const std::size_t per_doc = std::max<std::size_t>(1, opt.sentences_per_doc);
  for (std::size_t i = 0; i < opt.sentences; ++i) {
    if (i % per_doc == 0) docs.push_back({"doc" + std::to_string(i / per_doc), {}});
    docs.back().sentences.emplace_back(static_cast<SentenceId>(i), make_sentence(g, static_cast<SentenceId>(i)));
  }
  return docs;
}

std::vector<AnnotatedDocument> template_mix_corpus(std::size_t copies, std::size_t distinct, std::uint64_t seed) {
  Gen g(seed);
  auto tmpl = make_sentence(g, 0);
  std::set<std::string> seen{surface(tmpl)};
  std::vector<std::vector<Token>> others;
  while (others.size() < distinct) {
    auto t = make_sentence(g, 0);
    if (seen.insert(surface(t)).second) others.push_back(std::move(t));
  }
  AnnotatedDocument doc{"template-mix", {}};
  std::size_t ci = 0, oi = 0;
  SentenceId sid = 0;
  while (ci < copies || oi < others.size()) {
    std::vector<Token> toks;
    if (ci < copies && (oi >= others.size() || ci <= oi)) {
      toks = tmpl;
      ++ci;
    } else {
      toks = others[oi++];
    }
    for (auto& t : toks) t.sid = sid;
    doc.sentences.emplace_back(sid, std::move(toks));
    ++sid;
  }
  return {doc};
}

}  // namespace koko
