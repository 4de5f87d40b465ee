#include "koko/labels.hpp"

#include <algorithm>
#include <unordered_set>

#include "koko/text_util.hpp"

namespace koko {

const std::vector<std::string>& parse_label_vocabulary() {
  static const std::vector<std::string> v = {
      // Stanford / Google NL dependency labels
      "root", "abbrev", "acomp", "advcl", "advmod", "agent", "amod", "appos", "attr", "aux", "auxpass", "cc",
      "ccomp", "complm", "conj", "cop", "csubj", "csubjpass", "dep", "det", "discourse", "dobj", "expl",
      "goeswith", "iobj", "mark", "mwe", "neg", "nn", "npadvmod", "nsubj", "nsubjpass", "num", "number",
      "parataxis", "partmod", "pcomp", "pobj", "poss", "possessive", "preconj", "predet", "prep", "prepc",
      "prt", "punct", "purpcl", "quantmod", "rcmod", "ref", "rel", "tmod", "vmod", "xcomp", "xsubj", "p",
      "ps", "nummod", "dative", "oprd", "intj", "meta", "relcl", "acl", "nmod", "npmod", "case", "obj",
      // Universal Dependencies v2 (including common subtypes)
      "clf", "compound", "dislocated", "fixed", "flat", "iobj", "list", "obl", "orphan", "reparandum", "vocative",
      "aux:pass", "nsubj:pass", "csubj:pass", "acl:relcl", "nmod:poss", "nmod:tmod", "nmod:npmod", "obl:tmod",
      "obl:npmod", "compound:prt", "det:predet", "cc:preconj", "flat:name", "expl:pass"};
  return v;
}

const std::vector<std::string>& pos_tag_vocabulary() {
  static const std::vector<std::string> v = {
      // universal tagset
      "verb", "noun", "pron", "adj", "adv", "adp", "conj", "det", "num", "prt", "x", ".",
      // Universal Dependencies UPOS
      "aux", "cconj", "intj", "part", "propn", "punct", "sconj", "sym",
      // Google NL extras
      "affix"};
  return v;
}

LabelClass classify_label(std::string_view name) {
  static const std::unordered_set<std::string> pl(parse_label_vocabulary().begin(), parse_label_vocabulary().end());
  static const std::unordered_set<std::string> pos(pos_tag_vocabulary().begin(), pos_tag_vocabulary().end());
  auto key = to_lower(name);
  if (pl.count(key)) return LabelClass::ParseLabel;
  if (pos.count(key)) return LabelClass::PosTag;
  return LabelClass::Unknown;
}

}  // namespace koko
