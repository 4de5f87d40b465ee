#pragma once

#include <cstdint>
#include <vector>

#include "koko/document.hpp"

namespace koko {

struct SynthOptions {
  std::size_t sentences = 2000;
  std::uint64_t seed = 1;
  std::size_t sentences_per_doc = 10;
};

/// Seeded corpus of projective dependency trees from a small phrase grammar
/// (clauses with subjects, objects, prepositional phrases, relative clauses,
/// coordination) with Zipf-weighted vocabularies and IOB2 entity mentions.
/// Identical options give identical corpora.
std::vector<AnnotatedDocument> synth_corpus(const SynthOptions& opt);

/// `copies` copies of one template sentence interleaved with `distinct`
/// pairwise-distinct generated sentences that all differ from the template.
std::vector<AnnotatedDocument> template_mix_corpus(std::size_t copies, std::size_t distinct, std::uint64_t seed);

}  // namespace koko
