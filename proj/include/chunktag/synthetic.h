#pragma once

// Seeded generator of German-like chunk treebanks: NPs with prenominal
// adjectives and participial APs, flat PPs, multi-token proper nouns,
// coordinations, postnominal PPs whose attachment is a coin flip, and
// focus adverbs that attach to the following chunk or stay outside.

#include <cstdint>

#include "chunktag/chunker.h"
#include "chunktag/corpus.h"

namespace chunktag {

struct SyntheticOptions {
  std::uint64_t seed = 1;
  int sentences = 1000;
  // Chance that an NP/PP is followed by a postnominal PP, and that such a
  // PP is attached inside it rather than placed next to it.
  double postnominal_pp = 0.5;
  double pp_attach = 0.5;
  // Chance of a focus adverb before a chunk, and that it is attached to it.
  double focus_adverb = 0.15;
  double focus_attach = 0.5;
  // Share of prenominal modifiers that are participial APs with an
  // embedded PP (the deepest structures of the grammar).
  double participial_ap = 0.2;
  // Agreement-marked POS symbols (ART.Dat.Sg.Fem, NN.Acc.Pl.Masc, ...)
  // for a larger, sparser tagset.
  bool case_features = false;
};

Treebank generate_treebank(const SyntheticOptions& options);

// Focus adverbs and noun POS symbols of the generated corpora.
StripOptions synthetic_strip_options(const SyntheticOptions& options);

}  // namespace chunktag
