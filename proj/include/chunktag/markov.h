#pragma once

// Second-order Markov model over structural tags: counting, deleted
// interpolation, transition/emission probabilities and exact Viterbi
// decoding. A trained ChunkModel is immutable and safe to share between
// threads.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chunktag/corpus.h"
#include "chunktag/encoding.h"

namespace chunktag {

using TagId = int;

// Structural tags with dense ids in first-seen order. The boundary symbol
// (sentence start padding and end marker) has id size().
class TagAlphabet {
 public:
  TagId add(const StructuralTag& tag);
  // -1 when absent.
  TagId find(const StructuralTag& tag) const;
  const StructuralTag& operator[](TagId id) const { return tags_[id]; }
  int size() const { return static_cast<int>(tags_.size()); }
  TagId boundary() const { return size(); }
  const std::vector<StructuralTag>& tags() const { return tags_; }

  bool operator==(const TagAlphabet& o) const { return tags_ == o.tags_; }

 private:
  std::vector<StructuralTag> tags_;
  std::map<StructuralTag, TagId> ids_;
};

// N-gram counts over boundary-padded tag sequences
//   B B s_0 ... s_n-1 B
// Every position from s_0 through the final B is a predicted position and
// contributes exactly one unigram, bigram and trigram.
struct CountsTable {
  TagAlphabet alphabet;
  std::vector<std::int64_t> unigram;  // size alphabet.size() + 1
  std::map<std::array<TagId, 2>, std::int64_t> bigram;
  std::map<std::array<TagId, 3>, std::int64_t> trigram;
  std::vector<std::map<std::string, std::int64_t>> emission;  // tag -> POS -> n
  std::int64_t total = 0;  // sum of unigram counts
  std::int64_t sentences = 0;
  std::int64_t tokens = 0;

  // Grows the tables for newly added alphabet entries.
  void resize();
  // Adds one encoded sentence.
  void add_sequence(const std::vector<TagId>& ids,
                    const std::vector<std::string>& pos);
  void merge(const CountsTable& other);  // alphabets must be identical

  // Sum over c of bigram(b, c) / trigram(a, b, c).
  std::int64_t history1(TagId b) const;
  std::int64_t history2(TagId a, TagId b) const;

  bool operator==(const CountsTable&) const = default;
};

// Encodes every sentence (normalised for the scheme) and counts. Alphabet
// ids follow first-seen order over the treebank. Encoding runs in parallel.
CountsTable collect_counts(const Treebank& treebank, const EncodingScheme& scheme,
                           DepthPolicy policy = DepthPolicy::kStrict);
// Single-threaded reference.
CountsTable collect_counts_serial(const Treebank& treebank,
                                  const EncodingScheme& scheme,
                                  DepthPolicy policy = DepthPolicy::kStrict);

struct InterpolationWeights {
  double unigram = 1.0 / 3;
  double bigram = 1.0 / 3;
  double trigram = 1.0 / 3;

  double sum() const { return unigram + bigram + trigram; }
  bool operator==(const InterpolationWeights&) const = default;
};

// Successive-deletion estimate: every trigram type votes with its count
// for the order whose leave-one-out relative frequency is largest (ties go
// to the higher order); votes are normalised to sum to 1.
InterpolationWeights deleted_interpolation_weights(const CountsTable& counts);

enum class UnknownPosPolicy {
  kUnk,      // unknown POS is an error
  kUniform,  // uniform emission over the alphabet, position flagged
};

struct ModelInfo {
  std::int64_t sentences = 0;
  std::int64_t tokens = 0;
};

class ChunkModel {
 public:
  // `order` 1 and 2 drop the higher-order terms and renormalise the weights.
  ChunkModel(EncodingScheme scheme, int order, CountsTable counts,
             InterpolationWeights weights);

  const EncodingScheme& scheme() const { return scheme_; }
  int order() const { return order_; }
  const TagAlphabet& alphabet() const { return counts_.alphabet; }
  const CountsTable& counts() const { return counts_; }
  // Weights as estimated / as applied after order truncation.
  const InterpolationWeights& weights() const { return weights_; }
  const InterpolationWeights& effective_weights() const { return effective_; }
  ModelInfo info() const { return {counts_.sentences, counts_.tokens}; }
  TagId boundary() const { return counts_.alphabet.boundary(); }

  // P(c | a, b) over the alphabet plus the end boundary. Unseen histories
  // back off to the next lower order so every history is normalised.
  double transition_prob(TagId a, TagId b, TagId c) const;
  double log_transition(TagId a, TagId b, TagId c) const;

  // With dimension t: 1 if the tag's t equals `pos`, else 0. Otherwise
  // add-0.01 smoothed relative frequency over the POS alphabet.
  double emission_prob(TagId tag, std::string_view pos) const;

  bool knows_pos(std::string_view pos) const;
  const std::set<std::string>& pos_alphabet() const { return pos_alphabet_; }
  // Tags with nonzero emission for a known POS, ascending ids.
  const std::vector<TagId>& candidates(std::string_view pos) const;
  const std::vector<TagId>& all_tags() const { return all_tags_; }

  void save(std::ostream& out) const;
  static ChunkModel load(std::istream& in);

 private:
  void check(TagId id, bool allow_boundary) const;

  EncodingScheme scheme_;
  int order_;
  CountsTable counts_;
  InterpolationWeights weights_;
  InterpolationWeights effective_;

  int width_ = 0;  // alphabet size + 1
  std::vector<double> p1_;
  std::vector<double> p2_;  // width_ x width_, unseen histories backed off
  std::unordered_map<std::uint64_t, double> p3_;
  std::unordered_map<std::uint64_t, std::int64_t> h2_;
  std::vector<std::int64_t> emission_total_;
  std::set<std::string> pos_alphabet_;
  std::map<std::string, std::vector<TagId>, std::less<>> candidates_;
  std::vector<TagId> all_tags_;
  std::vector<TagId> no_tags_;
};

inline constexpr double kEmissionSmoothing = 0.01;
// Floor for the unigram weight of trained models so that every transition
// over the alphabet keeps nonzero probability.
inline constexpr double kMinUnigramWeight = 1e-6;

// Per-position allowed tag ids; nullopt leaves a position unconstrained.
using AllowedTags = std::optional<std::vector<TagId>>;

struct ViterbiResult {
  std::vector<TagId> tags;
  double log_score = 0.0;
  // Positions whose POS the model has never seen (uniform emission used).
  std::vector<int> unknown_positions;
};

// Exact argmax over constrained tag sequences of the summed log transition
// (including the end boundary) and log emission scores. Ties go to the
// lowest tag id. Throws UnknownPosError (kUnk policy) or InfeasibleError.
ViterbiResult viterbi_decode(const ChunkModel& model,
                             const std::vector<std::string>& pos_seq,
                             const std::vector<AllowedTags>& constraints = {},
                             UnknownPosPolicy policy = UnknownPosPolicy::kUniform);

// Log score of a complete tag sequence under the same objective.
double sequence_log_score(const ChunkModel& model,
                          const std::vector<std::string>& pos_seq,
                          const std::vector<TagId>& tags);

// Emission used by the decoder at one position: the model's emission for
// known POS, uniform 1/|alphabet| for unknown POS.
double decoder_log_emission(const ChunkModel& model, TagId tag, std::string_view pos);

}  // namespace chunktag
