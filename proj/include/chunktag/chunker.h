#pragma once

// Training and tagging pipeline: stand-alone chunking of POS sequences and
// interactive mode, where the caller fixes the top-level chunk boundaries and
// the model supplies internal structure and categories.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chunktag/corpus.h"
#include "chunktag/encoding.h"
#include "chunktag/markov.h"

namespace chunktag {

enum class Mode { kStandalone, kInteractive };
enum class Attachment { kFull, kStripped };

struct StripOptions {
  // Matched against token form or POS.
  std::set<std::string> focus_adverbs;
  std::set<std::string> noun_pos = {"NN", "NE", "NNS", "NNP", "NNPS"};
};

struct ChunkerConfig {
  EncodingScheme scheme;
  Mode mode = Mode::kStandalone;
  Attachment attachment = Attachment::kFull;
  UnknownPosPolicy unknown_pos = UnknownPosPolicy::kUniform;
  DepthPolicy depth_policy = DepthPolicy::kLenient;
  int order = 3;
  StripOptions strip;
};

// Requested top-level chunks of one sentence.
struct BoundarySpec {
  std::vector<Span> spans;

  // Throws DataError unless spans are non-empty, inside [0, n) and pairwise
  // disjoint. Returns the spans sorted.
  std::vector<Span> checked(int n) const;
};

// "0-3 5-7" (0-based, half-open). Throws FormatError.
BoundarySpec parse_spans(std::string_view line);
std::string format_spans(const std::vector<Span>& spans);

// Postnominal PPs (trailing PP children after the host's head noun, along
// the right edge of an NP/PP chunk) and focus adverbs at chunk edges become
// independent top-level items. Idempotent.
Sentence strip_attachments(const Sentence& sentence, const StripOptions& options,
                           const CategoryMap& categories = {});

// The gold form a model under `config` is trained on and scored against:
// stripped if configured, then normalised for the scheme.
Sentence prepare_gold(const Sentence& sentence, const ChunkerConfig& config);
Treebank prepare_gold(const Treebank& treebank, const ChunkerConfig& config);

// Prepares, encodes, counts and estimates weights. The unigram weight is
// floored at kMinUnigramWeight. Throws DataError on an empty treebank.
ChunkModel train(const Treebank& treebank, const ChunkerConfig& config);

struct TagResult {
  Sentence sentence;
  std::vector<StructuralTag> tags;
  int repairs = 0;
  std::vector<int> unknown_positions;
  // Interactive spans that no admissible tag sequence could fill; each is
  // emitted as a flat chunk.
  std::vector<Span> infeasible_spans;
  // Log probability contributed by the words of each top-level chunk.
  std::vector<double> chunk_scores;
  double log_score = 0.0;
};

TagResult tag_standalone(const ChunkModel& model, const std::vector<Token>& tokens,
                         UnknownPosPolicy policy = UnknownPosPolicy::kUniform);

// Top-level chunk spans of the result equal `boundaries` exactly.
TagResult tag_interactive(const ChunkModel& model, const std::vector<Token>& tokens,
                          const BoundarySpec& boundaries,
                          UnknownPosPolicy policy = UnknownPosPolicy::kUniform);

// Tags every sentence of `gold` under `config`. In interactive mode the
// boundaries are the top-level chunk spans of the gold sentence. Runs in
// parallel; the serial version is the reference.
std::vector<TagResult> tag_batch(const ChunkModel& model, const ChunkerConfig& config,
                                 const std::vector<Sentence>& gold);
std::vector<TagResult> tag_batch_serial(const ChunkModel& model,
                                        const ChunkerConfig& config,
                                        const std::vector<Sentence>& gold);

}  // namespace chunktag
