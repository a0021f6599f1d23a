#pragma once

// Scoring of predicted against gold chunk structures, cross-validation and
// learning curves.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chunktag/chunker.h"
#include "chunktag/corpus.h"

namespace chunktag {

// A fraction with the counts behind it. For averaged reports `value` is the
// mean of the fold values and the counts are summed.
struct Measure {
  double value = 1.0;
  std::int64_t correct = 0;
  std::int64_t total = 0;

  static Measure of(std::int64_t correct, std::int64_t total);
};

struct EvalReport {
  Measure tag_accuracy;  // r of every word
  Measure bracketing_precision;
  Measure bracketing_recall;
  Measure labelled_precision;
  Measure labelled_recall;
  // Top-level chunks matched as whole subtrees, labels included.
  Measure top_level_precision;
  Measure top_level_recall;
  // Top-level chunks matched by span only.
  Measure boundary_precision;
  Measure boundary_recall;
  std::int64_t repairs = 0;
  std::int64_t sentences = 0;
  std::int64_t tokens = 0;
};

// Phrase nodes are compared as (span) and (span, label) multisets. Throws
// DataError unless the corpora align token by token.
EvalReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted);
EvalReport score(const Treebank& gold, const Treebank& predicted);

// Trains on `train_set`, tags the prepared form of `test_set` and scores.
EvalReport train_and_score(const Treebank& train_set, const Treebank& test_set,
                           const ChunkerConfig& config);

// Unweighted mean of the fold values; counts are summed.
EvalReport average(const std::vector<EvalReport>& reports);

struct CrossValidation {
  std::uint64_t seed = 0;
  EvalReport mean;
  std::vector<EvalReport> folds;
};

// Seeded shuffle, then fold k tests on the k-th of `folds` contiguous parts
// and trains on the rest. Folds run in parallel; results do not depend on
// the thread count.
CrossValidation cross_validate(const Treebank& treebank, const ChunkerConfig& config,
                               int folds, std::uint64_t seed);
CrossValidation cross_validate_serial(const Treebank& treebank,
                                      const ChunkerConfig& config, int folds,
                                      std::uint64_t seed);

// Seeded permutation of 0..n-1 (std::mt19937_64 driving std::shuffle).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

struct CurvePoint {
  int size = 0;
  double top_level_precision = 0.0;
};

// After a seeded shuffle the last 10% is the fixed test set; each size
// trains on that prefix of the remaining 90%.
std::vector<CurvePoint> learning_curve(const Treebank& treebank, const ChunkerConfig& config,
                                       const std::vector<int>& sizes, std::uint64_t seed);

std::string render_table(const EvalReport& report);
// `key=value` lines.
std::string render_keyvalue(const EvalReport& report);
std::string render_curve(const std::vector<CurvePoint>& curve);

}  // namespace chunktag
