#include "chunktag/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <map>
#include <random>

#include "chunktag/error.h"

namespace chunktag {

Measure Measure::of(std::int64_t correct, std::int64_t total) {
  // Nothing to get wrong counts as perfect.
  return {total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total),
          correct, total};
}

namespace {

struct Tally {
  std::int64_t tags_ok = 0, tags = 0;
  std::int64_t br_ok = 0, lb_ok = 0, br_gold = 0, br_pred = 0;
  std::int64_t top_ok = 0, bound_ok = 0, top_gold = 0, top_pred = 0;
};

void collect_nodes(const Node& n, std::vector<std::pair<Span, std::string>>& out) {
  if (n.is_leaf()) return;
  out.emplace_back(n.span(), n.label);
  for (const Node& c : n.children) collect_nodes(c, out);
}

std::vector<std::pair<Span, std::string>> nodes_of(const Sentence& s) {
  std::vector<std::pair<Span, std::string>> out;
  for (const Node& n : s.forest) collect_nodes(n, out);
  std::sort(out.begin(), out.end());
  return out;
}

// Size of the multiset intersection of two sorted ranges under `key`.
template <typename T, typename Key>
std::int64_t overlap(const std::vector<T>& a, const std::vector<T>& b, Key key) {
  std::map<decltype(key(a.front())), std::int64_t> count;
  for (const T& x : a) ++count[key(x)];
  std::int64_t n = 0;
  for (const T& x : b) {
    auto it = count.find(key(x));
    if (it != count.end() && it->second > 0) {
      --it->second;
      ++n;
    }
  }
  return n;
}

void tally(const Sentence& gold, const Sentence& pred, Tally& t) {
  if (gold.tokens != pred.tokens) throw DataError("gold and predicted tokens differ");
  auto rg = relations(gold);
  auto rp = relations(pred);
  for (std::size_t i = 0; i < rg.size(); ++i) t.tags_ok += rg[i] == rp[i];
  t.tags += static_cast<std::int64_t>(rg.size());

  auto ng = nodes_of(gold);
  auto np = nodes_of(pred);
  t.br_gold += static_cast<std::int64_t>(ng.size());
  t.br_pred += static_cast<std::int64_t>(np.size());
  if (!ng.empty() && !np.empty()) {
    t.br_ok += overlap(ng, np, [](const auto& x) { return x.first; });
    t.lb_ok += overlap(ng, np, [](const auto& x) { return x; });
  }

  std::map<Span, const Node*> pred_top;
  for (const Node& n : pred.forest)
    if (!n.is_leaf()) pred_top.emplace(n.span(), &n);
  t.top_pred += static_cast<std::int64_t>(pred_top.size());
  for (const Node& n : gold.forest) {
    if (n.is_leaf()) continue;
    ++t.top_gold;
    auto it = pred_top.find(n.span());
    if (it == pred_top.end()) continue;
    ++t.bound_ok;
    t.top_ok += *it->second == n;
  }
}

}  // namespace

EvalReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted) {
  if (gold.size() != predicted.size())
    throw DataError("gold has " + std::to_string(gold.size()) + " sentences, predicted " +
                    std::to_string(predicted.size()));
  Tally t;
  EvalReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    tally(gold[i], predicted[i], t);
    r.tokens += gold[i].size();
  }
  r.sentences = static_cast<std::int64_t>(gold.size());
  r.tag_accuracy = Measure::of(t.tags_ok, t.tags);
  r.bracketing_precision = Measure::of(t.br_ok, t.br_pred);
  r.bracketing_recall = Measure::of(t.br_ok, t.br_gold);
  r.labelled_precision = Measure::of(t.lb_ok, t.br_pred);
  r.labelled_recall = Measure::of(t.lb_ok, t.br_gold);
  r.top_level_precision = Measure::of(t.top_ok, t.top_pred);
  r.top_level_recall = Measure::of(t.top_ok, t.top_gold);
  r.boundary_precision = Measure::of(t.bound_ok, t.top_pred);
  r.boundary_recall = Measure::of(t.bound_ok, t.top_gold);
  return r;
}

EvalReport score(const Treebank& gold, const Treebank& predicted) {
  return score(gold.sentences, predicted.sentences);
}

EvalReport train_and_score(const Treebank& train_set, const Treebank& test_set,
                           const ChunkerConfig& config) {
  ChunkModel model = train(train_set, config);
  Treebank gold = prepare_gold(test_set, config);
  auto results = tag_batch(model, config, gold.sentences);
  std::vector<Sentence> predicted;
  predicted.reserve(results.size());
  std::int64_t repairs = 0;
  for (TagResult& r : results) {
    repairs += r.repairs;
    predicted.push_back(std::move(r.sentence));
  }
  EvalReport report = score(gold.sentences, predicted);
  report.repairs = repairs;
  return report;
}

EvalReport average(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw DataError("nothing to average");
  EvalReport out;
  const double n = static_cast<double>(reports.size());
  auto mean = [&](Measure EvalReport::*m) {
    Measure acc{0.0, 0, 0};
    for (const EvalReport& r : reports) {
      acc.value += (r.*m).value;
      acc.correct += (r.*m).correct;
      acc.total += (r.*m).total;
    }
    acc.value /= n;
    out.*m = acc;
  };
  for (auto m : {&EvalReport::tag_accuracy, &EvalReport::bracketing_precision,
                 &EvalReport::bracketing_recall, &EvalReport::labelled_precision,
                 &EvalReport::labelled_recall, &EvalReport::top_level_precision,
                 &EvalReport::top_level_recall, &EvalReport::boundary_precision,
                 &EvalReport::boundary_recall})
    mean(m);
  for (const EvalReport& r : reports) {
    out.repairs += r.repairs;
    out.sentences += r.sentences;
    out.tokens += r.tokens;
  }
  return out;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

namespace {

struct FoldSplit {
  Treebank train, test;
};

FoldSplit make_fold(const Treebank& tb, const std::vector<std::size_t>& perm, int folds,
                    int k) {
  const std::size_t n = perm.size();
  const std::size_t lo = n * static_cast<std::size_t>(k) / static_cast<std::size_t>(folds);
  const std::size_t hi = n * static_cast<std::size_t>(k + 1) / static_cast<std::size_t>(folds);
  FoldSplit f;
  f.train.pos_alphabet = f.test.pos_alphabet = tb.pos_alphabet;
  f.train.category_alphabet = f.test.category_alphabet = tb.category_alphabet;
  for (std::size_t i = 0; i < n; ++i)
    (i >= lo && i < hi ? f.test : f.train).sentences.push_back(tb.sentences[perm[i]]);
  return f;
}

void check_folds(const Treebank& tb, int folds) {
  if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
  if (tb.sentences.size() < static_cast<std::size_t>(folds))
    throw DataError("cross-validation needs at least " + std::to_string(folds) +
                    " sentences, got " + std::to_string(tb.sentences.size()));
}

}  // namespace

CrossValidation cross_validate(const Treebank& treebank, const ChunkerConfig& config,
                               int folds, std::uint64_t seed) {
  check_folds(treebank, folds);
  auto perm = shuffled_indices(treebank.sentences.size(), seed);
  CrossValidation cv;
  cv.seed = seed;
  cv.folds.resize(static_cast<std::size_t>(folds));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(folds));
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < folds; ++k) {
    try {
      FoldSplit f = make_fold(treebank, perm, folds, k);
      cv.folds[k] = train_and_score(f.train, f.test, config);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  cv.mean = average(cv.folds);
  return cv;
}

CrossValidation cross_validate_serial(const Treebank& treebank,
                                      const ChunkerConfig& config, int folds,
                                      std::uint64_t seed) {
  check_folds(treebank, folds);
  auto perm = shuffled_indices(treebank.sentences.size(), seed);
  CrossValidation cv;
  cv.seed = seed;
  for (int k = 0; k < folds; ++k) {
    FoldSplit f = make_fold(treebank, perm, folds, k);
    cv.folds.push_back(train_and_score(f.train, f.test, config));
  }
  cv.mean = average(cv.folds);
  return cv;
}

std::vector<CurvePoint> learning_curve(const Treebank& treebank, const ChunkerConfig& config,
                                       const std::vector<int>& sizes, std::uint64_t seed) {
  const std::size_t n = treebank.sentences.size();
  const std::size_t pool = n * 9 / 10;
  if (pool == n) throw DataError("learning curve needs at least 10 sentences");
  for (int s : sizes)
    if (s <= 0 || static_cast<std::size_t>(s) > pool)
      throw DataError("training size " + std::to_string(s) + " outside 1.." +
                      std::to_string(pool));
  auto perm = shuffled_indices(n, seed);
  Treebank test;
  test.pos_alphabet = treebank.pos_alphabet;
  test.category_alphabet = treebank.category_alphabet;
  for (std::size_t i = pool; i < n; ++i) test.sentences.push_back(treebank.sentences[perm[i]]);

  std::vector<CurvePoint> out(sizes.size());
  std::vector<std::exception_ptr> errors(sizes.size());
  const auto m = static_cast<std::ptrdiff_t>(sizes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < m; ++k) {
    try {
      Treebank train_set;
      train_set.pos_alphabet = treebank.pos_alphabet;
      train_set.category_alphabet = treebank.category_alphabet;
      for (int i = 0; i < sizes[k]; ++i)
        train_set.sentences.push_back(treebank.sentences[perm[static_cast<std::size_t>(i)]]);
      EvalReport r = train_and_score(train_set, test, config);
      out[k] = {sizes[k], r.top_level_precision.value};
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%6.2f%%", 100.0 * v);
  return buf;
}

struct Row {
  const char* name;
  const char* key;
  Measure EvalReport::*m;
};

constexpr Row kRows[] = {
    {"structural tags (r)", "tag_accuracy", &EvalReport::tag_accuracy},
    {"bracketing precision", "bracketing_precision", &EvalReport::bracketing_precision},
    {"bracketing recall", "bracketing_recall", &EvalReport::bracketing_recall},
    {"labelled bracketing precision", "labelled_precision", &EvalReport::labelled_precision},
    {"labelled bracketing recall", "labelled_recall", &EvalReport::labelled_recall},
    {"top-level chunks precision", "top_level_precision", &EvalReport::top_level_precision},
    {"top-level chunks recall", "top_level_recall", &EvalReport::top_level_recall},
    {"external boundaries precision", "boundary_precision", &EvalReport::boundary_precision},
    {"external boundaries recall", "boundary_recall", &EvalReport::boundary_recall},
};

}  // namespace

std::string render_table(const EvalReport& report) {
  std::string out;
  char buf[160];
  for (const Row& row : kRows) {
    const Measure& m = report.*row.m;
    std::snprintf(buf, sizeof buf, "%-31s %s  (%lld/%lld)\n", row.name,
                  percent(m.value).c_str(), static_cast<long long>(m.correct),
                  static_cast<long long>(m.total));
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-31s %lld\n", "decoder repairs",
                static_cast<long long>(report.repairs));
  out += buf;
  return out;
}

std::string render_keyvalue(const EvalReport& report) {
  std::string out;
  char buf[160];
  for (const Row& row : kRows) {
    const Measure& m = report.*row.m;
    std::snprintf(buf, sizeof buf, "%s=%.6f\n%s_count=%lld/%lld\n", row.key, m.value, row.key,
                  static_cast<long long>(m.correct), static_cast<long long>(m.total));
    out += buf;
  }
  out += "repairs=" + std::to_string(report.repairs) + "\n";
  out += "sentences=" + std::to_string(report.sentences) + "\n";
  out += "tokens=" + std::to_string(report.tokens) + "\n";
  return out;
}

std::string render_curve(const std::vector<CurvePoint>& curve) {
  std::string out = "# sentences top_level_precision\n";
  char buf[64];
  for (const CurvePoint& p : curve) {
    std::snprintf(buf, sizeof buf, "%d %.6f\n", p.size, p.top_level_precision);
    out += buf;
  }
  return out;
}

}  // namespace chunktag
