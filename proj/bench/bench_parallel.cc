// Serial reference vs OpenMP versions of the parallel kernels.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "CLI11.hpp"

#include "chunktag/chunker.h"
#include "chunktag/evaluation.h"
#include "chunktag/synthetic.h"

using namespace chunktag;

namespace {

template <class F>
double seconds(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-16s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n", name, serial,
              parallel, serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel timings"};
  SyntheticOptions so;
  so.sentences = 5000;
  app.add_option("--sentences", so.sentences, "synthetic corpus size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  so.case_features = true;
  Treebank tb = generate_treebank(so);
  ChunkerConfig config;
  config.strip = synthetic_strip_options(so);
  std::printf("%d sentences, %d threads\n", so.sentences, omp_get_max_threads());

  Treebank gold = prepare_gold(tb, config);
  CountsTable a, b;
  double s = seconds([&] { a = collect_counts_serial(gold, config.scheme); });
  double p = seconds([&] { b = collect_counts(gold, config.scheme); });
  row("collect_counts", s, p, a == b);

  ChunkModel model = train(tb, config);
  std::vector<TagResult> ra, rb;
  s = seconds([&] { ra = tag_batch_serial(model, config, gold.sentences); });
  p = seconds([&] { rb = tag_batch(model, config, gold.sentences); });
  bool same = ra.size() == rb.size();
  for (std::size_t i = 0; same && i < ra.size(); ++i) same = ra[i].tags == rb[i].tags;
  row("tag_batch", s, p, same);

  CrossValidation ca, cb;
  s = seconds([&] { ca = cross_validate_serial(tb, config, 10, 42); });
  p = seconds([&] { cb = cross_validate(tb, config, 10, 42); });
  row("cross_validate", s, p,
      ca.mean.tag_accuracy.correct == cb.mean.tag_accuracy.correct &&
          ca.mean.top_level_precision.correct == cb.mean.top_level_precision.correct);
  return 0;
}
