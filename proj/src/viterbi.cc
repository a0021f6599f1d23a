#include <algorithm>
#include <cmath>
#include <limits>

#include "chunktag/error.h"
#include "chunktag/markov.h"

namespace chunktag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Candidate {
  TagId tag;
  double log_emission;
};

}  // namespace

double decoder_log_emission(const ChunkModel& model, TagId tag, std::string_view pos) {
  if (!model.knows_pos(pos)) return -std::log(static_cast<double>(model.alphabet().size()));
  return std::log(model.emission_prob(tag, pos));
}

ViterbiResult viterbi_decode(const ChunkModel& model,
                             const std::vector<std::string>& pos_seq,
                             const std::vector<AllowedTags>& constraints,
                             UnknownPosPolicy policy) {
  const int n = static_cast<int>(pos_seq.size());
  if (n == 0) throw DataError("viterbi_decode: empty POS sequence");
  if (!constraints.empty() && static_cast<int>(constraints.size()) != n)
    throw DataError("viterbi_decode: constraints do not match sequence length");

  ViterbiResult result;
  const TagId B = model.boundary();

  // cand[i + 2]; the two leading slots hold the start boundary.
  std::vector<std::vector<Candidate>> cand(static_cast<std::size_t>(n) + 2);
  cand[0] = cand[1] = {{B, 0.0}};
  for (int i = 0; i < n; ++i) {
    const std::string& pos = pos_seq[i];
    const std::vector<TagId>* pool = &model.candidates(pos);
    if (!model.knows_pos(pos)) {
      if (policy == UnknownPosPolicy::kUnk) throw UnknownPosError(pos, i);
      result.unknown_positions.push_back(i);
      pool = &model.all_tags();
    }
    std::vector<TagId> ids;
    if (!constraints.empty() && constraints[i]) {
      std::vector<TagId> allowed = *constraints[i];
      std::sort(allowed.begin(), allowed.end());
      std::set_intersection(pool->begin(), pool->end(), allowed.begin(), allowed.end(),
                            std::back_inserter(ids));
    } else {
      ids = *pool;
    }
    auto& out = cand[i + 2];
    for (TagId t : ids) {
      double e = decoder_log_emission(model, t, pos);
      if (e > kNegInf) out.push_back({t, e});
    }
    if (out.empty())
      throw InfeasibleError("no admissible tag at position " + std::to_string(i) +
                            " (POS " + pos + ")");
  }

  // score[i] is indexed [x * |cand[i+2]| + y] for x in cand[i+1], y in cand[i+2];
  // back[i] holds the best index into cand[i].
  std::vector<std::vector<double>> score(n);
  std::vector<std::vector<int>> back(n);
  for (int i = 0; i < n; ++i) {
    const auto& zs = cand[i];
    const auto& xs = cand[i + 1];
    const auto& ys = cand[i + 2];
    const std::size_t ny = ys.size();
    score[i].assign(xs.size() * ny, kNegInf);
    back[i].assign(xs.size() * ny, 0);
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
      for (std::size_t yi = 0; yi < ny; ++yi) {
        double best = kNegInf;
        int arg = 0;
        for (std::size_t zi = 0; zi < zs.size(); ++zi) {
          double prev = i == 0 ? 0.0 : score[i - 1][zi * xs.size() + xi];
          if (prev == kNegInf) continue;
          double s = prev + model.log_transition(zs[zi].tag, xs[xi].tag, ys[yi].tag);
          if (s > best) {
            best = s;
            arg = static_cast<int>(zi);
          }
        }
        score[i][xi * ny + yi] = best + ys[yi].log_emission;
        back[i][xi * ny + yi] = arg;
      }
    }
  }

  const auto& xs = cand[n];
  const auto& ys = cand[n + 1];
  double best = kNegInf;
  std::size_t bx = 0, by = 0;
  for (std::size_t xi = 0; xi < xs.size(); ++xi)
    for (std::size_t yi = 0; yi < ys.size(); ++yi) {
      double s = score[n - 1][xi * ys.size() + yi];
      if (s == kNegInf) continue;
      s += model.log_transition(xs[xi].tag, ys[yi].tag, B);
      if (s > best) {
        best = s;
        bx = xi;
        by = yi;
      }
    }
  if (best == kNegInf)
    throw InfeasibleError("no tag sequence with nonzero probability");

  result.log_score = best;
  std::vector<int> idx(static_cast<std::size_t>(n) + 2, 0);
  idx[n + 1] = static_cast<int>(by);
  idx[n] = static_cast<int>(bx);
  for (int i = n - 1; i >= 1; --i)
    idx[i] = back[i][static_cast<std::size_t>(idx[i + 1]) * cand[i + 2].size() +
                     static_cast<std::size_t>(idx[i + 2])];
  result.tags.resize(n);
  for (int i = 0; i < n; ++i) result.tags[i] = cand[i + 2][idx[i + 2]].tag;
  return result;
}

double sequence_log_score(const ChunkModel& model, const std::vector<std::string>& pos_seq,
                          const std::vector<TagId>& tags) {
  if (pos_seq.size() != tags.size())
    throw DataError("sequence_log_score: length mismatch");
  const TagId B = model.boundary();
  TagId a = B, b = B;
  double s = 0.0;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    s += model.log_transition(a, b, tags[i]) + decoder_log_emission(model, tags[i], pos_seq[i]);
    a = b;
    b = tags[i];
  }
  return s + model.log_transition(a, b, B);
}

}  // namespace chunktag
