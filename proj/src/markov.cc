#include "chunktag/markov.h"

#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

#include "chunktag/error.h"

namespace chunktag {

TagId TagAlphabet::add(const StructuralTag& tag) {
  auto [it, fresh] = ids_.emplace(tag, size());
  if (fresh) tags_.push_back(tag);
  return it->second;
}

TagId TagAlphabet::find(const StructuralTag& tag) const {
  auto it = ids_.find(tag);
  return it == ids_.end() ? -1 : it->second;
}

void CountsTable::resize() {
  unigram.resize(static_cast<std::size_t>(alphabet.size()) + 1, 0);
  emission.resize(static_cast<std::size_t>(alphabet.size()));
}

void CountsTable::add_sequence(const std::vector<TagId>& ids,
                               const std::vector<std::string>& pos) {
  const TagId B = alphabet.boundary();
  TagId a = B, b = B;
  for (std::size_t j = 0; j <= ids.size(); ++j) {
    TagId c = j < ids.size() ? ids[j] : B;
    ++unigram[c];
    ++bigram[{b, c}];
    ++trigram[{a, b, c}];
    ++total;
    if (j < ids.size()) ++emission[c][pos[j]];
    a = b;
    b = c;
  }
  ++sentences;
  tokens += static_cast<std::int64_t>(ids.size());
}

void CountsTable::merge(const CountsTable& other) {
  for (std::size_t i = 0; i < other.unigram.size(); ++i) unigram[i] += other.unigram[i];
  for (const auto& [k, v] : other.bigram) bigram[k] += v;
  for (const auto& [k, v] : other.trigram) trigram[k] += v;
  for (std::size_t t = 0; t < other.emission.size(); ++t)
    for (const auto& [p, v] : other.emission[t]) emission[t][p] += v;
  total += other.total;
  sentences += other.sentences;
  tokens += other.tokens;
}

std::int64_t CountsTable::history1(TagId b) const {
  std::int64_t n = 0;
  for (auto it = bigram.lower_bound({b, std::numeric_limits<TagId>::min()});
       it != bigram.end() && it->first[0] == b; ++it)
    n += it->second;
  return n;
}

std::int64_t CountsTable::history2(TagId a, TagId b) const {
  std::int64_t n = 0;
  for (auto it = trigram.lower_bound({a, b, std::numeric_limits<TagId>::min()});
       it != trigram.end() && it->first[0] == a && it->first[1] == b; ++it)
    n += it->second;
  return n;
}

namespace {

struct Encoded {
  std::vector<std::vector<StructuralTag>> tags;
  std::vector<std::vector<std::string>> pos;
};

std::vector<std::string> pos_of(const Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const Token& t : s.tokens) out.push_back(t.pos);
  return out;
}

CountsTable index_alphabet(const Encoded& enc, std::vector<std::vector<TagId>>& ids) {
  CountsTable counts;
  ids.resize(enc.tags.size());
  for (std::size_t i = 0; i < enc.tags.size(); ++i) {
    ids[i].reserve(enc.tags[i].size());
    for (const StructuralTag& t : enc.tags[i]) ids[i].push_back(counts.alphabet.add(t));
  }
  counts.resize();
  return counts;
}

}  // namespace

CountsTable collect_counts_serial(const Treebank& treebank,
                                  const EncodingScheme& scheme, DepthPolicy policy) {
  Encoded enc;
  for (const Sentence& s : treebank.sentences) {
    enc.tags.push_back(encode_sentence(s, scheme, policy));
    enc.pos.push_back(pos_of(s));
  }
  std::vector<std::vector<TagId>> ids;
  CountsTable counts = index_alphabet(enc, ids);
  for (std::size_t i = 0; i < ids.size(); ++i) counts.add_sequence(ids[i], enc.pos[i]);
  return counts;
}

CountsTable collect_counts(const Treebank& treebank, const EncodingScheme& scheme,
                           DepthPolicy policy) {
  const auto n = static_cast<std::ptrdiff_t>(treebank.sentences.size());
  Encoded enc;
  enc.tags.resize(static_cast<std::size_t>(n));
  enc.pos.resize(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      enc.tags[i] = encode_sentence(treebank.sentences[i], scheme, policy);
      enc.pos[i] = pos_of(treebank.sentences[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::vector<TagId>> ids;
  CountsTable counts = index_alphabet(enc, ids);

  const int threads = omp_get_max_threads();
  std::vector<CountsTable> partial(static_cast<std::size_t>(threads), counts);
#pragma omp parallel num_threads(threads)
  {
    CountsTable& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) mine.add_sequence(ids[i], enc.pos[i]);
  }
  for (const CountsTable& p : partial) counts.merge(p);
  return counts;
}

InterpolationWeights deleted_interpolation_weights(const CountsTable& counts) {
  if (counts.total <= 0) throw DataError("deleted interpolation on empty counts");
  std::map<TagId, std::int64_t> h1;
  for (const auto& [k, v] : counts.bigram) h1[k[0]] += v;
  std::map<std::array<TagId, 2>, std::int64_t> h2;
  for (const auto& [k, v] : counts.trigram) h2[{k[0], k[1]}] += v;

  auto ratio = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
  const double N = static_cast<double>(counts.total);
  double l1 = 0, l2 = 0, l3 = 0;
  for (const auto& [k, f] : counts.trigram) {
    const auto [a, b, c] = k;
    double c3 = ratio(static_cast<double>(f) - 1, static_cast<double>(h2[{a, b}]) - 1);
    double c2 = ratio(static_cast<double>(counts.bigram.at({b, c})) - 1,
                      static_cast<double>(h1[b]) - 1);
    double c1 = ratio(static_cast<double>(counts.unigram[c]) - 1, N - 1);
    if (c3 >= c2 && c3 >= c1)
      l3 += static_cast<double>(f);
    else if (c2 >= c1)
      l2 += static_cast<double>(f);
    else
      l1 += static_cast<double>(f);
  }
  double sum = l1 + l2 + l3;
  return {l1 / sum, l2 / sum, l3 / sum};
}

namespace {

std::uint64_t key3(int width, TagId a, TagId b, TagId c) {
  return (static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(width) +
          static_cast<std::uint64_t>(b)) *
             static_cast<std::uint64_t>(width) +
         static_cast<std::uint64_t>(c);
}

std::uint64_t key2(int width, TagId a, TagId b) {
  return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(width) +
         static_cast<std::uint64_t>(b);
}

InterpolationWeights truncate(const InterpolationWeights& w, int order) {
  if (order >= 3) return w;
  if (order == 1) return {1.0, 0.0, 0.0};
  double s = w.unigram + w.bigram;
  if (s <= 0) return {0.5, 0.5, 0.0};
  return {w.unigram / s, w.bigram / s, 0.0};
}

}  // namespace

ChunkModel::ChunkModel(EncodingScheme scheme, int order, CountsTable counts,
                       InterpolationWeights weights)
    : scheme_(std::move(scheme)),
      order_(order),
      counts_(std::move(counts)),
      weights_(weights),
      effective_(truncate(weights, order)) {
  if (order < 1 || order > 3) throw DataError("model order must be 1, 2 or 3");
  if (counts_.total <= 0) throw DataError("model has no counts");
  const int K = counts_.alphabet.size();
  width_ = K + 1;
  if (static_cast<int>(counts_.unigram.size()) != width_ ||
      static_cast<int>(counts_.emission.size()) != K)
    throw DataError("counts do not match the alphabet");
  for (TagId t = 0; t < K; ++t)
    if (counts_.unigram[t] <= 0)
      throw DataError("alphabet tag " + render(counts_.alphabet[t]) +
                      " has no unigram count");

  const double N = static_cast<double>(counts_.total);
  p1_.resize(width_);
  for (int c = 0; c < width_; ++c) p1_[c] = static_cast<double>(counts_.unigram[c]) / N;

  std::vector<std::int64_t> h1(width_, 0);
  for (const auto& [k, v] : counts_.bigram) h1[k[0]] += v;
  p2_.assign(static_cast<std::size_t>(width_) * width_, 0.0);
  for (int b = 0; b < width_; ++b)
    if (h1[b] == 0)
      for (int c = 0; c < width_; ++c) p2_[key2(width_, b, c)] = p1_[c];
  for (const auto& [k, v] : counts_.bigram)
    p2_[key2(width_, k[0], k[1])] = static_cast<double>(v) / static_cast<double>(h1[k[0]]);

  for (const auto& [k, v] : counts_.trigram) h2_[key2(width_, k[0], k[1])] += v;
  for (const auto& [k, v] : counts_.trigram)
    p3_[key3(width_, k[0], k[1], k[2])] =
        static_cast<double>(v) / static_cast<double>(h2_.at(key2(width_, k[0], k[1])));

  emission_total_.assign(K, 0);
  for (TagId t = 0; t < K; ++t)
    for (const auto& [p, v] : counts_.emission[t]) {
      emission_total_[t] += v;
      pos_alphabet_.insert(p);
    }
  for (TagId t = 0; t < K; ++t) all_tags_.push_back(t);
  for (const std::string& p : pos_alphabet_) {
    std::vector<TagId>& list = candidates_[p];
    for (TagId t = 0; t < K; ++t)
      if (emission_prob(t, p) > 0) list.push_back(t);
  }
}

void ChunkModel::check(TagId id, bool allow_boundary) const {
  if (id < 0 || id > boundary() || (!allow_boundary && id == boundary()))
    throw DataError("unknown tag id " + std::to_string(id));
}

double ChunkModel::transition_prob(TagId a, TagId b, TagId c) const {
  check(a, true);
  check(b, true);
  check(c, true);
  const InterpolationWeights& w = effective_;
  double bi = p2_[key2(width_, b, c)];
  double tri = bi;
  if (w.trigram > 0) {
    auto h = h2_.find(key2(width_, a, b));
    if (h != h2_.end()) {
      auto it = p3_.find(key3(width_, a, b, c));
      tri = it == p3_.end() ? 0.0 : it->second;
    }
  }
  return w.unigram * p1_[c] + w.bigram * bi + w.trigram * tri;
}

double ChunkModel::log_transition(TagId a, TagId b, TagId c) const {
  return std::log(transition_prob(a, b, c));
}

double ChunkModel::emission_prob(TagId tag, std::string_view pos) const {
  check(tag, false);
  if (scheme_.t) return *counts_.alphabet[tag].t == pos ? 1.0 : 0.0;
  const auto& row = counts_.emission[tag];
  auto it = row.find(std::string(pos));
  double n = it == row.end() ? 0.0 : static_cast<double>(it->second);
  return (n + kEmissionSmoothing) /
         (static_cast<double>(emission_total_[tag]) +
          kEmissionSmoothing * static_cast<double>(pos_alphabet_.size()));
}

bool ChunkModel::knows_pos(std::string_view pos) const {
  return candidates_.find(pos) != candidates_.end();
}

const std::vector<TagId>& ChunkModel::candidates(std::string_view pos) const {
  auto it = candidates_.find(pos);
  return it == candidates_.end() ? no_tags_ : it->second;
}

}  // namespace chunktag
