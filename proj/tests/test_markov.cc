#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "chunktag/error.h"
#include "chunktag/markov.h"
#include "support/random_models.h"
#include "support/random_trees.h"

using namespace chunktag;

namespace {

ChunkModel model_of(const Treebank& tb, const EncodingScheme& scheme, int order = 3) {
  CountsTable c = collect_counts(tb, scheme);
  InterpolationWeights w = deleted_interpolation_weights(c);
  return ChunkModel(scheme, order, std::move(c), w);
}

void check_weights(const InterpolationWeights& w, double l1, double l2, double l3) {
  CHECK(std::abs(w.unigram - l1) <= 1e-12);
  CHECK(std::abs(w.bigram - l2) <= 1e-12);
  CHECK(std::abs(w.trigram - l3) <= 1e-12);
}

}  // namespace

TEST_CASE("counts of a two-tag sentence") {
  Treebank tb = parse_bracketed("(NP a/ART b/NN)\n");
  CountsTable c = collect_counts(tb, EncodingScheme::parse("r"));
  REQUIRE(c.alphabet.size() == 2);
  const TagId B = c.alphabet.boundary(), A = 0, Z = 1;
  CHECK(c.trigram.at({B, B, A}) == 1);
  CHECK(c.trigram.at({B, A, Z}) == 1);
  CHECK(c.trigram.at({A, Z, B}) == 1);
  CHECK(c.trigram.size() == 3);
  CHECK(c.bigram.size() == 3);
  CHECK(c.total == 3);
  CHECK(c.unigram == std::vector<std::int64_t>{1, 1, 1});
  CHECK(c.emission[A].at("ART") == 1);
  CHECK(c.history2(B, B) == 1);
  CHECK(c.history1(A) == 1);
}

TEST_CASE("counts are linear and match a streaming recount") {
  testsupport::TreeGenerator gen(17);
  Treebank tb;
  for (int i = 0; i < 400; ++i) tb.sentences.push_back(gen.any(3));
  EncodingScheme scheme = EncodingScheme::parse("rtcg");
  CountsTable c = collect_counts(tb, scheme, DepthPolicy::kLenient);
  CHECK(c == collect_counts_serial(tb, scheme, DepthPolicy::kLenient));

  std::map<std::string, std::int64_t> uni, tri;
  std::int64_t total = 0;
  for (const Sentence& s : tb.sentences) {
    std::vector<std::string> seq = {"<b>", "<b>"};
    for (const StructuralTag& t : encode_sentence(s, scheme, DepthPolicy::kLenient))
      seq.push_back(render(t));
    seq.push_back("<b>");
    for (std::size_t i = 2; i < seq.size(); ++i) {
      ++uni[seq[i]];
      ++tri[seq[i - 2] + " " + seq[i - 1] + " " + seq[i]];
      ++total;
    }
  }
  CHECK(c.total == total);
  auto name = [&](TagId id) {
    return id == c.alphabet.boundary() ? std::string("<b>") : render(c.alphabet[id]);
  };
  for (TagId t = 0; t <= c.alphabet.boundary(); ++t) CHECK(c.unigram[t] == uni[name(t)]);
  CHECK(c.trigram.size() == tri.size());
  for (const auto& [k, v] : c.trigram)
    CHECK(v == tri[name(k[0]) + " " + name(k[1]) + " " + name(k[2])]);

  Treebank twice = tb;
  twice.sentences.insert(twice.sentences.end(), tb.sentences.begin(), tb.sentences.end());
  CountsTable d = collect_counts(twice, scheme, DepthPolicy::kLenient);
  CHECK(d.total == 2 * c.total);
  for (const auto& [k, v] : c.trigram) CHECK(d.trigram.at(k) == 2 * v);
  for (const auto& [k, v] : c.bigram) CHECK(d.bigram.at(k) == 2 * v);
}

TEST_CASE("deleted interpolation by hand") {
  EncodingScheme rt = EncodingScheme::parse("rt");
  // T T T T T: trigram types (B B T) (B T T) (T T T)x3 (T T B).
  // (T T T): (3-1)/(4-1) < (4-1)/(5-1) < (5-1)/(6-1), unigram wins.
  // (T T B): all three ratios are 0, the tie goes to the trigram.
  check_weights(deleted_interpolation_weights(
                    collect_counts(parse_bracketed("a/A a/A a/A a/A a/A\n"), rt)),
                5.0 / 6, 0.0, 1.0 / 6);

  // Five bare tokens A B A B C: every trigram type occurs once.
  // (B A B) (b A B): bigram (A,B) wins with (2-1)/(2-1).
  // (b b A) (A B A): unigram wins with (2-1)/(6-1).
  // (A B C) (B C b): all zero, trigram.
  check_weights(deleted_interpolation_weights(
                    collect_counts(parse_bracketed("a/A b/B a/A b/B c/C\n"), rt)),
                2.0 / 6, 2.0 / 6, 2.0 / 6);

  // Relations 1 0 1 0 1 under <r>.
  check_weights(deleted_interpolation_weights(collect_counts(
                    parse_bracketed("(NP a/ART b/NN) (NP c/ART d/NN) e/V\n"),
                    EncodingScheme::parse("r"))),
                1.0 / 6, 2.0 / 6, 3.0 / 6);

  // One trigram repeated: the trigram estimate dominates.
  InterpolationWeights w = deleted_interpolation_weights(
      collect_counts(parse_bracketed("(NP a/A b/B c/C)\n(NP a/A b/B c/C)\n(NP a/A b/B c/C)\n"
                                     "(NP a/A b/B c/C)\n(NP a/A b/B c/C)\n"),
                     rt));
  CHECK(w.trigram > w.bigram);
  CHECK(w.trigram > w.unigram);
  CHECK(w.trigram == doctest::Approx(1.0));

  CHECK_THROWS_AS(deleted_interpolation_weights(CountsTable{}), DataError);
}

TEST_CASE("weights always sum to one") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    ChunkModel m = testsupport::random_model(rng);
    InterpolationWeights w = deleted_interpolation_weights(m.counts());
    CHECK(std::abs(w.sum() - 1.0) <= 1e-9);
    CHECK(std::abs(m.effective_weights().sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("transition distributions are normalised") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    ChunkModel m = testsupport::random_model(rng);
    for (int order = 1; order <= 3; ++order) {
      ChunkModel mo(m.scheme(), order, m.counts(), m.weights());
      const int W = m.alphabet().size() + 1;
      for (int h = 0; h < 10; ++h) {
        TagId a = static_cast<TagId>(rng() % W), b = static_cast<TagId>(rng() % W);
        double sum = 0;
        for (TagId c = 0; c < W; ++c) sum += mo.transition_prob(a, b, c);
        REQUIRE(std::abs(sum - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("transition probabilities") {
  Treebank tb = parse_bracketed("(NP a/ART b/NN) c/V\n(NP a/ART b/NN c/NN)\n");
  EncodingScheme rt = EncodingScheme::parse("rt");
  CountsTable c = collect_counts(tb, rt);
  const TagId B = c.alphabet.boundary();
  const TagId art = c.alphabet.find(parse_tag("1|ART", rt));
  const TagId nn = c.alphabet.find(parse_tag("0|NN", rt));
  const TagId v = c.alphabet.find(parse_tag("1|V", rt));

  ChunkModel tri_only(rt, 3, c, {0, 0, 1});
  // (ART NN) is followed by NN once and V once.
  CHECK(tri_only.transition_prob(art, nn, nn) == doctest::Approx(0.5));
  CHECK(tri_only.transition_prob(B, B, art) == doctest::Approx(1.0));

  ChunkModel mixed(rt, 3, c, {0.2, 0.3, 0.5});
  // Unseen trigram (V, ART, ...) has a seen unigram: positive.
  CHECK(mixed.transition_prob(v, v, art) > 0);
  // p1(NN) = 3/8, p2(NN | NN) = 1/3, p3(NN | ART NN) = 1/2.
  CHECK(mixed.transition_prob(art, nn, nn) ==
        doctest::Approx(0.2 * 3.0 / 8 + 0.3 * 1.0 / 3 + 0.5 * 0.5));

  ChunkModel bigram(rt, 2, c, {0.2, 0.3, 0.5});
  CHECK(bigram.effective_weights().trigram == 0);
  CHECK(bigram.effective_weights().unigram == doctest::Approx(0.4));
  ChunkModel unigram(rt, 1, c, {0.2, 0.3, 0.5});
  CHECK(unigram.transition_prob(art, nn, nn) == doctest::Approx(3.0 / 8));

  CHECK_THROWS_AS(mixed.transition_prob(0, 0, B + 1), DataError);
  CHECK_THROWS_AS(ChunkModel(rt, 4, c, {}), DataError);
}

TEST_CASE("emission probabilities") {
  Treebank tb = parse_bracketed(
      "(NP a/ADJA) (NP (AP b/ADV c/ADJA) d/NN)\n(NP x/NN y/NN y/NN y/NE)\n");
  EncodingScheme rtc = EncodingScheme::parse("rtc");
  ChunkModel m(rtc, 3, collect_counts(tb, rtc), {});
  TagId t = m.alphabet().find(parse_tag("1|ADJA|NP", rtc));
  REQUIRE(t >= 0);
  CHECK(m.emission_prob(t, "ADJA") == 1.0);
  CHECK(m.emission_prob(t, "NN") == 0.0);

  // <r>: 0 is seen with NN three times and NE once, plus ADJA and NN in
  // the first sentence.
  EncodingScheme r = EncodingScheme::parse("r");
  Treebank z = parse_bracketed("(NP x/ART y/NN y/NN y/NN y/NE)\n");
  ChunkModel mr(r, 3, collect_counts(z, r), {});
  TagId zero = mr.alphabet().find(StructuralTag{Relation::kZero});
  const double P = 3;  // ART NN NE
  CHECK(mr.emission_prob(zero, "NN") == doctest::Approx((3 + 0.01) / (4 + 0.01 * P)));
  CHECK(mr.emission_prob(zero, "NE") == doctest::Approx((1 + 0.01) / (4 + 0.01 * P)));
  CHECK(mr.emission_prob(zero, "ART") == doctest::Approx(0.01 / (4 + 0.01 * P)));
  CHECK(mr.knows_pos("NN"));
  CHECK_FALSE(mr.knows_pos("VVFIN"));
  CHECK(mr.candidates("VVFIN").empty());
}
