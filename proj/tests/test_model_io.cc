#include <doctest.h>

#include <sstream>

#include "chunktag/chunker.h"
#include "chunktag/error.h"
#include "chunktag/synthetic.h"

using namespace chunktag;

namespace {

std::string saved(const ChunkModel& m) {
  std::ostringstream out;
  m.save(out);
  return out.str();
}

ChunkModel loaded(const std::string& text) {
  std::istringstream in(text);
  return ChunkModel::load(in);
}

ChunkModel small_model(const char* dims = "rtcg", int depth = 3, int order = 3) {
  SyntheticOptions so;
  so.sentences = 150;
  so.case_features = true;
  ChunkerConfig c;
  c.scheme = EncodingScheme::parse(dims, depth);
  c.order = order;
  c.strip = synthetic_strip_options(so);
  return train(generate_treebank(so), c);
}

std::string replace_line(const std::string& text, const std::string& prefix,
                         const std::string& with) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += (line.rfind(prefix, 0) == 0 ? with : line) + "\n";
  return out;
}

}  // namespace

TEST_CASE("save and load round-trip") {
  for (const char* dims : {"r", "rc", "rtc", "rtcg"}) {
    for (int order : {1, 3}) {
      ChunkModel m = small_model(dims, dims[1] == 'c' ? 2 : 3, order);
      std::string text = saved(m);
      ChunkModel back = loaded(text);
      CHECK(saved(back) == text);
      CHECK(back.scheme() == m.scheme());
      CHECK(back.order() == m.order());
      CHECK(back.weights() == m.weights());
      CHECK(back.counts() == m.counts());
      const TagId B = m.boundary();
      for (TagId a : {B, TagId{0}})
        for (TagId c = 0; c <= B; ++c)
          CHECK(back.transition_prob(a, 0, c) == m.transition_prob(a, 0, c));
      for (const std::string& p : m.pos_alphabet())
        CHECK(back.emission_prob(0, p) == m.emission_prob(0, p));
    }
  }
}

TEST_CASE("header lines") {
  std::string text = saved(small_model("rtcg", 3, 3));
  CHECK(text.rfind("chunktag-model 1\ndims rtcg\ndepth 3\norder 3\n", 0) == 0);
  CHECK(text.find("\nend\n") != std::string::npos);
}

TEST_CASE("malformed model files") {
  std::string text = saved(small_model());
  CHECK_THROWS_AS(loaded(""), FormatError);
  CHECK_THROWS_AS(loaded("hello\n"), FormatError);
  CHECK_THROWS_AS(loaded(replace_line(text, "chunktag-model", "chunktag-model 9")),
                  FormatError);
  CHECK_THROWS_AS(loaded(replace_line(text, "dims", "dims xyz")), FormatError);
  CHECK_THROWS_AS(loaded(text.substr(0, text.size() / 2)), FormatError);
  CHECK_THROWS_AS(loaded(replace_line(text, "E ", "Q 1 2")), FormatError);
  CHECK_THROWS_AS(loaded(replace_line(text, "1 0 ", "1 100000 5")), FormatError);
  try {
    loaded(replace_line(text, "lambda", "lambda x"));
    FAIL("accepted");
  } catch (const FormatError& e) {
    CHECK(e.line() == 8);
  }
}
