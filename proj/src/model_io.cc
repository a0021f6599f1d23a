// Model file: versioned line-oriented text. Counts are exact integers;
// probabilities are recomputed on load.
//
//   chunktag-model 1
//   dims rtcg
//   depth 3
//   order 3
//   categories AP NP PP C CNP
//   sentences <n>
//   tokens <n>
//   lambda <l1> <l2> <l3>
//   alphabet <K>            (boundary id is K)
//   <id> <rendered tag>     K lines
//   counts
//   1 <id> <count>
//   2 <id> <id> <count>
//   3 <id> <id> <id> <count>
//   E <id> <pos> <count>
//   end

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "chunktag/error.h"
#include "chunktag/markov.h"

namespace chunktag {

namespace {

constexpr int kFormatVersion = 1;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;

  std::istringstream next() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return std::istringstream(line);
    }
    throw FormatError("unexpected end of model file", line_no);
  }

  template <typename T>
  T field(std::string_view key) {
    auto ss = next();
    std::string k;
    T v{};
    if (!(ss >> k) || k != key || !(ss >> v))
      throw FormatError("expected '" + std::string(key) + "'", line_no);
    return v;
  }
};

}  // namespace

void ChunkModel::save(std::ostream& out) const {
  const CategoryMap& cm = scheme_.categories;
  out << "chunktag-model " << kFormatVersion << '\n'
      << "dims " << scheme_.dims() << '\n'
      << "depth " << scheme_.depth << '\n'
      << "order " << order_ << '\n'
      << "categories " << cm.ap_label << ' ' << cm.np_label << ' ' << cm.pp_label << ' '
      << cm.coord_prefix << ' ' << cm.coord_label << '\n'
      << "sentences " << counts_.sentences << '\n'
      << "tokens " << counts_.tokens << '\n'
      << "lambda " << format_double(weights_.unigram) << ' '
      << format_double(weights_.bigram) << ' ' << format_double(weights_.trigram) << '\n'
      << "alphabet " << alphabet().size() << '\n';
  for (TagId t = 0; t < alphabet().size(); ++t)
    out << t << ' ' << render(alphabet()[t]) << '\n';
  out << "counts\n";
  for (TagId t = 0; t < static_cast<TagId>(counts_.unigram.size()); ++t)
    out << "1 " << t << ' ' << counts_.unigram[t] << '\n';
  for (const auto& [k, v] : counts_.bigram)
    out << "2 " << k[0] << ' ' << k[1] << ' ' << v << '\n';
  for (const auto& [k, v] : counts_.trigram)
    out << "3 " << k[0] << ' ' << k[1] << ' ' << k[2] << ' ' << v << '\n';
  for (TagId t = 0; t < static_cast<TagId>(counts_.emission.size()); ++t)
    for (const auto& [p, v] : counts_.emission[t])
      out << "E " << t << ' ' << p << ' ' << v << '\n';
  out << "end\n";
}

ChunkModel ChunkModel::load(std::istream& in) {
  LineReader r{in};
  {
    auto ss = r.next();
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "chunktag-model")
      throw FormatError("not a chunktag model file", r.line_no);
    if (version != kFormatVersion)
      throw FormatError("unsupported model format version " + std::to_string(version),
                        r.line_no);
  }
  auto dims = r.field<std::string>("dims");
  auto depth = r.field<int>("depth");
  EncodingScheme scheme = EncodingScheme::parse(dims, depth);
  int order = r.field<int>("order");
  {
    auto ss = r.next();
    std::string k;
    CategoryMap& cm = scheme.categories;
    if (!(ss >> k >> cm.ap_label >> cm.np_label >> cm.pp_label >> cm.coord_prefix >>
          cm.coord_label) ||
        k != "categories")
      throw FormatError("expected 'categories'", r.line_no);
  }
  CountsTable counts;
  counts.sentences = r.field<std::int64_t>("sentences");
  counts.tokens = r.field<std::int64_t>("tokens");
  InterpolationWeights w;
  {
    auto ss = r.next();
    std::string k;
    if (!(ss >> k >> w.unigram >> w.bigram >> w.trigram) || k != "lambda")
      throw FormatError("expected 'lambda'", r.line_no);
  }
  int K = r.field<int>("alphabet");
  for (int i = 0; i < K; ++i) {
    auto ss = r.next();
    int id = -1;
    std::string tag;
    if (!(ss >> id >> tag) || id != i)
      throw FormatError("bad alphabet entry", r.line_no);
    if (counts.alphabet.add(parse_tag(tag, scheme)) != i)
      throw FormatError("duplicate alphabet entry", r.line_no);
  }
  counts.resize();
  {
    auto ss = r.next();
    std::string k;
    if (!(ss >> k) || k != "counts") throw FormatError("expected 'counts'", r.line_no);
  }
  auto in_range = [&](TagId id, bool boundary_ok) {
    if (id < 0 || id > K || (!boundary_ok && id == K))
      throw FormatError("tag id out of range", r.line_no);
    return id;
  };
  while (true) {
    auto ss = r.next();
    std::string kind;
    ss >> kind;
    if (kind == "end") break;
    std::int64_t v = 0;
    if (kind == "1") {
      TagId a;
      if (!(ss >> a >> v)) throw FormatError("bad unigram line", r.line_no);
      counts.unigram[in_range(a, true)] = v;
      counts.total += v;
    } else if (kind == "2") {
      TagId a, b;
      if (!(ss >> a >> b >> v)) throw FormatError("bad bigram line", r.line_no);
      counts.bigram[{in_range(a, true), in_range(b, true)}] = v;
    } else if (kind == "3") {
      TagId a, b, c;
      if (!(ss >> a >> b >> c >> v)) throw FormatError("bad trigram line", r.line_no);
      counts.trigram[{in_range(a, true), in_range(b, true), in_range(c, true)}] = v;
    } else if (kind == "E") {
      TagId a;
      std::string pos;
      if (!(ss >> a >> pos >> v)) throw FormatError("bad emission line", r.line_no);
      counts.emission[in_range(a, false)][pos] = v;
    } else {
      throw FormatError("unknown count section '" + kind + "'", r.line_no);
    }
  }
  return ChunkModel(std::move(scheme), order, std::move(counts), w);
}

}  // namespace chunktag
