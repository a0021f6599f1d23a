#include "chunktag/chunker.h"

#include <algorithm>
#include <charconv>
#include <deque>
#include <exception>

#include "chunktag/error.h"

namespace chunktag {

std::vector<Span> BoundarySpec::checked(int n) const {
  std::vector<Span> out = spans;
  std::sort(out.begin(), out.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Span& s = out[k];
    if (s.begin < 0 || s.end > n || s.begin >= s.end)
      throw DataError("span " + std::to_string(s.begin) + "-" + std::to_string(s.end) +
                      " outside sentence of " + std::to_string(n) + " tokens");
    if (k > 0 && out[k - 1].end > s.begin)
      throw DataError("spans " + format_spans({out[k - 1], s}) + " overlap");
  }
  return out;
}

BoundarySpec parse_spans(std::string_view line) {
  BoundarySpec spec;
  std::size_t i = 0;
  auto read_int = [&](int& v) {
    auto [p, ec] = std::from_chars(line.data() + i, line.data() + line.size(), v);
    if (ec != std::errc() || p == line.data() + i)
      throw FormatError("bad span list '" + std::string(line) + "'");
    i = static_cast<std::size_t>(p - line.data());
  };
  while (true) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i == line.size()) break;
    Span s;
    read_int(s.begin);
    if (i == line.size() || line[i] != '-')
      throw FormatError("bad span list '" + std::string(line) + "'");
    ++i;
    read_int(s.end);
    spec.spans.push_back(s);
  }
  return spec;
}

std::string format_spans(const std::vector<Span>& spans) {
  std::string out;
  for (const Span& s : spans) {
    if (!out.empty()) out += ' ';
    out += std::to_string(s.begin) + "-" + std::to_string(s.end);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Attachment stripping

namespace {

struct Stripper {
  const Sentence& sentence;
  const StripOptions& options;
  const CategoryMap& categories;

  bool is_adverb(int token) const {
    const Token& t = sentence.tokens[token];
    return options.focus_adverbs.count(t.form) || options.focus_adverbs.count(t.pos);
  }
  bool is_noun(int token) const { return options.noun_pos.count(sentence.tokens[token].pos); }

  // Removes the first (last) leaf below `n`, dropping emptied phrases.
  static void remove_edge_leaf(Node& n, bool left) {
    Node& child = left ? n.children.front() : n.children.back();
    if (!child.is_leaf()) {
      remove_edge_leaf(child, left);
      if (!child.children.empty()) return;
    }
    if (left)
      n.children.erase(n.children.begin());
    else
      n.children.pop_back();
  }

  // Last noun token of `n`, not looking inside PP or AP children; -1 if none.
  int head_noun(const Node& n) const {
    int head = -1;
    for (const Node& c : n.children) {
      if (c.is_leaf()) {
        if (is_noun(c.token)) head = c.token;
      } else if (c.label != categories.pp_label && c.label != categories.ap_label) {
        int h = head_noun(c);
        if (h >= 0) head = h;
      }
    }
    return head;
  }

  // Detaches the trailing postnominal PPs of the first host on the right
  // spine that has any. Returned in sentence order.
  std::vector<Node> detach(Node& chunk) const {
    Node* n = &chunk;
    while (true) {
      if (n->label == categories.np_label || n->label == categories.pp_label) {
        int head = head_noun(*n);
        std::vector<Node> out;
        while (head >= 0 && n->children.size() > 1) {
          Node& last = n->children.back();
          if (last.is_leaf() || last.label != categories.pp_label ||
              last.first_token() <= head)
            break;
          out.push_back(std::move(last));
          n->children.pop_back();
        }
        if (!out.empty()) {
          std::reverse(out.begin(), out.end());
          return out;
        }
      }
      if (n->children.back().is_leaf()) return {};
      n = &n->children.back();
    }
  }

  void process(Node chunk, std::vector<Node>& out) const {
    std::vector<Node> head_items;
    std::deque<Node> tail;
    bool alive = true;
    for (bool changed = true; changed && alive;) {
      changed = false;
      while (alive && is_adverb(chunk.first_token())) {
        head_items.push_back(Node::leaf(chunk.first_token()));
        remove_edge_leaf(chunk, true);
        alive = !chunk.children.empty();
        changed = true;
      }
      while (alive && is_adverb(chunk.last_token())) {
        tail.push_front(Node::leaf(chunk.last_token()));
        remove_edge_leaf(chunk, false);
        alive = !chunk.children.empty();
        changed = true;
      }
      if (!alive) break;
      std::vector<Node> pps = detach(chunk);
      for (auto it = pps.rbegin(); it != pps.rend(); ++it) {
        tail.push_front(std::move(*it));
        changed = true;
      }
    }
    for (Node& n : head_items) out.push_back(std::move(n));
    if (alive) out.push_back(std::move(chunk));
    for (Node& n : tail) {
      if (n.is_leaf())
        out.push_back(std::move(n));
      else
        process(std::move(n), out);
    }
  }
};

}  // namespace

Sentence strip_attachments(const Sentence& sentence, const StripOptions& options,
                           const CategoryMap& categories) {
  Stripper st{sentence, options, categories};
  Sentence out;
  out.tokens = sentence.tokens;
  for (const Node& item : sentence.forest) {
    if (item.is_leaf())
      out.forest.push_back(item);
    else
      st.process(item, out.forest);
  }
  return out;
}

Sentence prepare_gold(const Sentence& sentence, const ChunkerConfig& config) {
  if (config.attachment == Attachment::kStripped)
    return normalize_for_scheme(
        strip_attachments(sentence, config.strip, config.scheme.categories),
        config.scheme, config.depth_policy);
  return normalize_for_scheme(sentence, config.scheme, config.depth_policy);
}

Treebank prepare_gold(const Treebank& treebank, const ChunkerConfig& config) {
  Treebank out = treebank;
  const auto n = static_cast<std::ptrdiff_t>(treebank.sentences.size());
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out.sentences[i] = prepare_gold(treebank.sentences[i], config);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

ChunkModel train(const Treebank& treebank, const ChunkerConfig& config) {
  if (treebank.sentences.empty()) throw DataError("cannot train on an empty treebank");
  Treebank prepared = prepare_gold(treebank, config);
  CountsTable counts = collect_counts(prepared, config.scheme, config.depth_policy);
  InterpolationWeights w = deleted_interpolation_weights(counts);
  if (w.unigram < kMinUnigramWeight) {
    double rest = w.bigram + w.trigram;
    double scale = (1.0 - kMinUnigramWeight) / rest;
    w = {kMinUnigramWeight, w.bigram * scale, w.trigram * scale};
  }
  return ChunkModel(config.scheme, config.order, std::move(counts), w);
}

// ---------------------------------------------------------------------------
// Tagging

namespace {

std::vector<std::string> pos_of(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.pos);
  return out;
}

// Per-word log contributions (transition into the word plus its emission)
// and the closing end-boundary transition.
std::vector<double> contributions(const ChunkModel& model,
                                  const std::vector<std::string>& pos,
                                  const std::vector<TagId>& ids, double& end) {
  std::vector<double> out(ids.size());
  TagId a = model.boundary(), b = model.boundary();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[i] = model.log_transition(a, b, ids[i]) + decoder_log_emission(model, ids[i], pos[i]);
    a = b;
    b = ids[i];
  }
  end = model.log_transition(a, b, model.boundary());
  return out;
}

double sum_over(const std::vector<double>& v, Span s) {
  double x = 0;
  for (int i = s.begin; i < s.end; ++i) x += v[i];
  return x;
}

Node shifted(Node n, int offset) {
  if (n.is_leaf()) {
    n.token += offset;
  } else {
    for (Node& c : n.children) c = shifted(std::move(c), offset);
  }
  return n;
}

Node flat_chunk(Span s, std::string label) {
  std::vector<Node> leaves;
  for (int i = s.begin; i < s.end; ++i) leaves.push_back(Node::leaf(i));
  return Node::phrase(std::move(label), std::move(leaves));
}

std::string chunk_label(const StructuralTag& first) {
  if (first.c && *first.c != kOutside) return *first.c;
  return std::string(kUnknownLabel);
}

}  // namespace

TagResult tag_standalone(const ChunkModel& model, const std::vector<Token>& tokens,
                         UnknownPosPolicy policy) {
  TagResult result;
  if (tokens.empty()) return result;
  auto pos = pos_of(tokens);
  ViterbiResult v = viterbi_decode(model, pos, {}, policy);
  for (TagId id : v.tags) result.tags.push_back(model.alphabet()[id]);
  DecodeResult d = decode_tags(tokens, result.tags, model.scheme());
  result.sentence = std::move(d.sentence);
  result.repairs = d.repairs;
  result.unknown_positions = std::move(v.unknown_positions);
  result.log_score = v.log_score;
  double end = 0;
  auto contrib = contributions(model, pos, v.tags, end);
  for (const Span& s : chunk_spans(result.sentence))
    result.chunk_scores.push_back(sum_over(contrib, s));
  return result;
}

TagResult tag_interactive(const ChunkModel& model, const std::vector<Token>& tokens,
                          const BoundarySpec& boundaries, UnknownPosPolicy policy) {
  const int n = static_cast<int>(tokens.size());
  std::vector<Span> spans = boundaries.checked(n);
  TagResult result;
  if (n == 0) return result;
  auto pos = pos_of(tokens);

  const EncodingScheme& scheme = model.scheme();
  std::vector<TagId> outside_ok, start_ok, inner_ok;
  for (TagId t = 0; t < model.alphabet().size(); ++t) {
    const StructuralTag& tag = model.alphabet()[t];
    if (tag.r != Relation::kOne) {
      inner_ok.push_back(t);
      continue;
    }
    bool outside_c = !tag.c || *tag.c == kOutside;
    bool chunk_c = !tag.c || *tag.c != kOutside;
    if (outside_c) outside_ok.push_back(t);
    if (chunk_c) start_ok.push_back(t);
  }

  std::vector<int> span_of(n, -1);
  for (std::size_t k = 0; k < spans.size(); ++k)
    for (int i = spans[k].begin; i < spans[k].end; ++i) span_of[i] = static_cast<int>(k);

  std::vector<AllowedTags> allowed(n);
  std::vector<bool> infeasible(spans.size(), false);
  for (int i = 0; i < n; ++i) {
    const std::vector<TagId>* set = &outside_ok;
    if (span_of[i] >= 0) set = spans[span_of[i]].begin == i ? &start_ok : &inner_ok;
    if (!model.knows_pos(pos[i])) {
      if (policy == UnknownPosPolicy::kUnk) throw UnknownPosError(pos[i], i);
      allowed[i] = *set;
    } else {
      const auto& pool = model.candidates(pos[i]);
      std::vector<TagId> both;
      std::set_intersection(pool.begin(), pool.end(), set->begin(), set->end(),
                            std::back_inserter(both));
      // A bare word whose POS was never seen outside a chunk still starts
      // a new item, so any r=1 tag will do.
      if (both.empty() && span_of[i] < 0)
        std::set_intersection(pool.begin(), pool.end(), start_ok.begin(), start_ok.end(),
                              std::back_inserter(both));
      if (!both.empty()) allowed[i] = std::move(both);
      else if (span_of[i] >= 0) infeasible[span_of[i]] = true;
    }
    if (allowed[i] && allowed[i]->empty()) {
      allowed[i].reset();
      if (span_of[i] >= 0) infeasible[span_of[i]] = true;
    }
  }
  for (std::size_t k = 0; k < spans.size(); ++k)
    if (infeasible[k])
      for (int i = spans[k].begin; i < spans[k].end; ++i) allowed[i].reset();

  ViterbiResult v = viterbi_decode(model, pos, allowed, policy);
  for (TagId id : v.tags) result.tags.push_back(model.alphabet()[id]);
  result.unknown_positions = std::move(v.unknown_positions);
  result.log_score = v.log_score;
  double end = 0;
  auto contrib = contributions(model, pos, v.tags, end);

  result.sentence.tokens = tokens;
  std::size_t k = 0;
  for (int i = 0; i < n;) {
    if (k == spans.size() || i < spans[k].begin) {
      result.sentence.forest.push_back(Node::leaf(i));
      ++i;
      continue;
    }
    const Span s = spans[k];
    std::vector<StructuralTag> local(result.tags.begin() + s.begin,
                                     result.tags.begin() + s.end);
    Node chunk;
    bool ok = !infeasible[k];
    if (ok) {
      std::vector<Token> span_tokens(tokens.begin() + s.begin, tokens.begin() + s.end);
      DecodeResult d = decode_tags(span_tokens, local, scheme);
      result.repairs += d.repairs;
      auto& forest = d.sentence.forest;
      if (forest.size() == 1 && !forest.front().is_leaf()) {
        chunk = shifted(std::move(forest.front()), s.begin);
      } else if (forest.size() == 1) {
        chunk = Node::phrase(chunk_label(local.front()), {Node::leaf(s.begin)});
      } else {
        ++result.repairs;
        ok = false;
      }
    } else {
      result.infeasible_spans.push_back(s);
    }
    if (!ok) chunk = flat_chunk(s, chunk_label(local.front()));
    result.sentence.forest.push_back(std::move(chunk));
    result.chunk_scores.push_back(sum_over(contrib, s));
    i = s.end;
    ++k;
  }
  return result;
}

namespace {

TagResult tag_one(const ChunkModel& model, const ChunkerConfig& config, const Sentence& s) {
  if (config.mode == Mode::kInteractive)
    return tag_interactive(model, s.tokens, BoundarySpec{chunk_spans(s)}, config.unknown_pos);
  return tag_standalone(model, s.tokens, config.unknown_pos);
}

}  // namespace

std::vector<TagResult> tag_batch(const ChunkModel& model, const ChunkerConfig& config,
                                 const std::vector<Sentence>& gold) {
  const auto n = static_cast<std::ptrdiff_t>(gold.size());
  std::vector<TagResult> out(gold.size());
  std::vector<std::exception_ptr> errors(gold.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = tag_one(model, config, gold[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<TagResult> tag_batch_serial(const ChunkModel& model,
                                        const ChunkerConfig& config,
                                        const std::vector<Sentence>& gold) {
  std::vector<TagResult> out;
  out.reserve(gold.size());
  for (const Sentence& s : gold) out.push_back(tag_one(model, config, s));
  return out;
}

}  // namespace chunktag
