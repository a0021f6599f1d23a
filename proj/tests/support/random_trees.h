#pragma once

// Seeded random chunk trees for property tests, and an encodability check
// written directly from the relation definitions (parent-chain meeting
// points), independent of the library's normaliser.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chunktag/corpus.h"

namespace testsupport {

using chunktag::Node;
using chunktag::Sentence;
using chunktag::Token;

inline const std::vector<std::string> kPos = {"ART", "ADJA", "NN", "NE", "APPR", "ADV", "CARD"};
inline const std::vector<std::string> kLabels = {"NP", "PP", "AP", "MPN", "CNP"};

// Phrase chain of each token, immediate parent first, chunk root last.
inline void chains(const Node& n, std::vector<const Node*>& path,
                   std::vector<std::vector<const Node*>>& out) {
  if (n.is_leaf()) {
    out[n.token].assign(path.rbegin(), path.rend());
    return;
  }
  path.push_back(&n);
  for (const Node& c : n.children) chains(c, path, out);
  path.pop_back();
}

// (k, m): the first common node is the k-th ancestor of the previous word
// and the m-th ancestor of the current one.
inline bool allowed(int k, int m, int depth) {
  static const std::set<std::pair<int, int>> d3 = {{1, 1}, {2, 1}, {3, 1},
                                                   {1, 2}, {1, 3}, {2, 2}};
  static const std::set<std::pair<int, int>> d2 = {{1, 1}, {2, 1}, {1, 2}};
  return (depth == 2 ? d2 : d3).count({k, m}) > 0;
}

inline bool has_direct_leaf(const Node& n) {
  return std::any_of(n.children.begin(), n.children.end(),
                     [](const Node& c) { return c.is_leaf(); });
}

inline bool every_phrase_has_leaf(const Node& n) {
  if (n.is_leaf()) return true;
  if (!has_direct_leaf(n)) return false;
  return std::all_of(n.children.begin(), n.children.end(), every_phrase_has_leaf);
}

// True if the sentence is reproduced exactly by encoding and decoding under
// a scheme of the given depth with all dimensions. With `structure_only` the
// labels of phrases without a direct word are not required to survive.
inline bool encodable(const Sentence& s, int depth, bool structure_only = false) {
  std::vector<std::vector<const Node*>> ch(s.tokens.size());
  for (const Node& top : s.forest) {
    if (top.is_leaf()) continue;
    if (!structure_only && !every_phrase_has_leaf(top)) return false;
    // No unary phrase on the left edge below the root.
    for (const Node* n = &top.children.front(); !n->is_leaf(); n = &n->children.front())
      if (n->children.size() == 1) return false;
    std::vector<const Node*> path;
    chains(top, path, ch);
  }
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const auto& cur = ch[i];
    if (cur.empty()) continue;
    if (static_cast<int>(cur.size()) > depth + 1) return false;
    const bool chunk_initial = i == 0 || ch[i - 1].empty() || ch[i - 1].back() != cur.back();
    if (chunk_initial) {
      if (!allowed(1, static_cast<int>(cur.size()), depth)) return false;
      continue;
    }
    const auto& prev = ch[i - 1];
    bool met = false;
    for (std::size_t k = 0; k < prev.size() && !met; ++k)
      for (std::size_t m = 0; m < cur.size() && !met; ++m)
        if (prev[k] == cur[m]) {
          met = true;
          if (!allowed(static_cast<int>(k) + 1, static_cast<int>(m) + 1, depth)) return false;
        }
  }
  return true;
}

class TreeGenerator {
 public:
  explicit TreeGenerator(std::uint64_t seed) : rng_(seed) {}

  // A random forest of up to `max_items` items with embedding depth <= depth.
  Sentence any(int depth, int max_items = 5) {
    Sentence s;
    int items = 1 + static_cast<int>(rng_() % static_cast<unsigned>(max_items));
    for (int k = 0; k < items; ++k) {
      if (coin(0.25))
        s.forest.push_back(leaf(s));
      else
        s.forest.push_back(phrase(s, depth));
    }
    return s;
  }

  // Rejection-samples an encodable sentence.
  Sentence encodable(int depth, int max_items = 5) {
    for (;;) {
      Sentence s = any(depth, max_items);
      if (testsupport::encodable(s, depth)) return s;
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  Node leaf(Sentence& s) {
    s.tokens.push_back({"w" + std::to_string(s.tokens.size()), kPos[rng_() % kPos.size()]});
    return Node::leaf(s.size() - 1);
  }

  Node phrase(Sentence& s, int levels_left) {
    std::vector<Node> kids;
    int n = 1 + static_cast<int>(rng_() % 4);
    for (int k = 0; k < n; ++k) {
      if (levels_left > 0 && coin(0.3))
        kids.push_back(phrase(s, levels_left - 1));
      else
        kids.push_back(leaf(s));
    }
    return Node::phrase(kLabels[rng_() % kLabels.size()], std::move(kids));
  }

  std::mt19937_64 rng_;
};

}  // namespace testsupport
