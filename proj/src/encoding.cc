#include "chunktag/encoding.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "chunktag/error.h"

namespace chunktag {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::kZero: return "0";
    case Relation::kPlus: return "+";
    case Relation::kPlusPlus: return "++";
    case Relation::kMinus: return "-";
    case Relation::kMinusMinus: return "--";
    case Relation::kEqual: return "=";
    case Relation::kOne: return "1";
  }
  return "?";
}

Relation parse_relation(std::string_view s) {
  for (Relation r : kAllRelations)
    if (to_string(r) == s) return r;
  throw FormatError("unknown relation '" + std::string(s) + "'");
}

std::string_view to_string(GrandparentFlag g) {
  switch (g) {
    case GrandparentFlag::kNone: return "*";
    case GrandparentFlag::kA: return "A";
    case GrandparentFlag::kN: return "N";
    case GrandparentFlag::kC: return "C";
  }
  return "?";
}

GrandparentFlag parse_grandparent_flag(std::string_view s) {
  for (GrandparentFlag g : {GrandparentFlag::kNone, GrandparentFlag::kA,
                            GrandparentFlag::kN, GrandparentFlag::kC})
    if (to_string(g) == s) return g;
  throw FormatError("unknown grandparent flag '" + std::string(s) + "'");
}

GrandparentFlag CategoryMap::flag_for(std::string_view label) const {
  if (label == ap_label) return GrandparentFlag::kA;
  if (label == np_label || label == pp_label) return GrandparentFlag::kN;
  if (!coord_prefix.empty() && label.substr(0, coord_prefix.size()) == coord_prefix)
    return GrandparentFlag::kC;
  return GrandparentFlag::kNone;
}

std::string CategoryMap::label_for(GrandparentFlag flag) const {
  switch (flag) {
    case GrandparentFlag::kA: return ap_label;
    case GrandparentFlag::kN: return np_label;
    case GrandparentFlag::kC: return coord_label;
    case GrandparentFlag::kNone: break;
  }
  return std::string(kUnknownLabel);
}

std::string EncodingScheme::dims() const {
  std::string d = "r";
  if (t) d += 't';
  if (c) d += 'c';
  if (g) d += 'g';
  return d;
}

EncodingScheme EncodingScheme::parse(std::string_view dims, int depth) {
  EncodingScheme s;
  s.t = s.c = s.g = false;
  bool has_r = false;
  for (char ch : dims) {
    switch (ch) {
      case 'r': has_r = true; break;
      case 't': s.t = true; break;
      case 'c': s.c = true; break;
      case 'g': s.g = true; break;
      case ',': case ' ': break;
      default:
        throw FormatError("unknown dimension '" + std::string(1, ch) + "'");
    }
  }
  if (!has_r) throw FormatError("dimension r is mandatory");
  if (s.g && !s.c) throw FormatError("dimension g requires c");
  if (depth != 2 && depth != 3) throw FormatError("depth must be 2 or 3");
  s.depth = depth;
  return s;
}

std::string render(const StructuralTag& tag) {
  std::string out(to_string(tag.r));
  if (tag.t) out += '|' + *tag.t;
  if (tag.c) out += '|' + *tag.c;
  if (tag.g) {
    out += '|';
    out += to_string(*tag.g);
  }
  return out;
}

StructuralTag parse_tag(std::string_view text, const EncodingScheme& scheme) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = text.find('|', start);
    parts.push_back(text.substr(start, bar == std::string_view::npos
                                           ? std::string_view::npos
                                           : bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  std::size_t expected = 1 + scheme.t + scheme.c + scheme.g;
  if (parts.size() != expected)
    throw FormatError("tag '" + std::string(text) + "' does not match dims " +
                      scheme.dims());
  StructuralTag tag;
  std::size_t k = 0;
  tag.r = parse_relation(parts[k++]);
  if (scheme.t) tag.t = std::string(parts[k++]);
  if (scheme.c) tag.c = std::string(parts[k++]);
  if (scheme.g) tag.g = parse_grandparent_flag(parts[k++]);
  return tag;
}

StructuralTag project(const StructuralTag& tag, const EncodingScheme& scheme) {
  StructuralTag out;
  out.r = tag.r;
  if (scheme.t) out.t = tag.t;
  if (scheme.c) out.c = tag.c;
  if (scheme.g) out.g = tag.g;
  return out;
}

namespace {

using Chain = std::vector<const Node*>;

const Node* up(const Chain& chain, int k) {
  return k <= static_cast<int>(chain.size()) ? chain[k - 1] : nullptr;
}

bool same(const Node* a, const Node* b) { return a && b && a == b; }

Relation relation_of(const Chain& cur, const Chain& prev) {
  if (cur.empty() || prev.empty() || cur.back() != prev.back())
    return Relation::kOne;
  if (same(up(cur, 1), up(prev, 1))) return Relation::kZero;
  if (same(up(cur, 1), up(prev, 2))) return Relation::kPlus;
  if (same(up(cur, 1), up(prev, 3))) return Relation::kPlusPlus;
  if (same(up(cur, 2), up(prev, 1))) return Relation::kMinus;
  if (same(up(cur, 3), up(prev, 1))) return Relation::kMinusMinus;
  if (same(up(cur, 2), up(prev, 2))) return Relation::kEqual;
  return Relation::kOne;
}

// Steps from each word to the lowest common ancestor: (prev side, cur side).
// Both chains must end at the same root.
std::pair<int, int> lca_offsets(const Chain& cur, const Chain& prev) {
  for (std::size_t k = 0; k < prev.size(); ++k) {
    auto it = std::find(cur.begin(), cur.end(), prev[k]);
    if (it != cur.end())
      return {static_cast<int>(k) + 1, static_cast<int>(it - cur.begin()) + 1};
  }
  return {0, 0};
}

bool pattern_allowed(int k, int m, int depth) {
  if (depth >= 3)
    return (m == 1 && k <= 3) || (k == 1 && m <= 3) || (k == 2 && m == 2);
  return (k == 1 && m == 1) || (k == 2 && m == 1) || (k == 1 && m == 2);
}

bool dissolve(std::vector<Node>& children, const Node* target) {
  for (std::size_t i = 0; i < children.size(); ++i) {
    Node& c = children[i];
    if (&c == target) {
      std::vector<Node> grand = std::move(c.children);
      children.erase(children.begin() + static_cast<std::ptrdiff_t>(i));
      children.insert(children.begin() + static_cast<std::ptrdiff_t>(i),
                      std::make_move_iterator(grand.begin()),
                      std::make_move_iterator(grand.end()));
      return true;
    }
    if (!c.is_leaf() && dissolve(c.children, target)) return true;
  }
  return false;
}

}  // namespace

Relation relation_at(const Sentence& sentence, int i) {
  if (i < 0 || i >= sentence.size())
    throw DataError("word index " + std::to_string(i) + " out of range");
  if (i == 0) return Relation::kOne;
  auto chains = ancestor_chains(sentence);
  return relation_of(chains[i], chains[i - 1]);
}

std::vector<Relation> relations(const Sentence& sentence) {
  auto chains = ancestor_chains(sentence);
  std::vector<Relation> out(chains.size(), Relation::kOne);
  for (std::size_t i = 1; i < chains.size(); ++i)
    out[i] = relation_of(chains[i], chains[i - 1]);
  return out;
}

Sentence normalize_for_scheme(const Sentence& sentence, const EncodingScheme& scheme,
                              DepthPolicy policy, int* changes) {
  Sentence s = sentence;
  int removed = 0;
  if (embedding_depth(s) > scheme.depth) {
    if (policy == DepthPolicy::kStrict)
      throw DepthError("depth " + std::to_string(embedding_depth(s)) +
                       " exceeds scheme depth " + std::to_string(scheme.depth));
    removed += flatten_to_depth(s, scheme.depth);
  }
  // Dissolving a node can change relations of earlier pairs, so repeat
  // until a full pass leaves the sentence alone.
  for (int before = -1; before != removed;) {
    before = removed;
    for (Node& root : s.forest) {
      while (!root.is_leaf() && root.children.size() == 1 &&
             !root.children.front().is_leaf()) {
        std::vector<Node> grand = std::move(root.children.front().children);
        root.children = std::move(grand);
        ++removed;
      }
      // The decoder builds a chunk upwards from its first word, so a unary
      // node on the left edge below the root cannot be rebuilt.
      for (Node* n = &root; !n->is_leaf();) {
        Node& first = n->children.front();
        if (!first.is_leaf() && first.children.size() == 1) {
          std::vector<Node> grand = std::move(first.children);
          n->children.erase(n->children.begin());
          n->children.insert(n->children.begin(), std::make_move_iterator(grand.begin()),
                             std::make_move_iterator(grand.end()));
          ++removed;
          continue;
        }
        n = &first;
      }
    }
    for (int i = 0; i < s.size(); ++i) {
      while (true) {
        auto chains = ancestor_chains(s);
        const Chain& cur = chains[i];
        if (cur.empty()) break;
        const Chain* prev = i > 0 ? &chains[i - 1] : nullptr;
        int k = 1, m = static_cast<int>(cur.size());
        if (prev && !prev->empty() && prev->back() == cur.back()) {
          std::tie(k, m) = lca_offsets(cur, *prev);
        }
        // A chunk-initial word is checked as if entered from a word
        // directly below the root, so the same structure normalises the
        // same way wherever the chunk starts.
        if (pattern_allowed(k, m, scheme.depth)) break;
        // Prefer dropping the previous word's parent; a structure that is
        // only too deep on the current side loses the current word's parent.
        // Neither is the chunk root.
        const Node* target = k >= 2 ? (*prev)[0] : cur[0];
        for (Node& root : s.forest)
          if (!root.is_leaf() && dissolve(root.children, target)) break;
        ++removed;
      }
    }
  }
  if (changes) *changes = removed;
  return s;
}

std::vector<StructuralTag> encode_sentence(const Sentence& sentence,
                                           const EncodingScheme& scheme,
                                           DepthPolicy policy) {
  Sentence s = normalize_for_scheme(sentence, scheme, policy);
  auto chains = ancestor_chains(s);
  std::vector<StructuralTag> tags(chains.size());
  for (std::size_t i = 0; i < chains.size(); ++i) {
    StructuralTag& tag = tags[i];
    tag.r = i == 0 ? Relation::kOne : relation_of(chains[i], chains[i - 1]);
    if (scheme.t) tag.t = s.tokens[i].pos;
    if (scheme.c)
      tag.c = chains[i].empty() ? std::string(kOutside) : chains[i][0]->label;
    if (scheme.g)
      tag.g = chains[i].size() >= 2
                  ? scheme.categories.flag_for(chains[i][1]->label)
                  : GrandparentFlag::kNone;
  }
  return tags;
}

namespace {

// Mutable tree used while decoding. Children are node ids (>= 0) or tokens
// encoded as ~token (< 0).
struct Builder {
  struct Item {
    int parent = -1;
    std::optional<std::string> label;
    std::optional<GrandparentFlag> pending_flag;
    std::vector<int> kids;
  };

  const EncodingScheme& scheme;
  std::vector<Item> nodes;
  std::vector<int> top;  // same encoding as kids

  int make(int parent) {
    nodes.push_back({parent, std::nullopt, std::nullopt, {}});
    int id = static_cast<int>(nodes.size()) - 1;
    if (parent >= 0) nodes[parent].kids.push_back(id);
    return id;
  }
  int level(int n) const {
    int l = 0;
    while (nodes[n].parent >= 0) {
      n = nodes[n].parent;
      ++l;
    }
    return l;
  }
  int ancestor(int n, int k) const {
    while (k-- > 0) n = nodes[n].parent;
    return n;
  }
  void attach(int node, int token, const StructuralTag& tag) {
    nodes[node].kids.push_back(~token);
    if (!nodes[node].label) {
      if (tag.c && *tag.c != kOutside)
        nodes[node].label = *tag.c;
      else
        nodes[node].label = std::string(kUnknownLabel);
    }
    int gp = nodes[node].parent;
    if (gp >= 0 && tag.g && !nodes[gp].label && !nodes[gp].pending_flag)
      nodes[gp].pending_flag = *tag.g;
  }
  Node build(int id) const {
    if (id < 0) return Node::leaf(~id);
    const Item& it = nodes[id];
    std::string label = it.label ? *it.label
                        : it.pending_flag ? scheme.categories.label_for(*it.pending_flag)
                                          : std::string(kUnknownLabel);
    Node n = Node::phrase(std::move(label), {});
    n.children.reserve(it.kids.size());
    for (int k : it.kids) n.children.push_back(build(k));
    return n;
  }
};

struct Move {
  int up;
  int down;
};

Move move_of(Relation r) {
  switch (r) {
    case Relation::kZero: return {0, 0};
    case Relation::kPlus: return {1, 0};
    case Relation::kPlusPlus: return {2, 0};
    case Relation::kMinus: return {0, 1};
    case Relation::kMinusMinus: return {0, 2};
    case Relation::kEqual: return {1, 1};
    case Relation::kOne: break;
  }
  return {0, 0};
}

}  // namespace

DecodeResult decode_tags(const std::vector<Token>& tokens,
                         const std::vector<StructuralTag>& tags,
                         const EncodingScheme& scheme) {
  if (tokens.size() != tags.size())
    throw DataError("decode_tags: " + std::to_string(tokens.size()) +
                    " tokens but " + std::to_string(tags.size()) + " tags");
  Builder b{scheme, {}, {}};
  DecodeResult result;
  int prev_parent = -1;        // parent node of the previous word, -1 if bare
  bool prev_provisional = false;  // previous word bare only for lack of c
  int root = -1;
  int chunk_max = 0;           // deepest token level in the current chunk

  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    const StructuralTag& tag = tags[i];
    Relation r = tag.r;
    if (r != Relation::kOne && prev_parent < 0) {
      if (i > 0 && prev_provisional) {
        root = b.make(-1);
        b.nodes[root].label = std::string(kUnknownLabel);
        b.nodes[root].kids.push_back(b.top.back());
        b.top.back() = root;
        prev_parent = root;
        chunk_max = 0;
      } else {
        ++result.repairs;
        r = Relation::kOne;
      }
    }
    if (r == Relation::kOne) {
      if (!tag.c || *tag.c == kOutside) {
        b.top.push_back(~i);
        prev_parent = -1;
        prev_provisional = !tag.c;
      } else {
        root = b.make(-1);
        b.top.push_back(root);
        b.attach(root, i, tag);
        prev_parent = root;
        prev_provisional = false;
        chunk_max = 0;
      }
      continue;
    }

    Move want = move_of(r);
    int level_p = b.level(prev_parent);
    // Growing more than one level, or growing over a root with a single
    // child, would leave a unary node below the root.
    auto feasible = [&](Move mv) {
      int grow = std::max(0, mv.up - level_p);
      if (grow > 1 || (grow == 1 && b.nodes[root].kids.size() < 2)) return false;
      int target_level = level_p + grow - mv.up;
      return std::max(chunk_max + grow, target_level + mv.down) <= scheme.depth;
    };
    Move mv = want;
    if (!feasible(mv)) {
      ++result.repairs;
      bool found = false;
      for (int u = want.up; u >= 0 && !found; --u)
        if (feasible({u, want.down})) {
          mv = {u, want.down};
          found = true;
        }
      for (int d = want.down - 1; d >= 0 && !found; --d)
        if (feasible({0, d})) {
          mv = {0, d};
          found = true;
        }
      if (!found) mv = {0, 0};
    }

    int grow = std::max(0, mv.up - level_p);
    for (int k = 0; k < grow; ++k) {
      int above = b.make(-1);
      b.nodes[root].parent = above;
      b.nodes[above].kids.push_back(root);
      root = above;
    }
    b.top.back() = root;
    chunk_max += grow;
    int target = b.ancestor(prev_parent, mv.up);
    for (int d = 0; d < mv.down; ++d) target = b.make(target);
    b.attach(target, i, tag);
    chunk_max = std::max(chunk_max, b.level(target));
    prev_parent = target;
    prev_provisional = false;
  }

  result.sentence.tokens = tokens;
  for (int item : b.top) result.sentence.forest.push_back(b.build(item));
  return result;
}

TagAlphabetStats tag_alphabet(const Treebank& treebank, const EncodingScheme& scheme,
                              DepthPolicy policy) {
  TagAlphabetStats stats;
  std::map<StructuralTag, int> index;
  std::map<std::string, std::set<int>> by_pos;
  std::vector<std::pair<std::string, int>> words;
  for (const Sentence& s : treebank.sentences) {
    auto tags = encode_sentence(s, scheme, policy);
    for (std::size_t i = 0; i < tags.size(); ++i) {
      auto [it, fresh] = index.emplace(tags[i], static_cast<int>(stats.tags.size()));
      if (fresh) stats.tags.push_back(tags[i]);
      by_pos[s.tokens[i].pos].insert(it->second);
      words.emplace_back(s.tokens[i].pos, it->second);
    }
  }
  if (!words.empty()) {
    double total = 0;
    for (const auto& w : words) total += static_cast<double>(by_pos[w.first].size());
    stats.mean_ambiguity = total / static_cast<double>(words.size());
  }
  return stats;
}

}  // namespace chunktag
