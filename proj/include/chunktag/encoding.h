#pragma once

// Codec between depth-limited chunk trees and per-word structural tags
// <r, t?, c?, g?>.
//
// r relates word i to word i-1 through their parent chains; the first
// condition that holds wins:
//
//   0   parent(w_i)   == parent(w_i-1)
//   +   parent(w_i)   == parent^2(w_i-1)
//   ++  parent(w_i)   == parent^3(w_i-1)
//   -   parent^2(w_i) == parent(w_i-1)
//   --  parent^3(w_i) == parent(w_i-1)
//   =   parent^2(w_i) == parent^2(w_i-1)
//   1   otherwise (including chains that leave the top-level chunk)
//
// Word 0 always gets 1.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chunktag/corpus.h"

namespace chunktag {

// Declaration order is the tie-break order.
enum class Relation : std::uint8_t {
  kZero,
  kPlus,
  kPlusPlus,
  kMinus,
  kMinusMinus,
  kEqual,
  kOne,
};

inline constexpr Relation kAllRelations[] = {
    Relation::kZero,  Relation::kPlus,       Relation::kPlusPlus, Relation::kMinus,
    Relation::kMinusMinus, Relation::kEqual, Relation::kOne};

std::string_view to_string(Relation r);
Relation parse_relation(std::string_view s);

enum class GrandparentFlag : std::uint8_t { kNone, kA, kN, kC };

std::string_view to_string(GrandparentFlag g);
GrandparentFlag parse_grandparent_flag(std::string_view s);

// Reserved category symbols.
inline constexpr std::string_view kOutside = "*";  // c of a bare token
inline constexpr std::string_view kUnknownLabel = "X";

// Maps phrase labels to grandparent flags and back.
struct CategoryMap {
  std::string ap_label = "AP";
  std::string np_label = "NP";
  std::string pp_label = "PP";
  // Labels starting with this prefix are coordinated constituents.
  std::string coord_prefix = "C";
  // Label given to an unlabelled node whose flag is C.
  std::string coord_label = "CNP";

  GrandparentFlag flag_for(std::string_view label) const;
  std::string label_for(GrandparentFlag flag) const;
  bool operator==(const CategoryMap&) const = default;
};

struct EncodingScheme {
  bool t = true;
  bool c = true;
  bool g = true;
  int depth = 3;
  CategoryMap categories;

  // "r", "rt", "rtc", "rtcg", "rc", "rcg".
  std::string dims() const;
  // Accepts "rtcg" or "r,t,c,g" style; r is mandatory, g requires c.
  static EncodingScheme parse(std::string_view dims, int depth = 3);
  bool operator==(const EncodingScheme&) const = default;
};

struct StructuralTag {
  Relation r = Relation::kOne;
  std::optional<std::string> t;
  std::optional<std::string> c;
  std::optional<GrandparentFlag> g;

  auto operator<=>(const StructuralTag&) const = default;
};

// `r|t|c|g` with absent dimensions skipped, e.g. "++|ADJA|AP|N".
std::string render(const StructuralTag& tag);
StructuralTag parse_tag(std::string_view text, const EncodingScheme& scheme);
// Keeps only the dimensions active in `scheme`.
StructuralTag project(const StructuralTag& tag, const EncodingScheme& scheme);

// Relation of word i to word i-1 on `sentence` as given (no normalisation).
Relation relation_at(const Sentence& sentence, int i);
std::vector<Relation> relations(const Sentence& sentence);

// Brings a sentence into the class the scheme can represent exactly:
// lenient depth flattening (or DepthError under kStrict), removal of unary
// nodes on the left edge of a chunk, and dissolution of nodes that would
// create adjacent-word relations outside the scheme's inventory (for depth 2
// only 0, +, - and 1 remain). Returns the number of removed nodes through
// `changes` when non-null.
Sentence normalize_for_scheme(const Sentence& sentence, const EncodingScheme& scheme,
                              DepthPolicy policy = DepthPolicy::kStrict,
                              int* changes = nullptr);

// One tag per word, computed on normalize_for_scheme(sentence).
std::vector<StructuralTag> encode_sentence(const Sentence& sentence,
                                           const EncodingScheme& scheme,
                                           DepthPolicy policy = DepthPolicy::kStrict);

struct DecodeResult {
  Sentence sentence;
  // Tags that were inconsistent with the structure built so far.
  int repairs = 0;
};

// Rebuilds a forest left to right from the previous word's ancestor path.
// A missing ancestor required by + / ++ / = is created above the current
// chunk root (one level, over a root with at least two children, within the
// depth limit). Otherwise the relation is clamped to the nearest legal level
// and counted as a repair.
DecodeResult decode_tags(const std::vector<Token>& tokens,
                         const std::vector<StructuralTag>& tags,
                         const EncodingScheme& scheme);

struct TagAlphabetStats {
  // Distinct tags in first-seen order.
  std::vector<StructuralTag> tags;
  // Mean over word tokens of the number of alphabet tags observed with the
  // word's POS.
  double mean_ambiguity = 0.0;
};

TagAlphabetStats tag_alphabet(const Treebank& treebank, const EncodingScheme& scheme,
                              DepthPolicy policy = DepthPolicy::kLenient);

}  // namespace chunktag
