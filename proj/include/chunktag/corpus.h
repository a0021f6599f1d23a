#pragma once

// POS-tagged sentences, depth-limited chunk trees and the line-oriented
// bracketed corpus format.
//
// Format: one sentence per line. A chunk is `(LABEL child child ...)`, a
// token is `form/POS` (split on the last slash). Tokens outside any chunk
// appear bare at top level. Header lines `#pos: A B C` and `#cat: NP PP`
// declare the alphabets; any other line starting with `#` is a comment.
// A preterminal `(ART ein/ART)`, whose label equals its token's POS, reads
// as the bare token.

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace chunktag {

struct Token {
  std::string form;
  std::string pos;

  bool operator==(const Token&) const = default;
};

// Half-open token range [begin, end).
struct Span {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  auto operator<=>(const Span&) const = default;
};

// A tree node. Leaves reference a token of the owning sentence by index and
// have no label; phrase nodes carry a category label and >= 1 child.
struct Node {
  std::string label;
  int token = -1;
  std::vector<Node> children;

  static Node leaf(int token_index);
  static Node phrase(std::string label, std::vector<Node> children);

  bool is_leaf() const { return token >= 0; }
  int first_token() const;
  int last_token() const;
  Span span() const { return {first_token(), last_token() + 1}; }

  bool operator==(const Node&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  // Top-level items in order: chunks, or bare leaves for tokens outside any
  // chunk.
  std::vector<Node> forest;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Sentence&) const = default;
};

struct Treebank {
  std::set<std::string> pos_alphabet;
  std::set<std::string> category_alphabet;
  std::vector<Sentence> sentences;
  // Phrase nodes removed by lenient depth flattening while parsing.
  int flattened_nodes = 0;

  bool operator==(const Treebank&) const = default;
};

enum class DepthPolicy { kStrict, kLenient };

struct ParseOptions {
  // Maximum embedding depth: phrase levels below a top-level chunk root.
  int max_depth = 3;
  DepthPolicy depth_policy = DepthPolicy::kLenient;
};

Treebank parse_bracketed(std::string_view text, const ParseOptions& options = {});
// Parses one sentence line. Returns the number of flattened nodes through
// `flattened` when non-null.
Sentence parse_sentence(std::string_view line, const ParseOptions& options = {},
                        int* flattened = nullptr);
// Parses a line of bare `form/POS` tokens (tagger input).
std::vector<Token> parse_tokens(std::string_view line);

std::string serialize(const Treebank& treebank);
std::string serialize_sentence(const Sentence& sentence);

// 1 + max over children; leaves contribute 0.
int tree_depth(const Node& node);
// Number of phrase ancestors of token `i` strictly below its top-level chunk
// root; 0 for bare tokens and direct children of the root.
int token_depth(const Sentence& sentence, int i);
// Max token_depth over the sentence.
int embedding_depth(const Sentence& sentence);

// Throws FormatError if the tokens are not covered exactly once in order, a
// phrase node is empty or unlabelled, or a top-level leaf is malformed.
void validate(const Sentence& sentence);
void validate(const Treebank& treebank);

// Dissolves every phrase node whose level below the chunk root exceeds
// `max_depth`, splicing its children into its parent. Returns the number of
// dissolved nodes.
int flatten_to_depth(Sentence& sentence, int max_depth);

// For each token, its phrase ancestors from the immediate parent up to the
// top-level chunk root. Empty for bare tokens. Pointers are into `sentence`.
std::vector<std::vector<const Node*>> ancestor_chains(const Sentence& sentence);

// Every maximal node whose label is in `categories` becomes a one-chunk
// sentence; material outside such nodes is dropped.
Treebank extract_chunks(const Treebank& treebank,
                        const std::set<std::string>& categories);

// Top-level chunk spans (bare tokens excluded).
std::vector<Span> chunk_spans(const Sentence& sentence);

// Sentence of bare tokens.
Sentence flat_sentence(std::vector<Token> tokens);

}  // namespace chunktag
