#include "chunktag/corpus.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <sstream>

#include "chunktag/error.h"

namespace chunktag {

Node Node::leaf(int token_index) {
  Node n;
  n.token = token_index;
  return n;
}

Node Node::phrase(std::string label, std::vector<Node> children) {
  Node n;
  n.label = std::move(label);
  n.children = std::move(children);
  return n;
}

int Node::first_token() const {
  return is_leaf() ? token : children.front().first_token();
}

int Node::last_token() const {
  return is_leaf() ? token : children.back().last_token();
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool is_symbol_char(char c) { return !is_space(c) && c != '(' && c != ')'; }

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line;

  void skip_space() {
    while (pos < text.size() && is_space(text[pos])) ++pos;
  }
  bool done() {
    skip_space();
    return pos >= text.size();
  }
  char peek() const { return text[pos]; }
  std::string_view symbol() {
    std::size_t start = pos;
    while (pos < text.size() && is_symbol_char(text[pos])) ++pos;
    return text.substr(start, pos - start);
  }
};

Token split_token(std::string_view word, std::size_t line) {
  auto slash = word.rfind('/');
  if (slash == std::string_view::npos || slash + 1 == word.size())
    throw FormatError("token '" + std::string(word) + "' has no POS", line);
  if (slash == 0)
    throw FormatError("token '" + std::string(word) + "' has an empty form",
                      line);
  return {std::string(word.substr(0, slash)), std::string(word.substr(slash + 1))};
}

Node parse_node(Lexer& lex, std::vector<Token>& tokens) {
  // Caller consumed '('.
  std::string_view label = lex.symbol();
  if (label.empty()) throw FormatError("missing label after '('", lex.line);
  Node node = Node::phrase(std::string(label), {});
  while (true) {
    if (lex.done()) throw FormatError("unbalanced brackets: missing ')'", lex.line);
    char c = lex.peek();
    if (c == ')') {
      ++lex.pos;
      break;
    }
    if (c == '(') {
      ++lex.pos;
      node.children.push_back(parse_node(lex, tokens));
    } else {
      tokens.push_back(split_token(lex.symbol(), lex.line));
      node.children.push_back(Node::leaf(static_cast<int>(tokens.size()) - 1));
    }
  }
  if (node.children.empty())
    throw FormatError("empty phrase (" + node.label + ")", lex.line);
  // Penn-style preterminal (ART ein/ART): the token itself.
  if (node.children.size() == 1 && node.children[0].is_leaf() &&
      tokens[node.children[0].token].pos == node.label)
    return std::move(node.children[0]);
  return node;
}

Sentence parse_line(std::string_view text, std::size_t line,
                    const ParseOptions& options, int* flattened) {
  Lexer lex{text, 0, line};
  Sentence s;
  while (!lex.done()) {
    char c = lex.peek();
    if (c == ')') throw FormatError("unbalanced brackets: unexpected ')'", line);
    if (c == '(') {
      ++lex.pos;
      s.forest.push_back(parse_node(lex, s.tokens));
    } else {
      s.tokens.push_back(split_token(lex.symbol(), line));
      s.forest.push_back(Node::leaf(s.size() - 1));
    }
  }
  if (s.tokens.empty()) throw FormatError("empty sentence", line);
  int depth = embedding_depth(s);
  int removed = 0;
  if (depth > options.max_depth) {
    if (options.depth_policy == DepthPolicy::kStrict)
      throw DepthError("line " + std::to_string(line) + ": depth " +
                       std::to_string(depth) + " exceeds maximum " +
                       std::to_string(options.max_depth));
    removed = flatten_to_depth(s, options.max_depth);
  }
  if (flattened) *flattened = removed;
  return s;
}

std::optional<std::set<std::string>> parse_header(std::string_view line,
                                                  std::string_view key) {
  if (line.substr(0, key.size()) != key) return std::nullopt;
  std::set<std::string> out;
  std::istringstream in{std::string(line.substr(key.size()))};
  std::string sym;
  while (in >> sym) out.insert(sym);
  return out;
}

void collect_labels(const Node& n, std::set<std::string>& cats) {
  if (n.is_leaf()) return;
  cats.insert(n.label);
  for (const Node& c : n.children) collect_labels(c, cats);
}

void write_node(const Node& n, const Sentence& s, std::string& out) {
  if (n.is_leaf()) {
    const Token& t = s.tokens[n.token];
    out += t.form;
    out += '/';
    out += t.pos;
    return;
  }
  out += '(';
  out += n.label;
  for (const Node& c : n.children) {
    out += ' ';
    write_node(c, s, out);
  }
  out += ')';
}

void flatten_children(std::vector<Node>& children, int level, int max_depth,
                      int& removed) {
  std::vector<Node> out;
  out.reserve(children.size());
  for (Node& child : children) {
    if (child.is_leaf()) {
      out.push_back(std::move(child));
    } else if (level + 1 <= max_depth) {
      flatten_children(child.children, level + 1, max_depth, removed);
      out.push_back(std::move(child));
    } else {
      ++removed;
      flatten_children(child.children, level, max_depth, removed);
      for (Node& g : child.children) out.push_back(std::move(g));
    }
  }
  children = std::move(out);
}

void chains_rec(const Node& n, std::vector<const Node*>& path,
                std::vector<std::vector<const Node*>>& chains) {
  if (n.is_leaf()) {
    chains[n.token].assign(path.rbegin(), path.rend());
    return;
  }
  path.push_back(&n);
  for (const Node& c : n.children) chains_rec(c, path, chains);
  path.pop_back();
}

void check_symbol(const std::string& sym, const char* what) {
  if (sym.empty() || !std::all_of(sym.begin(), sym.end(), is_symbol_char))
    throw FormatError(std::string("invalid ") + what + " '" + sym + "'");
}

Node reindex(const Node& n, int offset) {
  if (n.is_leaf()) return Node::leaf(n.token - offset);
  Node out = Node::phrase(n.label, {});
  out.children.reserve(n.children.size());
  for (const Node& c : n.children) out.children.push_back(reindex(c, offset));
  return out;
}

void extract_rec(const Node& n, const Sentence& s,
                 const std::set<std::string>& categories, Treebank& out) {
  if (n.is_leaf()) return;
  if (categories.count(n.label)) {
    Span sp = n.span();
    Sentence chunk;
    chunk.tokens.assign(s.tokens.begin() + sp.begin, s.tokens.begin() + sp.end);
    chunk.forest.push_back(reindex(n, sp.begin));
    out.sentences.push_back(std::move(chunk));
    return;
  }
  for (const Node& c : n.children) extract_rec(c, s, categories, out);
}

}  // namespace

Sentence parse_sentence(std::string_view line, const ParseOptions& options,
                        int* flattened) {
  Sentence s = parse_line(line, 0, options, flattened);
  validate(s);
  return s;
}

std::vector<Token> parse_tokens(std::string_view line) {
  Lexer lex{line, 0, 0};
  std::vector<Token> tokens;
  while (!lex.done()) {
    std::string_view word = lex.symbol();
    if (word.empty())
      throw FormatError("unexpected bracket in POS-tagged input");
    tokens.push_back(split_token(word, 0));
  }
  return tokens;
}

Treebank parse_bracketed(std::string_view text, const ParseOptions& options) {
  Treebank tb;
  std::optional<std::set<std::string>> declared_pos, declared_cat;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(
        start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    if (line[first] == '#') {
      line.remove_prefix(first);
      if (auto pos = parse_header(line, "#pos:")) {
        declared_pos = std::move(pos);
      } else if (auto cat = parse_header(line, "#cat:")) {
        declared_cat = std::move(cat);
      }
      continue;
    }
    int removed = 0;
    Sentence s = parse_line(line, line_no, options, &removed);
    tb.flattened_nodes += removed;
    for (const Token& t : s.tokens) {
      if (declared_pos && !declared_pos->count(t.pos))
        throw FormatError("POS '" + t.pos + "' not in declared alphabet", line_no);
      tb.pos_alphabet.insert(t.pos);
    }
    std::set<std::string> cats;
    for (const Node& n : s.forest) collect_labels(n, cats);
    for (const std::string& c : cats) {
      if (declared_cat && !declared_cat->count(c))
        throw FormatError("category '" + c + "' not in declared alphabet", line_no);
    }
    tb.category_alphabet.insert(cats.begin(), cats.end());
    tb.sentences.push_back(std::move(s));
  }
  if (declared_pos) tb.pos_alphabet = std::move(*declared_pos);
  if (declared_cat) tb.category_alphabet = std::move(*declared_cat);
  return tb;
}

std::string serialize_sentence(const Sentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.forest.size(); ++i) {
    if (i) out += ' ';
    write_node(sentence.forest[i], sentence, out);
  }
  return out;
}

std::string serialize(const Treebank& treebank) {
  std::string out = "#pos:";
  for (const std::string& p : treebank.pos_alphabet) out += ' ' + p;
  out += "\n#cat:";
  for (const std::string& c : treebank.category_alphabet) out += ' ' + c;
  out += '\n';
  for (const Sentence& s : treebank.sentences) {
    out += serialize_sentence(s);
    out += '\n';
  }
  return out;
}

int tree_depth(const Node& node) {
  if (node.is_leaf()) return 0;
  int d = 0;
  for (const Node& c : node.children) d = std::max(d, tree_depth(c));
  return d + 1;
}

int token_depth(const Sentence& sentence, int i) {
  if (i < 0 || i >= sentence.size())
    throw DataError("token index " + std::to_string(i) + " out of range");
  auto chains = ancestor_chains(sentence);
  return chains[i].empty() ? 0 : static_cast<int>(chains[i].size()) - 1;
}

int embedding_depth(const Sentence& sentence) {
  int d = 0;
  for (const Node& n : sentence.forest)
    if (!n.is_leaf()) d = std::max(d, tree_depth(n) - 1);
  return d;
}

void validate(const Sentence& sentence) {
  for (const Token& t : sentence.tokens) {
    check_symbol(t.form, "token form");
    check_symbol(t.pos, "POS");
    if (t.pos.find('/') != std::string::npos)
      throw FormatError("POS '" + t.pos + "' contains '/'");
  }
  int next = 0;
  std::function<void(const Node&)> walk = [&](const Node& n) {
    if (n.is_leaf()) {
      if (n.token != next)
        throw FormatError("tokens not covered exactly once in order");
      ++next;
      return;
    }
    check_symbol(n.label, "label");
    if (n.children.empty()) throw FormatError("empty phrase (" + n.label + ")");
    for (const Node& c : n.children) walk(c);
  };
  for (const Node& n : sentence.forest) walk(n);
  if (next != sentence.size())
    throw FormatError("tokens not covered exactly once in order");
  if (sentence.tokens.empty()) throw FormatError("empty sentence");
}

void validate(const Treebank& treebank) {
  for (const Sentence& s : treebank.sentences) {
    validate(s);
    for (const Token& t : s.tokens)
      if (!treebank.pos_alphabet.count(t.pos))
        throw FormatError("POS '" + t.pos + "' not in alphabet");
    std::set<std::string> cats;
    for (const Node& n : s.forest) collect_labels(n, cats);
    for (const std::string& c : cats)
      if (!treebank.category_alphabet.count(c))
        throw FormatError("category '" + c + "' not in alphabet");
  }
}

int flatten_to_depth(Sentence& sentence, int max_depth) {
  int removed = 0;
  for (Node& n : sentence.forest)
    if (!n.is_leaf()) flatten_children(n.children, 0, max_depth, removed);
  return removed;
}

std::vector<std::vector<const Node*>> ancestor_chains(const Sentence& sentence) {
  std::vector<std::vector<const Node*>> chains(sentence.tokens.size());
  std::vector<const Node*> path;
  for (const Node& n : sentence.forest) chains_rec(n, path, chains);
  return chains;
}

Treebank extract_chunks(const Treebank& treebank,
                        const std::set<std::string>& categories) {
  Treebank out;
  for (const Sentence& s : treebank.sentences)
    for (const Node& n : s.forest) extract_rec(n, s, categories, out);
  out.pos_alphabet = treebank.pos_alphabet;
  out.category_alphabet = treebank.category_alphabet;
  return out;
}

std::vector<Span> chunk_spans(const Sentence& sentence) {
  std::vector<Span> spans;
  for (const Node& n : sentence.forest)
    if (!n.is_leaf()) spans.push_back(n.span());
  return spans;
}

Sentence flat_sentence(std::vector<Token> tokens) {
  Sentence s;
  s.tokens = std::move(tokens);
  for (int i = 0; i < s.size(); ++i) s.forest.push_back(Node::leaf(i));
  return s;
}

}  // namespace chunktag
