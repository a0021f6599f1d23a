#include "chunktag/synthetic.h"

#include <array>
#include <random>
#include <string>
#include <vector>

namespace chunktag {

namespace {

constexpr std::array<const char*, 4> kCases = {"Nom", "Acc", "Dat", "Gen"};

const std::vector<std::string> kArticles = {"der", "die", "das", "ein", "eine", "dem"};
// Determiner POS symbols other than ART, with example forms.
const std::vector<std::pair<std::string, std::string>> kDeterminers = {
    {"diese", "PDAT"}, {"seine", "PPOSAT"}, {"viele", "PIAT"}, {"jene", "PDAT"}};
const std::vector<std::string> kNouns = {"Maler", "Stadt", "Haus", "Buch", "Frau",
                                         "Jahr", "Brief", "Bild", "Weg", "Zeit"};
const std::vector<std::string> kNames = {"Tel", "Aviv", "Berlin", "Anna", "Karl",
                                         "Maria", "New", "York"};
const std::vector<std::string> kAdjectives = {"alte", "neuen", "lebender", "kleine",
                                              "grossen", "bekannte"};
const std::vector<std::string> kPrepositions = {"in", "mit", "aus", "nach", "von", "seit"};
const std::vector<std::string> kVerbs = {"malt", "sieht", "kennt", "schreibt", "liest"};
const std::vector<std::string> kAdverbs = {"heute", "dort", "oft", "sehr"};
const std::vector<std::string> kFocus = {"nur", "auch"};
const std::vector<std::string> kNumbers = {"1957", "drei", "zwei", "1990"};

class Generator {
 public:
  explicit Generator(const SyntheticOptions& o) : opt_(o), rng_(o.seed) {}

  Sentence sentence() {
    s_ = Sentence{};
    int clause = 0;
    do {
      if (clause > 0) bare("und", "KON");
      subject();
      bare(pick(kVerbs), "VVFIN");
      if (coin(0.3)) bare(pick(kAdverbs), "ADV");
      int complements = 1 + static_cast<int>(rng_() % 2);
      for (int k = 0; k < complements; ++k) {
        if (coin(0.5))
          with_focus(np_chunk("Acc", true));
        else
          with_focus(pp_chunk(true));
      }
      ++clause;
    } while (clause < 2 && coin(0.2));
    bare(".", "$.");
    return std::move(s_);
  }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::string agreement() {
    static const char* kNumbers[] = {"Sg", "Pl"};
    static const char* kGenders[] = {"Masc", "Fem", "Neut"};
    return std::string(kNumbers[coin(0.3)]) + "." + kGenders[rng_() % 3];
  }
  const std::string& pick(const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }
  // Case, number and gender of the phrase being generated are part of the POS
  // symbol when case features are on.
  std::string pos(const std::string& base, const std::string& c) const {
    return opt_.case_features ? base + "." + c + "." + agreement_ : base;
  }
  Node leaf(const std::string& form, const std::string& p) {
    s_.tokens.push_back({form, p});
    return Node::leaf(s_.size() - 1);
  }
  void bare(const std::string& form, const std::string& p) { s_.forest.push_back(leaf(form, p)); }

  Node mpn() {
    std::vector<Node> kids;
    kids.push_back(leaf(pick(kNames), "NE"));
    kids.push_back(leaf(pick(kNames), "NE"));
    if (coin(0.2)) kids.push_back(leaf(pick(kNames), "NE"));
    return Node::phrase("MPN", std::move(kids));
  }

  // Attributive material before the noun. Phrase-level modifiers only
  // when `deep`, i.e. directly below the chunk root.
  void prenominal(const std::string& c, bool deep, std::vector<Node>& kids) {
    double u = std::uniform_real_distribution<double>(0, 1)(rng_);
    const double rest = 1.0 - opt_.participial_ap;
    if (u < 0.4 * rest) return;
    if (u < 0.75 * rest || !deep) {
      kids.push_back(leaf(pick(kAdjectives), pos("ADJA", c)));
    } else if (u < rest) {
      std::vector<Node> ap;
      ap.push_back(leaf(pick(kAdverbs), "ADV"));
      ap.push_back(leaf(pick(kAdjectives), pos("ADJA", c)));
      kids.push_back(Node::phrase("AP", std::move(ap)));
    } else {
      std::vector<Node> pp;
      pp.push_back(leaf(pick(kPrepositions), "APPR"));
      const std::string outer = agreement_;
      agreement_ = agreement();
      double v = std::uniform_real_distribution<double>(0, 1)(rng_);
      if (v < 0.4) {
        pp.push_back(mpn());
      } else if (v < 0.7) {
        pp.push_back(leaf(pick(kNumbers), "CARD"));
      } else if (coin(0.6)) {
        pp.push_back(leaf(pick(kArticles), pos("ART", "Dat")));
        pp.push_back(leaf(pick(kNouns), pos("NN", "Dat")));
      } else {
        // Other determiners get their own NP node in this position.
        const auto& [form, tag] = kDeterminers[rng_() % kDeterminers.size()];
        std::vector<Node> np;
        np.push_back(leaf(form, pos(tag, "Dat")));
        np.push_back(leaf(pick(kNouns), pos("NN", "Dat")));
        pp.push_back(Node::phrase("NP", std::move(np)));
      }
      agreement_ = outer;
      std::vector<Node> ap;
      ap.push_back(Node::phrase("PP", std::move(pp)));
      ap.push_back(leaf(pick(kAdjectives), pos("ADJA", c)));
      kids.push_back(Node::phrase("AP", std::move(ap)));
    }
  }

  // Determiner, prenominal material and head noun (or a name).
  // Returns true if the kernel ends in a name apposition.
  bool kernel(const std::string& c, bool deep, std::vector<Node>& kids) {
    agreement_ = agreement();
    if (coin(0.15)) {
      kids.push_back(leaf(pick(kNames), "NE"));
      return false;
    }
    if (coin(0.8)) {
      if (coin(0.7)) {
        kids.push_back(leaf(pick(kArticles), pos("ART", c)));
      } else {
        const auto& [form, tag] = kDeterminers[rng_() % kDeterminers.size()];
        kids.push_back(leaf(form, pos(tag, c)));
      }
    }
    prenominal(c, deep, kids);
    kids.push_back(leaf(pick(kNouns), pos("NN", c)));
    if (deep && coin(0.1)) {
      kids.push_back(mpn());
      return true;
    }
    return false;
  }

  // A flat PP used after a noun: no phrase-level material inside.
  Node simple_pp() {
    std::vector<Node> kids;
    kids.push_back(leaf(pick(kPrepositions), "APPR"));
    agreement_ = agreement();
    if (coin(0.2)) {
      kids.push_back(leaf(pick(kNames), "NE"));
    } else {
      kids.push_back(leaf(pick(kArticles), pos("ART", "Dat")));
      if (coin(0.3)) kids.push_back(leaf(pick(kAdjectives), pos("ADJA", "Dat")));
      kids.push_back(leaf(pick(kNouns), pos("NN", "Dat")));
    }
    return Node::phrase("PP", std::move(kids));
  }

  // A chunk plus any postnominal PP that was left unattached.
  struct Item {
    Node chunk;
    std::vector<Node> after;
  };

  void postnominal(Item& item, bool allow) {
    if (!allow || !coin(opt_.postnominal_pp)) return;
    Node pp = simple_pp();
    if (coin(opt_.pp_attach))
      item.chunk.children.push_back(std::move(pp));
    else
      item.after.push_back(std::move(pp));
  }

  Item np_chunk(const std::string& c, bool allow_post) {
    std::vector<Node> kids;
    bool apposition = kernel(c, true, kids);
    Item item{Node::phrase("NP", std::move(kids)), {}};
    postnominal(item, allow_post && !apposition);
    return item;
  }

  Item pp_chunk(bool allow_post) {
    std::vector<Node> kids;
    kids.push_back(leaf(pick(kPrepositions), "APPR"));
    bool apposition = kernel("Dat", true, kids);
    Item item{Node::phrase("PP", std::move(kids)), {}};
    postnominal(item, allow_post && !apposition);
    return item;
  }

  Item coordination() {
    std::vector<Node> kids;
    std::vector<Node> a, b;
    kernel("Nom", false, a);
    kids.push_back(Node::phrase("NP", std::move(a)));
    if (coin(0.8)) kids.push_back(leaf("und", "KON"));
    kernel("Nom", false, b);
    kids.push_back(Node::phrase("NP", std::move(b)));
    return {Node::phrase("CNP", std::move(kids)), {}};
  }

  void subject() {
    if (coin(0.15))
      with_focus(coordination());
    else
      with_focus(np_chunk("Nom", true));
  }

  // Emits the chunk, optionally preceded by a focus adverb that is either
  // its first child or a bare token.
  void with_focus(Item item) {
    if (coin(opt_.focus_adverb)) {
      // The adverb precedes the chunk's tokens; shift their indices.
      int first = item.chunk.first_token();
      s_.tokens.insert(s_.tokens.begin() + first, Token{pick(kFocus), "ADV"});
      shift(item.chunk, first);
      for (Node& n : item.after) shift(n, first);
      if (coin(opt_.focus_attach))
        item.chunk.children.insert(item.chunk.children.begin(), Node::leaf(first));
      else
        s_.forest.push_back(Node::leaf(first));
    }
    s_.forest.push_back(std::move(item.chunk));
    for (Node& n : item.after) s_.forest.push_back(std::move(n));
  }

  static void shift(Node& n, int from) {
    if (n.is_leaf()) {
      if (n.token >= from) ++n.token;
      return;
    }
    for (Node& c : n.children) shift(c, from);
  }

  SyntheticOptions opt_;
  std::mt19937_64 rng_;
  Sentence s_;
  std::string agreement_ = "Sg.Masc";
};

}  // namespace

Treebank generate_treebank(const SyntheticOptions& options) {
  Generator gen(options);
  Treebank tb;
  tb.sentences.reserve(static_cast<std::size_t>(options.sentences));
  for (int i = 0; i < options.sentences; ++i) {
    tb.sentences.push_back(gen.sentence());
    for (const Token& t : tb.sentences.back().tokens) tb.pos_alphabet.insert(t.pos);
  }
  tb.category_alphabet = {"AP", "CNP", "MPN", "NP", "PP"};
  return tb;
}

StripOptions synthetic_strip_options(const SyntheticOptions& options) {
  StripOptions s;
  s.focus_adverbs = {kFocus.begin(), kFocus.end()};
  s.noun_pos = {"NN", "NE"};
  if (options.case_features)
    for (const char* c : kCases)
      for (const char* n : {"Sg", "Pl"})
        for (const char* g : {"Masc", "Fem", "Neut"})
          s.noun_pos.insert(std::string("NN.") + c + "." + n + "." + g);
  return s;
}

}  // namespace chunktag
