// chunktag: train, tag, eval, xval, curve, inspect.
//
// Exit status: 0 ok, 2 usage error, 3 data error, 4 infeasible decode.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chunktag/chunker.h"
#include "chunktag/error.h"
#include "chunktag/evaluation.h"

using namespace chunktag;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInfeasible = 4;
constexpr std::uint64_t kDefaultSeed = 20240601;

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DataError("cannot write " + path);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

struct Options {
  std::string dims = "rtcg";
  int depth = 3;
  int order = 3;
  bool strict = false;
  bool no_attach = false;
  std::string mode = "standalone";
  std::string unknown_pos = "uniform";
  std::vector<std::string> focus_adverbs;
  std::vector<std::string> noun_pos;
  std::optional<std::uint64_t> seed;
};

ParseOptions parse_options(const Options& o) {
  ParseOptions p;
  p.max_depth = o.depth;
  p.depth_policy = o.strict ? DepthPolicy::kStrict : DepthPolicy::kLenient;
  return p;
}

UnknownPosPolicy unknown_policy(const std::string& s) {
  return s == "unk" ? UnknownPosPolicy::kUnk : UnknownPosPolicy::kUniform;
}

ChunkerConfig make_config(const Options& o) {
  ChunkerConfig c;
  c.scheme = EncodingScheme::parse(o.dims, o.depth);
  c.mode = o.mode == "interactive" ? Mode::kInteractive : Mode::kStandalone;
  c.attachment = o.no_attach ? Attachment::kStripped : Attachment::kFull;
  c.unknown_pos = unknown_policy(o.unknown_pos);
  c.depth_policy = o.strict ? DepthPolicy::kStrict : DepthPolicy::kLenient;
  c.order = o.order;
  c.strip.focus_adverbs = {o.focus_adverbs.begin(), o.focus_adverbs.end()};
  if (!o.noun_pos.empty()) c.strip.noun_pos = {o.noun_pos.begin(), o.noun_pos.end()};
  return c;
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("CHUNKTAGGER_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw DataError("CHUNKTAGGER_SEED is not a number");
    return v;
  }
  return kDefaultSeed;
}

ChunkModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  return ChunkModel::load(in);
}

void add_scheme_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--dims", o.dims, "active tag dimensions, e.g. r,t,c,g")
      ->capture_default_str();
  cmd->add_option("--depth", o.depth, "structure depth (2 or 3)")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  cmd->add_option("--order", o.order, "Markov order (1-3)")
      ->check(CLI::Range(1, 3))
      ->capture_default_str();
  auto* strict = cmd->add_flag("--strict", o.strict, "reject trees deeper than --depth");
  cmd->add_flag("--lenient", "flatten trees deeper than --depth (default)")->excludes(strict);
  cmd->add_flag("--no-attach", o.no_attach,
                "strip postnominal PPs and focus adverbs (training and scoring)");
  cmd->add_option("--focus-adverbs", o.focus_adverbs, "forms or POS of focus adverbs")
      ->delimiter(',');
  cmd->add_option("--noun-pos", o.noun_pos, "POS symbols of head nouns")->delimiter(',');
}

void add_mode_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--mode", o.mode, "standalone or interactive")
      ->check(CLI::IsMember({"standalone", "interactive"}))
      ->capture_default_str();
  cmd->add_option("--unknown-pos", o.unknown_pos, "unk (error) or uniform")
      ->check(CLI::IsMember({"unk", "uniform"}))
      ->capture_default_str();
}

void add_seed_flag(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "shuffle seed (default: $CHUNKTAGGER_SEED or " +
                                        std::to_string(kDefaultSeed) + ")");
}

std::string model_header(const ChunkModel& m) {
  std::ostringstream out;
  const InterpolationWeights& w = m.weights();
  const InterpolationWeights& e = m.effective_weights();
  out << "dims=" << m.scheme().dims() << "\n"
      << "depth=" << m.scheme().depth << "\n"
      << "order=" << m.order() << "\n"
      << "tagset_size=" << m.alphabet().size() << "\n"
      << "pos_alphabet_size=" << m.pos_alphabet().size() << "\n"
      << "lambda=" << w.unigram << " " << w.bigram << " " << w.trigram << "\n"
      << "lambda_effective=" << e.unigram << " " << e.bigram << " " << e.trigram << "\n"
      << "sentences=" << m.info().sentences << "\n"
      << "tokens=" << m.info().tokens << "\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic chunk tagger"};
  app.require_subcommand(1);
  Options o;
  std::string in_path = "-", out_path = "-", model_path, spans_path, gold_path, pred_path;
  std::string format = "table";
  int folds = 10;
  std::vector<int> sizes;
  bool show_tags = false;

  auto* train_cmd = app.add_subcommand("train", "train a model on a bracketed treebank");
  add_scheme_flags(train_cmd, o);
  train_cmd->add_option("--in", in_path, "treebank (- for stdin)")->required();
  train_cmd->add_option("--out", out_path, "model file")->required();

  auto* tag_cmd = app.add_subcommand("tag", "chunk POS-tagged text (form/POS tokens)");
  tag_cmd->add_option("--model", model_path)->required();
  add_mode_flags(tag_cmd, o);
  tag_cmd->add_option("--spans", spans_path,
                      "interactive boundaries, one line per sentence: start-end ...");
  tag_cmd->add_option("--in", in_path)->capture_default_str();
  tag_cmd->add_option("--out", out_path)->capture_default_str();
  tag_cmd->add_flag("--show-tags", show_tags, "append structural tags after each sentence");

  auto* eval_cmd = app.add_subcommand(
      "eval", "score predicted against gold, or tag the gold tokens with --model");
  eval_cmd->add_option("--gold", gold_path)->required();
  auto* pred_opt = eval_cmd->add_option("--pred", pred_path);
  eval_cmd->add_option("--model", model_path)->excludes(pred_opt);
  eval_cmd->add_flag("--no-attach", o.no_attach, "strip attachments from gold before scoring");
  eval_cmd->add_option("--focus-adverbs", o.focus_adverbs)->delimiter(',');
  eval_cmd->add_option("--noun-pos", o.noun_pos)->delimiter(',');
  add_mode_flags(eval_cmd, o);
  eval_cmd->add_option("--format", format)->check(CLI::IsMember({"table", "kv"}));

  auto* xval_cmd = app.add_subcommand("xval", "10-fold cross-validation");
  add_scheme_flags(xval_cmd, o);
  add_mode_flags(xval_cmd, o);
  add_seed_flag(xval_cmd, o);
  xval_cmd->add_option("--in", in_path)->required();
  xval_cmd->add_option("--folds", folds)->check(CLI::Range(2, 1000))->capture_default_str();
  xval_cmd->add_option("--format", format)->check(CLI::IsMember({"table", "kv"}));

  auto* curve_cmd = app.add_subcommand("curve", "top-level chunk precision by training size");
  add_scheme_flags(curve_cmd, o);
  add_mode_flags(curve_cmd, o);
  add_seed_flag(curve_cmd, o);
  curve_cmd->add_option("--in", in_path)->required();
  curve_cmd->add_option("--sizes", sizes, "training sizes, e.g. 100,200,500")
      ->delimiter(',')
      ->required();

  auto* inspect_cmd = app.add_subcommand("inspect", "print a model's header");
  inspect_cmd->add_option("model", model_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_cmd) {
      ChunkerConfig config = make_config(o);
      Treebank tb = parse_bracketed(read_file(in_path), parse_options(o));
      ChunkModel model = train(tb, config);
      std::ostringstream out;
      model.save(out);
      write_file(out_path, out.str());
      std::cerr << "trained on " << tb.sentences.size() << " sentences, "
                << model.alphabet().size() << " tags\n";
    } else if (*tag_cmd) {
      ChunkModel model = load_model(model_path);
      const UnknownPosPolicy policy = unknown_policy(o.unknown_pos);
      const bool interactive = o.mode == "interactive";
      if (interactive && spans_path.empty()) throw CLI::ValidationError("--spans", "required in interactive mode");
      auto input = lines_of(read_file(in_path));
      std::vector<std::string> span_lines;
      if (interactive) {
        span_lines = lines_of(read_file(spans_path));
        if (span_lines.size() != input.size())
          throw DataError("spans file has " + std::to_string(span_lines.size()) +
                          " lines, input " + std::to_string(input.size()));
      }
      std::string out;
      for (std::size_t i = 0; i < input.size(); ++i) {
        std::vector<Token> tokens = parse_tokens(input[i]);
        if (tokens.empty()) {
          out += "\n";
          continue;
        }
        TagResult r = interactive
                          ? tag_interactive(model, tokens, parse_spans(span_lines[i]), policy)
                          : tag_standalone(model, tokens, policy);
        out += serialize_sentence(r.sentence) + "\n";
        if (show_tags) {
          out += "#tags:";
          for (const StructuralTag& t : r.tags) out += " " + render(t);
          out += "\n";
        }
        if (r.repairs > 0 || !r.infeasible_spans.empty())
          std::cerr << "sentence " << i + 1 << ": " << r.repairs << " repairs, "
                    << r.infeasible_spans.size() << " infeasible spans\n";
      }
      write_file(out_path, out);
    } else if (*eval_cmd) {
      Treebank gold = parse_bracketed(read_file(gold_path));
      std::vector<Sentence> predicted;
      std::int64_t repairs = 0;
      if (!model_path.empty()) {
        ChunkModel model = load_model(model_path);
        ChunkerConfig config = make_config(o);
        config.scheme = model.scheme();
        config.order = model.order();
        gold = prepare_gold(gold, config);
        for (TagResult& r : tag_batch(model, config, gold.sentences)) {
          repairs += r.repairs;
          predicted.push_back(std::move(r.sentence));
        }
      } else if (!pred_path.empty()) {
        if (o.no_attach) {
          ChunkerConfig config = make_config(o);
          for (Sentence& s : gold.sentences)
            s = strip_attachments(s, config.strip, config.scheme.categories);
        }
        predicted = parse_bracketed(read_file(pred_path)).sentences;
      } else {
        throw CLI::ValidationError("eval", "one of --pred or --model is required");
      }
      EvalReport report = score(gold.sentences, predicted);
      report.repairs = repairs;
      std::cout << (format == "kv" ? render_keyvalue(report) : render_table(report));
    } else if (*xval_cmd) {
      ChunkerConfig config = make_config(o);
      const std::uint64_t seed = resolve_seed(o);
      Treebank tb = parse_bracketed(read_file(in_path), parse_options(o));
      CrossValidation cv = cross_validate(tb, config, folds, seed);
      std::cout << "seed=" << seed << "\nfolds=" << folds << "\n";
      if (format == "kv") {
        std::cout << render_keyvalue(cv.mean);
        for (std::size_t k = 0; k < cv.folds.size(); ++k) {
          std::istringstream lines(render_keyvalue(cv.folds[k]));
          std::string line;
          while (std::getline(lines, line)) std::cout << "fold" << k << "." << line << "\n";
        }
      } else {
        std::cout << render_table(cv.mean);
      }
    } else if (*curve_cmd) {
      ChunkerConfig config = make_config(o);
      const std::uint64_t seed = resolve_seed(o);
      Treebank tb = parse_bracketed(read_file(in_path), parse_options(o));
      std::cout << "# seed=" << seed << "\n"
                << render_curve(learning_curve(tb, config, sizes, seed));
    } else if (*inspect_cmd) {
      std::cout << model_header(load_model(model_path));
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "chunktag: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "chunktag: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    std::cerr << "chunktag: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
