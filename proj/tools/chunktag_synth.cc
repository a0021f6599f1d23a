// chunktag-synth: writes a generated treebank in the bracketed format.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "chunktag/synthetic.h"

using namespace chunktag;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic chunk treebank generator"};
  SyntheticOptions o;
  std::string out_path = "-";
  app.add_option("--seed", o.seed)->capture_default_str();
  app.add_option("--sentences", o.sentences)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--postnominal-pp", o.postnominal_pp)->check(CLI::Range(0.0, 1.0));
  app.add_option("--pp-attach", o.pp_attach)->check(CLI::Range(0.0, 1.0));
  app.add_option("--focus-adverb", o.focus_adverb)->check(CLI::Range(0.0, 1.0));
  app.add_option("--focus-attach", o.focus_attach)->check(CLI::Range(0.0, 1.0));
  app.add_option("--participial-ap", o.participial_ap)->check(CLI::Range(0.0, 1.0));
  app.add_flag("--case-features", o.case_features);
  app.add_option("--out", out_path)->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string text = serialize(generate_treebank(o));
  if (out_path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path);
  if (!out || !(out << text)) {
    std::cerr << "chunktag-synth: cannot write " << out_path << "\n";
    return 3;
  }
  return 0;
}
