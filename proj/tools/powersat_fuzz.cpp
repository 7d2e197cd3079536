// powersat-fuzz: soundness check of the rewrite library by random and
// exhaustive co-simulation of each rule's two sides.

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "file_io.hpp"
#include "powersat/equivalence.hpp"

using namespace powersat;

int main(int argc, char** argv) {
  CLI::App app{"Check every rewrite rule for soundness"};
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t exhaustive_cycles = 4;
  std::vector<std::string> only;
  std::string cex_dir;

  app.add_option("--trials", trials, "Random instances per rule")->capture_default_str();
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--exhaustive-cycles", exhaustive_cycles, "Cycles of the width-1 exhaustive check (0 to skip)")
      ->capture_default_str();
  app.add_option("--rule", only, "Check only these rules (repeatable)");
  app.add_option("--counterexample-dir", cex_dir, "Write counterexamples (designs and stimuli) here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::vector<Rewrite> rules = rule_library();
    if (!only.empty()) {
      const std::vector<std::string> names = rule_names();
      for (const auto& name : only) {
        if (std::find(names.begin(), names.end(), name) == names.end()) throw Error("unknown rule '" + name + "'");
      }
      std::vector<std::string> drop;
      for (const auto& name : names) {
        if (std::find(only.begin(), only.end(), name) == only.end()) drop.push_back(name);
      }
      rules = without_rules(rules, drop);
    }

    int failures = 0;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const Rewrite& r = rules[i];
      FuzzResult fz = fuzz_rule(r, trials, seed + i);
      std::string exhaustive = "skipped";
      if (exhaustive_cycles > 0) {
        auto ex = exhaustive_rule_check(r, exhaustive_cycles);
        exhaustive = !ex ? "n/a" : (*ex ? "FAIL" : "ok");
        if (ex && *ex) ++failures;
      }
      const bool ok = fz.passed();
      if (!ok) ++failures;
      std::cout << (ok ? "ok   " : "FAIL ") << r.to_string() << "  [" << fz.trials << " trials, exhaustive "
                << exhaustive << "]\n";
      if (fz.counterexample) {
        const Counterexample& cx = *fz.counterexample;
        std::cout << "     lhs: " << print_design(cx.instance.lhs) << "\n     rhs: " << print_design(cx.instance.rhs)
                  << "\n"
                  << "     differs at cycle " << cx.mismatch.cycle << ": " << cx.mismatch.expected << " vs "
                  << cx.mismatch.actual << "\n";
        if (!cex_dir.empty()) {
          std::filesystem::create_directories(cex_dir);
          const std::string stem = cex_dir + "/" + r.name + "-" + std::to_string(i);
          tools::write_file(stem + ".lhs.dsl", print_design(cx.instance.lhs) + "\n");
          tools::write_file(stem + ".rhs.dsl", print_design(cx.instance.rhs) + "\n");
          tools::write_file(stem + ".stimuli.json", stimulus_config_json(explicit_config(cx.mismatch.stimuli)));
        }
      }
    }
    std::cout << rules.size() - static_cast<std::size_t>(failures) << "/" << rules.size() << " rules passed\n";
    return failures == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "powersat-fuzz: error: " << e.what() << "\n";
    return 1;
  }
}
