// powersat-equiv: cycle-accurate equivalence of two designs, by
// co-simulation or by exhaustive enumeration of short input streams.

#include <iostream>

#include "CLI11.hpp"
#include "file_io.hpp"
#include "powersat/equivalence.hpp"

using namespace powersat;

int main(int argc, char** argv) {
  CLI::App app{"Compare two designs cycle by cycle"};
  std::string first;
  std::string second;
  std::string stimuli_path;
  std::string cex_path;
  std::size_t exhaustive_cycles = 0;
  std::size_t cycles = 1000;
  std::uint64_t seed = 1;
  double toggle_rate = 0.5;

  app.add_option("first", first, "Reference design")->required();
  app.add_option("second", second, "Design under test")->required();
  app.add_option("--stimuli", stimuli_path, "Stimuli configuration (JSON)");
  app.add_option("--exhaustive", exhaustive_cycles, "Enumerate every input stream of this many cycles");
  app.add_option("--cycles", cycles, "Cycles of random stimuli when no config is given")->capture_default_str();
  app.add_option("--seed", seed, "Seed of random stimuli when no config is given")->capture_default_str();
  app.add_option("--toggle-rate", toggle_rate, "Toggle rate of random stimuli")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--counterexample", cex_path, "Write a failing stream as a replayable stimuli config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const Design a = parse_design(tools::read_file(first));
    const Design b = parse_design(tools::read_file(second));
    std::optional<Mismatch> m;
    if (exhaustive_cycles > 0) {
      m = exhaustive_check(a, b, exhaustive_cycles);
    } else {
      StimulusConfig cfg;
      if (!stimuli_path.empty()) {
        cfg = parse_stimulus_config(tools::read_file(stimuli_path));
      } else {
        cfg.cycles = cycles;
        cfg.seed = seed;
        for (const Port& in : a.inputs) cfg.inputs[in.name].toggle_rate = toggle_rate;
      }
      m = cosimulate(a, b, generate_stimuli(cfg, a));
    }
    if (!m) {
      std::cout << "equivalent\n";
      return 0;
    }
    std::cout << "mismatch at cycle " << m->cycle << " on output '" << m->port << "': expected " << m->expected
              << ", got " << m->actual << "\n";
    if (!cex_path.empty()) tools::write_file(cex_path, stimulus_config_json(explicit_config(m->stimuli)));
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "powersat-equiv: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "powersat-equiv: error: " << e.what() << "\n";
    return 1;
  }
}
