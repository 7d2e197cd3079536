// powersat: rewrite a datapath design in an e-graph and extract the
// lowest-power (or lowest-area) equivalent implementation.

#include <iostream>

#include "CLI11.hpp"
#include "file_io.hpp"
#include "powersat/pipeline.hpp"

using namespace powersat;

int main(int argc, char** argv) {
  CLI::App app{"Switching-activity driven datapath optimizer"};
  app.set_version_flag("--version", "powersat 0.1.0");

  std::string input_path;
  std::string stimuli_path;
  std::string mode = "power";
  std::string output_path;
  std::string report_path;
  std::string lp_path;
  std::string activity_path;
  std::optional<std::uint64_t> verify_seed;
  std::optional<std::size_t> verify_cycles;
  bool omit_timing = false;
  bool list_rules = false;
  PipelineOptions opts;

  app.add_option("--input", input_path, "Design in the netlist DSL");
  app.add_option("--stimuli", stimuli_path, "Stimuli configuration (JSON)");
  app.add_option("--mode", mode, "Objective")->check(CLI::IsMember({"power", "area"}));
  app.add_option("--max-iters", opts.limits.max_iters, "Rewrite iteration limit")->capture_default_str();
  app.add_option("--max-nodes", opts.limits.max_nodes, "E-graph node limit")->capture_default_str();
  app.add_option("--time-budget", opts.solve.time_budget, "Extraction time budget in seconds")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--node-budget", opts.solve.node_budget, "Extraction search-node budget")->capture_default_str();
  app.add_option("--output", output_path, "Write the optimized design here (default: stdout)");
  app.add_option("--report", report_path, "Write the JSON report here");
  app.add_option("--disable-rule", opts.disabled_rules, "Disable a rewrite by name (repeatable)");
  app.add_option("--dump-lp", lp_path, "Write the extraction problem in LP format");
  app.add_option("--activity-csv", activity_path, "Write per-class switching activity as CSV");
  app.add_option("--verify-seed", verify_seed, "Seed of the verification stimuli (default: seed + 1)");
  app.add_option("--verify-cycles", verify_cycles, "Cycles of the verification stimuli");
  app.add_flag("--omit-timing", omit_timing, "Leave wall-clock times out of the report");
  app.add_flag("--list-rules", list_rules, "Print the rewrite names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (list_rules) {
    for (const auto& name : rule_names()) std::cout << name << "\n";
    return 0;
  }
  if (input_path.empty() || stimuli_path.empty()) {
    std::cerr << "powersat: --input and --stimuli are required\n";
    return 1;
  }

  opts.mode = mode == "area" ? Mode::Area : Mode::Power;
  opts.verify_seed = verify_seed;
  opts.verify_cycles = verify_cycles;
  opts.want_lp = !lp_path.empty();
  opts.want_activity = !activity_path.empty();

  PipelineResult result;
  try {
    const Design design = parse_design(tools::read_file(input_path));
    const StimulusConfig cfg = parse_stimulus_config(tools::read_file(stimuli_path));
    result = run_pipeline(design, cfg, opts);
    if (!lp_path.empty()) tools::write_file(lp_path, result.lp);
    if (!activity_path.empty()) tools::write_file(activity_path, result.activity_csv);
    if (!report_path.empty()) tools::write_file(report_path, report_json(result, opts, !omit_timing));
  } catch (const ParseError& e) {
    std::cerr << "powersat: " << input_path << ":" << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "powersat: error: " << e.what() << "\n";
    return 1;
  }

  if (!result.equivalent()) {
    const Mismatch& m = *result.mismatch;
    std::cerr << "powersat: optimized design differs from the input at cycle " << m.cycle << " on output '"
              << m.port << "' (expected " << m.expected << ", got " << m.actual << "); output withheld\n";
    return 2;
  }

  const std::string text = print_design(result.optimized) + "\n";
  try {
    if (output_path.empty()) {
      std::cout << text;
    } else {
      tools::write_file(output_path, text);
    }
  } catch (const Error& e) {
    std::cerr << "powersat: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
