#include "powersat/pipeline.hpp"

#include <chrono>

#include "json.hpp"
#include "powersat/error.hpp"
#include "powersat/sim.hpp"

namespace powersat {

using nlohmann::ordered_json;

double PipelineResult::predicted_change() const {
  if (baseline_objective == 0.0) return 0.0;
  return (optimized_objective - baseline_objective) / baseline_objective;
}

namespace {

class PhaseClock {
 public:
  explicit PhaseClock(std::vector<PhaseTiming>& out) : out_(out), t0_(std::chrono::steady_clock::now()) {}
  void lap(const char* phase) {
    const auto now = std::chrono::steady_clock::now();
    out_.push_back({phase, std::chrono::duration<double>(now - t0_).count()});
    t0_ = now;
  }

 private:
  std::vector<PhaseTiming>& out_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace

PipelineResult run_pipeline(const Design& input, const StimulusConfig& cfg, const PipelineOptions& opts) {
  PipelineResult r;
  r.input = input;
  PhaseClock clock(r.timing);

  // Fail on bad stimuli before the expensive phases.
  const Stimuli stimuli = generate_stimuli(cfg, input);
  const std::vector<Rewrite> rules = without_rules(rule_library(), opts.disabled_rules);
  const AreaModel model = AreaModel::with_overrides(cfg.area_model);

  EGraph g;
  const DesignEmbedding emb = g.add_design(input);
  g.rebuild();
  r.initial_nodes = g.num_nodes();
  r.initial_classes = g.num_classes();
  r.initial_designs = count_designs(g);
  clock.lap("egraph");

  r.rewrite = apply_rules(g, rules, opts.limits);
  clock.lap("rewrite");

  const Representatives reps = choose_representatives(g);
  const std::vector<ActivityStats> stats = simulate_activity(g, reps, stimuli);
  if (opts.want_activity) r.activity_csv = activity_csv(g, stats);
  clock.lap("simulate");

  const NodeScores scores = score_nodes(g, stats, model, opts.mode);
  const SelectionProblem problem = build_problem(g, scores);
  r.problem_classes = problem.num_classes();
  r.problem_variables = problem.num_variables();
  if (opts.want_lp) r.lp = to_lp(problem);
  const Selection seed = original_selection(problem, g, input, emb);
  const auto baseline = selection_cost(problem, seed);
  if (!baseline) throw InternalError("input design is not a valid selection of its own e-graph");
  r.baseline_objective = *baseline;
  r.solution = solve(problem, opts.solve, seed);
  r.optimized_objective = r.solution.objective;
  r.optimized = reconstruct(g, problem, r.solution.choice, input);
  for (std::size_t c = 0; c < problem.num_classes(); ++c) {
    if (r.solution.choice[c] == kUnselected) continue;
    const Candidate& cand = problem.candidates[c][static_cast<std::size_t>(r.solution.choice[c])];
    r.provenance.push_back({"c" + std::to_string(index(problem.classes[c])) + " = " + node_text(cand.node),
                            cand.origin == kOriginInput ? "input" : g.origin_name(cand.origin)});
  }
  clock.lap("extract");

  StimulusConfig vcfg = cfg;
  vcfg.seed = opts.verify_seed.value_or(cfg.seed + 1);
  if (opts.verify_cycles) {
    for (const auto& [port, ps] : cfg.inputs) {
      if (ps.vectors && *opts.verify_cycles != cfg.cycles) {
        throw StimulusError("cannot change the verification cycle count: input '" + port +
                            "' has explicit vectors");
      }
    }
    vcfg.cycles = *opts.verify_cycles;
  }
  r.verify_seed = vcfg.seed;
  r.verify_cycles = vcfg.cycles;
  r.mismatch = cosimulate(input, r.optimized, generate_stimuli(vcfg, input));
  clock.lap("verify");
  return r;
}

std::string report_json(const PipelineResult& r, const PipelineOptions& opts, bool with_timing) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["design"] = r.input.name;
  doc["mode"] = mode_name(opts.mode);

  ordered_json rw;
  rw["stop_reason"] = stop_reason_name(r.rewrite.stop);
  rw["iterations_run"] = r.rewrite.iterations_run();
  rw["max_iters"] = opts.limits.max_iters;
  rw["max_nodes"] = opts.limits.max_nodes;
  rw["disabled_rules"] = opts.disabled_rules;
  rw["initial"] = {{"nodes", r.initial_nodes}, {"classes", r.initial_classes}, {"designs", r.initial_designs}};
  ordered_json iters = ordered_json::array();
  for (const auto& it : r.rewrite.iterations) {
    iters.push_back({{"iteration", it.iteration},
                     {"nodes", it.nodes},
                     {"classes", it.classes},
                     {"designs", it.designs},
                     {"matches", it.matches}});
  }
  rw["iterations"] = std::move(iters);
  doc["rewrite"] = std::move(rw);

  doc["baseline_objective"] = r.baseline_objective;
  doc["optimized_objective"] = r.optimized_objective;
  doc["predicted_change"] = r.predicted_change();

  doc["extraction"] = {{"classes", r.problem_classes},
                       {"variables", r.problem_variables},
                       {"nodes_explored", r.solution.nodes_explored},
                       {"proven_optimal", r.solution.optimal}};

  ordered_json eq;
  eq["verdict"] = r.equivalent() ? "pass" : "fail";
  eq["seed"] = r.verify_seed;
  eq["cycles"] = r.verify_cycles;
  if (r.mismatch) {
    eq["mismatch"] = {{"cycle", r.mismatch->cycle},
                      {"port", r.mismatch->port},
                      {"expected", r.mismatch->expected},
                      {"actual", r.mismatch->actual}};
  }
  doc["equivalence"] = std::move(eq);

  ordered_json prov = ordered_json::array();
  for (const auto& p : r.provenance) prov.push_back({{"node", p.node}, {"origin", p.origin}});
  doc["provenance"] = std::move(prov);

  if (with_timing) {
    ordered_json t;
    for (const auto& p : r.timing) t[p.phase] = p.seconds;
    t["solver"] = r.solution.seconds;
    doc["timing_seconds"] = std::move(t);
  }
  return doc.dump(2) + "\n";
}

}  // namespace powersat
