#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "powersat/pipeline.hpp"

using namespace powersat;

namespace {

std::string slurp(const std::string& file) {
  std::ifstream in(std::string(POWERSAT_CORPUS_DIR) + "/" + file);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* const kDesigns[] = {"fig1_op_isolate", "comb_mux_add_tree", "pipe_mux_add_tree", "dual_op_alu",
                                "seq_reg"};

Design design(std::int64_t i) { return parse_design(slurp(std::string(kDesigns[i]) + ".dsl")); }

StimulusConfig config(std::int64_t i, std::size_t cycles) {
  StimulusConfig cfg = parse_stimulus_config(slurp(std::string(kDesigns[i]) + ".cfg1.json"));
  cfg.cycles = cycles;
  return cfg;
}

EGraph saturated(const Design& d) {
  EGraph g;
  g.add_design(d);
  g.rebuild();
  apply_rules(g, rule_library(), {}, false);
  return g;
}

void BM_Rewrite(benchmark::State& state) {
  const Design d = design(state.range(0));
  std::size_t nodes = 0;
  for (auto _ : state) {
    EGraph g;
    g.add_design(d);
    g.rebuild();
    apply_rules(g, rule_library(), {}, false);
    nodes = g.num_nodes();
  }
  state.SetLabel(kDesigns[state.range(0)]);
  state.counters["nodes"] = static_cast<double>(nodes);
}

void BM_SimulateActivity(benchmark::State& state) {
  const Design d = design(state.range(0));
  const EGraph g = saturated(d);
  const Representatives rep = choose_representatives(g);
  const Stimuli s = generate_stimuli(config(state.range(0), 10000), d);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_activity(g, rep, s));
  state.SetLabel(kDesigns[state.range(0)]);
  state.counters["class_cycles/s"] = benchmark::Counter(static_cast<double>(g.num_classes()) * 10000.0,
                                                        benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Extract(benchmark::State& state) {
  const Design d = design(state.range(0));
  const EGraph g = saturated(d);
  const auto stats = simulate_activity(g, choose_representatives(g), generate_stimuli(config(state.range(0), 2000), d));
  const SelectionProblem p = build_problem(g, score_nodes(g, stats, AreaModel(), Mode::Power));
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, {}));
  state.SetLabel(kDesigns[state.range(0)]);
  state.counters["classes"] = static_cast<double>(p.num_classes());
}

void BM_Stimulus(benchmark::State& state) {
  const Design d = design(2);
  const StimulusConfig cfg = config(2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(generate_stimuli(cfg, d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Rewrite)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateActivity)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Extract)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stimulus)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
