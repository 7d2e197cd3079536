#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powersat/design.hpp"
#include "powersat/equivalence.hpp"
#include "powersat/extract.hpp"
#include "powersat/power.hpp"
#include "powersat/rewrite.hpp"
#include "powersat/stimulus.hpp"

namespace powersat {

struct PipelineOptions {
  Mode mode = Mode::Power;
  RewriteLimits limits;
  SolveOptions solve;
  std::vector<std::string> disabled_rules;
  std::optional<std::uint64_t> verify_seed;   // default: stimulus seed + 1
  std::optional<std::size_t> verify_cycles;   // default: stimulus cycle count
  bool want_lp = false;
  bool want_activity = false;
};

struct PhaseTiming {
  std::string phase;
  double seconds = 0.0;
};

struct NodeProvenance {
  std::string node;    // node text with class ids
  std::string origin;  // "input" or the rule that created it
};

struct PipelineResult {
  Design input;
  Design optimized;
  RunReport rewrite;
  std::size_t initial_nodes = 0;
  std::size_t initial_classes = 0;
  std::uint64_t initial_designs = 0;
  double baseline_objective = 0.0;
  double optimized_objective = 0.0;
  ExtractionSolution solution;
  std::size_t problem_classes = 0;
  std::size_t problem_variables = 0;
  std::optional<Mismatch> mismatch;  // set when verification failed
  std::uint64_t verify_seed = 0;
  std::size_t verify_cycles = 0;
  std::vector<NodeProvenance> provenance;
  std::vector<PhaseTiming> timing;
  std::string lp;            // filled when PipelineOptions::want_lp
  std::string activity_csv;  // filled when PipelineOptions::want_activity

  bool equivalent() const { return !mismatch.has_value(); }
  /// (optimized - baseline) / baseline; 0 when the baseline is 0.
  double predicted_change() const;
};

/// parse (done by the caller) -> e-graph -> rewrite -> stimuli ->
/// representatives -> simulate -> score -> extract -> reconstruct ->
/// verify on fresh stimuli. Throws StimulusError / Error on bad input.
PipelineResult run_pipeline(const Design& input, const StimulusConfig& cfg, const PipelineOptions& opts);

/// The report as JSON (schema_version 1). Timing is omitted when
/// `with_timing` is false, making the report byte-deterministic.
std::string report_json(const PipelineResult& r, const PipelineOptions& opts, bool with_timing = true);

}  // namespace powersat
