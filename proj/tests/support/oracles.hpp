#pragma once

// Reference implementations used only by the tests. They are written
// independently of the library code they check: a recursive design
// evaluator with bit-level arithmetic, a brute-force extraction
// enumerator, and generators for random designs and e-graphs.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "powersat/design.hpp"
#include "powersat/egraph.hpp"
#include "powersat/extract.hpp"
#include "powersat/power.hpp"
#include "powersat/stimulus.hpp"

namespace powersat::testing {

/// Path of a corpus file, e.g. corpus_path("fig1_op_isolate.dsl").
std::string corpus_path(const std::string& file);
std::string read_text(const std::string& path);
Design load_corpus_design(const std::string& name);
StimulusConfig load_corpus_config(const std::string& name, int config);

/// Value of every node of `d` at every cycle, indexed [node][cycle].
std::vector<std::vector<std::uint64_t>> reference_simulate(const Design& d, const Stimuli& stimuli);

/// Uniformly random stimuli (every bit fair) for the inputs of `d`.
Stimuli random_stimuli(const Design& d, std::size_t cycles, std::mt19937_64& rng);

struct RandomDesignOptions {
  std::size_t max_nodes = 10;  // operator nodes, inputs excluded
  std::uint32_t max_width = 8;
  bool sequential = true;
};

/// A random valid design mixing every operator kind.
Design random_design(std::mt19937_64& rng, const RandomDesignOptions& opts = {});

/// A random e-graph of at most `max_classes` classes, built from a random
/// DAG with random merges of equal-width classes (which may create cycles),
/// and random integer scores for every node.
struct RandomEGraph {
  EGraph graph;
  NodeScores scores;
};
RandomEGraph random_egraph(std::mt19937_64& rng, std::size_t max_classes);

/// Minimum cost over every valid selection, by enumerating one candidate
/// per class and keeping the acyclic assignments. nullopt if more than
/// `limit` assignments would be needed.
std::optional<double> brute_force_minimum(const EGraph& g, const SelectionProblem& p,
                                          std::uint64_t limit = 5'000'000);

/// Counts term DAGs by explicit enumeration of choices (acyclic graphs only).
std::uint64_t enumerate_designs(const EGraph& g, ClassId root);

/// True when the design contains the operator kind anywhere.
bool contains_op(const Design& d, OpKind kind);

/// True when some And node has a Rep operand (a data-gating mask), or a
/// Treg, or a Reg whose enable is not a bare input.
bool has_gating(const Design& d);

}  // namespace powersat::testing
