#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powersat/design.hpp"
#include "powersat/egraph.hpp"
#include "powersat/power.hpp"

namespace powersat {

/// A candidate implementation of a class within a SelectionProblem.
struct Candidate {
  ENode node;
  double cost = 0.0;
  std::uint64_t hash = 0;
  bool original = false;
  OriginId origin = kOriginInput;
  std::vector<std::uint32_t> kids;  // distinct child class slots
  bool self_loop = false;           // lists its own class as a child
};

/// Choose exactly one candidate for every needed class. Roots are needed; a
/// chosen candidate makes its child classes needed; the chosen nodes must
/// form an acyclic graph. Classes are numbered 0..n-1 in breadth-first order
/// from the roots.
struct SelectionProblem {
  std::vector<ClassId> classes;
  std::vector<std::vector<Candidate>> candidates;
  std::vector<std::uint32_t> roots;         // one per root, in root order
  std::vector<std::int32_t> slot_by_id;     // class id -> slot, -1 if absent

  std::size_t num_classes() const { return classes.size(); }
  std::size_t num_variables() const;
  std::int32_t slot(ClassId c) const {
    return index(c) < slot_by_id.size() ? slot_by_id[index(c)] : -1;
  }
};

/// Classes reachable from g.roots(), with every node's score as its cost.
SelectionProblem build_problem(const EGraph& g, const NodeScores& scores);

/// The problem as an integer program in CPLEX LP format: binary x_<c>_<i>
/// per candidate, binary needed indicators and integer level variables.
std::string to_lp(const SelectionProblem& p);

inline constexpr int kUnselected = -1;

/// Candidate index per class slot, kUnselected for classes not needed.
using Selection = std::vector<int>;

/// Sum of chosen candidate costs, or nullopt if `s` is not a valid
/// acyclic selection covering every needed class.
std::optional<double> selection_cost(const SelectionProblem& p, const Selection& s);

/// The selection reproducing the input design: for each class, the
/// earliest design node mapped to it.
Selection original_selection(const SelectionProblem& p, const EGraph& g, const Design& d,
                             const DesignEmbedding& emb);

struct SolveOptions {
  double time_budget = 10.0;             // seconds
  std::uint64_t node_budget = 5'000'000;  // branch-and-bound nodes
};

struct ExtractionSolution {
  Selection choice;
  double objective = 0.0;
  std::uint64_t nodes_explored = 0;
  bool optimal = false;
  double seconds = 0.0;
};

/// Exact depth-first branch and bound. The incumbent starts at `seed` (if
/// valid) improved by local search, and is only replaced by a strictly
/// cheaper selection, so ties keep the seed. The lower bound of a partial
/// selection is its cost plus the cheapest candidate of every needed,
/// unassigned class. `optimal` is false when a budget ran out.
ExtractionSolution solve(const SelectionProblem& p, const SolveOptions& opts, const Selection& seed = {});

/// Materializes the selection as a design with the ports of `like`.
Design reconstruct(const EGraph& g, const SelectionProblem& p, const Selection& s, const Design& like);

}  // namespace powersat
