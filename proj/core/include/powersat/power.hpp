#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "powersat/egraph.hpp"
#include "powersat/sim.hpp"

namespace powersat {

enum class Mode { Power, Area };

std::string_view mode_name(Mode m);

/// Two-input-gate estimates per operator:
///   and/or/xor/not  w          mux   3w
///   add/sub         5w         add3  8w
///   mul             6 wa wb, halved when an operand is constant
///   shl/shr         0 by a constant, else 3w ceil(log2 w)
///   reg/treg        4w         var/const/rep  0
/// Each formula is scaled by a per-operator multiplier (default 1).
class AreaModel {
 public:
  AreaModel();

  /// Multipliers keyed by operator name ("add", "mul", ..., or "add3").
  /// Throws Error on an unknown key.
  static AreaModel with_overrides(const std::map<std::string, double>& multipliers);

  double area(const Op& op, std::uint32_t out_width, std::span<const std::uint32_t> in_widths,
              std::span<const bool> const_inputs) const;

  /// Area of an e-node in `g`.
  double area(const EGraph& g, const ENode& n) const;

 private:
  std::array<double, kOpKindCount> scale_{};
  double add3_scale_ = 1.0;
};

/// area × (t_out + Σ t_in) / (k + 1).
double node_power(double area, double t_out, std::span<const double> t_in);

/// Objective coefficient of every node of every class, indexed like
/// g.eclass(c).nodes. Power mode uses the word-average toggle rates in
/// `stats` (indexed by class id); area mode uses a toggle term of 1.
struct NodeScores {
  std::vector<std::vector<double>> by_class;  // indexed by class id

  double of(ClassId c, std::size_t i) const { return by_class[index(c)][i]; }
};

NodeScores score_nodes(const EGraph& g, const std::vector<ActivityStats>& stats, const AreaModel& model, Mode mode);

}  // namespace powersat
