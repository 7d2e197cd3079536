#include "powersat/power.hpp"

#include <bit>

#include "powersat/error.hpp"

namespace powersat {

std::string_view mode_name(Mode m) { return m == Mode::Power ? "power" : "area"; }

AreaModel::AreaModel() { scale_.fill(1.0); }

AreaModel AreaModel::with_overrides(const std::map<std::string, double>& multipliers) {
  AreaModel m;
  for (const auto& [name, k] : multipliers) {
    if (k < 0) throw Error("area multiplier for '" + name + "' is negative");
    if (name == "add3") {
      m.add3_scale_ = k;
    } else if (auto kind = op_from_name(name)) {
      m.scale_[static_cast<std::size_t>(*kind)] = k;
    } else {
      throw Error("unknown operator '" + name + "' in area model");
    }
  }
  return m;
}

double AreaModel::area(const Op& op, std::uint32_t w, std::span<const std::uint32_t> in_widths,
                       std::span<const bool> const_inputs) const {
  const double s = scale_[static_cast<std::size_t>(op.kind)];
  switch (op.kind) {
    case OpKind::Var:
    case OpKind::Const:
    case OpKind::Rep:
      return 0.0;
    case OpKind::And:
    case OpKind::Or:
    case OpKind::Xor:
    case OpKind::Not:
      return s * w;
    case OpKind::Mux:
      return s * 3.0 * w;
    case OpKind::Add:
      if (in_widths.size() == 3) return add3_scale_ * 8.0 * w;
      return s * 5.0 * w;
    case OpKind::Sub:
      return s * 5.0 * w;
    case OpKind::Mul: {
      double a = 6.0 * in_widths[0] * in_widths[1];
      if (const_inputs[0] || const_inputs[1]) a /= 2.0;
      return s * a;
    }
    case OpKind::Shl:
    case OpKind::Shr: {
      if (const_inputs[1]) return 0.0;
      const auto log2w = static_cast<double>(std::bit_width(w - 1));
      return s * 3.0 * w * log2w;
    }
    case OpKind::Reg:
    case OpKind::Treg:
      return s * 4.0 * w;
  }
  return 0.0;
}

double AreaModel::area(const EGraph& g, const ENode& n) const {
  std::array<std::uint32_t, kMaxArity> widths{};
  std::array<bool, kMaxArity> consts{};
  for (std::size_t i = 0; i < n.arity; ++i) {
    widths[i] = g.width(n.child[i]);
    consts[i] = g.is_constant(n.child[i]);
  }
  const std::uint32_t w = n.op.kind == OpKind::Var || n.op.kind == OpKind::Const
                              ? n.op.width
                              : infer_width(n.op, std::span(widths.data(), n.arity));
  return area(n.op, w, std::span(widths.data(), n.arity), std::span(consts.data(), n.arity));
}

double node_power(double area, double t_out, std::span<const double> t_in) {
  double sum = t_out;
  for (double t : t_in) sum += t;
  return area * sum / static_cast<double>(t_in.size() + 1);
}

NodeScores score_nodes(const EGraph& g, const std::vector<ActivityStats>& stats, const AreaModel& model, Mode mode) {
  NodeScores scores;
  scores.by_class.resize(g.id_bound());
  auto rate = [&](ClassId c) {
    const std::size_t i = index(g.find(c));
    if (i >= stats.size() || stats[i].width == 0) {
      throw InternalError("missing activity for class c" + std::to_string(i));
    }
    return stats[i].word_rate();
  };
  for (ClassId c : g.class_ids()) {
    auto& out = scores.by_class[index(c)];
    for (const auto& e : g.eclass(c).nodes) {
      const double a = model.area(g, e.node);
      if (mode == Mode::Area || a == 0.0) {
        out.push_back(a);
        continue;
      }
      std::array<double, kMaxArity> t_in{};
      for (std::size_t i = 0; i < e.node.arity; ++i) t_in[i] = rate(e.node.child[i]);
      out.push_back(node_power(a, rate(c), std::span(t_in.data(), e.node.arity)));
    }
  }
  return scores;
}

}  // namespace powersat
