#include "powersat/extract.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "powersat/error.hpp"

namespace powersat {

std::size_t SelectionProblem::num_variables() const {
  std::size_t n = 0;
  for (const auto& cs : candidates) n += cs.size();
  return n;
}

SelectionProblem build_problem(const EGraph& g, const NodeScores& scores) {
  SelectionProblem p;
  p.slot_by_id.assign(g.id_bound(), -1);
  auto slot_of = [&](ClassId c) {
    c = g.find(c);
    if (p.slot_by_id[index(c)] < 0) {
      p.slot_by_id[index(c)] = static_cast<std::int32_t>(p.classes.size());
      p.classes.push_back(c);
    }
    return static_cast<std::uint32_t>(p.slot_by_id[index(c)]);
  };
  for (ClassId r : g.roots()) p.roots.push_back(slot_of(r));
  for (std::size_t s = 0; s < p.classes.size(); ++s) {
    const ClassId c = p.classes[s];
    const auto& nodes = g.eclass(c).nodes;
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Candidate cand;
      cand.node = nodes[i].node;
      cand.cost = scores.of(c, i);
      cand.hash = node_hash(nodes[i].node);
      cand.original = nodes[i].original;
      cand.origin = nodes[i].origin;
      for (ClassId k : nodes[i].node.children()) {
        const std::uint32_t ks = slot_of(k);
        if (ks == s) cand.self_loop = true;
        if (std::find(cand.kids.begin(), cand.kids.end(), ks) == cand.kids.end()) cand.kids.push_back(ks);
      }
      cands.push_back(std::move(cand));
    }
    p.candidates.push_back(std::move(cands));
  }
  return p;
}

std::string to_lp(const SelectionProblem& p) {
  const std::size_t n = p.num_classes();
  std::string out = "\\ extraction problem: " + std::to_string(n) + " classes, " +
                    std::to_string(p.num_variables()) + " candidates\nMinimize\n obj:";
  char buf[64];
  auto x = [](std::size_t c, std::size_t i) { return "x_" + std::to_string(c) + "_" + std::to_string(i); };
  bool any = false;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < p.candidates[c].size(); ++i) {
      std::snprintf(buf, sizeof buf, " %+.17g ", p.candidates[c][i].cost);
      out += buf + x(c, i);
      any = true;
    }
  }
  if (!any) out += " 0 need_0";
  out += "\nSubject To\n";
  std::vector<bool> is_root(n, false);
  for (std::uint32_t r : p.roots) is_root[r] = true;
  for (std::size_t c = 0; c < n; ++c) {
    if (is_root[c]) out += " root_" + std::to_string(c) + ": need_" + std::to_string(c) + " = 1\n";
    out += " one_" + std::to_string(c) + ":";
    for (std::size_t i = 0; i < p.candidates[c].size(); ++i) out += " + " + x(c, i);
    out += " - need_" + std::to_string(c) + " = 0\n";
    for (std::size_t i = 0; i < p.candidates[c].size(); ++i) {
      const Candidate& cand = p.candidates[c][i];
      for (std::uint32_t k : cand.kids) {
        const std::string tag = std::to_string(c) + "_" + std::to_string(i) + "_" + std::to_string(k);
        out += " kid_" + tag + ": " + x(c, i) + " - need_" + std::to_string(k) + " <= 0\n";
        // x = 1 forces level_c >= level_k + 1.
        out += " lvl_" + tag + ": level_" + std::to_string(c) + " - level_" + std::to_string(k) + " - " +
               std::to_string(n) + " " + x(c, i) + " >= " + std::to_string(1 - static_cast<long long>(n)) + "\n";
      }
    }
  }
  out += "Bounds\n";
  for (std::size_t c = 0; c < n; ++c) {
    out += " 0 <= level_" + std::to_string(c) + " <= " + std::to_string(n == 0 ? 0 : n - 1) + "\n";
  }
  out += "Binary\n";
  for (std::size_t c = 0; c < n; ++c) {
    out += " need_" + std::to_string(c) + "\n";
    for (std::size_t i = 0; i < p.candidates[c].size(); ++i) out += " " + x(c, i) + "\n";
  }
  out += "General\n";
  for (std::size_t c = 0; c < n; ++c) out += " level_" + std::to_string(c) + "\n";
  out += "End\n";
  return out;
}

namespace {

// Needed classes of a selection in discovery order, or nullopt if a needed
// class is unselected, a choice is out of range, or the choices are cyclic.
std::optional<std::vector<std::uint32_t>> needed_classes(const SelectionProblem& p, const Selection& s) {
  const std::size_t n = p.num_classes();
  if (s.size() != n) return std::nullopt;
  enum : std::uint8_t { kNew, kActive, kDone };
  std::vector<std::uint8_t> mark(n, kNew);
  std::vector<std::uint32_t> order;
  // Iterative DFS with an explicit stack of (class, next kid).
  std::vector<std::pair<std::uint32_t, std::size_t>> stack;
  for (std::uint32_t r : p.roots) {
    if (mark[r] == kDone) continue;
    if (s[r] < 0 || static_cast<std::size_t>(s[r]) >= p.candidates[r].size()) return std::nullopt;
    stack.emplace_back(r, 0);
    mark[r] = kActive;
    while (!stack.empty()) {
      auto& [c, next] = stack.back();
      const Candidate& cand = p.candidates[c][static_cast<std::size_t>(s[c])];
      if (next == cand.kids.size()) {
        mark[c] = kDone;
        order.push_back(c);
        stack.pop_back();
        continue;
      }
      const std::uint32_t k = cand.kids[next++];
      if (mark[k] == kActive) return std::nullopt;
      if (mark[k] == kDone) continue;
      if (s[k] < 0 || static_cast<std::size_t>(s[k]) >= p.candidates[k].size()) return std::nullopt;
      mark[k] = kActive;
      stack.emplace_back(k, 0);
    }
  }
  return order;
}

// Drops choices for classes that are not needed.
Selection trimmed(const SelectionProblem& p, const Selection& s) {
  Selection out(p.num_classes(), kUnselected);
  if (auto needed = needed_classes(p, s)) {
    for (std::uint32_t c : *needed) out[c] = s[c];
  }
  return out;
}

}  // namespace

std::optional<double> selection_cost(const SelectionProblem& p, const Selection& s) {
  auto needed = needed_classes(p, s);
  if (!needed) return std::nullopt;
  double total = 0.0;
  for (std::uint32_t c : *needed) total += p.candidates[c][static_cast<std::size_t>(s[c])].cost;
  return total;
}

Selection original_selection(const SelectionProblem& p, const EGraph& g, const Design& d,
                             const DesignEmbedding& emb) {
  Selection s(p.num_classes(), kUnselected);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::int32_t slot = p.slot(g.find(emb.node_class[i]));
    if (slot < 0 || s[static_cast<std::size_t>(slot)] != kUnselected) continue;
    const DesignNode& dn = d.nodes[i];
    std::array<ClassId, kMaxArity> kids{};
    for (std::size_t k = 0; k < dn.arity; ++k) kids[k] = emb.node_class[index(dn.child[k])];
    const ENode en = g.canonicalize(ENode(dn.op, std::span<const ClassId>(kids.data(), dn.arity)));
    const auto& cands = p.candidates[static_cast<std::size_t>(slot)];
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (cands[j].node == en) {
        s[static_cast<std::size_t>(slot)] = static_cast<int>(j);
        break;
      }
    }
  }
  return trimmed(p, s);
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

class Solver {
 public:
  Solver(const SelectionProblem& p, const SolveOptions& opts) : p_(p), opts_(opts) {
    const std::size_t n = p.num_classes();
    const double inf = std::numeric_limits<double>::infinity();
    min_cost_.assign(n, inf);
    for (std::size_t c = 0; c < n; ++c) {
      for (const auto& cand : p.candidates[c]) {
        if (!cand.self_loop) min_cost_[c] = std::min(min_cost_[c], cand.cost);
      }
    }
    // Tree-cost estimate, relaxed to a fixpoint, orders the candidates so the
    // first dive is a greedy extraction.
    std::vector<double> est(n, inf);
    for (std::size_t round = 0; round < n + 1; ++round) {
      bool changed = false;
      for (std::size_t c = n; c-- > 0;) {
        for (const auto& cand : p.candidates[c]) {
          if (cand.self_loop) continue;
          double e = cand.cost;
          for (std::uint32_t k : cand.kids) e += est[k];
          if (e < est[c]) {
            est[c] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    order_.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
      auto& ord = order_[c];
      ord.resize(p.candidates[c].size());
      std::iota(ord.begin(), ord.end(), 0);
      auto key = [&](std::uint32_t i) {
        const Candidate& cand = p.candidates[c][i];
        double e = cand.cost;
        for (std::uint32_t k : cand.kids) e += est[k];
        return std::make_tuple(e, cand.hash, i);
      };
      std::sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
    }
    assign_.assign(n, kUnselected);
    need_.assign(n, 0);
    stamp_.assign(n, 0);
  }

  ExtractionSolution run(const Selection& seed) {
    start_ = std::chrono::steady_clock::now();
    ExtractionSolution sol;
    if (auto cost = selection_cost(p_, seed)) {
      best_ = *cost;
      best_sel_ = trimmed(p_, seed);
      local_search();
    }
    if (p_.roots.empty()) {
      sol.choice.assign(p_.num_classes(), kUnselected);
      sol.optimal = true;
      return sol;
    }
    open_min_ = 0.0;
    for (std::uint32_t r : p_.roots) require(r);
    dfs();
    if (best_sel_.empty()) throw InternalError("extraction found no valid selection");
    sol.choice = best_sel_;
    sol.objective = *selection_cost(p_, best_sel_);
    sol.nodes_explored = explored_;
    sol.optimal = !aborted_;
    sol.seconds = elapsed();
    return sol;
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool over_budget() {
    if (aborted_) return true;
    if (explored_ >= opts_.node_budget) aborted_ = true;
    if ((explored_ & 1023U) == 0 && elapsed() > opts_.time_budget) aborted_ = true;
    return aborted_;
  }

  bool improves(double cost) const {
    return best_sel_.empty() || cost < best_ - 1e-9 * std::max(1.0, std::abs(best_));
  }

  void require(std::uint32_t k) {
    if (need_[k]++ == 0 && assign_[k] == kUnselected) {
      open_.insert(k);
      open_min_ += min_cost_[k];
    }
  }
  void release(std::uint32_t k) {
    if (--need_[k] == 0 && assign_[k] == kUnselected) {
      open_.erase(k);
      open_min_ -= min_cost_[k];
    }
  }

  // True if choosing `cand` for class c closes a cycle through the
  // current assignment.
  bool closes_cycle(std::uint32_t c, const Candidate& cand) {
    if (cand.self_loop) return true;
    ++epoch_;
    std::vector<std::uint32_t>& stack = scratch_;
    stack.assign(cand.kids.begin(), cand.kids.end());
    while (!stack.empty()) {
      const std::uint32_t k = stack.back();
      stack.pop_back();
      if (k == c) return true;
      if (stamp_[k] == epoch_) continue;
      stamp_[k] = epoch_;
      if (assign_[k] == kUnselected) continue;
      const Candidate& kc = p_.candidates[k][static_cast<std::size_t>(assign_[k])];
      stack.insert(stack.end(), kc.kids.begin(), kc.kids.end());
    }
    return false;
  }

  void dfs() {
    ++explored_;
    if (over_budget()) return;
    if (open_.empty()) {
      if (improves(cost_)) {
        best_ = cost_;
        best_sel_ = assign_;
      }
      return;
    }
    const std::uint32_t c = *open_.begin();
    for (std::uint32_t i : order_[c]) {
      const Candidate& cand = p_.candidates[c][i];
      if (cand.self_loop) continue;
      double lb = cost_ + cand.cost + open_min_ - min_cost_[c];
      for (std::uint32_t k : cand.kids) {
        if (need_[k] == 0) lb += min_cost_[k];
      }
      if (!improves(lb)) continue;
      if (closes_cycle(c, cand)) continue;

      assign_[c] = static_cast<int>(i);
      open_.erase(c);
      open_min_ -= min_cost_[c];
      cost_ += cand.cost;
      for (std::uint32_t k : cand.kids) require(k);
      dfs();
      for (std::uint32_t k : cand.kids) release(k);
      cost_ -= cand.cost;
      open_min_ += min_cost_[c];
      open_.insert(c);
      assign_[c] = kUnselected;
      if (aborted_) return;
    }
  }

  // Fills needed but unselected classes greedily, in candidate order.
  Selection complete(Selection s) const {
    std::vector<std::uint32_t> work;
    for (std::uint32_t r : p_.roots) work.push_back(r);
    std::vector<bool> seen(p_.num_classes(), false);
    while (!work.empty()) {
      const std::uint32_t c = work.back();
      work.pop_back();
      if (seen[c]) continue;
      seen[c] = true;
      if (s[c] == kUnselected) {
        for (std::uint32_t i : order_[c]) {
          if (!p_.candidates[c][i].self_loop) {
            s[c] = static_cast<int>(i);
            break;
          }
        }
        if (s[c] == kUnselected) return s;
      }
      for (std::uint32_t k : p_.candidates[c][static_cast<std::size_t>(s[c])].kids) work.push_back(k);
    }
    return s;
  }

  // First-improvement hill climbing over single-class switches.
  void local_search() {
    bool improved = true;
    for (int pass = 0; improved && pass < 50 && elapsed() < opts_.time_budget / 4; ++pass) {
      improved = false;
      for (std::size_t c = 0; c < p_.num_classes(); ++c) {
        if (best_sel_[c] == kUnselected) continue;
        for (std::uint32_t i : order_[c]) {
          if (static_cast<int>(i) == best_sel_[c]) continue;
          Selection trial = best_sel_;
          trial[c] = static_cast<int>(i);
          trial = complete(std::move(trial));
          auto cost = selection_cost(p_, trial);
          if (cost && improves(*cost)) {
            best_ = *cost;
            best_sel_ = trimmed(p_, trial);
            improved = true;
            break;
          }
        }
      }
    }
  }

  const SelectionProblem& p_;
  SolveOptions opts_;
  std::chrono::steady_clock::time_point start_;
  std::vector<double> min_cost_;
  std::vector<std::vector<std::uint32_t>> order_;
  Selection assign_;
  std::vector<std::uint32_t> need_;
  std::set<std::uint32_t> open_;
  double open_min_ = 0.0;
  double cost_ = 0.0;
  double best_ = 0.0;
  Selection best_sel_;
  std::uint64_t explored_ = 0;
  bool aborted_ = false;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
  std::vector<std::uint32_t> scratch_;
};

}  // namespace

ExtractionSolution solve(const SelectionProblem& p, const SolveOptions& opts, const Selection& seed) {
  Solver solver(p, opts);
  return solver.run(seed);
}

Design reconstruct(const EGraph& g, const SelectionProblem& p, const Selection& s, const Design& like) {
  if (!selection_cost(p, s)) throw InternalError("reconstruct called with an invalid selection");
  DesignBuilder b(like.name);
  for (const Port& in : like.inputs) b.input(in.name, in.width);
  std::vector<std::optional<NodeId>> built(p.num_classes());
  std::function<NodeId(std::uint32_t)> build = [&](std::uint32_t c) -> NodeId {
    if (built[c]) return *built[c];
    const ENode& n = p.candidates[c][static_cast<std::size_t>(s[c])].node;
    NodeId id{};
    if (n.op.kind == OpKind::Var) {
      if (!b.has_input(n.op.name)) throw InternalError("extracted design reads unknown input " + n.op.name);
      id = b.input_node(n.op.name);
    } else {
      std::array<NodeId, kMaxArity> kids{};
      for (std::size_t k = 0; k < n.arity; ++k) {
        kids[k] = build(static_cast<std::uint32_t>(p.slot(g.find(n.child[k]))));
      }
      id = b.add(n.op, std::span<const NodeId>(kids.data(), n.arity));
    }
    built[c] = id;
    return id;
  };
  if (p.roots.size() != like.outputs.size()) throw InternalError("root count differs from output count");
  for (std::size_t i = 0; i < like.outputs.size(); ++i) b.output(like.outputs[i].name, build(p.roots[i]));
  return std::move(b).finish();
}

}  // namespace powersat
