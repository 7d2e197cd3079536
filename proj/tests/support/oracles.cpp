#include "oracles.hpp"

#include <array>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace powersat::testing {

std::string corpus_path(const std::string& file) { return std::string(POWERSAT_CORPUS_DIR) + "/" + file; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Design load_corpus_design(const std::string& name) { return parse_design(read_text(corpus_path(name + ".dsl"))); }

StimulusConfig load_corpus_config(const std::string& name, int config) {
  return parse_stimulus_config(read_text(corpus_path(name + ".cfg" + std::to_string(config) + ".json")));
}

// ---------------------------------------------------------------------------
// Reference evaluator: bit-serial arithmetic, no shared helpers.

namespace {

std::uint64_t ones(std::uint32_t w) {
  std::uint64_t m = 0;
  for (std::uint32_t i = 0; i < w; ++i) m |= std::uint64_t{1} << i;
  return m;
}

bool bit(std::uint64_t v, std::uint32_t i) { return i < 64 && ((v >> i) & 1U) != 0; }

std::uint64_t ripple_add(std::uint64_t a, std::uint64_t b, bool carry, std::uint32_t w) {
  std::uint64_t out = 0;
  for (std::uint32_t i = 0; i < w; ++i) {
    const bool x = bit(a, i);
    const bool y = bit(b, i);
    if (x ^ y ^ carry) out |= std::uint64_t{1} << i;
    carry = (x && y) || (carry && (x ^ y));
  }
  return out;
}

std::uint64_t shift_add_mul(std::uint64_t a, std::uint64_t b, std::uint32_t wb, std::uint32_t w) {
  std::uint64_t acc = 0;
  for (std::uint32_t i = 0; i < wb; ++i) {
    if (!bit(b, i)) continue;
    std::uint64_t shifted = 0;
    for (std::uint32_t j = 0; j + i < w; ++j) {
      if (bit(a, j)) shifted |= std::uint64_t{1} << (j + i);
    }
    acc = ripple_add(acc, shifted, false, w);
  }
  return acc;
}

}  // namespace

std::vector<std::vector<std::uint64_t>> reference_simulate(const Design& d, const Stimuli& stimuli) {
  std::size_t cycles = stimuli.empty() ? 0 : stimuli.begin()->second.values.size();
  std::vector<std::vector<std::uint64_t>> val(d.size(), std::vector<std::uint64_t>(cycles, 0));
  std::vector<std::uint64_t> state(d.size(), 0);
  for (std::size_t t = 0; t < cycles; ++t) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      const DesignNode& n = d.nodes[i];
      const std::uint32_t w = n.width;
      auto in = [&](std::size_t k) { return val[index(n.child[k])][t]; };
      auto in_width = [&](std::size_t k) { return d.node(n.child[k]).width; };
      std::uint64_t out = 0;
      switch (n.op.kind) {
        case OpKind::Var:
          out = stimuli.at(n.op.name).values[t];
          break;
        case OpKind::Const:
          out = n.op.value;
          break;
        case OpKind::Mux:
          out = in(0) != 0 ? in(1) : in(2);
          break;
        case OpKind::Add:
          out = ripple_add(in(0), in(1), false, w);
          if (n.arity == 3) out = ripple_add(out, in(2), false, w);
          break;
        case OpKind::Sub:
          out = ripple_add(in(0), ~in(1) & ones(w), true, w);
          break;
        case OpKind::Mul:
          out = shift_add_mul(in(0), in(1), in_width(1), w);
          break;
        case OpKind::Shl:
        case OpKind::Shr: {
          out = in(0);
          const std::uint64_t amount = in(1);
          for (std::uint64_t s = 0; s < amount && out != 0; ++s) {
            out = n.op.kind == OpKind::Shl ? (out << 1) & ones(w) : out >> 1;
          }
          break;
        }
        case OpKind::And:
          out = in(0) & in(1);
          break;
        case OpKind::Or:
          out = in(0) | in(1);
          break;
        case OpKind::Xor:
          out = in(0) ^ in(1);
          break;
        case OpKind::Not:
          out = in(0) ^ ones(w);
          break;
        case OpKind::Rep:
          for (std::uint32_t r = 0; r < n.op.count; ++r) {
            for (std::uint32_t j = 0; j < in_width(0); ++j) {
              if (bit(in(0), j)) out |= std::uint64_t{1} << (r * in_width(0) + j);
            }
          }
          break;
        case OpKind::Reg:
          out = state[i];
          break;
        case OpKind::Treg:
          if (in(1) != 0) state[i] = in(0);
          out = state[i];
          break;
      }
      val[i][t] = out;
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      const DesignNode& n = d.nodes[i];
      if (n.op.kind == OpKind::Reg && val[index(n.child[1])][t] != 0) state[i] = val[index(n.child[0])][t];
    }
  }
  return val;
}

Stimuli random_stimuli(const Design& d, std::size_t cycles, std::mt19937_64& rng) {
  Stimuli s;
  for (const Port& p : d.inputs) {
    Waveform w;
    w.width = p.width;
    for (std::size_t t = 0; t < cycles; ++t) w.values.push_back(rng() & ones(p.width));
    s[p.name] = std::move(w);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Random designs

Design random_design(std::mt19937_64& rng, const RandomDesignOptions& opts) {
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto width = [&] { return static_cast<std::uint32_t>(1 + below(opts.max_width)); };

  DesignBuilder b("rand");
  std::vector<NodeId> pool;
  pool.push_back(b.input("s", 1));
  const std::size_t extra = 1 + below(3);
  for (std::size_t i = 0; i < extra; ++i) pool.push_back(b.input("i" + std::to_string(i), width()));

  auto any = [&] { return pool[below(pool.size())]; };
  auto of_width = [&](std::uint32_t w) -> NodeId {
    std::vector<NodeId> hits;
    for (NodeId n : pool) {
      if (b.width(n) == w) hits.push_back(n);
    }
    return hits[below(hits.size())];
  };

  std::vector<OpKind> kinds = {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Shl, OpKind::Shr, OpKind::And,
                               OpKind::Or,  OpKind::Xor, OpKind::Not, OpKind::Rep, OpKind::Mux, OpKind::Const};
  if (opts.sequential) {
    kinds.push_back(OpKind::Reg);
    kinds.push_back(OpKind::Treg);
    kinds.push_back(OpKind::Reg);
  }

  const std::size_t n_ops = 1 + below(opts.max_nodes);
  std::size_t made = 0;
  while (made < n_ops) {
    const OpKind k = kinds[below(kinds.size())];
    NodeId id{};
    switch (k) {
      case OpKind::Add: {
        NodeId a = any();
        if (below(4) == 0) {
          const std::array<NodeId, 3> kids{a, of_width(b.width(a)), of_width(b.width(a))};
          id = b.add(Op::of(k), kids);
        } else {
          id = b.add(k, {a, of_width(b.width(a))});
        }
        break;
      }
      case OpKind::Sub:
      case OpKind::And:
      case OpKind::Or:
      case OpKind::Xor: {
        NodeId a = any();
        id = b.add(k, {a, of_width(b.width(a))});
        break;
      }
      case OpKind::Mul: {
        NodeId a = any();
        NodeId c = any();
        if (b.width(a) + b.width(c) > kMaxWidth) continue;
        id = b.add(k, {a, c});
        break;
      }
      case OpKind::Shl:
      case OpKind::Shr:
        id = b.add(k, {any(), any()});
        break;
      case OpKind::Not:
        id = b.add(k, {any()});
        break;
      case OpKind::Rep: {
        NodeId a = any();
        const std::uint32_t w = b.width(a);
        if (w > 16) continue;
        const auto count = static_cast<std::uint32_t>(1 + below(std::min<std::uint32_t>(4, kMaxWidth / w)));
        const std::array<NodeId, 1> kids{a};
        id = b.add(Op::rep(count), kids);
        break;
      }
      case OpKind::Mux: {
        NodeId a = any();
        id = b.add(k, {of_width(1), a, of_width(b.width(a))});
        break;
      }
      case OpKind::Reg:
      case OpKind::Treg:
        id = b.add(k, {any(), of_width(1)});
        break;
      case OpKind::Const: {
        const std::uint32_t w = width();
        id = b.constant(w, rng() & ones(w));
        break;
      }
      default:
        continue;
    }
    pool.push_back(id);
    ++made;
  }
  b.output("y0", pool.back());
  if (below(2) == 0) b.output("y1", any());
  return std::move(b).finish();
}

// ---------------------------------------------------------------------------
// Random e-graphs

RandomEGraph random_egraph(std::mt19937_64& rng, std::size_t max_classes) {
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  for (;;) {
    RandomEGraph out;
    EGraph& g = out.graph;
    std::vector<ClassId> wide;
    std::vector<ClassId> bits;
    bits.push_back(g.add(ENode(Op::var("s", 1), {})));
    const std::size_t vars = 1 + below(3);
    for (std::size_t i = 0; i < vars; ++i) wide.push_back(g.add(ENode(Op::var("v" + std::to_string(i), 4), {})));

    const std::size_t n_ops = 3 + below(max_classes);
    for (std::size_t i = 0; i < n_ops; ++i) {
      auto w = [&] { return wide[below(wide.size())]; };
      auto s = [&] { return bits[below(bits.size())]; };
      ClassId c{};
      switch (below(9)) {
        case 0:
          c = g.add(ENode(Op::of(OpKind::Add), std::vector<ClassId>{w(), w()}));
          break;
        case 1:
          c = g.add(ENode(Op::of(OpKind::And), std::vector<ClassId>{w(), w()}));
          break;
        case 2:
          c = g.add(ENode(Op::of(OpKind::Xor), std::vector<ClassId>{w(), w()}));
          break;
        case 3:
          c = g.add(ENode(Op::of(OpKind::Not), std::vector<ClassId>{w()}));
          break;
        case 4:
          c = g.add(ENode(Op::of(OpKind::Mux), std::vector<ClassId>{s(), w(), w()}));
          break;
        case 5:
          c = g.add(ENode(Op::of(OpKind::Reg), std::vector<ClassId>{w(), s()}));
          break;
        case 6:
          c = g.add(ENode(Op::of(OpKind::Add), std::vector<ClassId>{w(), w(), w()}));
          break;
        case 7:
          c = g.add(ENode(Op::of(OpKind::Not), std::vector<ClassId>{s()}));
          bits.push_back(c);
          continue;
        default:
          c = g.add(ENode(Op::of(OpKind::Sub), std::vector<ClassId>{w(), w()}));
          break;
      }
      wide.push_back(c);
    }
    g.rebuild();

    const std::size_t merges = below(5);
    for (std::size_t i = 0; i < merges; ++i) {
      if (below(5) == 0 && bits.size() > 1) {
        g.merge(bits[below(bits.size())], bits[below(bits.size())]);
      } else {
        g.merge(wide[below(wide.size())], wide[below(wide.size())]);
      }
      g.rebuild();
    }
    if (g.num_classes() > max_classes) continue;

    std::vector<ClassId> roots{g.find(wide.back())};
    if (below(2) == 0) roots.push_back(g.find(wide[below(wide.size())]));
    g.set_roots(roots);

    out.scores.by_class.assign(g.id_bound(), {});
    for (ClassId c : g.class_ids()) {
      for (std::size_t k = 0; k < g.eclass(c).nodes.size(); ++k) {
        out.scores.by_class[index(c)].push_back(static_cast<double>(below(21)));
      }
    }
    return out;
  }
}

std::optional<double> brute_force_minimum(const EGraph& g, const SelectionProblem& p, std::uint64_t limit) {
  const std::size_t n = p.num_classes();
  std::uint64_t total = 1;
  for (const auto& cands : p.candidates) {
    total *= cands.size();
    if (total > limit) return std::nullopt;
  }

  std::vector<std::size_t> pick(n, 0);
  std::optional<double> best;
  std::vector<int> color(n);
  for (std::uint64_t it = 0; it < total; ++it) {
    std::fill(color.begin(), color.end(), 0);
    double cost = 0.0;
    bool ok = true;
    std::function<void(std::size_t)> visit = [&](std::size_t c) {
      if (!ok || color[c] == 2) return;
      if (color[c] == 1) {
        ok = false;
        return;
      }
      color[c] = 1;
      const Candidate& cand = p.candidates[c][pick[c]];
      cost += cand.cost;
      for (ClassId k : cand.node.children()) {
        const std::int32_t slot = p.slot(g.find(k));
        if (slot < 0) throw std::logic_error("child class outside the problem");
        visit(static_cast<std::size_t>(slot));
      }
      color[c] = 2;
    };
    for (std::uint32_t r : p.roots) visit(r);
    if (ok && (!best || cost < *best)) best = cost;

    for (std::size_t c = 0; c < n; ++c) {
      if (++pick[c] < p.candidates[c].size()) break;
      pick[c] = 0;
    }
  }
  return best;
}

std::uint64_t enumerate_designs(const EGraph& g, ClassId root) {
  std::function<std::vector<std::string>(ClassId)> terms = [&](ClassId c) {
    std::vector<std::string> out;
    for (const auto& e : g.eclass(c).nodes) {
      std::vector<std::string> partial{node_text(ENode(e.node.op, {}))};
      for (ClassId k : e.node.children()) {
        std::vector<std::string> next;
        for (const auto& prefix : partial) {
          for (const auto& t : terms(g.find(k))) next.push_back(prefix + " (" + t + ")");
        }
        partial = std::move(next);
      }
      out.insert(out.end(), partial.begin(), partial.end());
    }
    return out;
  };
  const auto all = terms(g.find(root));
  return std::set<std::string>(all.begin(), all.end()).size();
}

bool contains_op(const Design& d, OpKind kind) {
  for (const auto& n : d.nodes) {
    if (n.op.kind == kind) return true;
  }
  return false;
}

bool has_gating(const Design& d) {
  for (const auto& n : d.nodes) {
    if (n.op.kind == OpKind::Treg) return true;
    if (n.op.kind == OpKind::And) {
      for (NodeId k : n.children()) {
        if (d.node(k).op.kind == OpKind::Rep) return true;
      }
    }
    if (n.op.kind == OpKind::Reg && d.node(n.child[1]).op.kind != OpKind::Var) return true;
  }
  return false;
}

}  // namespace powersat::testing
