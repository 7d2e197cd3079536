#include "powersat/equivalence.hpp"

#include <algorithm>
#include <random>

#include "powersat/error.hpp"

namespace powersat {

namespace {

// Cycle-by-cycle evaluator for a Design with reusable buffers.
class Evaluator {
 public:
  explicit Evaluator(const Design& d) : d_(d), val_(d.size(), 0), state_(d.size(), 0) {
    for (const auto& n : d.nodes) {
      if (n.op.kind == OpKind::Reg) regs_.push_back(static_cast<std::uint32_t>(&n - d.nodes.data()));
    }
  }

  void reset() { std::fill(state_.begin(), state_.end(), 0); }

  // `inputs` holds one value per declared input, in declaration order.
  void step(std::span<const std::uint64_t> inputs) {
    std::size_t next_input = 0;
    std::array<std::uint64_t, kMaxArity> args{};
    std::array<std::uint32_t, kMaxArity> widths{};
    for (std::size_t i = 0; i < d_.size(); ++i) {
      const DesignNode& n = d_.nodes[i];
      std::uint64_t out = 0;
      switch (n.op.kind) {
        case OpKind::Var:
          out = inputs[next_input++];
          break;
        case OpKind::Const:
          out = n.op.value;
          break;
        case OpKind::Reg:
          out = state_[i];
          break;
        case OpKind::Treg:
          out = val_[index(n.child[1])] != 0 ? val_[index(n.child[0])] : state_[i];
          state_[i] = out;
          break;
        default:
          for (std::size_t k = 0; k < n.arity; ++k) {
            args[k] = val_[index(n.child[k])];
            widths[k] = d_.nodes[index(n.child[k])].width;
          }
          out = eval_comb(n.op, std::span(args.data(), n.arity), std::span(widths.data(), n.arity), n.width);
          break;
      }
      val_[i] = out;
    }
  }

  // Latches register inputs at the end of the cycle.
  void clock() {
    for (std::uint32_t i : regs_) {
      const DesignNode& n = d_.nodes[i];
      if (val_[index(n.child[1])] != 0) state_[i] = val_[index(n.child[0])];
    }
  }

  std::uint64_t value(NodeId id) const { return val_[index(id)]; }

 private:
  const Design& d_;
  std::vector<std::uint64_t> val_;
  std::vector<std::uint64_t> state_;
  std::vector<std::uint32_t> regs_;
};

std::size_t stimulus_cycles(const Design& d, const Stimuli& stimuli) {
  std::size_t cycles = 0;
  bool first = true;
  for (const Port& in : d.inputs) {
    auto it = stimuli.find(in.name);
    if (it == stimuli.end()) throw StimulusError("no stimulus for input '" + in.name + "'");
    if (it->second.width != in.width) {
      throw StimulusError("stimulus for '" + in.name + "' has width " + std::to_string(it->second.width) +
                          ", expected " + std::to_string(in.width));
    }
    if (!first && it->second.cycles() != cycles) {
      throw StimulusError("stimulus for '" + in.name + "' has a different cycle count");
    }
    cycles = it->second.cycles();
    first = false;
  }
  return cycles;
}

std::vector<const Waveform*> input_waves(const Design& d, const Stimuli& stimuli) {
  std::vector<const Waveform*> out;
  for (const Port& in : d.inputs) out.push_back(&stimuli.at(in.name));
  return out;
}

void check_signatures(const Design& a, const Design& b) {
  auto sorted_inputs = [](const Design& d) {
    std::vector<Port> ports = d.inputs;
    std::sort(ports.begin(), ports.end(), [](const Port& x, const Port& y) { return x.name < y.name; });
    return ports;
  };
  if (sorted_inputs(a) != sorted_inputs(b)) throw Error("designs have different input ports");
  if (a.outputs.size() != b.outputs.size()) throw Error("designs have different output ports");
  for (const auto& out : a.outputs) {
    auto it = std::find_if(b.outputs.begin(), b.outputs.end(), [&](const OutputPort& o) { return o.name == out.name; });
    if (it == b.outputs.end()) throw Error("output '" + out.name + "' missing from second design");
    if (a.node(out.node).width != b.node(it->node).width) throw Error("output '" + out.name + "' widths differ");
  }
}

// For each output of `a`, the matching output node of `b`.
std::vector<NodeId> matching_outputs(const Design& a, const Design& b) {
  std::vector<NodeId> out;
  for (const auto& o : a.outputs) {
    auto it = std::find_if(b.outputs.begin(), b.outputs.end(), [&](const OutputPort& x) { return x.name == o.name; });
    out.push_back(it->node);
  }
  return out;
}

// Runs both designs in lockstep; `input(k, t)` gives input k (in a's
// declaration order) at cycle t.
template <class Input>
std::optional<Mismatch> lockstep(const Design& a, std::size_t cycles, Evaluator& ea, Evaluator& eb,
                                 const std::vector<std::size_t>& b_from_a, const std::vector<NodeId>& b_out,
                                 Input&& input) {
  std::vector<std::uint64_t> ia(a.inputs.size());
  std::vector<std::uint64_t> ib(a.inputs.size());
  ea.reset();
  eb.reset();
  for (std::size_t t = 0; t < cycles; ++t) {
    for (std::size_t k = 0; k < ia.size(); ++k) {
      ia[k] = input(k, t);
      ib[b_from_a[k]] = ia[k];
    }
    ea.step(ia);
    eb.step(ib);
    for (std::size_t o = 0; o < a.outputs.size(); ++o) {
      const std::uint64_t x = ea.value(a.outputs[o].node);
      const std::uint64_t y = eb.value(b_out[o]);
      if (x != y) return Mismatch{t, a.outputs[o].name, x, y, {}};
    }
    ea.clock();
    eb.clock();
  }
  return std::nullopt;
}

std::vector<std::size_t> input_permutation(const Design& a, const Design& b) {
  std::vector<std::size_t> perm;
  for (const Port& in : a.inputs) {
    auto it = std::find_if(b.inputs.begin(), b.inputs.end(), [&](const Port& p) { return p.name == in.name; });
    perm.push_back(static_cast<std::size_t>(it - b.inputs.begin()));
  }
  return perm;
}

Stimuli truncated(const Stimuli& s, std::size_t cycles) {
  Stimuli out = s;
  for (auto& [port, w] : out) w.values.resize(std::min(cycles, w.values.size()));
  return out;
}

}  // namespace

std::vector<Waveform> simulate_design(const Design& d, const Stimuli& stimuli) {
  const std::size_t cycles = stimulus_cycles(d, stimuli);
  const auto waves = input_waves(d, stimuli);
  std::vector<Waveform> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    out[i].width = d.nodes[i].width;
    out[i].values.reserve(cycles);
  }
  Evaluator ev(d);
  std::vector<std::uint64_t> in(d.inputs.size());
  for (std::size_t t = 0; t < cycles; ++t) {
    for (std::size_t k = 0; k < in.size(); ++k) in[k] = waves[k]->values[t];
    ev.step(in);
    for (std::size_t i = 0; i < d.size(); ++i) out[i].values.push_back(ev.value(static_cast<NodeId>(i)));
    ev.clock();
  }
  return out;
}

std::map<std::string, Waveform> simulate_outputs(const Design& d, const Stimuli& stimuli) {
  std::vector<Waveform> all = simulate_design(d, stimuli);
  std::map<std::string, Waveform> out;
  for (const auto& o : d.outputs) out[o.name] = all[index(o.node)];
  return out;
}

std::optional<Mismatch> cosimulate(const Design& a, const Design& b, const Stimuli& stimuli) {
  check_signatures(a, b);
  const std::size_t cycles = stimulus_cycles(a, stimuli);
  const auto waves = input_waves(a, stimuli);
  Evaluator ea(a);
  Evaluator eb(b);
  auto m = lockstep(a, cycles, ea, eb, input_permutation(a, b), matching_outputs(a, b),
                    [&](std::size_t k, std::size_t t) { return waves[k]->values[t]; });
  if (m) m->stimuli = truncated(stimuli, m->cycle + 1);
  return m;
}

std::optional<Mismatch> exhaustive_check(const Design& a, const Design& b, std::size_t cycles) {
  check_signatures(a, b);
  std::size_t bits_per_cycle = 0;
  for (const Port& in : a.inputs) bits_per_cycle += in.width;
  if (bits_per_cycle * cycles > kExhaustiveBitLimit) {
    throw Error("exhaustive check over " + std::to_string(bits_per_cycle * cycles) + " input bits exceeds the limit of " +
                std::to_string(kExhaustiveBitLimit));
  }
  std::vector<std::uint32_t> offset;
  std::uint32_t acc = 0;
  for (const Port& in : a.inputs) {
    offset.push_back(acc);
    acc += in.width;
  }
  Evaluator ea(a);
  Evaluator eb(b);
  const auto perm = input_permutation(a, b);
  const auto b_out = matching_outputs(a, b);
  const std::uint64_t total = std::uint64_t{1} << (bits_per_cycle * cycles);
  for (std::uint64_t x = 0; x < total; ++x) {
    auto value = [&](std::size_t k, std::size_t t) {
      return (x >> (t * bits_per_cycle + offset[k])) & width_mask(a.inputs[k].width);
    };
    if (auto m = lockstep(a, cycles, ea, eb, perm, b_out, value)) {
      for (std::size_t k = 0; k < a.inputs.size(); ++k) {
        Waveform w{a.inputs[k].width, {}};
        for (std::size_t t = 0; t <= m->cycle; ++t) w.values.push_back(value(k, t));
        m->stimuli[a.inputs[k].name] = std::move(w);
      }
      return m;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rule instances

namespace {

struct DesignSink {
  using Id = NodeId;
  DesignBuilder& b;
  const VarTable& vars;

  Id var(std::uint8_t v) { return b.input_node(vars.names[v].substr(1)); }
  std::uint32_t width(Id id) const { return b.width(id); }
  Id add(const Op& op, std::span<const Id> kids) { return b.add(op, kids); }
};

// LHS replication of a bare zero/ones constant leaves the constant width
// open; pin it to `w`.
Pattern pin_free_constants(const Pattern& p, std::uint32_t w) {
  Pattern out = p;
  for (std::uint32_t i = 0; i < p.size(); ++i) {
    const PatternTerm& t = p.term(i);
    if (t.tag != PatternTerm::Tag::Op || t.op.kind != OpKind::Rep) continue;
    const PatternTerm& kid = p.term(t.kids[0]);
    if (kid.tag != PatternTerm::Tag::Zero && kid.tag != PatternTerm::Tag::Ones) continue;
    PatternTerm c;
    c.tag = PatternTerm::Tag::Op;
    c.op = Op::constant(BitVec(w, kid.tag == PatternTerm::Tag::Zero ? 0 : width_mask(w)));
    out = out.with_term(t.kids[0], std::move(c));
  }
  return out;
}

}  // namespace

std::optional<Design> pattern_design(const Rewrite& r, const Pattern& p, std::span<const std::uint32_t> var_widths,
                                     std::optional<std::uint32_t> target, const std::string& name) {
  DesignBuilder b(name);
  for (std::size_t v = 0; v < r.vars.size(); ++v) b.input(r.vars.names[v].substr(1), var_widths[v]);
  DesignSink sink{b, r.vars};
  auto root = instantiate(p, sink, target);
  if (!root) return std::nullopt;
  b.output("y", *root);
  return std::move(b).finish();
}

std::optional<RuleInstance> instantiate_rule(const Rewrite& r, std::span<const std::uint32_t> var_widths,
                                             std::uint32_t free_width) {
  if (var_widths.size() < r.vars.size()) return std::nullopt;
  if (!r.admits(var_widths.first(r.vars.size()))) return std::nullopt;
  const Pattern lhs = pin_free_constants(r.lhs, free_width);
  std::optional<Design> l = pattern_design(r, lhs, var_widths, std::nullopt, "lhs");
  for (std::uint32_t t = 1; !l && t <= 2 * kMaxPatternVars; ++t) {
    l = pattern_design(r, lhs, var_widths, t * free_width, "lhs");
  }
  if (!l) return std::nullopt;
  const std::uint32_t w = l->node(l->outputs[0].node).width;
  std::optional<Design> rh = pattern_design(r, r.rhs, var_widths, w, "rhs");
  if (!rh) return std::nullopt;
  return RuleInstance{std::move(*l), std::move(*rh)};
}

namespace {

Stimuli random_stimuli(const Design& d, std::size_t cycles, std::mt19937_64& rng) {
  Stimuli s;
  for (const Port& in : d.inputs) {
    Waveform w{in.width, {}};
    for (std::size_t t = 0; t < cycles; ++t) w.values.push_back(rng() & width_mask(in.width));
    s.emplace(in.name, std::move(w));
  }
  return s;
}

// Searches random streams of up to `max_cycles` cycles for a mismatch.
std::optional<Mismatch> find_mismatch(const RuleInstance& inst, std::size_t max_cycles, std::size_t tries,
                                      std::mt19937_64& rng) {
  for (std::size_t i = 0; i < tries; ++i) {
    const std::size_t cycles = 1 + rng() % max_cycles;
    if (auto m = cosimulate(inst.lhs, inst.rhs, random_stimuli(inst.lhs, cycles, rng))) return m;
  }
  return std::nullopt;
}

}  // namespace

FuzzResult fuzz_rule(const Rewrite& r, std::size_t trials, std::uint64_t seed) {
  constexpr std::uint32_t kMaxFuzzWidth = 4;
  constexpr std::size_t kMaxFuzzCycles = 8;
  std::mt19937_64 rng(seed);
  FuzzResult res;
  std::vector<std::uint32_t> widths(r.vars.size());
  const std::size_t max_attempts = trials * 200 + 1000;
  while (res.trials < trials && res.attempts < max_attempts) {
    ++res.attempts;
    // Each variable is 1 bit, a width shared by all, or independent.
    const auto shared = 1 + static_cast<std::uint32_t>(rng() % kMaxFuzzWidth);
    for (auto& w : widths) {
      switch (rng() % 3) {
        case 0:
          w = 1;
          break;
        case 1:
          w = shared;
          break;
        default:
          w = 1 + static_cast<std::uint32_t>(rng() % kMaxFuzzWidth);
          break;
      }
    }
    const std::uint32_t free_width = 1 + static_cast<std::uint32_t>(rng() % kMaxFuzzWidth);
    auto inst = instantiate_rule(r, widths, free_width);
    if (!inst) continue;
    ++res.trials;
    const std::size_t cycles = 1 + rng() % kMaxFuzzCycles;
    auto m = cosimulate(inst->lhs, inst->rhs, random_stimuli(inst->lhs, cycles, rng));
    if (!m) continue;

    // Shrink: lower one width at a time while some stream still fails.
    std::uint32_t fw = free_width;
    bool shrunk = true;
    while (shrunk) {
      shrunk = false;
      for (std::size_t v = 0; v <= widths.size() && !shrunk; ++v) {
        std::uint32_t& w = v < widths.size() ? widths[v] : fw;
        if (w <= 1) continue;
        --w;
        auto smaller = instantiate_rule(r, widths, fw);
        std::optional<Mismatch> sm;
        if (smaller) sm = find_mismatch(*smaller, m->cycle + 1, 500, rng);
        if (sm) {
          inst = std::move(smaller);
          m = std::move(sm);
          shrunk = true;
        } else {
          ++w;
        }
      }
    }
    // Shorten: look for a failing stream shorter than the current one.
    while (m->cycle > 0) {
      auto shorter = find_mismatch(*inst, m->cycle, 500, rng);
      if (!shorter) break;
      m = std::move(shorter);
    }
    res.counterexample = Counterexample{std::move(*inst), std::move(*m)};
    return res;
  }
  return res;
}

std::optional<std::optional<Mismatch>> exhaustive_rule_check(const Rewrite& r, std::size_t cycles) {
  std::vector<std::uint32_t> widths(r.vars.size(), 1);
  auto inst = instantiate_rule(r, widths, 1);
  if (!inst) return std::nullopt;
  return exhaustive_check(inst->lhs, inst->rhs, cycles);
}

}  // namespace powersat
