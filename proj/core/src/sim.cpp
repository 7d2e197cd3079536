#include "powersat/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <tuple>

#include "powersat/error.hpp"

namespace powersat {

// ---------------------------------------------------------------------------
// Activity

double ActivityStats::bit_rate(std::uint32_t b) const {
  return cycles < 2 ? 0.0 : static_cast<double>(toggles[b]) / static_cast<double>(cycles - 1);
}

double ActivityStats::static_probability(std::uint32_t b) const {
  return cycles == 0 ? 0.0 : static_cast<double>(ones[b]) / static_cast<double>(cycles);
}

double ActivityStats::word_rate() const {
  std::vector<double> rates(width);
  for (std::uint32_t b = 0; b < width; ++b) rates[b] = bit_rate(b);
  return word_average(rates);
}

double ActivityStats::static_probability_mean() const {
  if (width == 0) return 0.0;
  double sum = 0.0;
  for (std::uint32_t b = 0; b < width; ++b) sum += static_probability(b);
  return sum / width;
}

double word_average(std::span<const double> bit_rates) {
  if (bit_rates.empty()) return 0.0;
  double sum = 0.0;
  for (double r : bit_rates) sum += r;
  return sum / static_cast<double>(bit_rates.size());
}

ActivityAccumulator::ActivityAccumulator(std::uint32_t width) {
  stats_.width = width;
  stats_.toggles.assign(width, 0);
  stats_.ones.assign(width, 0);
}

void ActivityAccumulator::Sliced::add(std::uint64_t lanes) {
  for (std::size_t p = 0; lanes != 0 && p < kPlanes; ++p) {
    const std::uint64_t carry = plane[p] & lanes;
    plane[p] ^= lanes;
    lanes = carry;
  }
}

void ActivityAccumulator::Sliced::flush_into(std::vector<std::uint64_t>& counts) {
  for (std::size_t p = 0; p < kPlanes; ++p) {
    std::uint64_t bits = plane[p];
    while (bits != 0) {
      counts[static_cast<std::size_t>(__builtin_ctzll(bits))] += std::uint64_t{1} << p;
      bits &= bits - 1;
    }
    plane[p] = 0;
  }
}

void ActivityAccumulator::flush() {
  ones_.flush_into(stats_.ones);
  toggles_.flush_into(stats_.toggles);
  pending_ = 0;
}

void ActivityAccumulator::push(std::uint64_t value) {
  ones_.add(value);
  if (stats_.cycles > 0) toggles_.add(value ^ last_);
  last_ = value;
  ++stats_.cycles;
  if (++pending_ == (std::size_t{1} << kPlanes) - 1) flush();
}

ActivityStats ActivityAccumulator::finish() const {
  ActivityAccumulator copy = *this;
  copy.flush();
  return copy.stats_;
}

ActivityStats activity(const Waveform& w) {
  if (w.cycles() < 2) throw StimulusError("activity needs at least 2 cycles");
  ActivityAccumulator acc(w.width);
  for (std::uint64_t v : w.values) acc.push(v);
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Representatives

Representatives choose_representatives(const EGraph& g) {
  struct Cand {
    ClassId eclass;
    const ENode* node;
    std::uint64_t hash;
    bool original;
    std::uint32_t remaining;
  };
  std::vector<Cand> cands;
  std::vector<std::vector<std::uint32_t>> users(g.id_bound());
  const std::vector<ClassId> ids = g.class_ids();
  for (ClassId c : ids) {
    for (const auto& e : g.eclass(c).nodes) {
      auto ci = static_cast<std::uint32_t>(cands.size());
      Cand cand{c, &e.node, node_hash(e.node), e.original, 0};
      if (e.node.op.kind != OpKind::Reg) {
        std::vector<ClassId> kids;
        for (ClassId k : e.node.children()) kids.push_back(g.find(k));
        std::sort(kids.begin(), kids.end());
        kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
        for (ClassId k : kids) users[index(k)].push_back(ci);
        cand.remaining = static_cast<std::uint32_t>(kids.size());
      }
      cands.push_back(cand);
    }
  }

  using Key = std::tuple<std::uint64_t, std::uint32_t, std::uint32_t>;  // hash, class, candidate
  using Heap = std::priority_queue<Key, std::vector<Key>, std::greater<>>;
  Heap originals;
  Heap others;
  auto ready = [&](std::uint32_t ci) {
    const Cand& c = cands[ci];
    (c.original ? originals : others).emplace(c.hash, static_cast<std::uint32_t>(c.eclass), ci);
  };
  for (std::uint32_t ci = 0; ci < cands.size(); ++ci) {
    if (cands[ci].remaining == 0) ready(ci);
  }

  Representatives rep;
  rep.node.resize(g.id_bound());
  while (!originals.empty() || !others.empty()) {
    Heap& h = originals.empty() ? others : originals;
    const std::uint32_t ci = std::get<2>(h.top());
    h.pop();
    const Cand& c = cands[ci];
    if (rep.node[index(c.eclass)]) continue;
    rep.node[index(c.eclass)] = *c.node;
    rep.order.push_back(c.eclass);
    for (std::uint32_t u : users[index(c.eclass)]) {
      if (--cands[u].remaining == 0) ready(u);
    }
  }
  for (ClassId c : ids) {
    if (!rep.node[index(c)]) {
      throw InternalError("class c" + std::to_string(index(c)) + " has no member without a combinational cycle");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

struct Step {
  Op op;
  std::uint32_t row = 0;  // position in the representative order
  std::array<std::uint32_t, kMaxArity> kid{};
  std::array<std::uint32_t, kMaxArity> kid_width{};
  std::uint32_t width = 0;
  std::uint8_t arity = 0;
  const std::vector<std::uint64_t>* input = nullptr;  // Var
};

constexpr std::size_t kBlock = 64;

// Order in which every step follows all of its operands, register operands
// included. Empty if registers close a cycle among the representatives.
std::vector<std::uint32_t> full_order(const std::vector<Step>& prog) {
  std::vector<std::uint32_t> pending(prog.size(), 0);
  std::vector<std::vector<std::uint32_t>> users(prog.size());
  for (std::uint32_t i = 0; i < prog.size(); ++i) {
    const Step& s = prog[i];
    for (std::size_t k = 0; k < s.arity; ++k) {
      if (std::find(s.kid.begin(), s.kid.begin() + static_cast<std::ptrdiff_t>(k), s.kid[k]) !=
          s.kid.begin() + static_cast<std::ptrdiff_t>(k)) {
        continue;
      }
      users[s.kid[k]].push_back(i);
      ++pending[i];
    }
  }
  std::vector<std::uint32_t> order;
  order.reserve(prog.size());
  for (std::uint32_t i = 0; i < prog.size(); ++i) {
    if (pending[i] == 0) order.push_back(i);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (std::uint32_t u : users[order[head]]) {
      if (--pending[u] == 0) order.push_back(u);
    }
  }
  if (order.size() != prog.size()) order.clear();
  return order;
}

void eval_block(const Step& s, const std::uint64_t* const* in, std::uint64_t* out, std::size_t len) {
  const std::uint64_t mask = width_mask(s.width);
  switch (s.op.kind) {
    case OpKind::And:
      for (std::size_t j = 0; j < len; ++j) out[j] = in[0][j] & in[1][j];
      return;
    case OpKind::Or:
      for (std::size_t j = 0; j < len; ++j) out[j] = in[0][j] | in[1][j];
      return;
    case OpKind::Xor:
      for (std::size_t j = 0; j < len; ++j) out[j] = in[0][j] ^ in[1][j];
      return;
    case OpKind::Not:
      for (std::size_t j = 0; j < len; ++j) out[j] = ~in[0][j] & mask;
      return;
    case OpKind::Mux:
      for (std::size_t j = 0; j < len; ++j) out[j] = in[0][j] != 0 ? in[1][j] : in[2][j];
      return;
    case OpKind::Add:
      if (s.arity == 3) {
        for (std::size_t j = 0; j < len; ++j) out[j] = (in[0][j] + in[1][j] + in[2][j]) & mask;
      } else {
        for (std::size_t j = 0; j < len; ++j) out[j] = (in[0][j] + in[1][j]) & mask;
      }
      return;
    case OpKind::Sub:
      for (std::size_t j = 0; j < len; ++j) out[j] = (in[0][j] - in[1][j]) & mask;
      return;
    case OpKind::Mul:
      for (std::size_t j = 0; j < len; ++j) out[j] = (in[0][j] * in[1][j]) & mask;
      return;
    default:
      break;
  }
  std::array<std::uint64_t, kMaxArity> args{};
  const auto widths = std::span(s.kid_width.data(), s.arity);
  for (std::size_t j = 0; j < len; ++j) {
    for (std::size_t k = 0; k < s.arity; ++k) args[k] = in[k][j];
    out[j] = eval_comb(s.op, std::span(args.data(), s.arity), widths, s.width);
  }
}

// Evaluates the representatives over blocks of cycles. After each block,
// `visit(first_cycle, length, values)` receives the table holding the
// values of representative r at cycle first_cycle + j in
// values[r * stride + j], with r indexing rep.order.
template <class Visit>
void run(const EGraph& g, const Representatives& rep, const Stimuli& stimuli, Visit&& visit) {
  std::size_t cycles = 0;
  bool first = true;
  for (const auto& [port, w] : stimuli) {
    if (first) cycles = w.cycles();
    if (w.cycles() != cycles) throw StimulusError("stimulus for '" + port + "' has a different cycle count");
    first = false;
  }

  std::vector<std::int64_t> row_of(g.id_bound(), -1);
  for (std::size_t r = 0; r < rep.order.size(); ++r) row_of[index(rep.order[r])] = static_cast<std::int64_t>(r);

  std::vector<Step> prog;
  prog.reserve(rep.order.size());
  for (ClassId c : rep.order) {
    const ENode& n = rep.of(c);
    Step s;
    s.op = n.op;
    s.op.name.clear();
    s.row = static_cast<std::uint32_t>(prog.size());
    s.width = g.width(c);
    s.arity = n.arity;
    for (std::size_t i = 0; i < n.arity; ++i) {
      ClassId k = g.find(n.child[i]);
      if (row_of[index(k)] < 0) throw InternalError("operand class without a representative");
      s.kid[i] = static_cast<std::uint32_t>(row_of[index(k)]);
      s.kid_width[i] = g.width(k);
    }
    if (n.op.kind == OpKind::Var) {
      auto it = stimuli.find(n.op.name);
      if (it == stimuli.end()) throw StimulusError("no stimulus for input '" + n.op.name + "'");
      if (it->second.width != n.op.width) {
        throw StimulusError("stimulus for '" + n.op.name + "' has width " + std::to_string(it->second.width) +
                            ", expected " + std::to_string(n.op.width));
      }
      s.input = &it->second.values;
    }
    prog.push_back(s);
  }

  // Blocks longer than one cycle need register operands evaluated before
  // the register itself; without such an order, fall back to single cycles.
  std::size_t block = 1;
  if (std::vector<std::uint32_t> order = full_order(prog); !order.empty()) {
    std::vector<Step> sorted;
    sorted.reserve(prog.size());
    for (std::uint32_t i : order) sorted.push_back(prog[i]);
    prog = std::move(sorted);
    block = kBlock;
  }

  std::vector<std::uint64_t> buf(prog.size() * block, 0);
  std::vector<std::uint64_t> state(prog.size(), 0);
  std::array<const std::uint64_t*, kMaxArity> in{};
  for (std::size_t t0 = 0; t0 < cycles; t0 += block) {
    const std::size_t len = std::min(block, cycles - t0);
    for (const Step& s : prog) {
      std::uint64_t* out = &buf[s.row * block];
      for (std::size_t k = 0; k < s.arity; ++k) in[k] = &buf[s.kid[k] * block];
      switch (s.op.kind) {
        case OpKind::Var:
          std::copy_n(s.input->begin() + static_cast<std::ptrdiff_t>(t0), len, out);
          break;
        case OpKind::Const:
          std::fill_n(out, len, s.op.value);
          break;
        case OpKind::Reg:
          out[0] = state[s.row];
          for (std::size_t j = 1; j < len; ++j) out[j] = in[1][j - 1] != 0 ? in[0][j - 1] : out[j - 1];
          break;
        case OpKind::Treg: {
          std::uint64_t held = state[s.row];
          for (std::size_t j = 0; j < len; ++j) {
            if (in[1][j] != 0) held = in[0][j];
            out[j] = held;
          }
          state[s.row] = held;
          break;
        }
        default:
          eval_block(s, in.data(), out, len);
          break;
      }
    }
    visit(t0, len, block, buf);
    for (const Step& s : prog) {
      if (s.op.kind != OpKind::Reg) continue;
      const std::size_t last = len - 1;
      const std::uint64_t* out = &buf[s.row * block];
      state[s.row] = buf[s.kid[1] * block + last] != 0 ? buf[s.kid[0] * block + last] : out[last];
    }
  }
}

}  // namespace

ClassWaveforms simulate(const EGraph& g, const Representatives& rep, const Stimuli& stimuli) {
  ClassWaveforms out;
  out.inputs = stimuli;
  out.by_class.resize(g.id_bound());
  for (ClassId c : rep.order) out.by_class[index(c)].width = g.width(c);
  run(g, rep, stimuli, [&](std::size_t, std::size_t len, std::size_t stride, const std::vector<std::uint64_t>& v) {
    for (std::size_t r = 0; r < rep.order.size(); ++r) {
      auto& values = out.by_class[index(rep.order[r])].values;
      values.insert(values.end(), v.begin() + static_cast<std::ptrdiff_t>(r * stride),
                    v.begin() + static_cast<std::ptrdiff_t>(r * stride + len));
    }
    out.cycles += len;
  });
  return out;
}

std::vector<ActivityStats> simulate_activity(const EGraph& g, const Representatives& rep, const Stimuli& stimuli) {
  std::vector<ActivityAccumulator> acc;
  acc.reserve(rep.order.size());
  for (ClassId c : rep.order) acc.emplace_back(g.width(c));
  run(g, rep, stimuli, [&](std::size_t, std::size_t len, std::size_t stride, const std::vector<std::uint64_t>& v) {
    for (std::size_t r = 0; r < acc.size(); ++r) {
      for (std::size_t j = 0; j < len; ++j) acc[r].push(v[r * stride + j]);
    }
  });
  std::vector<ActivityStats> stats(g.id_bound());
  for (std::size_t r = 0; r < rep.order.size(); ++r) stats[index(rep.order[r])] = acc[r].finish();
  return stats;
}

Waveform simulate_node(const EGraph& g, const ENode& n, const ClassWaveforms& waves) {
  Waveform out;
  out.values.resize(waves.cycles);
  if (n.op.kind == OpKind::Var) {
    auto it = waves.inputs.find(n.op.name);
    if (it == waves.inputs.end()) throw StimulusError("no stimulus for input '" + n.op.name + "'");
    out.width = it->second.width;
    out.values = it->second.values;
    return out;
  }
  std::array<const Waveform*, kMaxArity> kid{};
  std::array<std::uint32_t, kMaxArity> kid_width{};
  for (std::size_t k = 0; k < n.arity; ++k) {
    kid[k] = &waves.of(g.find(n.child[k]));
    kid_width[k] = kid[k]->width;
  }
  out.width = n.op.kind == OpKind::Const ? n.op.width : infer_width(n.op, std::span(kid_width.data(), n.arity));
  std::uint64_t state = 0;
  std::array<std::uint64_t, kMaxArity> args{};
  for (std::size_t i = 0; i < waves.cycles; ++i) {
    std::uint64_t v = 0;
    switch (n.op.kind) {
      case OpKind::Const:
        v = n.op.value;
        break;
      case OpKind::Reg:
        v = state;
        if (kid[1]->values[i] != 0) state = kid[0]->values[i];
        break;
      case OpKind::Treg:
        v = kid[1]->values[i] != 0 ? kid[0]->values[i] : state;
        state = v;
        break;
      default:
        for (std::size_t k = 0; k < n.arity; ++k) args[k] = kid[k]->values[i];
        v = eval_comb(n.op, std::span(args.data(), n.arity), std::span(kid_width.data(), n.arity), out.width);
        break;
    }
    out.values[i] = v;
  }
  return out;
}

std::vector<ConsistencyFailure> check_class_consistency(const EGraph& g, const ClassWaveforms& waves,
                                                        std::size_t sample_every) {
  std::vector<ConsistencyFailure> failures;
  const std::vector<ClassId> ids = g.class_ids();
  const std::size_t step = std::max<std::size_t>(sample_every, 1);
  for (std::size_t i = 0; i < ids.size(); i += step) {
    const ClassId c = ids[i];
    const Waveform& expected = waves.of(c);
    for (const auto& e : g.eclass(c).nodes) {
      Waveform got = simulate_node(g, e.node, waves);
      for (std::size_t t = 0; t < waves.cycles; ++t) {
        if (got.values[t] != expected.values[t]) {
          failures.push_back({c, e.node, t, expected.values[t], got.values[t]});
          break;
        }
      }
    }
  }
  return failures;
}

std::string activity_csv(const EGraph& g, const std::vector<ActivityStats>& stats) {
  std::string out = "class_id,width,word_toggle_rate,static_prob_mean\n";
  char buf[96];
  for (ClassId c : g.class_ids()) {
    if (index(c) >= stats.size() || stats[index(c)].width == 0) continue;
    const ActivityStats& s = stats[index(c)];
    std::snprintf(buf, sizeof buf, "%zu,%u,%.6f,%.6f\n", index(c), s.width, s.word_rate(),
                  s.static_probability_mean());
    out += buf;
  }
  return out;
}

}  // namespace powersat
