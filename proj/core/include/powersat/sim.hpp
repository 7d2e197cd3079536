#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powersat/egraph.hpp"
#include "powersat/stimulus.hpp"

namespace powersat {

/// Per-bit switching statistics of one signal.
struct ActivityStats {
  std::uint32_t width = 0;
  std::size_t cycles = 0;
  std::vector<std::uint64_t> toggles;  // per bit
  std::vector<std::uint64_t> ones;     // per bit

  double bit_rate(std::uint32_t b) const;
  double static_probability(std::uint32_t b) const;
  /// Arithmetic mean of the per-bit toggle rates.
  double word_rate() const;
  double static_probability_mean() const;
};

/// Statistics of a waveform. Throws StimulusError for fewer than 2 cycles.
ActivityStats activity(const Waveform& w);

/// Word-average of per-bit toggle rates.
double word_average(std::span<const double> bit_rates);

/// Streaming accumulator equivalent to activity() over the pushed values.
class ActivityAccumulator {
 public:
  explicit ActivityAccumulator(std::uint32_t width);
  void push(std::uint64_t value);
  ActivityStats finish() const;

 private:
  // Per-bit counts are kept as bit-sliced counters (plane p holds bit p of
  // every lane's count) and flushed into stats_ before they can overflow.
  static constexpr std::size_t kPlanes = 8;
  struct Sliced {
    std::array<std::uint64_t, kPlanes> plane{};
    void add(std::uint64_t lanes);
    void flush_into(std::vector<std::uint64_t>& counts);
  };

  void flush();

  ActivityStats stats_;
  std::uint64_t last_ = 0;
  Sliced ones_;
  Sliced toggles_;
  std::size_t pending_ = 0;
};

/// One simulated node per class. `order` lists the classes so that every
/// representative comes after the representatives of its combinational
/// inputs (register inputs are read from the previous cycle).
struct Representatives {
  std::vector<ClassId> order;
  std::vector<std::optional<ENode>> node;  // indexed by class id

  const ENode& of(ClassId c) const { return *node[index(c)]; }
  bool has(ClassId c) const { return index(c) < node.size() && node[index(c)].has_value(); }
};

/// Picks a representative for every class. Original-design nodes are taken
/// whenever one is available; otherwise the eligible node with the lowest
/// hash. Throws InternalError if some class has no acyclic member.
Representatives choose_representatives(const EGraph& g);

/// Waveform of every class, indexed by class id (non-canonical slots empty).
struct ClassWaveforms {
  std::size_t cycles = 0;
  std::vector<Waveform> by_class;
  Stimuli inputs;

  const Waveform& of(ClassId c) const { return by_class[index(c)]; }
};

/// Cycle-accurate simulation of the representatives. Throws StimulusError on
/// a missing input stimulus or mismatched cycle counts.
ClassWaveforms simulate(const EGraph& g, const Representatives& rep, const Stimuli& stimuli);

/// Like simulate, but only accumulates activity statistics (indexed by
/// class id) without keeping waveforms.
std::vector<ActivityStats> simulate_activity(const EGraph& g, const Representatives& rep, const Stimuli& stimuli);

/// Direct simulation of node `n` with its children read from `waves`.
Waveform simulate_node(const EGraph& g, const ENode& n, const ClassWaveforms& waves);

struct ConsistencyFailure {
  ClassId eclass{};
  ENode node;
  std::size_t cycle = 0;
  std::uint64_t expected = 0;
  std::uint64_t actual = 0;
};

/// Checks every member of every class against the class waveform. When
/// `sample_every` > 1, only every n-th class (by id order) is checked.
std::vector<ConsistencyFailure> check_class_consistency(const EGraph& g, const ClassWaveforms& waves,
                                                        std::size_t sample_every = 1);

/// CSV "class_id,width,word_toggle_rate,static_prob_mean", one row per
/// class with statistics.
std::string activity_csv(const EGraph& g, const std::vector<ActivityStats>& stats);

}  // namespace powersat
