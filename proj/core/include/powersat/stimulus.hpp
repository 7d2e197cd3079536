#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "powersat/design.hpp"

namespace powersat {

/// One value per clock cycle, all of the same width.
struct Waveform {
  std::uint32_t width = 0;
  std::vector<std::uint64_t> values;

  std::size_t cycles() const { return values.size(); }
  friend bool operator==(const Waveform&, const Waveform&) = default;
};

/// Input port name -> waveform.
using Stimuli = std::map<std::string, Waveform>;

struct PortStimulus {
  std::optional<std::vector<std::uint64_t>> vectors;  // explicit values, one per cycle
  double toggle_rate = 0.0;
  double static_probability = 0.5;  // probability that a bit starts at 1
};

struct StimulusConfig {
  std::size_t cycles = 0;
  std::uint64_t seed = 0;
  std::map<std::string, PortStimulus> inputs;
  std::map<std::string, double> area_model;  // operator -> gate-count multiplier
};

/// Parses the JSON stimuli configuration:
///   {"cycles": N, "seed": S,
///    "inputs": {"<port>": {"toggle_rate": r, "initial_static_probability": p}
///                       | {"vectors": ["0x..", 12, ...]}},
///    "area_model": {"<op>": k}}
/// Throws StimulusError.
StimulusConfig parse_stimulus_config(std::string_view json);
StimulusConfig load_stimulus_config(const std::string& path);

/// Serializes a config; explicit vectors are written as hex strings.
std::string stimulus_config_json(const StimulusConfig& cfg);

/// A config replaying the given waveforms exactly.
StimulusConfig explicit_config(const Stimuli& stimuli, std::uint64_t seed = 0);

/// One step of the splitmix64 generator: advances `state` and returns the
/// next output.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// Output of one step from `x`, without keeping the state.
std::uint64_t splitmix64(std::uint64_t x);

/// Generates a waveform for every input of `d`. Bit b of port p draws from a
/// splitmix64 stream seeded with
///   splitmix64(seed ^ fnv1a64(p) ^ b * 0x9E3779B97F4A7C15):
/// its first draw decides the cycle-0 value against the static probability,
/// each later draw toggles it against the toggle rate. Throws StimulusError
/// on a missing port, a wrong vector count or a value too wide for its port.
Stimuli generate_stimuli(const StimulusConfig& cfg, const Design& d);

}  // namespace powersat
