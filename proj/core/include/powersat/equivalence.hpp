#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powersat/design.hpp"
#include "powersat/rewrite.hpp"
#include "powersat/stimulus.hpp"

namespace powersat {

/// Waveform of every node of `d`, indexed by NodeId.
std::vector<Waveform> simulate_design(const Design& d, const Stimuli& stimuli);

/// Waveform of every output port of `d`, keyed by port name.
std::map<std::string, Waveform> simulate_outputs(const Design& d, const Stimuli& stimuli);

struct Mismatch {
  std::size_t cycle = 0;
  std::string port;
  std::uint64_t expected = 0;  // first design
  std::uint64_t actual = 0;    // second design
  Stimuli stimuli;             // the inputs that expose it
};

/// Simulates both designs on the same stimuli and reports the earliest
/// cycle (then first output in port order) where they differ. Throws Error
/// when the port signatures differ.
std::optional<Mismatch> cosimulate(const Design& a, const Design& b, const Stimuli& stimuli);

inline constexpr std::size_t kExhaustiveBitLimit = 24;

/// Enumerates every input stream of `cycles` cycles. Throws Error when
/// total input bits × cycles exceeds kExhaustiveBitLimit.
std::optional<Mismatch> exhaustive_check(const Design& a, const Design& b, std::size_t cycles);

/// Instantiates a pattern as a design whose inputs are the pattern
/// variables (named without '?') at the given widths. `target` fixes the
/// root width when the pattern leaves it open. Returns nullopt when the
/// widths are inconsistent.
std::optional<Design> pattern_design(const Rewrite& r, const Pattern& p, std::span<const std::uint32_t> var_widths,
                                     std::optional<std::uint32_t> target, const std::string& name);

struct RuleInstance {
  Design lhs;
  Design rhs;
};

/// Both sides of `r` at the given variable widths, or nullopt when they do
/// not type-check or the rule's side condition rejects them. Free widths in
/// the LHS (a bare `(rep zero)` say) are taken from `free_width`.
std::optional<RuleInstance> instantiate_rule(const Rewrite& r, std::span<const std::uint32_t> var_widths,
                                             std::uint32_t free_width = 1);

struct Counterexample {
  RuleInstance instance;
  Mismatch mismatch;
};

struct FuzzResult {
  std::size_t trials = 0;     // instances simulated
  std::size_t attempts = 0;   // width draws, including rejected ones
  std::optional<Counterexample> counterexample;

  bool passed() const { return !counterexample.has_value() && trials > 0; }
};

/// Random instances of `r` at widths 1..4, each simulated on random
/// streams of 1..8 cycles. A counterexample is shrunk to the smallest
/// widths and shortest stream that still fail.
FuzzResult fuzz_rule(const Rewrite& r, std::size_t trials, std::uint64_t seed);

/// Exhaustive check of `r` with every variable at width 1 over `cycles`
/// cycles. Returns nullopt when the rule has no width-1 instance.
std::optional<std::optional<Mismatch>> exhaustive_rule_check(const Rewrite& r, std::size_t cycles);

}  // namespace powersat
