#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "powersat/error.hpp"

namespace powersat {

/// Widest bitvector supported. Values live in a single machine word.
inline constexpr std::uint32_t kMaxWidth = 64;

constexpr std::uint64_t width_mask(std::uint32_t width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

/// An unsigned value of a fixed bit width.
class BitVec {
 public:
  BitVec() = default;
  BitVec(std::uint32_t width, std::uint64_t value) : width_(width), value_(value) {
    if (width == 0 || width > kMaxWidth) {
      throw WidthError("bitvector width must be in [1, 64], got " + std::to_string(width));
    }
    if ((value & ~width_mask(width)) != 0) {
      throw WidthError("value " + std::to_string(value) + " does not fit in " +
                       std::to_string(width) + " bits");
    }
  }

  /// Builds a bitvector, silently discarding bits above `width`.
  static BitVec truncating(std::uint32_t width, std::uint64_t value) {
    return BitVec(width, value & width_mask(width));
  }

  std::uint32_t width() const { return width_; }
  std::uint64_t value() const { return value_; }
  bool bit(std::uint32_t i) const { return ((value_ >> i) & 1U) != 0; }

  std::string to_hex() const;

  friend bool operator==(const BitVec&, const BitVec&) = default;

 private:
  std::uint32_t width_ = 1;
  std::uint64_t value_ = 0;
};

/// Parses "123" or "0x7b" into a 64-bit integer; nullopt on malformed or
/// out-of-range text.
std::optional<std::uint64_t> parse_unsigned(std::string_view text);

}  // namespace powersat
