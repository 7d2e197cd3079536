#include "powersat/bitvec.hpp"

#include <charconv>

namespace powersat {

std::string BitVec::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  if (value_ == 0) return "0x0";
  std::string out;
  for (std::uint64_t v = value_; v != 0; v >>= 4) out.insert(out.begin(), kDigits[v & 0xF]);
  return "0x" + out;
}

std::optional<std::uint64_t> parse_unsigned(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value, base);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

}  // namespace powersat
