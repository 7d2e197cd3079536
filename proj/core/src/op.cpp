#include "powersat/op.hpp"

#include <algorithm>

namespace powersat {
namespace {

constexpr std::array<std::string_view, kOpKindCount> kNames = {
    "var", "const", "mux", "add", "sub", "mul", "shl", "shr",
    "and", "or",    "xor", "not", "rep", "reg", "treg",
};

std::string describe(const Op& op, std::span<const std::uint32_t> widths) {
  std::string s(op_name(op.kind));
  s += "(";
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i != 0) s += ", ";
    s += std::to_string(widths[i]);
  }
  return s + ")";
}

[[noreturn]] void mismatch(const Op& op, std::span<const std::uint32_t> widths, const char* why) {
  throw WidthError("width mismatch in " + describe(op, widths) + ": " + why);
}

std::uint32_t checked(std::uint64_t width, const Op& op, std::span<const std::uint32_t> widths) {
  if (width == 0 || width > kMaxWidth) mismatch(op, widths, "result width outside [1, 64]");
  return static_cast<std::uint32_t>(width);
}

std::uint64_t shift_left(std::uint64_t v, std::uint64_t amount, std::uint32_t width) {
  return amount >= width ? 0 : (v << amount);
}

std::uint64_t shift_right(std::uint64_t v, std::uint64_t amount, std::uint32_t width) {
  return amount >= width ? 0 : (v >> amount);
}

}  // namespace

std::string_view op_name(OpKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

std::optional<OpKind> op_from_name(std::string_view name) {
  for (std::size_t i = 2; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<OpKind>(i);
  }
  return std::nullopt;
}

bool arity_ok(OpKind kind, std::size_t arity) {
  switch (kind) {
    case OpKind::Var:
    case OpKind::Const:
      return arity == 0;
    case OpKind::Not:
    case OpKind::Rep:
      return arity == 1;
    case OpKind::Mux:
      return arity == 3;
    case OpKind::Add:
      return arity == 2 || arity == 3;
    default:
      return arity == 2;
  }
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xFF;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t op_hash(const Op& op) {
  std::uint64_t h = fnv1a64_u64(static_cast<std::uint64_t>(op.kind), 0xcbf29ce484222325ULL);
  switch (op.kind) {
    case OpKind::Var:
      h = fnv1a64(op.name, h);
      h = fnv1a64_u64(op.width, h);
      break;
    case OpKind::Const:
      h = fnv1a64_u64(op.width, h);
      h = fnv1a64_u64(op.value, h);
      break;
    case OpKind::Rep:
      h = fnv1a64_u64(op.count, h);
      break;
    default:
      break;
  }
  return h;
}

std::uint32_t infer_width(const Op& op, std::span<const std::uint32_t> w) {
  if (!arity_ok(op.kind, w.size())) {
    throw WidthError("wrong number of operands for " + describe(op, w));
  }
  switch (op.kind) {
    case OpKind::Var:
    case OpKind::Const:
      return checked(op.width, op, w);
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::And:
    case OpKind::Or:
    case OpKind::Xor:
      if (!std::all_of(w.begin(), w.end(), [&](std::uint32_t x) { return x == w[0]; })) {
        mismatch(op, w, "operands must have equal widths");
      }
      return w[0];
    case OpKind::Mux:
      if (w[0] != 1) mismatch(op, w, "mux select must be 1 bit");
      if (w[1] != w[2]) mismatch(op, w, "mux data legs must have equal widths");
      return w[1];
    case OpKind::Reg:
    case OpKind::Treg:
      if (w[1] != 1) mismatch(op, w, "enable must be 1 bit");
      return w[0];
    case OpKind::Mul:
      return checked(std::uint64_t{w[0]} + w[1], op, w);
    case OpKind::Shl:
    case OpKind::Shr:
    case OpKind::Not:
      return w[0];
    case OpKind::Rep:
      if (op.count == 0) throw WidthError("replication count must be positive");
      return checked(std::uint64_t{op.count} * w[0], op, w);
  }
  throw InternalError("unknown operator kind");
}

std::uint64_t eval_comb(const Op& op, std::span<const std::uint64_t> a,
                        std::span<const std::uint32_t> aw, std::uint32_t out_width) {
  const std::uint64_t mask = width_mask(out_width);
  switch (op.kind) {
    case OpKind::Const:
      return op.value;
    case OpKind::Mux:
      return a[0] != 0 ? a[1] : a[2];
    case OpKind::Add: {
      std::uint64_t sum = a[0] + a[1];
      if (a.size() == 3) sum += a[2];
      return sum & mask;
    }
    case OpKind::Sub:
      return (a[0] - a[1]) & mask;
    case OpKind::Mul:
      return (a[0] * a[1]) & mask;
    case OpKind::Shl:
      return shift_left(a[0], a[1], out_width) & mask;
    case OpKind::Shr:
      return shift_right(a[0], a[1], out_width);
    case OpKind::And:
      return a[0] & a[1];
    case OpKind::Or:
      return a[0] | a[1];
    case OpKind::Xor:
      return a[0] ^ a[1];
    case OpKind::Not:
      return ~a[0] & mask;
    case OpKind::Rep: {
      std::uint64_t out = 0;
      for (std::uint32_t i = 0; i < op.count; ++i) out |= a[0] << (i * aw[0]);
      return out & mask;
    }
    case OpKind::Var:
    case OpKind::Reg:
    case OpKind::Treg:
      break;
  }
  throw InternalError("eval_comb called on a non-combinational operator");
}

}  // namespace powersat
