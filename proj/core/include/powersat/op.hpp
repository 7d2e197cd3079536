#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "powersat/bitvec.hpp"

namespace powersat {

enum class OpKind : std::uint8_t {
  Var,
  Const,
  Mux,
  Add,
  Sub,
  Mul,
  Shl,
  Shr,
  And,
  Or,
  Xor,
  Not,
  Rep,
  Reg,
  Treg,
};

inline constexpr std::size_t kOpKindCount = 15;
inline constexpr std::size_t kMaxArity = 3;

/// DSL spelling of an operator ("add", "treg", ...). Rep is spelled "rep"
/// without its count.
std::string_view op_name(OpKind kind);

/// Inverse of op_name for every kind except Var and Const.
std::optional<OpKind> op_from_name(std::string_view name);

/// Fixed arity of a kind. Add is the exception: it takes 2 or 3 operands,
/// the 3-operand form modelling a carry-save clustered adder.
bool arity_ok(OpKind kind, std::size_t arity);

/// True for Reg: its output at cycle i depends only on earlier cycles.
constexpr bool is_sequential(OpKind kind) { return kind == OpKind::Reg; }

constexpr bool is_leaf(OpKind kind) { return kind == OpKind::Var || kind == OpKind::Const; }

/// An operator together with its attributes. Var carries a port name and
/// width, Const a value and width, Rep a replication count.
struct Op {
  OpKind kind = OpKind::Var;
  std::uint32_t width = 0;   // Var/Const only
  std::uint64_t value = 0;   // Const only
  std::uint32_t count = 0;   // Rep only
  std::string name;          // Var only

  static Op var(std::string name, std::uint32_t width) {
    Op op;
    op.kind = OpKind::Var;
    op.name = std::move(name);
    op.width = width;
    return op;
  }
  static Op constant(const BitVec& bv) {
    Op op;
    op.kind = OpKind::Const;
    op.width = bv.width();
    op.value = bv.value();
    return op;
  }
  static Op rep(std::uint32_t count) {
    Op op;
    op.kind = OpKind::Rep;
    op.count = count;
    return op;
  }
  static Op of(OpKind kind) {
    Op op;
    op.kind = kind;
    return op;
  }

  friend bool operator==(const Op&, const Op&) = default;
};

/// Stable 64-bit FNV-1a hash, identical on every platform.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t seed);

/// Hash of an operator and its attributes (children excluded).
std::uint64_t op_hash(const Op& op);

/// Output width of `op` applied to operands of the given widths.
/// Throws WidthError when the operands violate the operator's discipline.
std::uint32_t infer_width(const Op& op, std::span<const std::uint32_t> child_widths);

/// Evaluates a combinational operator (not Var, Reg or Treg) on operand
/// values already masked to their widths. The result is masked to
/// `out_width`.
std::uint64_t eval_comb(const Op& op, std::span<const std::uint64_t> args,
                        std::span<const std::uint32_t> arg_widths, std::uint32_t out_width);

/// A node over child identifiers of type `Id` (design node ids or e-class
/// ids). Children live inline; arity never exceeds three.
template <class Id>
struct BasicNode {
  Op op;
  std::array<Id, kMaxArity> child{};
  std::uint8_t arity = 0;

  BasicNode() = default;
  BasicNode(Op o, std::span<const Id> kids) : op(std::move(o)), arity(static_cast<std::uint8_t>(kids.size())) {
    for (std::size_t i = 0; i < kids.size() && i < kMaxArity; ++i) child[i] = kids[i];
  }

  std::span<const Id> children() const { return {child.data(), arity}; }
  std::span<Id> children() { return {child.data(), arity}; }

  friend bool operator==(const BasicNode& a, const BasicNode& b) {
    if (a.arity != b.arity || !(a.op == b.op)) return false;
    for (std::size_t i = 0; i < a.arity; ++i) {
      if (a.child[i] != b.child[i]) return false;
    }
    return true;
  }
};

}  // namespace powersat
