#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "powersat/egraph.hpp"
#include "powersat/op.hpp"

namespace powersat {

inline constexpr std::size_t kMaxPatternVars = 8;

/// Pattern variable names ("?a", "?s1", ...) shared by the two sides of a
/// rewrite so that one index means one variable on both sides.
struct VarTable {
  std::vector<std::string> names;

  std::uint8_t intern(std::string_view name);
  std::size_t size() const { return names.size(); }
};

/// One term of a pattern.
///
/// `(rep ?s)` without a count is a free replication: on the left it matches
/// any count, on the right its count is chosen so the result fits the width
/// demanded by the surrounding operator. `zero` and `ones` match (or build)
/// an all-zero / all-one constant whose width likewise comes from context.
struct PatternTerm {
  enum class Tag : std::uint8_t { Var, Op, Zero, Ones };
  Tag tag = Tag::Var;
  std::uint8_t var = 0;
  Op op;
  std::vector<std::uint32_t> kids;
};

class Pattern {
 public:
  Pattern() = default;

  /// Parses pattern syntax: `?x`, `zero`, `ones`, `(const W V)`, `(rep ?x)`,
  /// `(repN ?x)`, and `(op p...)` for the netlist operators.
  static Pattern parse(std::string_view text, VarTable& vars);

  const PatternTerm& term(std::uint32_t i) const { return terms_[i]; }
  std::uint32_t root() const { return root_; }
  std::size_t size() const { return terms_.size(); }

  /// Variables occurring in the pattern, as a bit mask over VarTable slots.
  std::uint32_t var_mask() const;

  std::string to_string(const VarTable& vars) const;

  /// Copy with term `i` replaced by `t`.
  Pattern with_term(std::uint32_t i, PatternTerm t) const;

 private:
  std::uint32_t push(PatternTerm t);

  std::vector<PatternTerm> terms_;
  std::uint32_t root_ = 0;
};

/// Variable bindings produced by e-matching.
struct Subst {
  std::array<ClassId, kMaxPatternVars> at{};
  std::uint32_t bound = 0;

  bool has(std::uint8_t v) const { return (bound >> v) & 1U; }
  void bind(std::uint8_t v, ClassId c) {
    at[v] = c;
    bound |= 1U << v;
  }
};

struct Match {
  ClassId eclass{};
  Subst subst;
};

/// All (class, substitution) pairs whose instantiated pattern is represented
/// in the class, ordered by class id. The graph must be rebuilt.
std::vector<Match> ematch(const Pattern& p, const EGraph& g);

/// Restricts matching to the given canonical classes (in the given order).
std::vector<Match> ematch(const Pattern& p, const EGraph& g, std::span<const ClassId> classes);

/// Side condition over the widths bound to each pattern variable.
using WidthCondition = std::function<bool(std::span<const std::uint32_t> widths)>;

/// A named, conditional, equivalence-preserving rewrite `lhs -> rhs`.
struct Rewrite {
  std::string name;   // lowercase-hyphenated; several variants may share one
  std::string group;  // "data-gate", "transparent-register", "clock-gate", "boolean", "arithmetic"
  VarTable vars;
  Pattern lhs;
  Pattern rhs;
  WidthCondition condition;

  bool admits(std::span<const std::uint32_t> widths) const { return !condition || condition(widths); }
  std::string to_string() const;
};

Rewrite make_rewrite(std::string name, std::string group, std::string_view lhs, std::string_view rhs,
                     WidthCondition condition = {});

/// The full rule set: data gating, transparent registers, clock gating and
/// retiming, plus the Boolean and arithmetic support rules.
std::vector<Rewrite> rule_library();

/// Distinct rule names of the library, in library order.
std::vector<std::string> rule_names();

/// Copy of `rules` without any rule whose name appears in `disabled`.
/// Throws Error on an unknown name.
std::vector<Rewrite> without_rules(const std::vector<Rewrite>& rules, std::span<const std::string> disabled);

// ---------------------------------------------------------------------------
// Instantiation

/// Builds a pattern bottom-up through `sink`, resolving free replication
/// counts and constant widths from context. `Sink` provides:
///   using Id = ...;
///   Id var(std::uint8_t v);                        // a bound variable
///   std::uint32_t width(Id id) const;
///   Id add(const Op& op, std::span<const Id> kids); // may throw WidthError
/// Returns nullopt if the widths cannot be resolved or are inconsistent.
template <class Sink>
std::optional<typename Sink::Id> instantiate(const Pattern& p, Sink& sink, std::optional<std::uint32_t> target);

/// Sink used for dry runs: an Id is simply the width of the subterm.
template <class VarWidth>
struct WidthSink {
  using Id = std::uint32_t;
  VarWidth var_width;

  Id var(std::uint8_t v) { return var_width(v); }
  std::uint32_t width(Id id) const { return id; }
  Id add(const Op& op, std::span<const Id> kids) { return infer_width(op, kids); }
};

namespace detail {

template <class Sink>
class Instantiator {
 public:
  using Id = typename Sink::Id;

  Instantiator(const Pattern& p, Sink& sink) : p_(p), sink_(sink) {}

  std::optional<std::uint32_t> natural(std::uint32_t t) {
    const PatternTerm& term = p_.term(t);
    switch (term.tag) {
      case PatternTerm::Tag::Var:
        return sink_.width(sink_.var(term.var));
      case PatternTerm::Tag::Zero:
      case PatternTerm::Tag::Ones:
        return std::nullopt;
      case PatternTerm::Tag::Op:
        break;
    }
    const auto& k = term.kids;
    switch (term.op.kind) {
      case OpKind::Const:
        return term.op.width;
      case OpKind::Rep: {
        if (term.op.count == 0) return std::nullopt;
        auto c = natural(k[0]);
        if (!c) return std::nullopt;
        return *c * term.op.count;
      }
      case OpKind::Mux:
        return first_known({k[1], k[2]});
      case OpKind::Mul: {
        auto a = natural(k[0]);
        auto b = natural(k[1]);
        if (!a || !b) return std::nullopt;
        return *a + *b;
      }
      case OpKind::Not:
      case OpKind::Shl:
      case OpKind::Shr:
      case OpKind::Reg:
      case OpKind::Treg:
        return natural(k[0]);
      default:
        return first_known(k);
    }
  }

  std::optional<Id> build(std::uint32_t t, std::optional<std::uint32_t> target) {
    const PatternTerm& term = p_.term(t);
    std::optional<std::uint32_t> w = natural(t);
    if (!w) w = target;
    if (target && w && *w != *target) return std::nullopt;
    switch (term.tag) {
      case PatternTerm::Tag::Var:
        return sink_.var(term.var);
      case PatternTerm::Tag::Zero:
      case PatternTerm::Tag::Ones:
        if (!w || *w == 0 || *w > kMaxWidth) return std::nullopt;
        return add(Op::constant(BitVec(*w, term.tag == PatternTerm::Tag::Zero ? 0 : width_mask(*w))), {});
      case PatternTerm::Tag::Op:
        break;
    }
    const auto& k = term.kids;
    std::vector<Id> ids;
    auto push = [&](std::uint32_t child, std::optional<std::uint32_t> tw) {
      auto id = build(child, tw);
      if (!id) return false;
      ids.push_back(*id);
      return true;
    };
    Op op = term.op;
    switch (op.kind) {
      case OpKind::Const:
        return add(op, {});
      case OpKind::Rep: {
        auto cw = natural(k[0]);
        if (!cw || !w) return std::nullopt;
        if (op.count == 0) {
          if (*cw == 0 || *w % *cw != 0) return std::nullopt;
          op.count = *w / *cw;
        }
        if (!push(k[0], cw)) return std::nullopt;
        break;
      }
      case OpKind::Mux:
        if (!push(k[0], 1) || !push(k[1], w) || !push(k[2], w)) return std::nullopt;
        break;
      case OpKind::Reg:
      case OpKind::Treg:
        if (!push(k[0], w) || !push(k[1], 1)) return std::nullopt;
        break;
      case OpKind::Mul:
        if (!push(k[0], std::nullopt) || !push(k[1], std::nullopt)) return std::nullopt;
        break;
      case OpKind::Shl:
      case OpKind::Shr:
        if (!push(k[0], w) || !push(k[1], std::nullopt)) return std::nullopt;
        break;
      default:
        for (std::uint32_t c : k) {
          if (!push(c, w)) return std::nullopt;
        }
        break;
    }
    auto id = add(op, ids);
    if (id && w && sink_.width(*id) != *w) return std::nullopt;
    return id;
  }

 private:
  std::optional<std::uint32_t> first_known(std::span<const std::uint32_t> kids) {
    for (std::uint32_t c : kids) {
      if (auto w = natural(c)) return w;
    }
    return std::nullopt;
  }
  std::optional<std::uint32_t> first_known(std::initializer_list<std::uint32_t> kids) {
    return first_known(std::span<const std::uint32_t>(kids.begin(), kids.size()));
  }

  std::optional<Id> add(const Op& op, std::span<const Id> kids) {
    try {
      return sink_.add(op, kids);
    } catch (const WidthError&) {
      return std::nullopt;
    }
  }

  const Pattern& p_;
  Sink& sink_;
};

}  // namespace detail

template <class Sink>
std::optional<typename Sink::Id> instantiate(const Pattern& p, Sink& sink, std::optional<std::uint32_t> target) {
  detail::Instantiator<Sink> inst(p, sink);
  return inst.build(p.root(), target);
}

/// Instantiates `rhs` under `subst` into the e-graph. A width failure leaves
/// the graph untouched.
std::optional<ClassId> instantiate_in(EGraph& g, const Pattern& rhs, const Subst& subst, std::uint32_t target,
                                      OriginId origin);

// ---------------------------------------------------------------------------
// Scheduling

struct RewriteLimits {
  std::size_t max_iters = 8;
  std::size_t max_nodes = 50'000;
};

enum class StopReason { Saturated, NodeLimit, IterationLimit };

std::string_view stop_reason_name(StopReason r);

struct IterationStats {
  std::size_t iteration = 0;
  std::size_t nodes = 0;
  std::size_t classes = 0;
  std::uint64_t designs = 0;
  std::size_t matches = 0;
};

struct RunReport {
  std::vector<IterationStats> iterations;
  StopReason stop = StopReason::IterationLimit;

  std::size_t iterations_run() const { return iterations.size(); }
};

/// Equality saturation: every iteration matches all rules against the
/// rebuilt graph, then instantiates and merges every match (rule-list order,
/// then class id), then rebuilds. Stops on saturation, the node limit, or
/// the iteration limit. `count` toggles per-iteration design counting.
RunReport apply_rules(EGraph& g, std::span<const Rewrite> rules, const RewriteLimits& limits, bool count = true);

}  // namespace powersat
