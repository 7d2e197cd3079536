#include "powersat/rewrite.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace powersat {

std::uint8_t VarTable::intern(std::string_view name) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<std::uint8_t>(i);
  }
  if (names.size() >= kMaxPatternVars) throw Error("too many pattern variables");
  names.emplace_back(name);
  return static_cast<std::uint8_t>(names.size() - 1);
}

// ---------------------------------------------------------------------------
// Pattern syntax

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      out.emplace_back(1, c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')') {
        ++j;
      }
      out.emplace_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

[[noreturn]] void bad_pattern(std::string_view text, const std::string& why) {
  throw Error("bad pattern '" + std::string(text) + "': " + why);
}

}  // namespace

std::uint32_t Pattern::push(PatternTerm t) {
  terms_.push_back(std::move(t));
  return static_cast<std::uint32_t>(terms_.size() - 1);
}

Pattern Pattern::parse(std::string_view text, VarTable& vars) {
  std::vector<std::string> toks = tokenize(text);
  Pattern p;
  std::size_t pos = 0;
  std::function<std::uint32_t()> term = [&]() -> std::uint32_t {
    if (pos >= toks.size()) bad_pattern(text, "unexpected end");
    const std::string tok = toks[pos++];
    PatternTerm t;
    if (tok == ")") bad_pattern(text, "unexpected ')'");
    if (tok != "(") {
      if (tok.size() > 1 && tok[0] == '?') {
        t.tag = PatternTerm::Tag::Var;
        t.var = vars.intern(tok);
      } else if (tok == "zero") {
        t.tag = PatternTerm::Tag::Zero;
      } else if (tok == "ones") {
        t.tag = PatternTerm::Tag::Ones;
      } else {
        bad_pattern(text, "unknown atom '" + tok + "'");
      }
      return p.push(std::move(t));
    }
    if (pos >= toks.size()) bad_pattern(text, "unexpected end");
    const std::string head = toks[pos++];
    t.tag = PatternTerm::Tag::Op;
    if (head == "const") {
      if (pos + 2 > toks.size()) bad_pattern(text, "truncated const");
      auto w = parse_unsigned(toks[pos]);
      auto v = parse_unsigned(toks[pos + 1]);
      if (!w || !v) bad_pattern(text, "malformed const");
      t.op = Op::constant(BitVec(static_cast<std::uint32_t>(*w), *v));
      pos += 2;
      if (pos >= toks.size() || toks[pos] != ")") bad_pattern(text, "expected ')' after const");
      ++pos;
      return p.push(std::move(t));
    }
    if (head.starts_with("rep")) {
      std::uint32_t count = 0;
      if (head.size() > 3) {
        auto n = parse_unsigned(std::string_view(head).substr(3));
        if (!n || *n == 0) bad_pattern(text, "malformed replication");
        count = static_cast<std::uint32_t>(*n);
      }
      t.op = Op::rep(count);
    } else {
      auto kind = op_from_name(head);
      if (!kind) bad_pattern(text, "unknown operator '" + head + "'");
      t.op = Op::of(*kind);
    }
    while (pos < toks.size() && toks[pos] != ")") t.kids.push_back(term());
    if (pos >= toks.size()) bad_pattern(text, "unclosed '('");
    ++pos;
    if (!arity_ok(t.op.kind, t.kids.size())) bad_pattern(text, "wrong arity for '" + head + "'");
    return p.push(std::move(t));
  };
  p.root_ = term();
  if (pos != toks.size()) bad_pattern(text, "trailing tokens");
  return p;
}

std::uint32_t Pattern::var_mask() const {
  std::uint32_t mask = 0;
  for (const auto& t : terms_) {
    if (t.tag == PatternTerm::Tag::Var) mask |= 1U << t.var;
  }
  return mask;
}

std::string Pattern::to_string(const VarTable& vars) const {
  std::function<std::string(std::uint32_t)> show = [&](std::uint32_t i) -> std::string {
    const PatternTerm& t = terms_[i];
    switch (t.tag) {
      case PatternTerm::Tag::Var:
        return vars.names[t.var];
      case PatternTerm::Tag::Zero:
        return "zero";
      case PatternTerm::Tag::Ones:
        return "ones";
      case PatternTerm::Tag::Op:
        break;
    }
    if (t.op.kind == OpKind::Const) {
      return "(const " + std::to_string(t.op.width) + " " + std::to_string(t.op.value) + ")";
    }
    std::string s = "(";
    s += t.op.kind == OpKind::Rep && t.op.count != 0 ? "rep" + std::to_string(t.op.count)
                                                     : std::string(op_name(t.op.kind));
    for (std::uint32_t k : t.kids) s += " " + show(k);
    return s + ")";
  };
  return show(root_);
}

Pattern Pattern::with_term(std::uint32_t i, PatternTerm t) const {
  Pattern out = *this;
  out.terms_[i] = std::move(t);
  return out;
}

std::string Rewrite::to_string() const { return name + ": " + lhs.to_string(vars) + " => " + rhs.to_string(vars); }

Rewrite make_rewrite(std::string name, std::string group, std::string_view lhs, std::string_view rhs,
                     WidthCondition condition) {
  Rewrite r;
  r.name = std::move(name);
  r.group = std::move(group);
  r.lhs = Pattern::parse(lhs, r.vars);
  r.rhs = Pattern::parse(rhs, r.vars);
  r.condition = std::move(condition);
  const std::uint32_t lhs_vars = r.lhs.var_mask();
  if ((r.rhs.var_mask() & ~lhs_vars) != 0) throw Error("rule '" + r.name + "' uses a variable unbound by its LHS");
  return r;
}

std::vector<Rewrite> without_rules(const std::vector<Rewrite>& rules, std::span<const std::string> disabled) {
  for (const auto& name : disabled) {
    if (std::none_of(rules.begin(), rules.end(), [&](const Rewrite& r) { return r.name == name; })) {
      throw Error("unknown rule '" + name + "'");
    }
  }
  std::vector<Rewrite> out;
  for (const auto& r : rules) {
    if (std::find(disabled.begin(), disabled.end(), r.name) == disabled.end()) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// E-matching

namespace {

bool const_matches(const ENode& n, PatternTerm::Tag tag) {
  if (n.op.kind != OpKind::Const) return false;
  return tag == PatternTerm::Tag::Zero ? n.op.value == 0 : n.op.value == width_mask(n.op.width);
}

void match_term(const Pattern& p, std::uint32_t t, ClassId cls, const Subst& s, const EGraph& g,
                std::vector<Subst>& out) {
  const PatternTerm& term = p.term(t);
  const EClass& ec = g.eclass(cls);
  switch (term.tag) {
    case PatternTerm::Tag::Var:
      if (s.has(term.var)) {
        if (g.find(s.at[term.var]) == ec.id) out.push_back(s);
      } else {
        Subst b = s;
        b.bind(term.var, ec.id);
        out.push_back(b);
      }
      return;
    case PatternTerm::Tag::Zero:
    case PatternTerm::Tag::Ones:
      for (const auto& e : ec.nodes) {
        if (const_matches(e.node, term.tag)) {
          out.push_back(s);
          return;
        }
      }
      return;
    case PatternTerm::Tag::Op:
      break;
  }
  for (const auto& e : ec.nodes) {
    const ENode& n = e.node;
    if (n.op.kind != term.op.kind || n.arity != term.kids.size()) continue;
    if (term.op.kind == OpKind::Rep && term.op.count != 0 && n.op.count != term.op.count) continue;
    if (term.op.kind == OpKind::Const && !(n.op == term.op)) continue;
    std::vector<Subst> cur{s};
    for (std::size_t i = 0; i < term.kids.size() && !cur.empty(); ++i) {
      std::vector<Subst> next;
      for (const Subst& cs : cur) match_term(p, term.kids[i], n.child[i], cs, g, next);
      cur = std::move(next);
    }
    out.insert(out.end(), cur.begin(), cur.end());
  }
}

}  // namespace

std::vector<Match> ematch(const Pattern& p, const EGraph& g, std::span<const ClassId> classes) {
  std::vector<Match> out;
  std::vector<Subst> found;
  for (ClassId c : classes) {
    found.clear();
    match_term(p, p.root(), c, Subst{}, g, found);
    for (const Subst& s : found) out.push_back({g.find(c), s});
  }
  return out;
}

std::vector<Match> ematch(const Pattern& p, const EGraph& g) {
  std::vector<ClassId> ids = g.class_ids();
  return ematch(p, g, ids);
}

// ---------------------------------------------------------------------------
// Instantiation and scheduling

namespace {

struct EGraphSink {
  using Id = ClassId;
  EGraph& g;
  const Subst& subst;
  OriginId origin;

  Id var(std::uint8_t v) { return g.find(subst.at[v]); }
  std::uint32_t width(Id id) const { return g.width(id); }
  Id add(const Op& op, std::span<const Id> kids) { return g.add(ENode(op, kids), origin); }
};

}  // namespace

std::optional<ClassId> instantiate_in(EGraph& g, const Pattern& rhs, const Subst& subst, std::uint32_t target,
                                      OriginId origin) {
  auto var_width = [&](std::uint8_t v) { return g.width(subst.at[v]); };
  WidthSink<decltype(var_width)> dry{var_width};
  if (!instantiate(rhs, dry, target)) return std::nullopt;
  EGraphSink sink{g, subst, origin};
  return instantiate(rhs, sink, target);
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Saturated:
      return "saturated";
    case StopReason::NodeLimit:
      return "node-limit";
    case StopReason::IterationLimit:
      return "iteration-limit";
  }
  return "unknown";
}

RunReport apply_rules(EGraph& g, std::span<const Rewrite> rules, const RewriteLimits& limits, bool count) {
  RunReport report;
  std::vector<OriginId> origins;
  for (const auto& r : rules) origins.push_back(g.intern_origin(r.name));
  g.rebuild();

  for (std::size_t iter = 1; iter <= limits.max_iters; ++iter) {
    // Candidate classes per root operator kind, in class-id order.
    std::vector<ClassId> ids = g.class_ids();
    std::array<std::vector<ClassId>, kOpKindCount> by_kind;
    for (ClassId c : ids) {
      std::array<bool, kOpKindCount> seen{};
      for (const auto& e : g.eclass(c).nodes) {
        auto k = static_cast<std::size_t>(e.node.op.kind);
        if (!seen[k]) by_kind[k].push_back(c);
        seen[k] = true;
      }
    }

    struct Pending {
      std::size_t rule;
      Match match;
    };
    std::vector<Pending> todo;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const Pattern& lhs = rules[r].lhs;
      const PatternTerm& root = lhs.term(lhs.root());
      std::vector<Match> ms = root.tag == PatternTerm::Tag::Op
                                  ? ematch(lhs, g, by_kind[static_cast<std::size_t>(root.op.kind)])
                                  : ematch(lhs, g, ids);
      for (auto& m : ms) {
        std::array<std::uint32_t, kMaxPatternVars> widths{};
        for (std::size_t v = 0; v < rules[r].vars.size(); ++v) {
          if (m.subst.has(static_cast<std::uint8_t>(v))) widths[v] = g.width(m.subst.at[v]);
        }
        if (rules[r].admits(std::span<const std::uint32_t>(widths.data(), rules[r].vars.size()))) {
          todo.push_back({r, m});
        }
      }
    }

    const std::size_t nodes_before = g.num_nodes();
    const std::size_t classes_before = g.num_classes();
    bool merged = false;
    bool hit_limit = false;
    for (const auto& [r, m] : todo) {
      if (g.num_nodes() > limits.max_nodes) {
        hit_limit = true;
        break;
      }
      auto id = instantiate_in(g, rules[r].rhs, m.subst, g.width(m.eclass), origins[r]);
      if (!id) continue;
      if (g.find(*id) != g.find(m.eclass)) {
        g.merge(m.eclass, *id);
        merged = true;
      }
    }
    g.rebuild();

    IterationStats st;
    st.iteration = iter;
    st.nodes = g.num_nodes();
    st.classes = g.num_classes();
    st.designs = count ? count_designs(g) : 0;
    st.matches = todo.size();
    report.iterations.push_back(st);

    if (hit_limit || g.num_nodes() > limits.max_nodes) {
      report.stop = StopReason::NodeLimit;
      return report;
    }
    if (!merged && g.num_nodes() == nodes_before && g.num_classes() == classes_before) {
      report.stop = StopReason::Saturated;
      return report;
    }
  }
  report.stop = StopReason::IterationLimit;
  return report;
}

}  // namespace powersat
