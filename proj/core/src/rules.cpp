#include <algorithm>

#include "powersat/rewrite.hpp"

namespace powersat {

namespace {

std::size_t slot(const Rewrite& r, std::string_view var) {
  auto it = std::find(r.vars.names.begin(), r.vars.names.end(), var);
  if (it == r.vars.names.end()) throw Error("rule '" + r.name + "' has no variable " + std::string(var));
  return static_cast<std::size_t>(it - r.vars.names.begin());
}

// The named variable must be a single bit.
Rewrite single_bit(Rewrite r, std::string_view var) {
  const std::size_t i = slot(r, var);
  r.condition = [i](std::span<const std::uint32_t> w) { return w[i] == 1; };
  return r;
}

Rewrite same_width(Rewrite r, std::string_view a, std::string_view b) {
  const std::size_t i = slot(r, a);
  const std::size_t j = slot(r, b);
  r.condition = [i, j](std::span<const std::uint32_t> w) { return w[i] == w[j]; };
  return r;
}

std::string subst_op(std::string_view text, std::string_view op) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.substr(i, 2) == "@@") {
      out += op;
      ++i;
    } else {
      out += text[i];
    }
  }
  return out;
}

void data_gate(std::vector<Rewrite>& rs) {
  const std::string g = "data-gate";
  rs.push_back(make_rewrite("gate-left", g, "(mux ?s ?b ?c)", "(mux ?s (and ?b (rep ?s)) ?c)"));
  rs.push_back(make_rewrite("gate-right", g, "(mux ?s ?b ?c)", "(mux ?s ?b (and ?c (rep (not ?s))))"));
  for (const char* op : {"mul", "shl", "shr", "add", "sub"}) {
    rs.push_back(single_bit(make_rewrite("propagate-mask", g, subst_op("(and (@@ ?a ?b) (rep ?s))", op),
                                         subst_op("(@@ (and ?a (rep ?s)) (and ?b (rep ?s)))", op)),
                            "?s"));
  }
  for (const char* op : {"mul", "shl", "shr"}) {
    rs.push_back(single_bit(make_rewrite("propagate-mask-left", g, subst_op("(and (@@ ?a ?b) (rep ?s))", op),
                                         subst_op("(@@ (and ?a (rep ?s)) ?b)", op)),
                            "?s"));
  }
  rs.push_back(make_rewrite("propagate-mux-mask", g, "(and (mux ?s1 ?a ?b) (rep ?s2))",
                            "(mux ?s1 (and ?a (rep ?s2)) (and ?b (rep ?s2)))"));
  rs.push_back(single_bit(make_rewrite("propagate-mux-mask-right", g, "(and (mux ?s1 ?a ?b) (rep ?s2))",
                                       "(mux (and ?s1 ?s2) ?a (and ?b (rep ?s2)))"),
                          "?s2"));
  rs.push_back(single_bit(make_rewrite("propagate-mux-mask-left", g, "(and (mux ?s1 ?a ?b) (rep ?s2))",
                                       "(mux (or ?s1 (not ?s2)) (and ?a (rep ?s2)) ?b)"),
                          "?s2"));
  rs.push_back(same_width(
      make_rewrite("combine-masks", g, "(and (and ?a (rep ?s1)) (rep ?s2))", "(and ?a (rep (and ?s1 ?s2)))"), "?s1",
      "?s2"));
}

void transparent_registers(std::vector<Rewrite>& rs) {
  const std::string g = "transparent-register";
  rs.push_back(make_rewrite("transp-reg-left", g, "(mux ?s ?b ?c)", "(mux ?s (treg ?b ?s) ?c)"));
  rs.push_back(make_rewrite("transp-reg-right", g, "(mux ?s ?b ?c)", "(mux ?s ?b (treg ?c (not ?s)))"));
  rs.push_back(
      single_bit(make_rewrite("transp-reg-mask", g, "(and ?a (rep ?s))", "(and (treg ?a ?s) (rep ?s))"), "?s"));
  rs.push_back(single_bit(
      make_rewrite("transp-reg-saturate", g, "(or ?a (rep ?s))", "(or (treg ?a (not ?s)) (rep ?s))"), "?s"));
  rs.push_back(make_rewrite("transp-reg-reg", g, "(reg ?a ?en)", "(reg (treg ?a ?en) ?en)"));
  // Only operators mapping (0, 0) to 0 agree before the first enable.
  for (const char* op : {"add", "sub", "mul", "shl", "shr", "and", "or", "xor"}) {
    rs.push_back(make_rewrite("propagate", g, subst_op("(treg (@@ ?a ?b) ?s)", op),
                              subst_op("(@@ (treg ?a ?s) (treg ?b ?s))", op)));
  }
  rs.push_back(make_rewrite("propagate-mux", g, "(treg (mux ?s1 ?a ?b) ?s2)",
                            "(mux (treg ?s1 ?s2) (treg ?a ?s2) (treg ?b ?s2))"));
  // The general form TREG(TREG(a, s1), s2) -> TREG(a, s1 & s2) is unsound; these
  // are the instances where the outer enable implies the inner one.
  rs.push_back(make_rewrite("combine-transp-reg", g, "(treg (treg ?a ?s) ?s)", "(treg ?a ?s)"));
  rs.push_back(
      make_rewrite("combine-transp-reg", g, "(treg (treg ?a ?s1) (and ?s1 ?s2))", "(treg ?a (and ?s1 ?s2))"));
}

void clock_gate(std::vector<Rewrite>& rs) {
  const std::string g = "clock-gate";
  for (const char* op : {"and", "or", "xor"}) {
    rs.push_back(make_rewrite("retime-boolean", g, subst_op("(@@ (reg ?a ?en) (reg ?b ?en))", op),
                              subst_op("(reg (@@ ?a ?b) ?en)", op)));
  }
  rs.push_back(make_rewrite("clock-gate-reg", g, "(treg (reg ?a ?en) (reg ?b ?en))", "(reg ?a (and ?en ?b))"));
}

void boolean(std::vector<Rewrite>& rs) {
  const std::string g = "boolean";
  rs.push_back(make_rewrite("and-comm", g, "(and ?a ?b)", "(and ?b ?a)"));
  rs.push_back(make_rewrite("or-comm", g, "(or ?a ?b)", "(or ?b ?a)"));
  rs.push_back(make_rewrite("and-assoc", g, "(and (and ?a ?b) ?c)", "(and ?a (and ?b ?c))"));
  rs.push_back(make_rewrite("and-idem", g, "(and ?a ?a)", "?a"));
  rs.push_back(make_rewrite("or-idem", g, "(or ?a ?a)", "?a"));
  rs.push_back(make_rewrite("and-zero", g, "(and ?a zero)", "zero"));
  rs.push_back(make_rewrite("and-ones", g, "(and ?a ones)", "?a"));
  rs.push_back(make_rewrite("or-zero", g, "(or ?a zero)", "?a"));
  rs.push_back(make_rewrite("or-ones", g, "(or ?a ones)", "ones"));
  rs.push_back(make_rewrite("xor-self", g, "(xor ?a ?a)", "zero"));
  rs.push_back(make_rewrite("double-neg", g, "(not (not ?a))", "?a"));
  rs.push_back(make_rewrite("de-morgan", g, "(not (and ?a ?b))", "(or (not ?a) (not ?b))"));
  rs.push_back(make_rewrite("de-morgan", g, "(or (not ?a) (not ?b))", "(not (and ?a ?b))"));
  rs.push_back(make_rewrite("de-morgan", g, "(not (or ?a ?b))", "(and (not ?a) (not ?b))"));
  rs.push_back(make_rewrite("de-morgan", g, "(and (not ?a) (not ?b))", "(not (or ?a ?b))"));
  rs.push_back(make_rewrite("rep-zero", g, "(rep zero)", "zero"));
  rs.push_back(make_rewrite("rep-ones", g, "(rep ones)", "ones"));
}

void arithmetic(std::vector<Rewrite>& rs) {
  const std::string g = "arithmetic";
  rs.push_back(make_rewrite("add-comm", g, "(add ?a ?b)", "(add ?b ?a)"));
  rs.push_back(make_rewrite("add-assoc", g, "(add (add ?a ?b) ?c)", "(add ?a (add ?b ?c))"));
  rs.push_back(make_rewrite("add3-cluster", g, "(add (add ?a ?b) ?c)", "(add ?a ?b ?c)"));
  rs.push_back(make_rewrite("add3-split", g, "(add ?a ?b ?c)", "(add (add ?a ?b) ?c)"));
  for (const char* op : {"add", "sub", "mul", "and", "or", "xor"}) {
    rs.push_back(make_rewrite("mux-distribute", g, subst_op("(@@ (mux ?s ?a ?b) ?c)", op),
                              subst_op("(mux ?s (@@ ?a ?c) (@@ ?b ?c))", op)));
    rs.push_back(make_rewrite("mux-factor", g, subst_op("(mux ?s (@@ ?a ?c) (@@ ?b ?c))", op),
                              subst_op("(@@ (mux ?s ?a ?b) ?c)", op)));
  }
  rs.push_back(make_rewrite("mux-distribute", g, "(sub ?c (mux ?s ?a ?b))", "(mux ?s (sub ?c ?a) (sub ?c ?b))"));
  rs.push_back(make_rewrite("mux-factor", g, "(mux ?s (sub ?c ?a) (sub ?c ?b))", "(sub ?c (mux ?s ?a ?b))"));
}

}  // namespace

std::vector<Rewrite> rule_library() {
  std::vector<Rewrite> rs;
  data_gate(rs);
  transparent_registers(rs);
  clock_gate(rs);
  boolean(rs);
  arithmetic(rs);
  return rs;
}

std::vector<std::string> rule_names() {
  std::vector<std::string> names;
  for (const auto& r : rule_library()) {
    if (std::find(names.begin(), names.end(), r.name) == names.end()) names.push_back(r.name);
  }
  return names;
}

}  // namespace powersat
