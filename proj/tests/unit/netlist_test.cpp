#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "powersat/design.hpp"
#include "powersat/equivalence.hpp"

using namespace powersat;
using namespace powersat::testing;

namespace {

std::size_t count_kind(const Design& d, OpKind k) {
  std::size_t n = 0;
  for (const auto& node : d.nodes) n += node.op.kind == k ? 1 : 0;
  return n;
}

}  // namespace

TEST_SUITE("netlist") {
  TEST_CASE("minimal module parses to one add node") {
    const Design d = parse_design("(module m (input a 4) (output y (add a (const 4 1))))");
    CHECK(d.name == "m");
    CHECK(count_kind(d, OpKind::Add) == 1);
    const DesignNode& y = d.node(d.outputs.at(0).node);
    CHECK(y.op.kind == OpKind::Add);
    CHECK(y.width == 4);
  }

  TEST_CASE("fig1 design: four ports, a multiplier and a mux") {
    const Design d = load_corpus_design("fig1_op_isolate");
    CHECK(d.size() == 6);
    CHECK(count_kind(d, OpKind::Mul) == 1);
    CHECK(count_kind(d, OpKind::Mux) == 1);
    CHECK(d.node(d.outputs[0].node).width == 16);
  }

  TEST_CASE("ragged add operands are rejected") {
    CHECK_THROWS_AS(parse_design("(module m (input a 4) (input b 8) (output y (add a b)))"), ParseError);
  }

  TEST_CASE("parse errors carry line and column") {
    try {
      parse_design("(module m\n  (input a 4)\n  (output y (add a zz)))");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(parse_design("(module m (input a 4) (output y (add a a))"), ParseError);
    CHECK_THROWS_AS(parse_design("(module m (input a 4) (output y (frob a)))"), ParseError);
    CHECK_THROWS_AS(parse_design("(module m (input a 0) (output y a))"), ParseError);
    CHECK_THROWS_AS(parse_design("(module m (input a 4) (input a 4) (output y a))"), ParseError);
    CHECK_THROWS_AS(parse_design("(module m (input a 4) (output y (const 4 16)))"), ParseError);
  }

  TEST_CASE("comments and hex constants") {
    const Design d = parse_design(
        "; leading comment\n(module m ; trailing\n (input a 8)\n (output y (xor a (const 8 0xf0))))\n");
    bool found = false;
    for (const auto& n : d.nodes) found = found || (n.op.kind == OpKind::Const && n.op.value == 0xf0);
    CHECK(found);
  }

  TEST_CASE("printing a single-var design") {
    const Design d = parse_design("(module m (input a 4) (output y a))");
    CHECK(print_design(d) == "(module m (input a 4) (output y a))");
  }

  TEST_CASE("round-trip of the corpus designs") {
    for (const char* name :
         {"fig1_op_isolate", "comb_mux_add_tree", "pipe_mux_add_tree", "dual_op_alu", "seq_reg"}) {
      CAPTURE(name);
      const Design d = load_corpus_design(name);
      const Design again = parse_design(print_design(d));
      CHECK(structurally_equal(d, again));
      CHECK(again.size() == d.size());
    }
  }

  TEST_CASE("pipelined mux add tree: two adders, three muxes, two registers") {
    const Design d = load_corpus_design("pipe_mux_add_tree");
    CHECK(count_kind(d, OpKind::Add) == 2);
    CHECK(count_kind(d, OpKind::Mux) == 3);
    CHECK(count_kind(d, OpKind::Reg) == 2);
  }

  TEST_CASE("infer_width") {
    const std::uint32_t w44[] = {4, 4};
    CHECK(infer_width(Op::of(OpKind::Add), w44) == 4);

    // 8x8 products never need more than 16 bits.
    std::uint64_t widest = 0;
    for (std::uint64_t a = 0; a < 256; ++a) {
      for (std::uint64_t b = 0; b < 256; ++b) widest = std::max(widest, a * b);
    }
    CHECK(widest < (std::uint64_t{1} << 16));
    const std::uint32_t w88[] = {8, 8};
    CHECK(infer_width(Op::of(OpKind::Mul), w88) == 16);

    const std::uint32_t w1[] = {1};
    CHECK(infer_width(Op::rep(8), w1) == 8);
    CHECK_THROWS_AS(infer_width(Op::rep(0), w1), WidthError);

    const std::uint32_t mux_bad[] = {2, 4, 4};
    CHECK_THROWS_AS(infer_width(Op::of(OpKind::Mux), mux_bad), WidthError);
    const std::uint32_t reg_bad[] = {4, 2};
    CHECK_THROWS_AS(infer_width(Op::of(OpKind::Reg), reg_bad), WidthError);
    const std::uint32_t shl[] = {8, 3};
    CHECK(infer_width(Op::of(OpKind::Shl), shl) == 8);
    const std::uint32_t too_wide[] = {40, 40};
    CHECK_THROWS_AS(infer_width(Op::of(OpKind::Mul), too_wide), WidthError);
  }

  TEST_CASE("bitvector invariants") {
    CHECK_THROWS_AS(BitVec(4, 16), WidthError);
    CHECK_THROWS_AS(BitVec(0, 0), WidthError);
    CHECK(BitVec::truncating(4, 0x1f).value() == 0xf);
    CHECK(parse_unsigned("0x7b") == 123);
    CHECK(parse_unsigned("123") == 123);
    CHECK_FALSE(parse_unsigned("12a").has_value());
    CHECK_FALSE(parse_unsigned("0x10000000000000000").has_value());
  }

  TEST_CASE("property: print/parse round-trip on random designs") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
      const Design d = random_design(rng);
      const std::string text = print_design(d);
      const Design again = parse_design(text);
      REQUIRE_MESSAGE(structurally_equal(d, again), text);
      CHECK(print_design(again) == text);
    }
  }

  TEST_CASE("property: parsing the same bytes twice numbers nodes identically") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i) {
      const std::string text = print_design(random_design(rng));
      const Design a = parse_design(text);
      const Design b = parse_design(text);
      REQUIRE(a.nodes.size() == b.nodes.size());
      for (std::size_t k = 0; k < a.nodes.size(); ++k) {
        CHECK(static_cast<const BasicNode<NodeId>&>(a.nodes[k]) == static_cast<const BasicNode<NodeId>&>(b.nodes[k]));
        CHECK(a.nodes[k].width == b.nodes[k].width);
      }
    }
  }

  TEST_CASE("property: simulated values fit their widths and match the reference evaluator") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 500; ++i) {
      const Design d = random_design(rng);
      const Stimuli s = random_stimuli(d, 12, rng);
      const auto got = simulate_design(d, s);
      const auto want = reference_simulate(d, s);
      for (std::size_t n = 0; n < d.size(); ++n) {
        const std::uint64_t limit = width_mask(d.nodes[n].width);
        for (std::size_t t = 0; t < 12; ++t) {
          REQUIRE((got[n].values[t] & ~limit) == 0);
          REQUIRE_MESSAGE(got[n].values[t] == want[n][t], print_design(d) << " node " << n << " cycle " << t);
        }
      }
    }
  }

  TEST_CASE("property: validate accepts every built design") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 300; ++i) CHECK_NOTHROW(random_design(rng).validate());
  }
}
