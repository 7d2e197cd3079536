#include <array>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "powersat/extract.hpp"
#include "powersat/power.hpp"

using namespace powersat;
using namespace powersat::testing;

namespace {

double area_of(OpKind k, std::uint32_t w, std::vector<std::uint32_t> in, std::array<bool, 3> consts = {}) {
  return AreaModel().area(Op::of(k), w, in, std::span<const bool>(consts.data(), in.size()));
}

// Objective of `d` itself: the original selection in its own e-graph,
// scored with activity simulated on `s`.
double design_objective(const Design& d, const Stimuli& s, Mode mode, const AreaModel& model = {}) {
  EGraph g;
  const DesignEmbedding emb = g.add_design(d);
  g.rebuild();
  const auto stats = simulate_activity(g, choose_representatives(g), s);
  const SelectionProblem p = build_problem(g, score_nodes(g, stats, model, mode));
  return selection_cost(p, original_selection(p, g, d, emb)).value();
}

}  // namespace

TEST_SUITE("power") {
  TEST_CASE("gate-count formulas") {
    CHECK(area_of(OpKind::And, 8, {8, 8}) == 8);
    CHECK(area_of(OpKind::Not, 8, {8}) == 8);
    CHECK(area_of(OpKind::Mux, 8, {1, 8, 8}) == 24);
    CHECK(area_of(OpKind::Add, 8, {8, 8}) == 40);
    CHECK(area_of(OpKind::Sub, 8, {8, 8}) == 40);
    CHECK(area_of(OpKind::Add, 8, {8, 8, 8}) == 64);
    CHECK(area_of(OpKind::Add, 8, {8, 8, 8}) < 2 * area_of(OpKind::Add, 8, {8, 8}));
    CHECK(area_of(OpKind::Mul, 16, {8, 8}) == 6 * 8 * 8);
    CHECK(area_of(OpKind::Mul, 16, {8, 8}, {false, true}) == 192);
    CHECK(area_of(OpKind::Shl, 8, {8, 3}, {false, true}) == 0);
    CHECK(area_of(OpKind::Shr, 8, {8, 3}) == 3 * 8 * 3);
    CHECK(area_of(OpKind::Reg, 8, {8, 1}) == 32);
    CHECK(area_of(OpKind::Treg, 8, {8, 1}) == 32);
    CHECK(area_of(OpKind::Rep, 8, {1}) == 0);
    CHECK(AreaModel().area(Op::var("a", 8), 8, {}, {}) == 0);
    CHECK(AreaModel().area(Op::constant(BitVec(8, 3)), 8, {}, {}) == 0);
  }

  TEST_CASE("multiplier area grows with operand width") {
    double prev = 0;
    for (std::uint32_t w = 1; w <= 16; ++w) {
      const double a = area_of(OpKind::Mul, 2 * w, {w, w});
      CHECK(a > prev);
      prev = a;
    }
  }

  TEST_CASE("node power") {
    const double t_in[] = {0.5, 0.5};
    CHECK(node_power(40, 0.5, t_in) == 20);
    CHECK(node_power(0, 0.9, t_in) == 0);
    const double frozen[] = {0.0, 0.0};
    CHECK(node_power(40, 0.0, frozen) == 0);
  }

  TEST_CASE("area model overrides scale single operators") {
    const AreaModel m = AreaModel::with_overrides({{"mul", 0.5}, {"add3", 2.0}});
    const std::uint32_t in[] = {8, 8};
    const bool nc[] = {false, false};
    CHECK(m.area(Op::of(OpKind::Mul), 16, in, nc) == 192);
    CHECK(m.area(Op::of(OpKind::Add), 8, in, nc) == 40);
    const std::uint32_t in3[] = {8, 8, 8};
    const bool nc3[] = {false, false, false};
    CHECK(m.area(Op::of(OpKind::Add), 8, in3, nc3) == 128);
    CHECK_THROWS_AS(AreaModel::with_overrides({{"frobnicator", 1.0}}), Error);
  }

  TEST_CASE("property: power is linear in area and in toggle rates") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double area = 100 * u(rng);
      const double t_out = u(rng);
      const std::vector<double> t_in = {u(rng), u(rng), u(rng)};
      const std::size_t k = 1 + rng() % 3;
      const std::span<const double> ins(t_in.data(), k);
      double sum = t_out;
      for (double t : ins) sum += t;
      const double p = node_power(area, t_out, ins);
      CHECK(p == doctest::Approx(area * sum / static_cast<double>(k + 1)).epsilon(1e-12));
      const double lambda = 0.1 + 3 * u(rng);
      std::vector<double> scaled(ins.begin(), ins.end());
      for (double& t : scaled) t *= lambda;
      CHECK(node_power(area, lambda * t_out, scaled) == doctest::Approx(lambda * p).epsilon(1e-12));
      CHECK(node_power(lambda * area, t_out, ins) == doctest::Approx(lambda * p).epsilon(1e-12));
      CHECK(p >= 0);
    }
  }

  TEST_CASE("property: scaling every score leaves the optimal selection unchanged") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
      RandomEGraph r = random_egraph(rng, 10);
      const SelectionProblem p = build_problem(r.graph, r.scores);
      const ExtractionSolution base = solve(p, {});
      for (double lambda : {0.25, 3.0, 8.0}) {
        NodeScores scaled = r.scores;
        for (auto& cls : scaled.by_class) {
          for (double& s : cls) s *= lambda;
        }
        const ExtractionSolution sol = solve(build_problem(r.graph, scaled), {});
        CHECK(sol.choice == base.choice);
        CHECK(sol.objective == lambda * base.objective);
      }
    }
  }

  TEST_CASE("area mode reduces the objective to the area sum") {
    const Design d = load_corpus_design("comb_mux_add_tree");
    StimulusConfig cfg = load_corpus_config("comb_mux_add_tree", 1);
    cfg.cycles = 200;
    const Stimuli s = generate_stimuli(cfg, d);
    double want = 0;
    const AreaModel model;
    for (const auto& n : d.nodes) {
      std::vector<std::uint32_t> in;
      std::array<bool, 3> consts{};
      for (NodeId k : n.children()) {
        consts[in.size()] = d.node(k).op.kind == OpKind::Const;
        in.push_back(d.node(k).width);
      }
      want += model.area(n.op, n.width, in, std::span<const bool>(consts.data(), in.size()));
    }
    CHECK(design_objective(d, s, Mode::Area) == want);
    CHECK(want == 3 * 40 + 3 * 24);
  }

  TEST_CASE("fig1: the data-gated variant scores lower at low select activity") {
    const Design plain = load_corpus_design("fig1_op_isolate");
    const Design gated = parse_design(
        "(module fig1_op_isolate (input s 1) (input a 16) (input b 8) (input c 8)"
        " (output y (mux s a (mul (and c (rep8 (not s))) (and b (rep8 (not s)))))))");
    const Stimuli s = generate_stimuli(load_corpus_config("fig1_op_isolate", 1), plain);
    CHECK(design_objective(gated, s, Mode::Power) < design_objective(plain, s, Mode::Power));
    CHECK(design_objective(gated, s, Mode::Area) > design_objective(plain, s, Mode::Area));
  }

  TEST_CASE("a shared subexpression is scored once") {
    const Design shared = parse_design("(module m (input a 8) (output y (add a a)) (output z (add a a)))");
    const Design single = parse_design("(module m (input a 8) (output y (add a a)))");
    std::mt19937_64 rng(43);
    const Stimuli s = random_stimuli(single, 300, rng);
    CHECK(design_objective(shared, s, Mode::Power) == design_objective(single, s, Mode::Power));
    CHECK(design_objective(shared, s, Mode::Area) == 40);
  }

  TEST_CASE("a design whose outputs are inputs scores zero") {
    const Design d = parse_design("(module m (input a 8) (input b 4) (output y a) (output z b))");
    std::mt19937_64 rng(44);
    CHECK(design_objective(d, random_stimuli(d, 100, rng), Mode::Power) == 0);
  }

  TEST_CASE("frozen logic burns nothing") {
    const Design d = parse_design("(module m (input a 8) (input b 8) (output y (mul a b)))");
    StimulusConfig cfg;
    cfg.cycles = 50;
    cfg.inputs["a"].toggle_rate = 0;
    cfg.inputs["b"].toggle_rate = 0;
    CHECK(design_objective(d, generate_stimuli(cfg, d), Mode::Power) == 0);
    CHECK(design_objective(d, generate_stimuli(cfg, d), Mode::Area) == 384);
  }
}
