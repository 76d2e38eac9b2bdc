#include <doctest.h>

#include "relusat/oracle.hpp"
#include "relusat/rng.hpp"
#include "relusat/theory.hpp"
#include "support.hpp"

using namespace relusat;
using namespace relusat::testing;

namespace {

constexpr double kTol = 1e-9;

const Conjunction kOutputNonNegative{output_at_least(0.0)};

// Variables: 0 is the first hidden neuron, 1 the second.
Trail trail_with(std::initializer_list<Lit> decisions) {
  Trail t(2);
  for (Lit l : decisions) t.push_decision(l);
  return t;
}

TheoryConfig interval_config(LpRelaxation relaxation = LpRelaxation::none) {
  TheoryConfig cfg;
  cfg.abstraction = AbstractionMode::interval;
  cfg.relaxation = relaxation;
  return cfg;
}

/// Assignment of every LP variable induced by forward evaluation at x.
std::vector<double> value_at(const Network& net, std::span<const double> x, const LpEncoding& enc) {
  std::vector<double> point(enc.program.num_variables(), 0.0);
  const auto ev = net.forward(x);
  for (std::size_t i = 0; i < x.size(); ++i) point[static_cast<std::size_t>(enc.input[i])] = x[i];
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    for (std::size_t i = 0; i < enc.pre[k].size(); ++i) {
      const double z = ev.pre_activations[k](static_cast<Eigen::Index>(i));
      point[static_cast<std::size_t>(enc.pre[k][i])] = z;
      const bool relu_layer = net.layers()[k].activation == Activation::relu;
      point[static_cast<std::size_t>(enc.post[k][i])] = relu_layer ? relu(z) : z;
    }
  }
  return point;
}

} // namespace

TEST_CASE("LP for both hidden neurons active") {
  const Network net = two_neuron_net();
  const Box box = valid_problem().input_box;
  const std::vector<Phase> phases{Phase::active, Phase::active};
  for (LpRelaxation r : {LpRelaxation::triangle, LpRelaxation::loose, LpRelaxation::none}) {
    const LpEncoding enc = build_lp(net, box, phases, kOutputNonNegative, nullptr, r);
    // output = 1.5 x1 + 0.5 x2 - 3 <= -0.5 over the box
    CHECK(lp::solve(enc.program).status == lp::Status::infeasible);
    const LpEncoding open = build_lp(net, box, phases, {}, nullptr, r);
    lp::LinProgram q = open.program;
    q.set_objective({{open.output[0], 1.0}}, true);
    const lp::Solution s = lp::solve(q);
    REQUIRE(s.status == lp::Status::optimal);
    CHECK(s.objective == doctest::Approx(-0.5).epsilon(1e-9));
  }
}

TEST_CASE("LP with no decisions holds box, layers and relaxation only") {
  const Network net = two_neuron_net();
  const Box box = valid_problem().input_box;
  const LpEncoding enc = build_lp(net, box, {}, {}, nullptr, LpRelaxation::loose);
  // 2 inputs, 2 z + 2 y, 1 output z
  CHECK(enc.program.num_variables() == 7);
  // 3 affine equalities + 2 (y >= z)
  CHECK(enc.program.rows().size() == 5);
  CHECK(lp::solve(enc.program).feasible());
}

TEST_CASE("forward points satisfy the LP of their own pattern") {
  const Network net = generate_random_problem({}, 5).net;
  const Box& box = generate_random_problem({}, 5).input_box;
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(box.dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(box.lower[i], box.upper[i]);
    const auto ev = net.forward(x);
    std::vector<Phase> phases(net.relu_count());
    for (std::size_t f = 0; f < phases.size(); ++f) {
      const double z = ev.pre_activation(net.relu_neurons()[f]);
      const double u = rng.uniform();
      phases[f] = u < 0.3 ? Phase::unassigned : (z > 0.0 ? Phase::active : Phase::inactive);
    }
    const NeuronBounds b = propagate_bounds(net, phases, box, AbstractionMode::both);
    for (LpRelaxation r : {LpRelaxation::triangle, LpRelaxation::loose, LpRelaxation::none}) {
      const LpEncoding enc = build_lp(net, box, phases, {}, &b, r);
      CHECK(enc.program.max_violation(value_at(net, x, enc)) <= 1e-6);
    }
  }
}

TEST_CASE("input tightening") {
  const Network net = two_neuron_net();
  const Box box = valid_problem().input_box;
  SUBCASE("second neuron active") {
    const std::vector<Phase> phases{Phase::unassigned, Phase::active};
    const LpEncoding enc = build_lp(net, box, phases, kOutputNonNegative, nullptr, LpRelaxation::none);
    const Box t = tighten_input_bounds(enc, box);
    CHECK(t.lower[0] == doctest::Approx(-1.0).epsilon(kTol));
    CHECK(t.upper[0] == doctest::Approx(1.0).epsilon(kTol));
    CHECK(t.lower[1] == doctest::Approx(0.0).epsilon(kTol));
    CHECK(t.upper[1] == doctest::Approx(2.0).epsilon(kTol));
  }
  SUBCASE("nothing decided") {
    const LpEncoding enc = build_lp(net, box, {}, {}, nullptr, LpRelaxation::none);
    CHECK(tighten_input_bounds(enc, box) == box);
  }
  SUBCASE("above the dimension threshold") {
    const std::vector<Phase> phases{Phase::unassigned, Phase::active};
    const LpEncoding enc = build_lp(net, box, phases, {}, nullptr, LpRelaxation::none);
    CHECK(tighten_input_bounds(enc, box, 1) == box);
  }
  SUBCASE("tightened box keeps every feasible sample") {
    const VerificationProblem prob = generate_random_problem({}, 21);
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Phase> phases(prob.net.relu_count());
      for (auto& p : phases) p = static_cast<Phase>(rng.next() % 3);
      const LpEncoding enc = build_lp(prob.net, prob.input_box, phases, {}, nullptr, LpRelaxation::loose);
      if (!lp::solve(enc.program).feasible()) continue;
      const Box t = tighten_input_bounds(enc, prob.input_box);
      for (int s = 0; s < 500; ++s) {
        std::vector<double> x(prob.input_box.dim());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(prob.input_box.lower[i], prob.input_box.upper[i]);
        const auto ev = prob.net.forward(x);
        bool consistent = true;
        for (std::size_t f = 0; f < phases.size(); ++f) {
          const double z = ev.pre_activation(prob.net.relu_neurons()[f]);
          if ((phases[f] == Phase::active && z < 0.0) || (phases[f] == Phase::inactive && z > 0.0)) consistent = false;
        }
        if (consistent) CHECK(t.contains(x, 1e-7));
      }
    }
  }
}

TEST_CASE("deduction on the two-neuron network") {
  const Network net = two_neuron_net();
  const Box box = valid_problem().input_box;

  SUBCASE("no decisions: output upper bound 1, nothing implied") {
    const Trail t(2);
    const DeductionResult r = deduction(net, box, kOutputNonNegative, t, interval_config());
    CHECK(r.kind == DeductionResult::Kind::feasible);
    CHECK(r.bounds.output[0].hi == doctest::Approx(1.0).epsilon(kTol));
    CHECK(r.implied.empty());
  }
  SUBCASE("second neuron inactive: bound -1 refutes the disjunct") {
    const Trail t = trail_with({Lit(1, false)});
    const DeductionResult r = deduction(net, box, kOutputNonNegative, t, interval_config());
    CHECK(r.kind == DeductionResult::Kind::infeasible);
    CHECK(r.bounds.output[0].hi == doctest::Approx(-1.0).epsilon(kTol));
    REQUIRE(r.conflict.size() == 1);
    CHECK(r.conflict[0] == Lit(1, true));
  }
  SUBCASE("second neuron active: tightening implies the first is active") {
    const Trail t = trail_with({Lit(1, true)});
    const DeductionResult r = deduction(net, box, kOutputNonNegative, t, interval_config());
    REQUIRE(r.kind == DeductionResult::Kind::feasible);
    const Interval& z3 = r.bounds.pre_of({1, 0});
    CHECK(z3.lo == doctest::Approx(0.5).epsilon(kTol));
    CHECK(z3.hi == doctest::Approx(2.5).epsilon(kTol));
    CHECK(r.bounds.output[0].hi == doctest::Approx(0.5).epsilon(kTol));
    REQUIRE(r.implied.size() == 1);
    CHECK(r.implied[0].lit == Lit(0, true));
    CHECK(Clause{r.implied[0].reason}.same_literals(Clause{{Lit(0, true), Lit(1, false)}}));
  }
  SUBCASE("both active: the LP is infeasible") {
    const Trail t = trail_with({Lit(1, true), Lit(0, true)});
    const DeductionResult r = deduction(net, box, kOutputNonNegative, t, interval_config());
    CHECK(r.kind == DeductionResult::Kind::infeasible);
    CHECK(r.source == "lp");
    CHECK(Clause{r.conflict}.same_literals(Clause{{Lit(0, false), Lit(1, false)}}));
  }
  SUBCASE("triangle relaxation refutes the whole box at once") {
    const Trail t(2);
    const DeductionResult r = deduction(net, box, kOutputNonNegative, t, TheoryConfig{});
    CHECK(r.kind == DeductionResult::Kind::infeasible);
    CHECK(r.conflict.empty());
  }
}

TEST_CASE("deduction yields a witness for the invalid property") {
  const VerificationProblem prob = invalid_problem();
  const Trail t = trail_with({Lit(0, true), Lit(1, false)});
  for (LpRelaxation r : {LpRelaxation::triangle, LpRelaxation::none}) {
    TheoryConfig cfg;
    cfg.relaxation = r;
    const DeductionResult res = deduction(prob.net, prob.input_box, prob.negated_output[0], t, cfg);
    REQUIRE(res.kind == DeductionResult::Kind::sat_total);
    CHECK(prob.is_counterexample(res.witness));
  }
}

TEST_CASE("strict output constraints need positive slack") {
  // output > 0 is empty even though output >= 0 touches it at one corner:
  // with the bias raised by 0.5 the maximum of the output over the box is 0.
  Network net = two_neuron_net();
  std::vector<Layer> layers = net.layers();
  layers[1].bias(0) += 0.5;
  const Network shifted(2, layers);
  const Box box = valid_problem().input_box;
  Trail t = trail_with({Lit(0, true), Lit(1, true)});
  LinearConstraint strict = output_at_least(0.0);
  strict.op = Cmp::gt;
  const DeductionResult r = deduction(shifted, box, {strict}, t);
  CHECK(r.kind == DeductionResult::Kind::infeasible);
  const DeductionResult closed = deduction(shifted, box, {output_at_least(0.0)}, t);
  REQUIRE(closed.kind == DeductionResult::Kind::sat_total);
  CHECK(shifted.forward(closed.witness).outputs(0) >= 0.0);
}

TEST_CASE("implied literals hold at every consistent sample") {
  Rng rng(31);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const VerificationProblem prob = generate_random_problem({}, seed);
    const std::size_t h = prob.net.relu_count();
    Trail trail(h);
    for (Var v = 0; v < h; ++v) {
      if (rng.uniform() < 0.3) trail.push_decision(Lit(v, rng.coin()));
    }
    const DeductionResult r = deduction(prob.net, prob.input_box, {}, trail);
    if (r.kind != DeductionResult::Kind::feasible) continue;
    const std::vector<Phase> phases = phases_from_trail(trail);
    for (int s = 0; s < 2000; ++s) {
      std::vector<double> x(prob.input_box.dim());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(prob.input_box.lower[i], prob.input_box.upper[i]);
      const auto ev = prob.net.forward(x);
      bool consistent = true;
      for (Var v = 0; v < h; ++v) {
        const double z = ev.pre_activation(prob.net.relu_neurons()[v]);
        if ((phases[v] == Phase::active && z <= 0.0) || (phases[v] == Phase::inactive && z > 0.0)) consistent = false;
      }
      if (!consistent) continue;
      for (const ImpliedLiteral& imp : r.implied) {
        const double z = ev.pre_activation(prob.net.relu_neurons()[imp.lit.var()]);
        if (imp.lit.positive()) {
          CHECK(z > 0.0);
        } else {
          CHECK(z <= 0.0);
        }
      }
    }
  }
}

TEST_CASE("phases follow the trail") {
  Trail t(3);
  t.push_decision(Lit(2, false));
  t.push_implied(Lit(0, true), {Lit(0, true), Lit(2, true)});
  const std::vector<Phase> p = phases_from_trail(t);
  CHECK(p == std::vector<Phase>{Phase::active, Phase::unassigned, Phase::inactive});
  CHECK(negated_trail(t) == std::vector<Lit>{Lit(2, true), Lit(0, false)});
}
