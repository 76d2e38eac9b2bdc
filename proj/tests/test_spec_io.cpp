#include <doctest.h>

#include <string>

#include "relusat/oracle.hpp"
#include "relusat/rng.hpp"
#include "support.hpp"

using namespace relusat;
using namespace relusat::testing;

namespace {

const char* kHeader = "(declare-const X_0 Real)\n(declare-const X_1 Real)\n(declare-const Y_0 Real)\n";
const char* kBounds = "(assert (>= X_0 -1))\n(assert (<= X_0 1))\n(assert (>= X_1 -2))\n(assert (<= X_1 2))\n";

VerificationProblem parse_prop(const std::string& body) { return parse_vnnlib(std::string(kHeader) + kBounds + body, two_neuron_net()); }

std::size_t parse_error_line(const std::string& text, const Network& net) {
  try {
    (void)parse_vnnlib(text, net);
  } catch (const ParseError& e) {
    return e.line();
  }
  FAIL("no ParseError");
  return 0;
}

OutputFormula random_formula(Rng& rng, std::size_t outputs, int depth) {
  OutputFormula f;
  if (depth == 0 || rng.uniform() < 0.3) {
    f.kind = OutputFormula::Kind::atom;
    f.atom.coeffs = Eigen::VectorXd(static_cast<Eigen::Index>(outputs));
    for (Eigen::Index j = 0; j < f.atom.coeffs.size(); ++j) f.atom.coeffs(j) = rng.uniform(-1.0, 1.0);
    f.atom.op = static_cast<Cmp>(rng.next() % 4);
    f.atom.rhs = rng.uniform(-0.5, 0.5);
    return f;
  }
  f.kind = rng.coin() ? OutputFormula::Kind::all_of : OutputFormula::Kind::any_of;
  const std::size_t n = 1 + rng.next() % 3;
  for (std::size_t i = 0; i < n; ++i) f.children.push_back(random_formula(rng, outputs, depth - 1));
  return f;
}

bool dnf_holds(const std::vector<Conjunction>& dnf, const Eigen::VectorXd& y) {
  for (const auto& conj : dnf) {
    bool all = true;
    for (const auto& c : conj) all = all && c.holds(y);
    if (all) return true;
  }
  return false;
}

} // namespace

TEST_CASE("network file") {
  const Network net = two_neuron_net();
  REQUIRE(net.num_layers() == 2);
  CHECK(net.layers()[0].weights(0, 0) == -0.5);
  CHECK(net.layers()[0].weights(1, 1) == 1.0);
  CHECK(net.layers()[0].bias(1) == -1.0);
  CHECK(net.layers()[1].activation == Activation::identity);

  SUBCASE("round trip") {
    const std::string once = serialize_network(net);
    const Network again = parse_network(once);
    CHECK(serialize_network(again) == once);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      CHECK(again.layers()[l].weights == net.layers()[l].weights);
      CHECK(again.layers()[l].bias == net.layers()[l].bias);
    }
  }
  SUBCASE("random networks round trip exactly") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Network& n = generate_random_problem({}, seed).net;
      const Network back = parse_network(serialize_network(n));
      for (std::size_t l = 0; l < n.num_layers(); ++l) {
        CHECK(back.layers()[l].weights == n.layers()[l].weights);
        CHECK(back.layers()[l].bias == n.layers()[l].bias);
      }
    }
  }
  SUBCASE("bias length mismatch names its line") {
    const std::string text = "{\n  \"input_dim\": 2,\n  \"layers\": [\n"
                             "    {\"weights\": [[1, 2], [3, 4]],\n"
                             "     \"bias\": [0],\n"
                             "     \"activation\": \"relu\"},\n"
                             "    {\"weights\": [[1, 1]], \"bias\": [0], \"activation\": \"none\"}\n  ]\n}\n";
    try {
      (void)parse_network(text);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
      CHECK(std::string(e.what()).find("bias length 1 does not match row count 2") != std::string::npos);
    }
  }
  SUBCASE("malformed documents") {
    CHECK_THROWS_AS((void)parse_network("{"), ParseError);
    CHECK_THROWS_AS((void)parse_network("[]"), ParseError);
    CHECK_THROWS_AS((void)parse_network(R"({"input_dim": 0, "layers": []})"), ParseError);
    CHECK_THROWS_AS((void)parse_network(R"({"input_dim": 1, "layers": [{"weights": [[1]], "bias": [0], "activation": "tanh"}]})"),
                    ParseError);
    CHECK_THROWS_AS((void)parse_network(R"({"input_dim": 1, "layers": [{"weights": [[1, 2], [1]], "bias": [0, 0], "activation": "relu"}]})"),
                    ParseError);
    CHECK_THROWS_AS((void)parse_network(R"({"input_dim": 3, "layers": [{"weights": [[1, 2]], "bias": [0], "activation": "none"}]})"),
                    ParseError);
  }
}

TEST_CASE("property file") {
  SUBCASE("valid fixture") {
    const VerificationProblem p = valid_problem();
    CHECK(p.input_box == Box{{-1.0, -2.0}, {1.0, 2.0}});
    REQUIRE(p.negated_output.size() == 1);
    REQUIRE(p.negated_output[0].size() == 1);
    CHECK(p.negated_output[0][0] == output_at_least(0.0));
  }
  SUBCASE("invalid fixture") {
    const VerificationProblem p = invalid_problem();
    REQUIRE(p.negated_output.size() == 1);
    CHECK(p.negated_output[0][0].op == Cmp::le);
    CHECK(p.negated_output[0][0].rhs == 0.0);
  }
  SUBCASE("disjunction gives one conjunction per branch") {
    const auto p = parse_prop("(assert (or (and (>= Y_0 1)) (and (<= Y_0 -3))))\n");
    REQUIRE(p.negated_output.size() == 2);
    CHECK(p.negated_output[0][0] == output_at_least(1.0));
    CHECK(p.negated_output[1][0].op == Cmp::le);
    CHECK(p.negated_output[1][0].rhs == -3.0);
  }
  SUBCASE("linear terms") {
    const auto p = parse_prop("(assert (> (+ (* 2 Y_0) 1) (- 3 Y_0)))\n");
    REQUIRE(p.negated_output.size() == 1);
    const LinearConstraint& c = p.negated_output[0][0];
    CHECK(c.op == Cmp::gt);
    CHECK(c.coeffs(0) == 3.0);
    CHECK(c.rhs == 2.0);
  }
  SUBCASE("strict and closed comparisons differ at the boundary") {
    LinearConstraint c = output_at_least(0.0);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    CHECK(c.holds(zero));
    c.op = Cmp::gt;
    CHECK_FALSE(c.holds(zero));
    c.op = Cmp::lt;
    CHECK_FALSE(c.holds(zero));
  }
  SUBCASE("missing bound") {
    const std::string text = std::string(kHeader) + "(assert (>= X_0 -1))\n(assert (<= X_0 1))\n(assert (>= X_1 -2))\n"
                             "(assert (>= Y_0 0))\n";
    try {
      (void)parse_vnnlib(text, two_neuron_net());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("missing upper bound for X_1") != std::string::npos);
    }
  }
  SUBCASE("input and output in one inequality") {
    const std::string text = std::string(kHeader) + kBounds + "\n(assert (>= Y_0 X_0))\n";
    CHECK(parse_error_line(text, two_neuron_net()) == 9);
  }
  SUBCASE("unsupported input") {
    const Network net = two_neuron_net();
    CHECK(parse_error_line(std::string(kHeader) + kBounds + "(assert (>= (* Y_0 Y_0) 0))\n", net) == 8);
    CHECK(parse_error_line(std::string(kHeader) + kBounds + "(check-sat)\n", net) == 8);
    CHECK(parse_error_line(std::string(kHeader) + kBounds + "(assert (>= Y_0 0)\n", net) == 8);
    CHECK(parse_error_line(std::string(kHeader) + kBounds + "(assert (>= Y_3 0))\n", net) == 8);
    CHECK(parse_error_line(std::string(kHeader) + kBounds + "(assert (or (>= X_0 0) (>= Y_0 0)))\n", net) == 8);
    CHECK_THROWS_AS((void)parse_vnnlib(std::string(kHeader) + kBounds, net), ParseError);
    CHECK_THROWS_AS((void)parse_vnnlib(std::string(kHeader) + "(assert (>= X_0 1))\n(assert (<= X_0 -1))\n"
                                       "(assert (>= X_1 -2))\n(assert (<= X_1 2))\n(assert (>= Y_0 0))\n", net),
                    ParseError);
  }
  SUBCASE("comments and whitespace") {
    const auto p = parse_prop("; trailing comment\n(assert\n  (>= Y_0 ; inline\n   0.5))\n");
    CHECK(p.negated_output[0][0] == output_at_least(0.5));
  }
}

TEST_CASE("DNF conversion preserves the formula") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const OutputFormula f = random_formula(rng, 2, 3);
    const auto dnf = to_dnf(f);
    for (int s = 0; s < 5; ++s) {
      Eigen::VectorXd y(2);
      y << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
      CHECK(dnf_holds(dnf, y) == f.holds(y));
    }
  }
}

TEST_CASE("property round trip") {
  Rng rng(4);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const VerificationProblem p = generate_random_problem({}, seed);
    const std::string once = serialize_vnnlib(p);
    const VerificationProblem back = parse_vnnlib(once, p.net);
    CHECK(serialize_vnnlib(back) == once);
    CHECK(back.input_box == p.input_box);
    CHECK(back.negated_output == p.negated_output);
  }
  const auto p = parse_prop("(assert (or (and (>= Y_0 1) (< Y_0 2)) (and (<= Y_0 -3))))\n");
  const VerificationProblem back = parse_vnnlib(serialize_vnnlib(p), p.net);
  CHECK(back.negated_output == p.negated_output);
}

TEST_CASE("witness validation") {
  const VerificationProblem valid = valid_problem();
  const VerificationProblem invalid = invalid_problem();
  CHECK_FALSE(valid.is_counterexample(std::vector<double>{1.0, 2.0}));
  CHECK(invalid.is_counterexample(std::vector<double>{1.0, 2.0}));
  CHECK_FALSE(invalid.is_counterexample(std::vector<double>{1.5, 0.0})); // outside the box
  CHECK_FALSE(invalid.is_counterexample(std::vector<double>{0.0}));
}
