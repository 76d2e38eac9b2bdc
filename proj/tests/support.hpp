#pragma once

#include <string>
#include <vector>

#include "relusat/solver.hpp"
#include "relusat/spec_io.hpp"

namespace relusat::testing {

inline std::string fixture(const std::string& name) { return std::string(RELUSAT_FIXTURE_DIR) + "/" + name; }

/// Two inputs, hidden neurons n3 = relu(-0.5 x1 + 0.5 x2 + 1), n4 = relu(x1 + x2 - 1),
/// output -n3 + n4 - 1.
inline Network two_neuron_net() { return parse_network(read_text_file(fixture("two_neuron.json"))); }

/// Counterexample condition output >= 0 (no counterexample exists).
inline VerificationProblem valid_problem() {
  return parse_vnnlib(read_text_file(fixture("valid.vnnlib")), two_neuron_net());
}

/// Counterexample condition output <= 0 (every input is a counterexample).
inline VerificationProblem invalid_problem() {
  return parse_vnnlib(read_text_file(fixture("invalid.vnnlib")), two_neuron_net());
}

inline LinearConstraint output_at_least(double rhs) {
  LinearConstraint c;
  c.coeffs = Eigen::VectorXd::Ones(1);
  c.op = Cmp::ge;
  c.rhs = rhs;
  return c;
}

/// Seed whose first phase draw is negative; with it the reference run
/// branches on the second hidden neuron inactive first.
inline constexpr std::uint64_t kReferenceSeed = RELUSAT_REFERENCE_SEED;

/// Reference run on the two-neuron network: interval bounds and an LP that
/// leaves undecided neurons unconstrained.
inline SolverConfig reference_config() {
  SolverConfig cfg;
  cfg.seed = kReferenceSeed;
  cfg.run_attacks = false;
  cfg.theory.abstraction = AbstractionMode::interval;
  cfg.theory.relaxation = LpRelaxation::none;
  cfg.check_invariants = true;
  return cfg;
}

} // namespace relusat::testing
