#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "relusat/lp.hpp"
#include "relusat/spec_io.hpp"
#include "relusat/verdict.hpp"

namespace relusat {

/// Raised when a network has too many ReLU neurons to enumerate.
class OracleRefusal : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kOracleMaxNeurons = 20;

/// a . x + b > 0 (strict) or a . x + b >= 0.
struct HalfSpace {
  Eigen::VectorXd a;
  double b = 0.0;
  bool strict = false;

  [[nodiscard]] bool holds(const Eigen::VectorXd& x) const;
};

/// Inputs whose activation pattern is `pattern`, and the network restricted
/// to them: outputs = out_weights . x + out_bias. Bit i of the pattern is the
/// neuron with flat index i; set means active (z > 0), clear means z <= 0.
struct PatternRegion {
  std::vector<HalfSpace> constraints;
  Eigen::MatrixXd out_weights;
  Eigen::VectorXd out_bias;
};

[[nodiscard]] PatternRegion pattern_region(const Network& net, std::uint64_t pattern);

/// Activation pattern of x, boundary neurons (z = 0) counted inactive.
[[nodiscard]] std::uint64_t pattern_of(const Network& net, const Eigen::VectorXd& x);

/// Exact decision by enumerating every activation pattern and every disjunct.
/// Throws OracleRefusal when the network has more than kOracleMaxNeurons.
[[nodiscard]] Verdict enumerate_verify(const VerificationProblem& problem, const lp::SimplexOptions& options = {});

struct ShapeSpec {
  std::size_t min_inputs = 2, max_inputs = 4;
  std::size_t min_layers = 1, max_layers = 3;
  std::size_t min_width = 2, max_width = 6;
  std::size_t max_neurons = 12;
  std::size_t min_outputs = 1, max_outputs = 3;
};

/// Random network with weights and biases uniform in [-1, 1], a random input
/// box and one output halfspace as counterexample condition. The threshold
/// sits near the sampled maximum so both verdicts occur.
[[nodiscard]] VerificationProblem generate_random_problem(const ShapeSpec& shape, std::uint64_t seed);

} // namespace relusat
