#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "relusat/spec_io.hpp"

namespace relusat {

struct AttackConfig {
  std::size_t samples = 1000;
  std::size_t pgd_steps = 50;
  std::size_t pgd_restarts = 5;
  double step_size = 0.1; // fraction of each box side
  std::uint64_t seed = 0;

  /// Throws InputError on zero budgets or a step outside (0, 1].
  void validate() const;
};

/// Largest over disjuncts of the smallest signed slack of its constraints;
/// non-negative when the closed counterexample condition holds at `outputs`.
[[nodiscard]] double violation_margin(const VerificationProblem& problem, const Eigen::VectorXd& outputs);

/// Uniform sampling in the input box. Returns the first exact counterexample.
[[nodiscard]] std::optional<std::vector<double>> random_attack(const VerificationProblem& problem,
                                                               const AttackConfig& cfg);

using IterateObserver = std::function<void(const Eigen::VectorXd&)>;

/// Sign-gradient ascent on violation_margin from random starts, projected
/// onto the box after every step. Every iterate is checked exactly.
[[nodiscard]] std::optional<std::vector<double>> pgd_attack(const VerificationProblem& problem,
                                                            const AttackConfig& cfg,
                                                            const IterateObserver& observer = {});

} // namespace relusat
