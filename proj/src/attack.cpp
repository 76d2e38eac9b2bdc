#include "relusat/attack.hpp"

#include <algorithm>
#include <limits>

#include "relusat/rng.hpp"

namespace relusat {

namespace {

Eigen::VectorXd sample_box(const Box& box, Rng& rng) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(box.dim()));
  for (std::size_t i = 0; i < box.dim(); ++i) x(static_cast<Eigen::Index>(i)) = rng.uniform(box.lower[i], box.upper[i]);
  return x;
}

std::optional<std::vector<double>> check(const VerificationProblem& problem, const Eigen::VectorXd& x) {
  std::vector<double> v(x.data(), x.data() + x.size());
  if (problem.is_counterexample(v)) return v;
  return std::nullopt;
}

/// d(margin)/d(outputs) at the active disjunct and constraint.
Eigen::VectorXd margin_direction(const VerificationProblem& problem, const Eigen::VectorXd& y) {
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(y.size());
  for (const Conjunction& conj : problem.negated_output) {
    double worst = std::numeric_limits<double>::infinity();
    const LinearConstraint* arg = nullptr;
    for (const LinearConstraint& c : conj) {
      const double s = c.slack(y);
      if (s < worst) {
        worst = s;
        arg = &c;
      }
    }
    if (worst > best) {
      best = worst;
      if (arg == nullptr) {
        dir.setZero();
      } else {
        dir = (arg->op == Cmp::ge || arg->op == Cmp::gt) ? arg->coeffs : Eigen::VectorXd(-arg->coeffs);
      }
    }
  }
  return dir;
}

} // namespace

void AttackConfig::validate() const {
  if (samples == 0 || pgd_steps == 0 || pgd_restarts == 0) throw InputError("attack budgets must be positive");
  if (!(step_size > 0.0 && step_size <= 1.0)) throw InputError("attack step size must lie in (0, 1]");
}

double violation_margin(const VerificationProblem& problem, const Eigen::VectorXd& outputs) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Conjunction& conj : problem.negated_output) {
    double worst = std::numeric_limits<double>::infinity();
    for (const LinearConstraint& c : conj) worst = std::min(worst, c.slack(outputs));
    best = std::max(best, worst);
  }
  return best;
}

std::optional<std::vector<double>> random_attack(const VerificationProblem& problem, const AttackConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    if (auto w = check(problem, sample_box(problem.input_box, rng))) return w;
  }
  return std::nullopt;
}

std::optional<std::vector<double>> pgd_attack(const VerificationProblem& problem, const AttackConfig& cfg,
                                              const IterateObserver& observer) {
  cfg.validate();
  const Box& box = problem.input_box;
  const auto d = static_cast<Eigen::Index>(box.dim());
  const Eigen::VectorXd lo = Eigen::Map<const Eigen::VectorXd>(box.lower.data(), d);
  const Eigen::VectorXd hi = Eigen::Map<const Eigen::VectorXd>(box.upper.data(), d);
  const Eigen::VectorXd step = cfg.step_size * (hi - lo);

  Rng rng(cfg.seed ^ 0x5DEECE66DULL);
  for (std::size_t r = 0; r < cfg.pgd_restarts; ++r) {
    Eigen::VectorXd x = sample_box(box, rng);
    for (std::size_t t = 0; t <= cfg.pgd_steps; ++t) {
      if (observer) observer(x);
      if (auto w = check(problem, x)) return w;
      if (t == cfg.pgd_steps) break;
      const Eigen::VectorXd y = problem.net.forward(x).outputs;
      const Eigen::VectorXd g = problem.net.gradient(x, margin_direction(problem, y));
      x = (x + step.cwiseProduct(g.unaryExpr([](double v) { return double((v > 0.0) - (v < 0.0)); })))
              .cwiseMax(lo)
              .cwiseMin(hi);
    }
  }
  return std::nullopt;
}

} // namespace relusat
