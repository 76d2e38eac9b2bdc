#include "relusat/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <optional>

#include "relusat/rng.hpp"

namespace relusat {

bool HalfSpace::holds(const Eigen::VectorXd& x) const {
  const double v = a.dot(x) + b;
  return strict ? v > 0.0 : v >= 0.0;
}

PatternRegion pattern_region(const Network& net, std::uint64_t pattern) {
  const auto d = static_cast<Eigen::Index>(net.input_dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
  PatternRegion region;
  std::size_t flat = 0;
  for (const Layer& layer : net.layers()) {
    Eigen::MatrixXd za = layer.weights * a;
    Eigen::VectorXd zc = layer.weights * c + layer.bias;
    if (layer.activation == Activation::relu) {
      for (Eigen::Index i = 0; i < za.rows(); ++i, ++flat) {
        const bool active = ((pattern >> flat) & 1U) != 0;
        if (active) {
          region.constraints.push_back({za.row(i).transpose(), zc(i), true});
        } else {
          region.constraints.push_back({-za.row(i).transpose(), -zc(i), false});
          za.row(i).setZero();
          zc(i) = 0.0;
        }
      }
    }
    a = std::move(za);
    c = std::move(zc);
  }
  region.out_weights = std::move(a);
  region.out_bias = std::move(c);
  return region;
}

std::uint64_t pattern_of(const Network& net, const Eigen::VectorXd& x) {
  const Network::Evaluation ev = net.forward(x);
  std::uint64_t pattern = 0;
  std::size_t flat = 0;
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    if (net.layers()[k].activation != Activation::relu) continue;
    for (Eigen::Index i = 0; i < ev.pre_activations[k].size(); ++i, ++flat) {
      if (ev.pre_activations[k](i) > 0.0) pattern |= std::uint64_t{1} << flat;
    }
  }
  return pattern;
}

namespace {

constexpr double kMargin = 1e-9;

/// Feasible point of {x in box : constraints} where strict constraints hold
/// with positive slack, preferring points with slack on every constraint.
std::optional<Eigen::VectorXd> strict_point(const Box& box, const std::vector<HalfSpace>& cons,
                                            const lp::SimplexOptions& options) {
  lp::LinProgram base;
  for (std::size_t i = 0; i < box.dim(); ++i) base.add_variable("x" + std::to_string(i), box.lower[i], box.upper[i]);
  const auto add = [](lp::LinProgram& p, const HalfSpace& h, int tau) {
    std::vector<lp::Term> terms;
    for (Eigen::Index j = 0; j < h.a.size(); ++j) {
      if (h.a(j) != 0.0) terms.push_back({static_cast<int>(j), h.a(j)});
    }
    if (tau >= 0) terms.push_back({tau, -1.0});
    p.add_row(std::move(terms), lp::Sense::ge, -h.b);
  };
  for (const HalfSpace& h : cons) add(base, h, -1);
  const lp::Solution closed = lp::solve(base, options);
  if (!closed.feasible()) return std::nullopt;

  const auto to_vec = [&](const std::vector<double>& pt) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(box.dim()));
    for (std::size_t i = 0; i < box.dim(); ++i) x(static_cast<Eigen::Index>(i)) = pt[i];
    return x;
  };
  const auto margin = [&](bool strict_only) -> std::optional<Eigen::VectorXd> {
    lp::LinProgram p = base;
    const int tau = p.add_variable("margin", -lp::inf, 1.0);
    for (const HalfSpace& h : cons) {
      if (!strict_only || h.strict) add(p, h, tau);
    }
    p.set_objective({{tau, 1.0}}, true);
    const lp::Solution s = lp::solve(p, options);
    if (s.status == lp::Status::optimal && s.objective > kMargin) return to_vec(s.point);
    return std::nullopt;
  };

  if (auto x = margin(false)) return x;
  if (std::none_of(cons.begin(), cons.end(), [](const HalfSpace& h) { return h.strict; })) {
    return to_vec(closed.point);
  }
  return margin(true);
}

HalfSpace output_halfspace(const LinearConstraint& c, const PatternRegion& region) {
  // coeffs . (W x + b) op rhs, written as a . x + b (>|>=) 0
  Eigen::VectorXd a = region.out_weights.transpose() * c.coeffs;
  double b = c.coeffs.dot(region.out_bias) - c.rhs;
  if (c.op == Cmp::le || c.op == Cmp::lt) {
    a = -a;
    b = -b;
  }
  return {std::move(a), b, is_strict(c.op)};
}

} // namespace

Verdict enumerate_verify(const VerificationProblem& problem, const lp::SimplexOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t h = problem.net.relu_count();
  if (h > kOracleMaxNeurons) {
    throw OracleRefusal("network has " + std::to_string(h) + " ReLU neurons; enumeration is limited to " +
                        std::to_string(kOracleMaxNeurons));
  }
  Verdict verdict;
  verdict.kind = VerdictKind::unsat;
  bool unvalidated = false;
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << h); ++pattern) {
    const PatternRegion region = pattern_region(problem.net, pattern);
    for (const Conjunction& disjunct : problem.negated_output) {
      std::vector<HalfSpace> cons = region.constraints;
      for (const LinearConstraint& c : disjunct) cons.push_back(output_halfspace(c, region));
      const auto x = strict_point(problem.input_box, cons, options);
      if (!x) continue;
      std::vector<double> w(x->data(), x->data() + x->size());
      if (problem.is_counterexample(w)) {
        verdict.kind = VerdictKind::sat;
        verdict.witness = std::move(w);
        verdict.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return verdict;
      }
      unvalidated = true;
    }
  }
  if (unvalidated) {
    verdict.kind = VerdictKind::unknown;
    verdict.reason = "a feasible pattern produced no exactly validated witness";
  }
  verdict.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return verdict;
}

VerificationProblem generate_random_problem(const ShapeSpec& shape, std::uint64_t seed) {
  Rng rng(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  const auto pick = [&](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.next() % (hi - lo + 1));
  };
  const std::size_t inputs = pick(shape.min_inputs, shape.max_inputs);
  std::vector<std::size_t> widths(pick(shape.min_layers, shape.max_layers));
  for (auto& w : widths) w = pick(shape.min_width, shape.max_width);
  for (;;) {
    std::size_t total = 0;
    for (auto w : widths) total += w;
    if (total <= shape.max_neurons) break;
    auto widest = std::max_element(widths.begin(), widths.end());
    if (*widest <= shape.min_width) {
      widths.pop_back();
    } else {
      --*widest;
    }
  }
  const std::size_t outputs = pick(shape.min_outputs, shape.max_outputs);

  std::vector<Layer> layers;
  std::size_t prev = inputs;
  const auto dense = [&](std::size_t rows, std::size_t cols, Activation act) {
    Layer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows), act};
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) l.weights(i, j) = rng.uniform(-1.0, 1.0);
      l.bias(i) = rng.uniform(-1.0, 1.0);
    }
    return l;
  };
  for (std::size_t w : widths) {
    layers.push_back(dense(w, prev, Activation::relu));
    prev = w;
  }
  layers.push_back(dense(outputs, prev, Activation::identity));
  Network net(inputs, std::move(layers));

  Box box;
  for (std::size_t i = 0; i < inputs; ++i) {
    const double lo = rng.uniform(-1.0, 0.0);
    box.lower.push_back(lo);
    box.upper.push_back(lo + rng.uniform(0.5, 2.0));
  }

  LinearConstraint c;
  c.coeffs.resize(static_cast<Eigen::Index>(outputs));
  for (Eigen::Index j = 0; j < c.coeffs.size(); ++j) c.coeffs(j) = rng.uniform(-1.0, 1.0);
  double smin = std::numeric_limits<double>::infinity();
  double smax = -smin;
  std::vector<double> x(inputs);
  for (int s = 0; s < 200; ++s) {
    for (std::size_t i = 0; i < inputs; ++i) x[i] = rng.uniform(box.lower[i], box.upper[i]);
    const double v = c.coeffs.dot(net.forward(x).outputs);
    smin = std::min(smin, v);
    smax = std::max(smax, v);
  }
  const double delta = rng.uniform(-0.15, 0.25);
  c.rhs = smax + delta * std::max(smax - smin, 1e-3);
  c.op = rng.coin() ? Cmp::ge : Cmp::gt;
  return VerificationProblem(std::move(net), std::move(box), std::vector<Conjunction>{{c}});
}

} // namespace relusat
