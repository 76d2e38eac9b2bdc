#include "relusat/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relusat {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Phase phase_of(std::span<const Phase> phases, std::size_t flat) {
  return phases.empty() ? Phase::unassigned : phases[flat];
}

/// Clamps decided pre-activation bounds to their sign; returns false when the
/// phase is impossible (active needs z > 0, inactive needs z <= 0).
bool clamp_to_phase(Interval& iv, Phase phase) {
  if (phase == Phase::active) {
    if (iv.hi < 0.0) return false;
    iv.lo = std::max(iv.lo, 0.0);
  } else if (phase == Phase::inactive) {
    if (iv.lo > 0.0) return false;
    iv.hi = std::min(iv.hi, 0.0);
  }
  return true;
}

Interval relu_interval(const Interval& z, Phase phase) {
  if (phase == Phase::inactive) return {0.0, 0.0};
  return {std::max(z.lo, 0.0), std::max(z.hi, 0.0)};
}

/// Linear relaxation y in [lo_slope*z + lo_icpt, up_slope*z + up_icpt].
struct LayerRelaxation {
  VectorXd up_slope, up_icpt, lo_slope, lo_icpt;
};

LayerRelaxation relax_layer(const std::vector<Interval>& pre, const Layer& layer, std::span<const Phase> phases,
                            std::size_t offset) {
  const auto n = static_cast<Eigen::Index>(pre.size());
  LayerRelaxation r{VectorXd::Ones(n), VectorXd::Zero(n), VectorXd::Ones(n), VectorXd::Zero(n)};
  if (layer.activation != Activation::relu) return r;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Interval& z = pre[static_cast<std::size_t>(i)];
    const Phase phase = phase_of(phases, offset + static_cast<std::size_t>(i));
    if (phase == Phase::active || (phase == Phase::unassigned && z.lo >= 0.0)) {
      continue; // y = z
    }
    if (phase == Phase::inactive || z.hi <= 0.0) {
      r.up_slope(i) = r.lo_slope(i) = 0.0;
      continue;
    }
    const double slope = z.hi / (z.hi - z.lo);
    r.up_slope(i) = slope;
    r.up_icpt(i) = -slope * z.lo;
    r.lo_slope(i) = z.hi >= -z.lo ? 1.0 : 0.0;
  }
  return r;
}

class Backsubstitution {
public:
  Backsubstitution(const Network& net, const Box& box, const std::vector<LayerRelaxation>& relax)
      : net_(net), relax_(relax) {
    const auto d = static_cast<Eigen::Index>(box.dim());
    lo_ = Eigen::Map<const VectorXd>(box.lower.data(), d);
    hi_ = Eigen::Map<const VectorXd>(box.upper.data(), d);
  }

  /// Bounds of expr . y_k + c, where y_k is the post-activation of layer k
  /// (1-based; k = 0 is the input). Relaxations of layers <= k must exist.
  void bound_post(std::size_t k, MatrixXd upper, VectorXd cu, MatrixXd lower, VectorXd cl, VectorXd& out_lo,
                  VectorXd& out_hi) const {
    while (k > 0) {
      relax_step(relax_[k - 1], upper, cu, true);
      relax_step(relax_[k - 1], lower, cl, false);
      substitute(k, upper, cu);
      substitute(k, lower, cl);
      --k;
    }
    out_hi = upper.cwiseMax(0.0) * hi_ + upper.cwiseMin(0.0) * lo_ + cu;
    out_lo = lower.cwiseMax(0.0) * lo_ + lower.cwiseMin(0.0) * hi_ + cl;
  }

  /// Bounds of every pre-activation of layer k.
  void bound_pre_layer(std::size_t k, VectorXd& out_lo, VectorXd& out_hi) const {
    const Layer& layer = net_.layers()[k - 1];
    const MatrixXd& w = layer.weights;
    bound_post(k - 1, w, layer.bias, w, layer.bias, out_lo, out_hi);
  }

private:
  /// Replace y_k by its relaxation in terms of z_k. For the upper bound a
  /// positive coefficient takes the upper relaxation; the lower bound mirrors.
  static void relax_step(const LayerRelaxation& r, MatrixXd& expr, VectorXd& c, bool upper) {
    for (Eigen::Index j = 0; j < expr.cols(); ++j) {
      for (Eigen::Index i = 0; i < expr.rows(); ++i) {
        const double a = expr(i, j);
        if (a == 0.0) continue;
        const bool use_upper = (a > 0.0) == upper;
        const double slope = use_upper ? r.up_slope(j) : r.lo_slope(j);
        const double icpt = use_upper ? r.up_icpt(j) : r.lo_icpt(j);
        c(i) += a * icpt;
        expr(i, j) = a * slope;
      }
    }
  }

  /// z_k = W_k y_{k-1} + b_k
  void substitute(std::size_t k, MatrixXd& expr, VectorXd& c) const {
    const Layer& layer = net_.layers()[k - 1];
    c += expr * layer.bias;
    expr = expr * layer.weights;
  }

  const Network& net_;
  const std::vector<LayerRelaxation>& relax_;
  VectorXd lo_, hi_;
};

void interval_pass(const Network& net, std::span<const Phase> phases, const Box& box, NeuronBounds& out) {
  std::vector<Interval> value(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i) value[i] = {box.lower[i], box.upper[i]};
  out.pre.clear();
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const Layer& layer = net.layers()[k];
    const std::size_t offset = net.layer_offset(static_cast<int>(k + 1));
    std::vector<Interval> pre(static_cast<std::size_t>(layer.weights.rows()));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      double lo = layer.bias(i);
      double hi = layer.bias(i);
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        const double w = layer.weights(i, j);
        const Interval& v = value[static_cast<std::size_t>(j)];
        if (w >= 0.0) {
          lo += w * v.lo;
          hi += w * v.hi;
        } else {
          lo += w * v.hi;
          hi += w * v.lo;
        }
      }
      pre[static_cast<std::size_t>(i)] = {lo, hi};
    }
    std::vector<Interval> post(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) {
      if (layer.activation == Activation::relu) {
        const Phase phase = phase_of(phases, offset + i);
        if (!clamp_to_phase(pre[i], phase)) out.empty = true;
        post[i] = relu_interval(pre[i], phase);
      } else {
        post[i] = pre[i];
      }
    }
    out.pre.push_back(std::move(pre));
    value = std::move(post);
  }
  out.output = std::move(value);
}

void polytope_pass(const Network& net, std::span<const Phase> phases, const Box& box, const NeuronBounds* hint,
                   NeuronBounds& out, const Conjunction* constraints) {
  std::vector<LayerRelaxation> relax;
  Backsubstitution bs(net, box, relax);
  out.pre.clear();
  for (std::size_t k = 1; k <= net.num_layers(); ++k) {
    const Layer& layer = net.layers()[k - 1];
    const std::size_t offset = net.layer_offset(static_cast<int>(k));
    VectorXd lo, hi;
    bs.bound_pre_layer(k, lo, hi);
    std::vector<Interval> pre(static_cast<std::size_t>(lo.size()));
    for (std::size_t i = 0; i < pre.size(); ++i) {
      pre[i] = {lo(static_cast<Eigen::Index>(i)), hi(static_cast<Eigen::Index>(i))};
      if (hint != nullptr) pre[i] = pre[i].intersect(hint->pre[k - 1][i]);
      if (layer.activation == Activation::relu && !clamp_to_phase(pre[i], phase_of(phases, offset + i))) {
        out.empty = true;
      }
    }
    relax.push_back(relax_layer(pre, layer, phases, offset));
    out.pre.push_back(std::move(pre));
  }

  const std::size_t last = net.num_layers();
  const auto m = static_cast<Eigen::Index>(net.output_dim());
  {
    const MatrixXd id = MatrixXd::Identity(m, m);
    VectorXd lo, hi;
    bs.bound_post(last, id, VectorXd::Zero(m), id, VectorXd::Zero(m), lo, hi);
    out.output.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
      Interval iv{lo(j), hi(j)};
      if (hint != nullptr) iv = iv.intersect(hint->output[static_cast<std::size_t>(j)]);
      out.output[static_cast<std::size_t>(j)] = iv;
    }
  }
  if (constraints != nullptr && !constraints->empty()) {
    const auto rows = static_cast<Eigen::Index>(constraints->size());
    MatrixXd c(rows, m);
    for (Eigen::Index r = 0; r < rows; ++r) c.row(r) = (*constraints)[static_cast<std::size_t>(r)].coeffs.transpose();
    VectorXd lo, hi;
    bs.bound_post(last, c, VectorXd::Zero(rows), c, VectorXd::Zero(rows), lo, hi);
    out.constraints.resize(static_cast<std::size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) out.constraints[static_cast<std::size_t>(r)] = {lo(r), hi(r)};
  }
}

Interval linear_from_outputs(const Eigen::VectorXd& coeffs, const std::vector<Interval>& output) {
  Interval iv{0.0, 0.0};
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    const double c = coeffs(j);
    const Interval& o = output[static_cast<std::size_t>(j)];
    iv.lo += c >= 0.0 ? c * o.lo : c * o.hi;
    iv.hi += c >= 0.0 ? c * o.hi : c * o.lo;
  }
  return iv;
}

} // namespace

NeuronBounds propagate_bounds(const Network& net, std::span<const Phase> phases, const Box& box, AbstractionMode mode,
                              const Conjunction* constraints) {
  if (!phases.empty() && phases.size() != net.relu_count()) {
    throw InputError("phase vector length does not match the number of ReLU neurons");
  }
  if (box.dim() != net.input_dim()) {
    throw InputError("box dimension does not match the network");
  }
  NeuronBounds interval;
  if (mode != AbstractionMode::polytope) {
    interval_pass(net, phases, box, interval);
  }
  NeuronBounds result;
  if (mode == AbstractionMode::interval) {
    result = std::move(interval);
  } else {
    polytope_pass(net, phases, box, mode == AbstractionMode::both ? &interval : nullptr, result, constraints);
    result.empty = result.empty || interval.empty;
  }

  if (constraints != nullptr) {
    std::vector<Interval> from_outputs;
    for (const auto& c : *constraints) from_outputs.push_back(linear_from_outputs(c.coeffs, result.output));
    if (result.constraints.size() == from_outputs.size()) {
      for (std::size_t i = 0; i < from_outputs.size(); ++i) {
        result.constraints[i] = result.constraints[i].intersect(from_outputs[i]);
      }
    } else {
      result.constraints = std::move(from_outputs);
    }
  }
  return result;
}

double conjunction_margin(const Conjunction& constraints, const NeuronBounds& bounds) {
  if (bounds.empty) return -std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const LinearConstraint& c = constraints[i];
    const Interval iv =
        i < bounds.constraints.size() ? bounds.constraints[i] : linear_from_outputs(c.coeffs, bounds.output);
    const double best = (c.op == Cmp::ge || c.op == Cmp::gt) ? iv.hi - c.rhs : c.rhs - iv.lo;
    margin = std::min(margin, best);
  }
  return margin;
}

} // namespace relusat
