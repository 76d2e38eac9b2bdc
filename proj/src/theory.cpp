#include "relusat/theory.hpp"

#include <algorithm>
#include <optional>

namespace relusat {

namespace {

using lp::Sense;
using lp::Term;

lp::Sense closed_sense(Cmp op) { return (op == Cmp::ge || op == Cmp::gt) ? Sense::ge : Sense::le; }

std::vector<Term> output_terms(const LpEncoding& enc, const LinearConstraint& c) {
  std::vector<Term> terms;
  for (Eigen::Index j = 0; j < c.coeffs.size(); ++j) {
    if (c.coeffs(j) != 0.0) terms.push_back({enc.output[static_cast<std::size_t>(j)], c.coeffs(j)});
  }
  return terms;
}

/// Adds y for one undecided ReLU neuron with pre-activation variable z.
int relax_undecided(lp::LinProgram& p, int z, const Interval* range, LpRelaxation relaxation, const std::string& name) {
  if (relaxation == LpRelaxation::none) return p.add_variable(name);
  const int y = p.add_variable(name, 0.0, lp::inf);
  p.add_row({{y, 1.0}, {z, -1.0}}, Sense::ge, 0.0);
  if (range == nullptr) return y;
  p.set_bounds(z, range->lo, range->hi);
  if (relaxation != LpRelaxation::triangle) return y;
  if (range->hi <= 0.0) {
    p.add_row({{y, 1.0}}, Sense::le, 0.0);
  } else if (range->lo >= 0.0) {
    p.add_row({{y, 1.0}, {z, -1.0}}, Sense::le, 0.0);
  } else {
    const double slope = range->hi / (range->hi - range->lo);
    p.add_row({{y, 1.0}, {z, -slope}}, Sense::le, -slope * range->lo);
  }
  return y;
}

/// Maximizes the smallest slack of the disjunct at a point of the LP. Strict
/// constraints need a positive slack; closed ones accept zero.
std::optional<std::vector<double>> find_witness(const LpEncoding& enc, const Conjunction& disjunct,
                                                const std::vector<double>& feasible_point, const TheoryConfig& cfg) {
  const auto extract = [&](const std::vector<double>& point) {
    std::vector<double> x;
    for (int id : enc.input) x.push_back(point[static_cast<std::size_t>(id)]);
    return x;
  };
  const auto solve_margin = [&](bool strict_only) -> std::optional<lp::Solution> {
    lp::LinProgram p = enc.program;
    const int tau = p.add_variable("margin", -lp::inf, 1.0);
    for (const LinearConstraint& c : disjunct) {
      if (strict_only && !is_strict(c.op)) continue;
      std::vector<Term> terms = output_terms(enc, c);
      const bool ge = closed_sense(c.op) == Sense::ge;
      terms.push_back({tau, ge ? -1.0 : 1.0});
      p.add_row(std::move(terms), closed_sense(c.op), c.rhs);
    }
    p.set_objective({{tau, 1.0}}, true);
    lp::Solution s = lp::solve(p, cfg.simplex);
    if (!s.feasible()) return std::nullopt;
    if (s.status == lp::Status::unbounded) s.objective = 1.0;
    return s;
  };

  const bool has_strict = std::any_of(disjunct.begin(), disjunct.end(), [](const auto& c) { return is_strict(c.op); });
  if (const auto s = solve_margin(false); s && s->objective > cfg.strict_margin) return extract(s->point);
  if (!has_strict) return extract(feasible_point);
  if (const auto s = solve_margin(true); s && s->objective > cfg.strict_margin) return extract(s->point);
  return std::nullopt;
}

bool output_check_fails(const LinearConstraint& c, const Interval& range) {
  constexpr double tol = 1e-9;
  if (c.op == Cmp::ge || c.op == Cmp::gt) return range.hi < c.rhs - tol;
  return range.lo > c.rhs + tol;
}

} // namespace

LpEncoding build_lp(const Network& net, const Box& box, std::span<const Phase> phases, const Conjunction& disjunct,
                    const NeuronBounds* bounds, LpRelaxation relaxation) {
  if (box.dim() != net.input_dim()) throw InputError("box dimension does not match the network");
  if (!phases.empty() && phases.size() != net.relu_count()) {
    throw InputError("phase vector length does not match the number of ReLU neurons");
  }
  LpEncoding enc;
  lp::LinProgram& p = enc.program;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    enc.input.push_back(p.add_variable("x" + std::to_string(i), box.lower[i], box.upper[i]));
  }
  const bool use_bounds = bounds != nullptr && relaxation != LpRelaxation::none;

  std::vector<int> prev = enc.input;
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const Layer& layer = net.layers()[k];
    const auto layer_no = static_cast<int>(k + 1);
    std::vector<int> pre;
    std::vector<int> post;
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      const std::string tag = std::to_string(layer_no) + "_" + std::to_string(i);
      const int z = p.add_variable("z" + tag);
      std::vector<Term> terms{{z, 1.0}};
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        const double w = layer.weights(i, j);
        if (w != 0.0) terms.push_back({prev[static_cast<std::size_t>(j)], -w});
      }
      p.add_row(std::move(terms), Sense::eq, layer.bias(i));
      pre.push_back(z);

      if (layer.activation != Activation::relu) {
        post.push_back(z);
        continue;
      }
      const std::size_t flat = net.layer_offset(layer_no) + static_cast<std::size_t>(i);
      const Phase phase = phases.empty() ? Phase::unassigned : phases[flat];
      const Interval* range = use_bounds ? &bounds->pre[k][static_cast<std::size_t>(i)] : nullptr;
      if (phase == Phase::active) {
        p.add_row({{z, 1.0}}, Sense::ge, 0.0);
        if (range != nullptr) p.set_bounds(z, range->lo, range->hi);
        post.push_back(z); // y = z
      } else if (phase == Phase::inactive) {
        p.add_row({{z, 1.0}}, Sense::le, 0.0);
        if (range != nullptr) p.set_bounds(z, range->lo, range->hi);
        post.push_back(p.add_variable("y" + tag, 0.0, 0.0));
      } else {
        post.push_back(relax_undecided(p, z, range, relaxation, "y" + tag));
      }
    }
    enc.pre.push_back(std::move(pre));
    enc.post.push_back(post);
    prev = std::move(post);
  }
  enc.output = prev;

  for (const LinearConstraint& c : disjunct) {
    if (static_cast<std::size_t>(c.coeffs.size()) != enc.output.size()) {
      throw InputError("constraint dimension does not match the network outputs");
    }
    p.add_row(output_terms(enc, c), closed_sense(c.op), c.rhs);
  }
  return enc;
}

Box tighten_input_bounds(const LpEncoding& encoding, const Box& box, std::size_t threshold,
                         const lp::SimplexOptions& options) {
  if (box.dim() > threshold) return box;
  Box out = box;
  lp::LinProgram p = encoding.program;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    const int x = encoding.input[i];
    p.set_objective({{x, 1.0}}, false);
    const lp::Solution lo = lp::solve(p, options);
    if (!lo.feasible()) return box;
    if (lo.status == lp::Status::optimal) out.lower[i] = std::clamp(lo.objective, box.lower[i], box.upper[i]);
    p.set_objective({{x, 1.0}}, true);
    const lp::Solution hi = lp::solve(p, options);
    if (hi.status == lp::Status::optimal) out.upper[i] = std::clamp(hi.objective, box.lower[i], box.upper[i]);
    if (out.lower[i] > out.upper[i]) out.lower[i] = out.upper[i] = 0.5 * (out.lower[i] + out.upper[i]);
  }
  return out;
}

std::vector<Phase> phases_from_trail(const Trail& trail) {
  std::vector<Phase> phases(trail.num_vars(), Phase::unassigned);
  for (const TrailEntry& e : trail.entries()) {
    phases[e.lit.var()] = e.lit.positive() ? Phase::active : Phase::inactive;
  }
  return phases;
}

std::vector<Lit> negated_trail(const Trail& trail) {
  std::vector<Lit> out;
  out.reserve(trail.size());
  for (const TrailEntry& e : trail.entries()) out.push_back(~e.lit);
  return out;
}

DeductionResult deduction(const Network& net, const Box& box, const Conjunction& disjunct, const Trail& trail,
                          const TheoryConfig& config) {
  if (trail.num_vars() != net.relu_count()) throw InputError("trail does not match the network's ReLU count");
  DeductionResult res;
  res.box = box;
  const auto reject = [&](const char* source) {
    res.kind = DeductionResult::Kind::infeasible;
    res.conflict = negated_trail(trail);
    res.source = source;
    return res;
  };

  const std::vector<Phase> phases = phases_from_trail(trail);
  res.bounds = propagate_bounds(net, phases, box, config.abstraction, &disjunct);
  if (res.bounds.empty) return reject("bounds");

  const LpEncoding enc = build_lp(net, box, phases, disjunct, &res.bounds, config.relaxation);
  const lp::Solution sol = lp::solve(enc.program, config.simplex);
  if (!sol.feasible()) return reject("lp");

  if (trail.is_total()) {
    auto witness = find_witness(enc, disjunct, sol.point, config);
    if (!witness) return reject("lp");
    for (std::size_t i = 0; i < witness->size(); ++i) {
      (*witness)[i] = std::clamp((*witness)[i], box.lower[i], box.upper[i]);
    }
    res.kind = DeductionResult::Kind::sat_total;
    res.witness = std::move(*witness);
    res.source = "lp";
    return res;
  }

  res.box = tighten_input_bounds(enc, box, config.tighten_threshold, config.simplex);
  res.bounds = propagate_bounds(net, phases, res.box, config.abstraction, &disjunct);
  if (res.bounds.empty) return reject("bounds");
  for (std::size_t i = 0; i < disjunct.size(); ++i) {
    if (output_check_fails(disjunct[i], res.bounds.constraints[i])) return reject("output");
  }

  const std::vector<Lit> negated = negated_trail(trail);
  for (Var v = 0; v < trail.num_vars(); ++v) {
    if (trail.value(v) != LBool::undef) continue;
    const Interval& z = res.bounds.pre_of(net.relu_neurons()[v]);
    if (z.lo <= 0.0 && z.hi > 0.0) continue;
    const Lit lit(v, z.lo > 0.0);
    std::vector<Lit> reason{lit};
    reason.insert(reason.end(), negated.begin(), negated.end());
    res.implied.push_back({lit, std::move(reason)});
  }
  res.kind = DeductionResult::Kind::feasible;
  return res;
}

} // namespace relusat
