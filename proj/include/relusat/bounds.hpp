#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relusat/network.hpp"
#include "relusat/spec_io.hpp"

namespace relusat {

/// Activation status of a ReLU neuron under a partial assignment.
enum class Phase : std::int8_t { unassigned, active, inactive };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
  [[nodiscard]] Interval intersect(const Interval& o) const { return {std::max(lo, o.lo), std::min(hi, o.hi)}; }
};

enum class AbstractionMode { interval, polytope, both };

/// Sound bounds over {x in box : the activation pattern of x agrees with the
/// phases}. Decided neurons have their pre-activation clamped to the sign
/// their phase requires.
struct NeuronBounds {
  /// Pre-activation bounds, one vector per layer (output layer included).
  std::vector<std::vector<Interval>> pre;
  /// Bounds on the network outputs.
  std::vector<Interval> output;
  /// Bounds on coeffs . y for each constraint passed to propagate_bounds.
  std::vector<Interval> constraints;
  /// True when some decided phase contradicts the bounds (region is empty).
  bool empty = false;

  [[nodiscard]] const Interval& pre_of(const NeuronId& id) const {
    return pre[static_cast<std::size_t>(id.layer - 1)][static_cast<std::size_t>(id.index)];
  }
};

/// `phases` is indexed by flat ReLU index (Network::relu_neurons order) and
/// may be empty, meaning all unassigned. When `constraints` is given, the
/// bounds on each constraint's linear form are computed as well (polytope
/// mode back-substitutes the form directly).
[[nodiscard]] NeuronBounds propagate_bounds(const Network& net, std::span<const Phase> phases, const Box& box,
                                            AbstractionMode mode, const Conjunction* constraints = nullptr);

/// Smallest over the constraints of the best achievable slack under the
/// bounds; negative means the conjunction is infeasible over the region.
[[nodiscard]] double conjunction_margin(const Conjunction& constraints, const NeuronBounds& bounds);

} // namespace relusat
