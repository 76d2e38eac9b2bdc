#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "relusat/bounds.hpp"
#include "relusat/lp.hpp"
#include "relusat/network.hpp"
#include "relusat/sat_core.hpp"
#include "relusat/spec_io.hpp"

namespace relusat {

/// How undecided neurons enter the LP.
enum class LpRelaxation {
  triangle, // y >= 0, y >= z, y <= chord over [l, u]
  loose,    // y >= 0, y >= z
  none,     // y unconstrained: only decided neurons and cutting constraints count
};

/// An LP over inputs, per-neuron pre/post-activations and outputs. Variable
/// ids index into `program`.
struct LpEncoding {
  lp::LinProgram program;
  std::vector<int> input;
  std::vector<std::vector<int>> pre;  // per layer
  std::vector<std::vector<int>> post; // per layer; equals `pre` for the identity layer
  std::vector<int> output;
};

/// `phases` is indexed by flat ReLU index (empty = all undecided). Strict
/// comparisons of the disjunct are closed. `bounds` feeds the chord and the
/// pre-activation ranges; it is ignored by LpRelaxation::none.
[[nodiscard]] LpEncoding build_lp(const Network& net, const Box& box, std::span<const Phase> phases,
                                  const Conjunction& disjunct, const NeuronBounds* bounds,
                                  LpRelaxation relaxation = LpRelaxation::triangle);

/// Minimizes and maximizes every input over the LP, intersected with `box`.
/// Returns `box` unchanged when its dimension exceeds `threshold`.
[[nodiscard]] Box tighten_input_bounds(const LpEncoding& encoding, const Box& box, std::size_t threshold = 10,
                                       const lp::SimplexOptions& options = {});

[[nodiscard]] std::vector<Phase> phases_from_trail(const Trail& trail);

/// Negation of every literal on the trail.
[[nodiscard]] std::vector<Lit> negated_trail(const Trail& trail);

struct TheoryConfig {
  LpRelaxation relaxation = LpRelaxation::triangle;
  AbstractionMode abstraction = AbstractionMode::both;
  std::size_t tighten_threshold = 10;
  lp::SimplexOptions simplex;
  /// Minimum LP slack accepted for a strict constraint.
  double strict_margin = 1e-9;
};

struct ImpliedLiteral {
  Lit lit;
  std::vector<Lit> reason; // lit or not(trail)
};

struct DeductionResult {
  enum class Kind { infeasible, feasible, sat_total };
  Kind kind = Kind::feasible;
  std::vector<Lit> conflict; // infeasible: not(trail)
  std::vector<ImpliedLiteral> implied;
  NeuronBounds bounds; // over the tightened box
  Box box;             // tightened input box
  std::vector<double> witness;
  std::string source; // which check decided: "bounds", "lp", "output"
};

/// One theory check of the partial assignment on the trail against `box` and
/// one disjunct of the counterexample condition. Throws lp::SolverError.
[[nodiscard]] DeductionResult deduction(const Network& net, const Box& box, const Conjunction& disjunct,
                                        const Trail& trail, const TheoryConfig& config = {});

} // namespace relusat
