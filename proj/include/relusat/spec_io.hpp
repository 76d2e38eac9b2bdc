#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "relusat/network.hpp"

namespace relusat {

/// Parse failure. `line()` is 1-based, or 0 when no position is known.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what);
  [[nodiscard]] std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

enum class Cmp { le, ge, lt, gt };

[[nodiscard]] std::string_view to_string(Cmp op);
[[nodiscard]] inline bool is_strict(Cmp op) { return op == Cmp::lt || op == Cmp::gt; }

/// coeffs . y  op  rhs, over the network outputs y.
struct LinearConstraint {
  Eigen::VectorXd coeffs;
  Cmp op = Cmp::ge;
  double rhs = 0.0;

  /// Signed slack: non-negative iff the closed form of the constraint holds.
  [[nodiscard]] double slack(const Eigen::VectorXd& y) const;
  /// Exact check, strict comparisons enforced.
  [[nodiscard]] bool holds(const Eigen::VectorXd& y) const;

  friend bool operator==(const LinearConstraint& a, const LinearConstraint& b) {
    return a.op == b.op && a.rhs == b.rhs && a.coeffs == b.coeffs;
  }
};

using Conjunction = std::vector<LinearConstraint>;

/// and/or tree over output constraints, as written in the property file.
struct OutputFormula {
  enum class Kind { atom, all_of, any_of };
  Kind kind = Kind::all_of;
  LinearConstraint atom;
  std::vector<OutputFormula> children;

  [[nodiscard]] bool holds(const Eigen::VectorXd& y) const;
};

/// Input box plus the counterexample condition (the negated output property)
/// in disjunctive normal form. A point x is a counterexample iff x is in the
/// box and forward(x) satisfies at least one disjunct.
struct VerificationProblem {
  Network net;
  Box input_box;
  std::vector<Conjunction> negated_output;
  /// The same condition as written in the source, before DNF conversion.
  OutputFormula counterexample_formula;

  VerificationProblem(Network network, Box box, std::vector<Conjunction> disjuncts);
  VerificationProblem(Network network, Box box, OutputFormula formula);

  /// Exact validation of a candidate witness.
  [[nodiscard]] bool is_counterexample(std::span<const double> x) const;
  /// Index of a disjunct satisfied exactly by forward(x), if any.
  [[nodiscard]] std::optional<std::size_t> satisfied_disjunct(const Eigen::VectorXd& outputs) const;
};

/// Network file: JSON `{input_dim, layers: [{weights, bias, activation}]}`,
/// weights row-major, activation "relu" or "none".
[[nodiscard]] Network parse_network(std::string_view text);
[[nodiscard]] std::string serialize_network(const Network& net);

/// Property file in the supported VNN-LIB subset. The Y assertions describe
/// the counterexample condition (the negation of the output property).
[[nodiscard]] VerificationProblem parse_vnnlib(std::string_view text, Network net);
[[nodiscard]] std::string serialize_vnnlib(const VerificationProblem& problem);

/// Converts an and/or tree into a disjunction of conjunctions.
[[nodiscard]] std::vector<Conjunction> to_dnf(const OutputFormula& formula);

[[nodiscard]] std::string read_text_file(const std::string& path);

} // namespace relusat
