#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace relusat::lp {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Raised when the simplex exceeds its pivot budget even under Bland's rule.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Sense { le, ge, eq };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

struct Variable {
  std::string name;
  double lower = -inf;
  double upper = inf;
};

/// A linear program over bounded or free real variables.
class LinProgram {
public:
  int add_variable(std::string name, double lower = -inf, double upper = inf);
  void add_row(std::vector<Term> terms, Sense sense, double rhs);
  /// Objective over the variables; without one the solve is a feasibility check.
  void set_objective(std::vector<Term> terms, bool maximize);
  void clear_objective() { objective_.clear(); }

  void set_bounds(int var, double lower, double upper);

  [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
  [[nodiscard]] const std::vector<Row>& rows() const { return rows_; }
  [[nodiscard]] const std::vector<Term>& objective() const { return objective_; }
  [[nodiscard]] bool maximize() const { return maximize_; }
  [[nodiscard]] std::size_t num_variables() const { return vars_.size(); }

  /// Largest violation of any row or bound at `x` (0 when feasible).
  [[nodiscard]] double max_violation(std::span<const double> x) const;

private:
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  std::vector<Term> objective_;
  bool maximize_ = true;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> point;
  double objective = 0.0;
  std::size_t pivots = 0;

  [[nodiscard]] bool feasible() const { return status != Status::infeasible; }
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-7;
  std::size_t bland_after_degenerate = 5000;
  std::size_t max_pivots = 200000;
};

/// Two-phase primal simplex on a dense tableau. Dantzig pricing, switching
/// to Bland's rule after too many degenerate pivots.
[[nodiscard]] Solution solve(const LinProgram& program, const SimplexOptions& options = {});

} // namespace relusat::lp
