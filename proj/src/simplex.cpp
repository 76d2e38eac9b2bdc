#include "relusat/lp.hpp"

#include <algorithm>
#include <cmath>

namespace relusat::lp {

int LinProgram::add_variable(std::string name, double lower, double upper) {
  vars_.push_back({std::move(name), lower, upper});
  return static_cast<int>(vars_.size() - 1);
}

void LinProgram::add_row(std::vector<Term> terms, Sense sense, double rhs) {
  for (const Term& t : terms) {
    if (t.var < 0 || static_cast<std::size_t>(t.var) >= vars_.size()) {
      throw std::out_of_range("row references an undeclared variable");
    }
  }
  rows_.push_back({std::move(terms), sense, rhs});
}

void LinProgram::set_objective(std::vector<Term> terms, bool maximize) {
  objective_ = std::move(terms);
  maximize_ = maximize;
}

void LinProgram::set_bounds(int var, double lower, double upper) {
  auto& v = vars_.at(static_cast<std::size_t>(var));
  v.lower = lower;
  v.upper = upper;
}

double LinProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max({worst, vars_[j].lower - x[j], x[j] - vars_[j].upper});
  }
  for (const Row& r : rows_) {
    double lhs = 0.0;
    for (const Term& t : r.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
    switch (r.sense) {
    case Sense::le: worst = std::max(worst, lhs - r.rhs); break;
    case Sense::ge: worst = std::max(worst, r.rhs - lhs); break;
    case Sense::eq: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
    }
  }
  return worst;
}

namespace {

/// x_orig = offset + sum(sign * column)
struct VarMap {
  double offset = 0.0;
  int col = -1;
  double sign = 1.0;
  int neg_col = -1; // second column for free variables (x = col - neg_col)
};

class Tableau {
public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows * (cols + 1), 0.0), basis_(rows, -1) {}

  double& at(std::size_t i, std::size_t j) { return a_[i * (n_ + 1) + j]; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return a_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return a_[i * (n_ + 1) + n_]; }
  [[nodiscard]] double rhs(std::size_t i) const { return a_[i * (n_ + 1) + n_]; }
  [[nodiscard]] std::size_t rows() const { return m_; }
  [[nodiscard]] std::size_t cols() const { return n_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c, std::vector<double>& reduced) {
    const double p = at(r, c);
    double* prow = &a_[r * (n_ + 1)];
    for (std::size_t j = 0; j <= n_; ++j) prow[j] /= p;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &a_[i * (n_ + 1)];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) {
        row[j] -= f * prow[j];
        if (std::abs(row[j]) < 1e-13) row[j] = 0.0;
      }
      row[c] = 0.0;
    }
    const double f = reduced[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= n_; ++j) reduced[j] -= f * prow[j];
      reduced[c] = 0.0;
    }
    basis_[r] = static_cast<int>(c);
  }

private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> a_;
  std::vector<int> basis_;
};

enum class RunResult { optimal, unbounded };

/// Maximizes over the current tableau. `reduced` has cols+1 entries: reduced
/// costs and, in the last slot, minus the current objective value.
RunResult run(Tableau& t, std::vector<double>& reduced, const std::vector<bool>& allowed, const SimplexOptions& opt,
              std::size_t& pivots) {
  std::size_t degenerate = 0;
  bool bland = false;
  for (;;) {
    if (pivots >= opt.max_pivots) {
      throw SolverError("simplex exceeded " + std::to_string(opt.max_pivots) + " pivots");
    }
    int enter = -1;
    double best = opt.pivot_tol;
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (!allowed[j] || reduced[j] <= opt.pivot_tol) continue;
      if (bland) {
        enter = static_cast<int>(j);
        break;
      }
      if (reduced[j] > best) {
        best = reduced[j];
        enter = static_cast<int>(j);
      }
    }
    if (enter < 0) return RunResult::optimal;
    const auto c = static_cast<std::size_t>(enter);

    int leave = -1;
    double best_ratio = inf;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, c);
      if (a <= opt.pivot_tol) continue;
      const double ratio = std::max(t.rhs(i), 0.0) / a;
      if (leave < 0 || ratio < best_ratio - 1e-12) {
        best_ratio = ratio;
        leave = static_cast<int>(i);
      } else if (ratio <= best_ratio + 1e-12) {
        const auto li = static_cast<std::size_t>(leave);
        const bool better = bland ? t.basis()[i] < t.basis()[li] : a > t.at(li, c);
        if (better) leave = static_cast<int>(i);
      }
    }
    if (leave < 0) return RunResult::unbounded;

    if (best_ratio <= 1e-12) {
      if (++degenerate > opt.bland_after_degenerate) bland = true;
    }
    t.pivot(static_cast<std::size_t>(leave), c, reduced);
    ++pivots;
  }
}

} // namespace

Solution solve(const LinProgram& program, const SimplexOptions& opt) {
  const auto& vars = program.variables();
  std::vector<VarMap> map(vars.size());
  std::size_t ncols = 0;
  // Extra "column <= bound" rows from two-sided bounds.
  std::vector<std::pair<int, double>> bound_rows;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Variable& v = vars[j];
    if (v.lower > v.upper) {
      return Solution{Status::infeasible, {}, 0.0, 0};
    }
    VarMap& vm = map[j];
    if (std::isfinite(v.lower)) {
      vm.offset = v.lower;
      vm.col = static_cast<int>(ncols++);
      if (std::isfinite(v.upper)) bound_rows.emplace_back(vm.col, v.upper - v.lower);
    } else if (std::isfinite(v.upper)) {
      vm.offset = v.upper;
      vm.sign = -1.0;
      vm.col = static_cast<int>(ncols++);
    } else {
      vm.col = static_cast<int>(ncols++);
      vm.neg_col = static_cast<int>(ncols++);
    }
  }

  struct DenseRow {
    std::vector<double> coef;
    Sense sense;
    double rhs;
  };
  std::vector<DenseRow> dense;
  dense.reserve(program.rows().size() + bound_rows.size());
  for (const Row& r : program.rows()) {
    DenseRow d{std::vector<double>(ncols, 0.0), r.sense, r.rhs};
    for (const Term& t : r.terms) {
      const VarMap& vm = map[static_cast<std::size_t>(t.var)];
      d.rhs -= t.coef * vm.offset;
      d.coef[static_cast<std::size_t>(vm.col)] += t.coef * vm.sign;
      if (vm.neg_col >= 0) d.coef[static_cast<std::size_t>(vm.neg_col)] -= t.coef;
    }
    dense.push_back(std::move(d));
  }
  for (const auto& [col, ub] : bound_rows) {
    DenseRow d{std::vector<double>(ncols, 0.0), Sense::le, ub};
    d.coef[static_cast<std::size_t>(col)] = 1.0;
    dense.push_back(std::move(d));
  }

  // Normalize to non-negative right-hand sides and count auxiliary columns.
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (DenseRow& d : dense) {
    if (d.rhs < 0.0) {
      for (double& c : d.coef) c = -c;
      d.rhs = -d.rhs;
      if (d.sense == Sense::le) {
        d.sense = Sense::ge;
      } else if (d.sense == Sense::ge) {
        d.sense = Sense::le;
      }
    }
    if (d.sense != Sense::eq) ++n_slack;
    if (d.sense != Sense::le) ++n_art;
  }

  const std::size_t m = dense.size();
  const std::size_t total = ncols + n_slack + n_art;
  const std::size_t art_begin = ncols + n_slack;
  Tableau t(m, total);
  std::size_t next_slack = ncols;
  std::size_t next_art = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    const DenseRow& d = dense[i];
    for (std::size_t j = 0; j < ncols; ++j) t.at(i, j) = d.coef[j];
    t.rhs(i) = d.rhs;
    if (d.sense == Sense::le) {
      t.at(i, next_slack) = 1.0;
      t.basis()[i] = static_cast<int>(next_slack++);
    } else {
      if (d.sense == Sense::ge) t.at(i, next_slack++) = -1.0;
      t.at(i, next_art) = 1.0;
      t.basis()[i] = static_cast<int>(next_art++);
    }
  }

  Solution sol;
  std::vector<bool> allowed(total, true);

  // Phase 1: maximize -sum(artificials).
  if (n_art > 0) {
    std::vector<double> reduced(total + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (static_cast<std::size_t>(t.basis()[i]) < art_begin) continue;
      for (std::size_t j = 0; j <= total; ++j) {
        if (j < art_begin || j == total) reduced[j] += t.at(i, j);
      }
    }
    run(t, reduced, allowed, opt, sol.pivots);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (static_cast<std::size_t>(t.basis()[i]) >= art_begin) infeasibility += std::max(t.rhs(i), 0.0);
    }
    if (infeasibility > opt.feasibility_tol) {
      sol.status = Status::infeasible;
      return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (static_cast<std::size_t>(t.basis()[i]) < art_begin) continue;
      std::size_t best = total;
      double best_abs = opt.pivot_tol;
      for (std::size_t j = 0; j < art_begin; ++j) {
        if (std::abs(t.at(i, j)) > best_abs) {
          best_abs = std::abs(t.at(i, j));
          best = j;
        }
      }
      if (best < total) {
        t.pivot(i, best, reduced);
        ++sol.pivots;
      }
    }
    for (std::size_t j = art_begin; j < total; ++j) allowed[j] = false;
  }

  // Phase 2.
  std::vector<double> cost(total, 0.0);
  const double sense = program.maximize() ? 1.0 : -1.0;
  for (const Term& term : program.objective()) {
    const VarMap& vm = map[static_cast<std::size_t>(term.var)];
    cost[static_cast<std::size_t>(vm.col)] += sense * term.coef * vm.sign;
    if (vm.neg_col >= 0) cost[static_cast<std::size_t>(vm.neg_col)] -= sense * term.coef;
  }
  Status status = Status::optimal;
  if (!program.objective().empty()) {
    std::vector<double> reduced(total + 1, 0.0);
    for (std::size_t j = 0; j < total; ++j) reduced[j] = cost[j];
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = cost[static_cast<std::size_t>(t.basis()[i])];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= total; ++j) reduced[j] -= cb * t.at(i, j);
    }
    if (run(t, reduced, allowed, opt, sol.pivots) == RunResult::unbounded) status = Status::unbounded;
  }

  std::vector<double> colval(total, 0.0);
  for (std::size_t i = 0; i < m; ++i) colval[static_cast<std::size_t>(t.basis()[i])] = std::max(t.rhs(i), 0.0);
  sol.point.resize(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const VarMap& vm = map[j];
    double v = vm.offset + vm.sign * colval[static_cast<std::size_t>(vm.col)];
    if (vm.neg_col >= 0) v -= colval[static_cast<std::size_t>(vm.neg_col)];
    sol.point[j] = std::clamp(v, vars[j].lower, vars[j].upper);
  }
  sol.status = status;
  double obj = 0.0;
  for (const Term& term : program.objective()) obj += term.coef * sol.point[static_cast<std::size_t>(term.var)];
  sol.objective = status == Status::unbounded ? sense * inf : obj;
  return sol;
}

} // namespace relusat::lp
