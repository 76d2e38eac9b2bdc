#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "relusat/attack.hpp"
#include "relusat/sat_core.hpp"
#include "relusat/spec_io.hpp"
#include "relusat/theory.hpp"
#include "relusat/verdict.hpp"

namespace relusat {

enum class SearchMode { full, no_restart, no_learning };

struct SolverConfig {
  std::uint64_t seed = 0;
  double timeout = 60.0; // wall-clock seconds per verify() call
  SearchMode mode = SearchMode::full;
  TheoryConfig theory;
  RestartPolicy restart;
  AttackConfig attack;
  bool run_attacks = true;
  std::size_t split = 1;           // pieces per input dimension
  std::size_t split_threshold = 5; // splitting only when input_dim <= this
  std::size_t jobs = 1;
  bool check_invariants = false;
  /// Score noise after a restart, relative to the spread of branching scores.
  double restart_noise = 0.25;
};

using Clock = std::chrono::steady_clock;

struct LoopResult {
  enum class Kind { unsat, sat, budget };
  Kind kind = Kind::budget;
  bool timed_out = false;
  std::vector<double> witness;
  std::string reason;
  SearchStats stats;
  std::vector<Clause> learned_log; // learned clauses in order
  int final_level = 0;             // decision level when the search stopped
};

/// Clause database holding the Boolean abstraction of `net`.
[[nodiscard]] ClauseDb initial_clause_db(const Network& net);

/// The DPLL(T) search for one disjunct over one input box: BCP, deduction,
/// decide; conflict analysis and backjumping; restarts that keep learned
/// clauses. Theory failures end the search with Kind::budget and a reason.
[[nodiscard]] LoopResult dpllt_loop(const VerificationProblem& problem, const Box& box, const Conjunction& disjunct,
                                    ClauseDb& db, const SolverConfig& config, Clock::time_point deadline);

/// Grid of splits^dim boxes that tile `box`; neighbours share faces.
[[nodiscard]] std::vector<Box> split_input(const Box& box, std::size_t splits_per_dim);

/// Attacks first, then one search per (disjunct, sub-box). Sat witnesses are
/// validated exactly before they are returned.
[[nodiscard]] Verdict verify(const VerificationProblem& problem, const SolverConfig& config = {});

} // namespace relusat
