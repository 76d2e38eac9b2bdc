#include "relusat/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "relusat/rng.hpp"

namespace relusat {

namespace {

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

/// Branching scores of the unassigned variables: for each phase, the margin of
/// the disjunct under interval bounds with that neuron fixed. Lower is better.
std::vector<BranchScore> branch_scores(const Network& net, const Box& box, const Conjunction& disjunct,
                                       const Trail& trail) {
  std::vector<Phase> phases = phases_from_trail(trail);
  std::vector<BranchScore> scores(trail.num_vars());
  for (Var v = 0; v < trail.num_vars(); ++v) {
    if (trail.value(v) != LBool::undef) continue;
    double margin[2];
    for (int p = 0; p < 2; ++p) {
      phases[v] = p == 0 ? Phase::active : Phase::inactive;
      margin[p] = conjunction_margin(disjunct, propagate_bounds(net, phases, box, AbstractionMode::interval, &disjunct));
    }
    phases[v] = Phase::unassigned;
    scores[v] = {std::max(margin[0], margin[1]), std::min(margin[0], margin[1])};
  }
  return scores;
}

double score_spread(const Trail& trail, const std::vector<BranchScore>& scores) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Var v = 0; v < trail.num_vars(); ++v) {
    if (trail.value(v) != LBool::undef || !std::isfinite(scores[v].primary)) continue;
    lo = std::min(lo, scores[v].primary);
    hi = std::max(hi, scores[v].primary);
  }
  return hi > lo ? hi - lo : 0.0;
}

/// Adds a learned clause unless an identical one is stored; returns its id.
ClauseId learn(ClauseDb& db, Clause clause, LoopResult& out, bool& fresh) {
  clause.origin = ClauseOrigin::learned;
  if (auto id = db.find(clause)) {
    fresh = false;
    return *id;
  }
  fresh = true;
  out.learned_log.push_back(clause);
  ++out.stats.learned_clauses;
  return db.add(std::move(clause));
}

constexpr std::uint64_t kReseed = 0x9E3779B97F4A7C15ULL;

} // namespace

ClauseDb initial_clause_db(const Network& net) {
  const BooleanAbstraction abs = boolean_abstraction(net);
  ClauseDb db(abs.num_vars());
  for (const Clause& c : abs.clauses) db.add(c);
  return db;
}

LoopResult dpllt_loop(const VerificationProblem& problem, const Box& box, const Conjunction& disjunct, ClauseDb& db,
                      const SolverConfig& config, Clock::time_point deadline) {
  const Network& net = problem.net;
  const bool learning = config.mode != SearchMode::no_learning;
  RestartPolicy policy = config.restart;
  if (config.mode == SearchMode::no_restart) policy.max_restarts = 0;

  LoopResult out;
  Trail trail(net.relu_count());
  const auto loop_start = Clock::now();
  const auto finish = [&](LoopResult::Kind kind) {
    out.kind = kind;
    out.final_level = trail.decision_level();
    out.stats.wall_time = seconds_since(loop_start);
    return out;
  };

  Rng rng(config.seed);
  double noise_scale = 0.0;
  std::size_t nodes = 0;
  auto epoch_start = Clock::now();

  for (;;) {
    if (Clock::now() >= deadline) {
      out.timed_out = true;
      out.reason = "timeout";
      return finish(LoopResult::Kind::budget);
    }
    if (config.check_invariants) trail.check_invariants(db);
    ++out.stats.iterations;
    ++nodes;

    std::vector<Lit> conflict;
    if (const auto cid = bcp(trail, db)) {
      conflict = db.at(*cid).literals;
    } else {
      ++out.stats.theory_calls;
      DeductionResult ded;
      try {
        ded = deduction(net, box, disjunct, trail, config.theory);
      } catch (const lp::SolverError& e) {
        out.reason = std::string("LP solver failure: ") + e.what();
        return finish(LoopResult::Kind::budget);
      }
      if (ded.kind == DeductionResult::Kind::sat_total) {
        if (!problem.is_counterexample(ded.witness)) {
          out.reason = "LP point failed exact validation";
          return finish(LoopResult::Kind::budget);
        }
        out.witness = std::move(ded.witness);
        return finish(LoopResult::Kind::sat);
      }
      if (ded.kind == DeductionResult::Kind::feasible) {
        if (!ded.implied.empty()) {
          for (ImpliedLiteral& imp : ded.implied) trail.push_implied(imp.lit, std::move(imp.reason));
          continue;
        }
        const std::vector<BranchScore> scores = branch_scores(net, ded.box, disjunct, trail);
        const double noise = noise_scale * score_spread(trail, scores);
        const auto lit = decide(trail, [&](Var v) { return scores[v]; }, rng, noise);
        if (!lit) throw ContractViolation("total assignment was not classified by deduction");
        trail.push_decision(*lit);
        ++out.stats.decisions;
        continue;
      }
      conflict = std::move(ded.conflict);
    }

    if (trail.decision_level() == 0) {
      if (learning && !conflict.empty()) {
        bool fresh = false;
        (void)learn(db, derive_clause(trail, db, conflict).learned, out, fresh);
      }
      return finish(LoopResult::Kind::unsat);
    }

    if (learning) {
      ConflictAnalysis ca = analyze_conflict(trail, db, conflict);
      backtrack(trail, ca.backjump_level);
      bool fresh = false;
      const ClauseId id = learn(db, std::move(ca.learned), out, fresh);
      if (!fresh) {
        // Already stored, so it is not re-attached; assert its open literal here.
        for (Lit l : db.at(id).literals) {
          if (trail.value(l) == LBool::undef) {
            trail.push_propagated(l, id);
            break;
          }
        }
      }
    } else {
      // Chronological backtracking: the decisions so far cannot all hold.
      std::vector<Lit> reason;
      for (const TrailEntry& e : trail.entries()) {
        if (e.kind == Antecedent::decision) reason.push_back(~e.lit);
      }
      const Lit flip = reason.back();
      backtrack(trail, trail.decision_level() - 1);
      trail.push_implied(flip, std::move(reason), Antecedent::flipped);
    }

    RestartStats rs{nodes, seconds_since(epoch_start)};
    if (should_restart(policy, rs)) {
      trail.clear();
      ++policy.epoch;
      ++out.stats.restarts;
      rng = Rng(config.seed + kReseed * policy.epoch);
      noise_scale = config.restart_noise;
      nodes = 0;
      epoch_start = Clock::now();
    }
  }
}

std::vector<Box> split_input(const Box& box, std::size_t splits_per_dim) {
  if (splits_per_dim < 1) throw InputError("splits per dimension must be at least 1");
  const std::size_t d = box.dim();
  std::vector<Box> out;
  std::vector<std::size_t> idx(d, 0);
  const auto cut = [&](std::size_t i, std::size_t k) {
    if (k == splits_per_dim) return box.upper[i];
    const double t = static_cast<double>(k) / static_cast<double>(splits_per_dim);
    return box.lower[i] + t * (box.upper[i] - box.lower[i]);
  };
  for (;;) {
    Box b;
    for (std::size_t i = 0; i < d; ++i) {
      b.lower.push_back(cut(i, idx[i]));
      b.upper.push_back(cut(i, idx[i] + 1));
    }
    out.push_back(std::move(b));
    std::size_t i = 0;
    while (i < d && ++idx[i] == splits_per_dim) idx[i++] = 0;
    if (i == d) break;
  }
  return out;
}

Verdict verify(const VerificationProblem& problem, const SolverConfig& config) {
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config.timeout));
  Verdict verdict;
  const auto done = [&](VerdictKind kind) {
    verdict.kind = kind;
    verdict.stats.wall_time = seconds_since(start);
    return verdict;
  };

  try {
    if (config.run_attacks) {
      AttackConfig ac = config.attack;
      ac.seed ^= config.seed;
      auto w = random_attack(problem, ac);
      if (!w) w = pgd_attack(problem, ac);
      if (w) {
        verdict.witness = std::move(*w);
        return done(VerdictKind::sat);
      }
    }

    std::vector<Box> boxes{problem.input_box};
    if (config.split > 1 && problem.net.input_dim() <= config.split_threshold) {
      boxes = split_input(problem.input_box, config.split);
    }
    struct Task {
      const Conjunction* disjunct;
      const Box* box;
    };
    std::vector<Task> tasks;
    for (const Conjunction& d : problem.negated_output) {
      for (const Box& b : boxes) tasks.push_back({&d, &b});
    }

    std::vector<LoopResult> results(tasks.size());
    std::vector<std::string> errors(tasks.size());
    const auto run_task = [&](std::size_t i) {
      try {
        SolverConfig cfg = config;
        cfg.seed = config.seed + i;
        ClauseDb db = initial_clause_db(problem.net);
        results[i] = dpllt_loop(problem, *tasks[i].box, *tasks[i].disjunct, db, cfg, deadline);
      } catch (const std::exception& e) {
        results[i].kind = LoopResult::Kind::budget;
        errors[i] = e.what();
      }
    };

    std::size_t ran = tasks.size();
    if (config.jobs <= 1) {
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        run_task(i);
        if (results[i].kind == LoopResult::Kind::sat) {
          ran = i + 1;
          break;
        }
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < std::min(config.jobs, tasks.size()); ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(i);
        });
      }
      for (auto& t : pool) t.join();
    }

    bool timed_out = false;
    std::string unknown;
    for (std::size_t i = 0; i < ran; ++i) {
      const LoopResult& r = results[i];
      verdict.stats += r.stats;
      if (r.kind == LoopResult::Kind::sat && verdict.witness.empty()) verdict.witness = r.witness;
      if (r.kind == LoopResult::Kind::budget) {
        timed_out = timed_out || r.timed_out;
        if (unknown.empty()) unknown = errors[i].empty() ? r.reason : errors[i];
      }
    }
    if (!verdict.witness.empty()) {
      if (!problem.is_counterexample(verdict.witness)) {
        verdict.witness.clear();
        verdict.reason = "witness failed exact validation";
        return done(VerdictKind::unknown);
      }
      return done(VerdictKind::sat);
    }
    if (timed_out) return done(VerdictKind::timeout);
    if (!unknown.empty()) {
      verdict.reason = unknown;
      return done(VerdictKind::unknown);
    }
    return done(VerdictKind::unsat);
  } catch (const std::exception& e) {
    verdict.witness.clear();
    verdict.reason = e.what();
    return done(VerdictKind::unknown);
  }
}

} // namespace relusat
