#include "relusat/sat_core.hpp"

#include <algorithm>
#include <climits>
#include <limits>
#include <set>

namespace relusat {

std::string to_string(Lit lit) {
  return (lit.positive() ? "v" : "~v") + std::to_string(lit.var());
}

bool Clause::contains(Lit l) const {
  return std::find(literals.begin(), literals.end(), l) != literals.end();
}

bool Clause::same_literals(const Clause& other) const {
  std::set<Lit> a(literals.begin(), literals.end());
  std::set<Lit> b(other.literals.begin(), other.literals.end());
  return a == b;
}

std::string to_string(const Clause& clause) {
  if (clause.literals.empty()) return "()";
  std::string out = "(";
  for (std::size_t i = 0; i < clause.literals.size(); ++i) {
    if (i > 0) out += " | ";
    out += to_string(clause.literals[i]);
  }
  return out + ")";
}

BooleanAbstraction boolean_abstraction(const Network& net) {
  BooleanAbstraction abs;
  for (const NeuronId& n : net.relu_neurons()) {
    const auto v = static_cast<Var>(abs.var_to_neuron.size());
    abs.var_to_neuron.push_back(n);
    abs.neuron_to_var.emplace(n, v);
    abs.clauses.push_back(Clause{{Lit(v, true), Lit(v, false)}, ClauseOrigin::initial});
  }
  return abs;
}

// ---------------------------------------------------------------------------
// Trail

Trail::Trail(std::size_t num_vars)
    : values_(num_vars, LBool::undef), level_of_(num_vars, -1), position_(num_vars, 0) {}

LBool Trail::value(Lit l) const {
  const LBool v = values_[l.var()];
  if (v == LBool::undef) return v;
  return (v == LBool::true_) == l.positive() ? LBool::true_ : LBool::false_;
}

void Trail::assign(TrailEntry entry) {
  const Var v = entry.lit.var();
  if (v >= values_.size()) throw ContractViolation("literal over unknown variable " + to_string(entry.lit));
  if (values_[v] != LBool::undef) throw ContractViolation("variable assigned twice: " + to_string(entry.lit));
  values_[v] = entry.lit.positive() ? LBool::true_ : LBool::false_;
  level_of_[v] = entry.level;
  position_[v] = entries_.size();
  entries_.push_back(std::move(entry));
}

void Trail::push_decision(Lit lit) {
  TrailEntry e;
  e.lit = lit;
  e.level = level_ + 1;
  e.kind = Antecedent::decision;
  assign(std::move(e));
  ++level_;
}

void Trail::push_propagated(Lit lit, ClauseId clause) {
  TrailEntry e;
  e.lit = lit;
  e.level = level_;
  e.kind = Antecedent::propagated;
  e.clause = clause;
  assign(std::move(e));
}

void Trail::push_implied(Lit lit, std::vector<Lit> reason, Antecedent kind) {
  if (std::find(reason.begin(), reason.end(), lit) == reason.end()) {
    throw ContractViolation("reason clause must contain the implied literal " + to_string(lit));
  }
  TrailEntry e;
  e.lit = lit;
  e.level = level_;
  e.kind = kind;
  e.reason = std::move(reason);
  assign(std::move(e));
}

void Trail::backtrack(int level) {
  while (!entries_.empty() && entries_.back().level > level) {
    const Var v = entries_.back().lit.var();
    values_[v] = LBool::undef;
    level_of_[v] = -1;
    entries_.pop_back();
  }
  level_ = level;
  propagation_head = std::min(propagation_head, entries_.size());
}

void Trail::clear() {
  backtrack(-1);
  level_ = 0;
  propagation_head = 0;
}

const std::vector<Lit>& Trail::antecedent(Var v, const ClauseDb& db) const {
  const TrailEntry& e = entry_of(v);
  switch (e.kind) {
  case Antecedent::propagated: return db.at(e.clause).literals;
  case Antecedent::theory_implied:
  case Antecedent::flipped: return e.reason;
  case Antecedent::decision: break;
  }
  throw ContractViolation("decision " + to_string(e.lit) + " has no antecedent");
}

void Trail::check_invariants(const ClauseDb& db) const {
  int prev_level = 0;
  int decisions = 0;
  std::vector<bool> seen(values_.size(), false);
  for (std::size_t pos = 0; pos < entries_.size(); ++pos) {
    const TrailEntry& e = entries_[pos];
    const Var v = e.lit.var();
    if (seen[v]) throw ContractViolation("variable appears twice on the trail: " + to_string(e.lit));
    seen[v] = true;
    if (e.level < prev_level) throw ContractViolation("decision levels decrease along the trail");
    prev_level = e.level;
    if (value(e.lit) != LBool::true_ || level_of_[v] != e.level || position_[v] != pos) {
      throw ContractViolation("trail bookkeeping out of sync at " + to_string(e.lit));
    }
    if (e.kind == Antecedent::decision) {
      ++decisions;
      if (e.level != decisions) throw ContractViolation("decision " + to_string(e.lit) + " at wrong level");
      continue;
    }
    const std::vector<Lit>& ante = e.kind == Antecedent::propagated ? db.at(e.clause).literals : e.reason;
    bool has_self = false;
    for (Lit l : ante) {
      if (l == e.lit) {
        has_self = true;
        continue;
      }
      if (value(l) != LBool::false_ || position_[l.var()] >= pos) {
        throw ContractViolation("antecedent of " + to_string(e.lit) + " was not unit when it was enqueued");
      }
    }
    if (!has_self) throw ContractViolation("antecedent of " + to_string(e.lit) + " does not contain it");
  }
  if (decisions != level_) throw ContractViolation("decision level does not match decision count");
  if (propagation_head > entries_.size()) throw ContractViolation("propagation head beyond trail");
}

// ---------------------------------------------------------------------------
// Clause database and BCP

ClauseDb::ClauseDb(std::size_t num_vars) : watches_(2 * num_vars) {}

namespace {

bool is_tautology(const std::vector<Lit>& lits) {
  for (std::size_t i = 0; i < lits.size(); ++i) {
    for (std::size_t j = i + 1; j < lits.size(); ++j) {
      if (lits[i] == ~lits[j]) return true;
    }
  }
  return false;
}

std::vector<Lit> dedup(std::vector<Lit> lits) {
  std::vector<Lit> out;
  for (Lit l : lits) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  return out;
}

} // namespace

ClauseId ClauseDb::add(Clause clause) {
  clause.literals = dedup(std::move(clause.literals));
  for (Lit l : clause.literals) {
    if (l.var() >= num_vars()) throw ContractViolation("clause over unknown variable " + to_string(l));
  }
  const bool taut = is_tautology(clause.literals);
  if (taut && clause.origin != ClauseOrigin::initial) {
    throw ContractViolation("learned clause contains both polarities of a variable");
  }
  const auto id = static_cast<ClauseId>(clauses_.size());
  if (clause.origin == ClauseOrigin::learned) ++learned_;
  const std::size_t n = clause.literals.size();
  clauses_.push_back(std::move(clause));
  if (taut) return id; // always satisfied, never watched
  if (n == 1) {
    units_.push_back(id);
  } else if (n >= 2) {
    pending_.push_back(id);
  }
  return id;
}

std::optional<ClauseId> ClauseDb::find(const Clause& clause) const {
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    if (clauses_[i].same_literals(clause)) return static_cast<ClauseId>(i);
  }
  return std::nullopt;
}

std::optional<ClauseId> bcp(Trail& trail, ClauseDb& db) {
  for (ClauseId id : db.units_) {
    const Lit l = db.clauses_[id].literals.front();
    const LBool v = trail.value(l);
    if (v == LBool::false_) return id;
    if (v == LBool::undef) trail.push_propagated(l, id);
  }

  // Attach new clauses: watch the two literals that stay non-false longest.
  while (!db.pending_.empty()) {
    const ClauseId id = db.pending_.front();
    db.pending_.erase(db.pending_.begin());
    auto& lits = db.clauses_[id].literals;
    auto rank = [&](Lit l) { return trail.value(l) == LBool::false_ ? trail.level_of(l.var()) : INT_MAX; };
    std::stable_sort(lits.begin(), lits.end(), [&](Lit a, Lit b) { return rank(a) > rank(b); });
    db.watches_[lits[0].code()].push_back(id);
    db.watches_[lits[1].code()].push_back(id);
    if (trail.value(lits[0]) == LBool::false_) return id;
    if (trail.value(lits[0]) == LBool::undef && trail.value(lits[1]) == LBool::false_) {
      trail.push_propagated(lits[0], id);
    }
  }

  while (trail.propagation_head < trail.size()) {
    const Lit falsified = ~trail.entries()[trail.propagation_head++].lit;
    auto& ws = db.watches_[falsified.code()];
    std::size_t keep = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const ClauseId id = ws[i];
      auto& lits = db.clauses_[id].literals;
      if (lits[0] == falsified) std::swap(lits[0], lits[1]);
      if (trail.value(lits[0]) == LBool::true_) {
        ws[keep++] = id;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (trail.value(lits[k]) != LBool::false_) {
          std::swap(lits[1], lits[k]);
          db.watches_[lits[1].code()].push_back(id);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[keep++] = id;
      if (trail.value(lits[0]) == LBool::false_) {
        for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        trail.propagation_head = trail.size();
        return id;
      }
      trail.push_propagated(lits[0], id);
    }
    ws.resize(keep);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Conflict analysis

Clause binary_resolution(const Clause& c1, const Clause& c2, Var pivot) {
  const auto sign_in = [pivot](const Clause& c) -> int {
    int s = 0;
    for (Lit l : c.literals) {
      if (l.var() == pivot) s |= l.positive() ? 1 : 2;
    }
    return s;
  };
  const int s1 = sign_in(c1);
  const int s2 = sign_in(c2);
  if (!((s1 == 1 && s2 == 2) || (s1 == 2 && s2 == 1))) {
    throw ContractViolation("resolution pivot v" + std::to_string(pivot) + " must occur with opposite signs");
  }
  Clause out;
  out.origin = ClauseOrigin::learned;
  for (const Clause* c : {&c1, &c2}) {
    for (Lit l : c->literals) {
      if (l.var() != pivot && !out.contains(l)) out.literals.push_back(l);
    }
  }
  return out;
}

ConflictAnalysis derive_clause(const Trail& trail, const ClauseDb& db, const std::vector<Lit>& conflicting) {
  ConflictAnalysis result;
  Clause clause{dedup(conflicting), ClauseOrigin::learned};
  for (Lit l : clause.literals) {
    if (trail.value(l) != LBool::false_) {
      throw ContractViolation("conflicting clause literal " + to_string(l) + " is not false");
    }
  }
  int level = 0;
  for (Lit l : clause.literals) level = std::max(level, trail.level_of(l.var()));

  const auto at_level = [&](const Clause& c) {
    return std::count_if(c.literals.begin(), c.literals.end(),
                         [&](Lit l) { return trail.level_of(l.var()) == level; });
  };
  while (at_level(clause) > 1) {
    Lit last = clause.literals.front();
    for (Lit l : clause.literals) {
      if (trail.position_of(l.var()) > trail.position_of(last.var())) last = l;
    }
    const Var v = last.var();
    Clause ante{trail.antecedent(v, db), ClauseOrigin::learned};
    result.steps.push_back({clause, last, v, ante});
    clause = binary_resolution(clause, ante, v);
  }

  int second = 0;
  for (Lit l : clause.literals) {
    const int lv = trail.level_of(l.var());
    if (lv < level) second = std::max(second, lv);
  }
  result.learned = std::move(clause);
  result.backjump_level = second;
  return result;
}

ConflictAnalysis analyze_conflict(const Trail& trail, const ClauseDb& db, const std::vector<Lit>& conflicting) {
  if (trail.decision_level() == 0) {
    throw ContractViolation("analyze_conflict called at decision level 0; the problem is unsat");
  }
  return derive_clause(trail, db, conflicting);
}

void backtrack(Trail& trail, int level) {
  if (level < 0 || level >= trail.decision_level()) {
    throw ContractViolation("backtrack level " + std::to_string(level) + " not below current level " +
                            std::to_string(trail.decision_level()));
  }
  trail.backtrack(level);
}

bool should_restart(const RestartPolicy& policy, const RestartStats& stats) {
  return policy.epoch < policy.max_restarts &&
         (stats.nodes_processed > policy.node_threshold || stats.elapsed > policy.time_threshold);
}

std::optional<Lit> decide(const Trail& trail, const BranchScorer& scorer, Rng& rng, double noise) {
  std::optional<Var> best;
  BranchScore best_score;
  for (Var v = 0; v < trail.num_vars(); ++v) {
    if (trail.value(v) != LBool::undef) continue;
    BranchScore s = scorer(v);
    if (noise > 0.0) s.primary += noise * rng.uniform(-1.0, 1.0);
    if (!best || s.primary < best_score.primary ||
        (s.primary == best_score.primary && s.secondary < best_score.secondary)) {
      best = v;
      best_score = s;
    }
  }
  if (!best) return std::nullopt;
  return Lit(*best, rng.coin());
}

} // namespace relusat
