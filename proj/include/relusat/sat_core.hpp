#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relusat/network.hpp"
#include "relusat/rng.hpp"

namespace relusat {

/// Raised when a CDCL operation is called outside its contract.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

using Var = std::uint32_t;
using ClauseId = std::uint32_t;

/// Literal over an activation variable: positive = active (pre-activation
/// > 0), negative = inactive (pre-activation <= 0).
class Lit {
public:
  constexpr Lit() = default;
  constexpr Lit(Var v, bool positive) : code_(2 * v + (positive ? 0U : 1U)) {}

  [[nodiscard]] constexpr Var var() const { return code_ >> 1U; }
  [[nodiscard]] constexpr bool positive() const { return (code_ & 1U) == 0; }
  [[nodiscard]] constexpr std::uint32_t code() const { return code_; }
  constexpr Lit operator~() const {
    Lit l;
    l.code_ = code_ ^ 1U;
    return l;
  }
  friend constexpr auto operator<=>(Lit, Lit) = default;

private:
  std::uint32_t code_ = 0;
};

std::string to_string(Lit lit);

enum class ClauseOrigin { initial, learned };

struct Clause {
  std::vector<Lit> literals;
  ClauseOrigin origin = ClauseOrigin::learned;

  [[nodiscard]] bool contains(Lit l) const;
  /// Same literal set, order ignored.
  [[nodiscard]] bool same_literals(const Clause& other) const;
};

std::string to_string(const Clause& clause);

/// Variable <-> neuron map and the tautological status clauses (v or not v).
struct BooleanAbstraction {
  std::vector<NeuronId> var_to_neuron;
  std::map<NeuronId, Var> neuron_to_var;
  std::vector<Clause> clauses;

  [[nodiscard]] Var var_of(const NeuronId& n) const { return neuron_to_var.at(n); }
  [[nodiscard]] const NeuronId& neuron_of(Var v) const { return var_to_neuron.at(v); }
  [[nodiscard]] std::size_t num_vars() const { return var_to_neuron.size(); }
};

/// One variable per ReLU neuron, numbered in (layer, index) order, so a
/// variable id equals the neuron's flat index in the network.
[[nodiscard]] BooleanAbstraction boolean_abstraction(const Network& net);

enum class LBool : std::int8_t { undef, true_, false_ };

enum class Antecedent : std::uint8_t {
  decision,
  propagated,     // unit clause in the database
  theory_implied, // reason clause supplied by the theory solver
  flipped,        // chronological-backtracking flip (learning disabled)
};

struct TrailEntry {
  Lit lit;
  int level = 0;
  Antecedent kind = Antecedent::decision;
  ClauseId clause = 0;     // for propagated
  std::vector<Lit> reason; // for theory_implied / flipped; contains `lit`
};

class ClauseDb;

/// Assignment stack with decision levels and antecedents (the implication
/// graph is the set of antecedent edges).
class Trail {
public:
  explicit Trail(std::size_t num_vars);

  [[nodiscard]] std::size_t num_vars() const { return level_of_.size(); }
  [[nodiscard]] int decision_level() const { return level_; }
  [[nodiscard]] const std::vector<TrailEntry>& entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool is_total() const { return entries_.size() == level_of_.size(); }

  [[nodiscard]] LBool value(Var v) const { return values_[v]; }
  [[nodiscard]] LBool value(Lit l) const;
  [[nodiscard]] int level_of(Var v) const { return level_of_[v]; }
  [[nodiscard]] std::size_t position_of(Var v) const { return position_[v]; }
  [[nodiscard]] const TrailEntry& entry_of(Var v) const { return entries_[position_[v]]; }

  /// Opens a new decision level and assigns `lit` there.
  void push_decision(Lit lit);
  void push_propagated(Lit lit, ClauseId clause);
  void push_implied(Lit lit, std::vector<Lit> reason, Antecedent kind = Antecedent::theory_implied);

  /// Removes every entry above `level`.
  void backtrack(int level);
  /// Empties the trail (restart).
  void clear();

  /// Literals of the antecedent clause of an implied variable.
  [[nodiscard]] const std::vector<Lit>& antecedent(Var v, const ClauseDb& db) const;

  /// Next trail position BCP has not yet processed.
  std::size_t propagation_head = 0;

  /// Throws ContractViolation describing the first broken invariant.
  void check_invariants(const ClauseDb& db) const;

private:
  void assign(TrailEntry entry);

  std::vector<TrailEntry> entries_;
  std::vector<LBool> values_;
  std::vector<int> level_of_;
  std::vector<std::size_t> position_;
  int level_ = 0;
};

/// Initial and learned clauses with two-watched-literal indexing.
class ClauseDb {
public:
  explicit ClauseDb(std::size_t num_vars);

  ClauseId add(Clause clause);
  [[nodiscard]] const Clause& at(ClauseId id) const { return clauses_.at(id); }
  [[nodiscard]] std::size_t size() const { return clauses_.size(); }
  [[nodiscard]] std::size_t learned_count() const { return learned_; }
  [[nodiscard]] std::size_t num_vars() const { return watches_.size() / 2; }
  [[nodiscard]] bool contains(const Clause& clause) const { return find(clause).has_value(); }
  /// Id of a stored clause with the same literal set.
  [[nodiscard]] std::optional<ClauseId> find(const Clause& clause) const;

private:
  friend std::optional<ClauseId> bcp(Trail& trail, ClauseDb& db);

  std::vector<Clause> clauses_;
  std::vector<std::vector<ClauseId>> watches_; // by literal code: clauses watching it
  std::vector<ClauseId> units_;
  std::vector<ClauseId> pending_; // added but not yet attached to watches
  std::size_t learned_ = 0;
};

/// Unit propagation to fixpoint at the current decision level. Returns the
/// id of a clause whose literals are all false, or nullopt.
std::optional<ClauseId> bcp(Trail& trail, ClauseDb& db);

/// Resolvent of c1 and c2 on `pivot`, duplicates merged.
[[nodiscard]] Clause binary_resolution(const Clause& c1, const Clause& c2, Var pivot);

struct ResolutionStep {
  Clause clause;    // clause before this step
  Lit literal;      // last-assigned literal of `clause`
  Var var = 0;
  Clause antecedent;
};

struct ConflictAnalysis {
  Clause learned;
  int backjump_level = 0;
  std::vector<ResolutionStep> steps;
};

/// Resolves the conflicting clause against antecedents of its last-assigned
/// literals until one literal remains at the current decision level (first
/// UIP). Requires decision level > 0.
[[nodiscard]] ConflictAnalysis analyze_conflict(const Trail& trail, const ClauseDb& db,
                                                const std::vector<Lit>& conflicting);

/// Same resolution loop without the level restriction; used to record the
/// final clause of a conflict at level 0.
[[nodiscard]] ConflictAnalysis derive_clause(const Trail& trail, const ClauseDb& db,
                                             const std::vector<Lit>& conflicting);

/// Erases every assignment above `level`. Requires 0 <= level < current level.
void backtrack(Trail& trail, int level);

struct RestartPolicy {
  std::size_t max_restarts = 3;
  std::size_t node_threshold = 300;
  double time_threshold = 50.0; // seconds
  std::size_t epoch = 0;
};

struct RestartStats {
  std::size_t nodes_processed = 0; // inner-loop iterations in this epoch
  double elapsed = 0.0;            // seconds in this epoch
};

[[nodiscard]] bool should_restart(const RestartPolicy& policy, const RestartStats& stats);

/// Branching score; lower is better. Compared lexicographically.
struct BranchScore {
  double primary = 0.0;
  double secondary = 0.0;
};

using BranchScorer = std::function<BranchScore(Var)>;

/// Picks the unassigned variable with the lowest score (ties by variable id,
/// i.e. (layer, index)) and a seeded random phase. `noise` > 0 perturbs
/// primary scores (used after restarts). Returns nullopt when the trail is
/// total.
[[nodiscard]] std::optional<Lit> decide(const Trail& trail, const BranchScorer& scorer, Rng& rng, double noise = 0.0);

} // namespace relusat
