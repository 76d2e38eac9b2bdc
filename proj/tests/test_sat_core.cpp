#include <doctest.h>

#include "cnf_support.hpp"
#include "relusat/sat_core.hpp"
#include "support.hpp"

using namespace relusat;
using namespace relusat::testing;

namespace {

Lit pos(Var v) { return Lit(v, true); }
Lit neg(Var v) { return Lit(v, false); }

Clause clause(std::vector<Lit> lits) { return Clause{std::move(lits), ClauseOrigin::initial}; }

} // namespace

TEST_CASE("boolean abstraction of the two-neuron network") {
  const Network net = two_neuron_net();
  const BooleanAbstraction abs = boolean_abstraction(net);
  REQUIRE(abs.num_vars() == 2);
  CHECK(abs.neuron_of(0) == NeuronId{1, 0});
  CHECK(abs.neuron_of(1) == NeuronId{1, 1});
  REQUIRE(abs.clauses.size() == 2);
  for (Var v = 0; v < 2; ++v) {
    CHECK(abs.clauses[v].same_literals(clause({pos(v), neg(v)})));
    CHECK(abs.clauses[v].origin == ClauseOrigin::initial);
    CHECK(abs.var_of(abs.neuron_of(v)) == v);
  }
}

TEST_CASE("literal encoding") {
  const Lit a(7, true);
  CHECK(a.var() == 7);
  CHECK(a.positive());
  CHECK((~a).var() == 7);
  CHECK_FALSE((~a).positive());
  CHECK(~~a == a);
  CHECK(to_string(~a) == "~v7");
}

TEST_CASE("binary resolution") {
  SUBCASE("two-neuron network") {
    const Clause r = binary_resolution(clause({neg(3), neg(4)}), clause({neg(1), pos(3), pos(5)}), 3);
    CHECK(r.same_literals(clause({neg(4), neg(1), pos(5)})));
  }
  SUBCASE("unit") {
    const Clause r = binary_resolution(clause({pos(0), pos(1)}), clause({neg(1)}), 1);
    CHECK(r.same_literals(clause({pos(0)})));
  }
  SUBCASE("duplicates merge") {
    const Clause r = binary_resolution(clause({pos(0), pos(1)}), clause({pos(0), neg(1)}), 1);
    CHECK(r.literals.size() == 1);
  }
  SUBCASE("bad pivots") {
    CHECK_THROWS_AS((void)binary_resolution(clause({pos(0)}), clause({pos(0)}), 0), ContractViolation);
    CHECK_THROWS_AS((void)binary_resolution(clause({pos(0)}), clause({pos(1)}), 0), ContractViolation);
  }
  SUBCASE("resolvent is entailed") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t vars = 2 + rng.next() % 5;
      Cnf pair = random_cnf(rng, vars, 2);
      const auto pivot = static_cast<Var>(rng.next() % vars);
      std::erase_if(pair[0], [&](Lit l) { return l.var() == pivot; });
      std::erase_if(pair[1], [&](Lit l) { return l.var() == pivot; });
      pair[0].push_back(pos(pivot));
      pair[1].push_back(neg(pivot));
      const Clause r = binary_resolution(clause(pair[0]), clause(pair[1]), pivot);
      std::vector<bool> model(vars);
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << vars); ++m) {
        for (std::size_t v = 0; v < vars; ++v) model[v] = ((m >> v) & 1U) != 0;
        if (satisfies(pair, model)) REQUIRE(satisfies({r.literals}, model));
      }
    }
  }
}

TEST_CASE("BCP on the implication-graph example") {
  GraphFixture f;
  const auto conflict = bcp(f.trail, f.db);
  REQUIRE(conflict.has_value());
  CHECK(*conflict == f.c4);
  for (Var v : {2U, 3U, 4U}) {
    CHECK(f.trail.value(pos(v)) == LBool::true_);
    CHECK(f.trail.level_of(v) == 6);
    CHECK(f.trail.entry_of(v).kind == Antecedent::propagated);
  }
  f.trail.check_invariants(f.db);

  const ConflictAnalysis ca = analyze_conflict(f.trail, f.db, f.db.at(*conflict).literals);
  CHECK(ca.learned.same_literals(clause({neg(1), pos(5)})));
  CHECK(ca.backjump_level == 3);
}

TEST_CASE("first-UIP resolution chain in trail order v2, v4, v3") {
  GraphFixture f;
  f.trail.push_propagated(pos(2), f.c1);
  f.trail.push_propagated(pos(4), f.c3);
  f.trail.push_propagated(pos(3), f.c2);
  f.trail.check_invariants(f.db);

  const ConflictAnalysis ca = analyze_conflict(f.trail, f.db, f.db.at(f.c4).literals);
  REQUIRE(ca.steps.size() == 3);
  CHECK(ca.steps[0].var == 3);
  CHECK(ca.steps[0].antecedent.same_literals(f.db.at(f.c2)));
  CHECK(ca.steps[1].clause.same_literals(clause({neg(4), neg(1), pos(5)})));
  CHECK(ca.steps[1].var == 4);
  CHECK(ca.steps[2].clause.same_literals(clause({neg(1), pos(5), neg(2)})));
  CHECK(ca.steps[2].var == 2);
  CHECK(ca.learned.same_literals(clause({neg(1), pos(5)})));
  CHECK(ca.backjump_level == 3);

  backtrack(f.trail, 3);
  CHECK(f.trail.decision_level() == 3);
  CHECK(f.trail.size() == 3);
  CHECK(f.trail.entries().back().lit == neg(5));
  CHECK(f.trail.value(1) == LBool::undef);
}

TEST_CASE("conflict analysis with a single decision") {
  ClauseDb db(2);
  Trail trail(2);
  trail.push_decision(neg(1));
  const ConflictAnalysis ca = analyze_conflict(trail, db, {pos(1)});
  CHECK(ca.learned.same_literals(clause({pos(1)})));
  CHECK(ca.backjump_level == 0);
  CHECK(ca.steps.empty());

  Trail other(1);
  other.push_decision(pos(0));
  CHECK(analyze_conflict(other, db, {neg(0)}).learned.same_literals(clause({neg(0)})));
}

TEST_CASE("conflict analysis at level 0 is refused") {
  ClauseDb db(1);
  const ClauseId unit = db.add(clause({pos(0)}));
  Trail trail(1);
  REQUIRE_FALSE(bcp(trail, db).has_value());
  CHECK_THROWS_AS((void)analyze_conflict(trail, db, {neg(0)}), ContractViolation);
  const ConflictAnalysis ca = derive_clause(trail, db, {neg(0)});
  CHECK(ca.learned.same_literals(clause({neg(0)})));
  CHECK(trail.entry_of(0).clause == unit);
}

TEST_CASE("backtrack contract") {
  GraphFixture f;
  CHECK_THROWS_AS(backtrack(f.trail, 6), ContractViolation);
  CHECK_THROWS_AS(backtrack(f.trail, -1), ContractViolation);
  backtrack(f.trail, 0);
  CHECK(f.trail.size() == 0);
  CHECK(f.trail.decision_level() == 0);
}

TEST_CASE("BCP with a unary clause at level 0") {
  ClauseDb db(2);
  db.add(clause({pos(1)}));
  Trail trail(2);
  CHECK_FALSE(bcp(trail, db).has_value());
  REQUIRE(trail.size() == 1);
  CHECK(trail.entries()[0].lit == pos(1));
  CHECK(trail.entries()[0].level == 0);
}

TEST_CASE("BCP without unit clauses leaves the trail alone") {
  ClauseDb db(3);
  db.add(clause({pos(0), pos(1)}));
  db.add(clause({pos(1), neg(2)}));
  db.add(clause({pos(2), neg(2)}));
  Trail trail(3);
  CHECK_FALSE(bcp(trail, db).has_value());
  CHECK(trail.size() == 0);
}

TEST_CASE("clause invariants") {
  ClauseDb db(3);
  CHECK_THROWS_AS(db.add(Clause{{pos(0), neg(0)}, ClauseOrigin::learned}), ContractViolation);
  CHECK_THROWS_AS(db.add(clause({pos(5)})), ContractViolation);
  const ClauseId id = db.add(clause({pos(0), pos(0), neg(1)}));
  CHECK(db.at(id).literals.size() == 2);
  CHECK(db.contains(clause({neg(1), pos(0)})));
  CHECK(db.learned_count() == 0);
}

TEST_CASE("trail rejects malformed pushes") {
  Trail trail(2);
  trail.push_decision(pos(0));
  CHECK_THROWS_AS(trail.push_decision(neg(0)), ContractViolation);
  CHECK_THROWS_AS(trail.push_implied(pos(1), {neg(0)}), ContractViolation);
  ClauseDb db(2);
  trail.push_implied(pos(1), {pos(1), neg(0)});
  trail.check_invariants(db);
}

TEST_CASE("restart trigger") {
  RestartPolicy policy;
  CHECK(should_restart(policy, {301, 0.0}));
  CHECK(should_restart(policy, {10, 51.0}));
  CHECK_FALSE(should_restart(policy, {10, 1.0}));
  CHECK_FALSE(should_restart(policy, {300, 50.0}));
  policy.epoch = policy.max_restarts;
  CHECK_FALSE(should_restart(policy, {1000, 100.0}));
}

TEST_CASE("decide") {
  Rng rng(3);
  const BranchScorer flat = [](Var) { return BranchScore{}; };
  SUBCASE("total trail") {
    Trail trail(1);
    trail.push_decision(pos(0));
    CHECK_FALSE(decide(trail, flat, rng).has_value());
  }
  SUBCASE("single candidate") {
    Trail trail(3);
    trail.push_decision(pos(0));
    trail.push_decision(pos(2));
    CHECK(decide(trail, flat, rng)->var() == 1);
  }
  SUBCASE("ties go to the lowest variable") {
    Trail trail(4);
    CHECK(decide(trail, flat, rng)->var() == 0);
  }
  SUBCASE("lowest primary score, then lowest secondary") {
    Trail trail(3);
    const BranchScorer s = [](Var v) {
      if (v == 0) return BranchScore{2.0, 0.0};
      if (v == 1) return BranchScore{1.0, 1.0};
      return BranchScore{1.0, -1.0};
    };
    CHECK(decide(trail, s, rng)->var() == 2);
  }
  SUBCASE("phase is reproducible per seed") {
    Trail trail(1);
    Rng a(kReferenceSeed);
    Rng b(kReferenceSeed);
    CHECK(decide(trail, flat, a) == decide(trail, flat, b));
    Rng c(kReferenceSeed);
    CHECK_FALSE(decide(trail, flat, c)->positive());
  }
}

TEST_CASE("two-watched-literal BCP agrees with naive scanning") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t vars = 3 + rng.next() % 10;
    const Cnf cnf = random_cnf(rng, vars, vars * (1 + rng.next() % 4));
    ClauseDb db(vars);
    for (const auto& c : cnf) db.add(clause(c));
    Trail trail(vars);
    bool conflict = bcp(trail, db).has_value();
    // a few decisions, each followed by propagation
    for (int d = 0; d < 3 && !conflict; ++d) {
      std::optional<Var> free;
      for (Var v = 0; v < vars && !free; ++v) {
        if (trail.value(v) == LBool::undef) free = v;
      }
      if (!free) break;
      std::vector<LBool> before(vars);
      for (Var v = 0; v < vars; ++v) before[v] = trail.value(v);
      const Lit dec(*free, rng.coin());
      before[dec.var()] = dec.positive() ? LBool::true_ : LBool::false_;
      const auto naive = naive_unit_closure(cnf, before);

      trail.push_decision(dec);
      conflict = bcp(trail, db).has_value();
      REQUIRE(conflict == !naive.has_value());
      if (!conflict) {
        trail.check_invariants(db);
        std::size_t at_level = 0;
        for (const TrailEntry& e : trail.entries()) at_level += e.level == trail.decision_level() ? 1 : 0;
        CHECK(at_level == naive->size() + 1);
        for (Lit l : *naive) CHECK(trail.value(l) == LBool::true_);
      }
    }
  }
}

TEST_CASE("CDCL core agrees with the truth table") {
  Rng rng(77);
  std::size_t sat = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t vars = 2 + rng.next() % 11;
    const Cnf cnf = random_cnf(rng, vars, vars * (2 + rng.next() % 4));
    const CdclRun run = run_cdcl(cnf, vars, rng);
    REQUIRE(run.sat == brute_force_sat(cnf, vars));
    if (run.sat) {
      CHECK(satisfies(cnf, run.model));
      ++sat;
    }
  }
  CHECK(sat > 50);
  CHECK(sat < 450);
}

TEST_CASE("restart keeps learned clauses and re-propagates units") {
  ClauseDb db(3);
  db.add(clause({pos(0), pos(1)}));
  Trail trail(3);
  trail.push_decision(neg(0));
  REQUIRE_FALSE(bcp(trail, db).has_value());
  db.add(Clause{{pos(2)}, ClauseOrigin::learned});
  trail.clear();
  CHECK(trail.size() == 0);
  CHECK(trail.decision_level() == 0);
  REQUIRE_FALSE(bcp(trail, db).has_value());
  CHECK(trail.value(pos(2)) == LBool::true_);
  CHECK(db.learned_count() == 1);
}
