#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace srk;

namespace {

// Pigeonhole: n+1 pigeons, n holes. Unsatisfiable, and hard for small n.
Cnf pigeonhole(int n) {
  Cnf c;
  auto var = [&](int p, int h) { return p * n + h + 1; };
  c.num_vars = (n + 1) * n;
  for (int p = 0; p <= n; ++p) {
    Clause some;
    for (int h = 0; h < n; ++h) some.push_back(var(p, h));
    c.clauses.push_back(some);
  }
  for (int h = 0; h < n; ++h)
    for (int p = 0; p <= n; ++p)
      for (int q = p + 1; q <= n; ++q) c.clauses.push_back({-var(p, h), -var(q, h)});
  return c;
}

}  // namespace

TEST(Cdcl, Trivial) {
  Cnf empty;
  EXPECT_TRUE(solve(empty).sat());
  Cnf unit;
  unit.num_vars = 1;
  unit.clauses = {{1}};
  auto r = solve(unit);
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.value(1));
  unit.clauses.push_back({-1});
  EXPECT_TRUE(solve(unit).unsat());
  Cnf with_empty;
  with_empty.num_vars = 2;
  with_empty.clauses = {{1, 2}, {}};
  EXPECT_TRUE(solve(with_empty).unsat());
}

TEST(Cdcl, DuplicateAndTautologicalLiterals) {
  Cnf c;
  c.num_vars = 2;
  c.clauses = {{1, 1, -2}, {2, -2}, {-1, -1}, {2}};
  EXPECT_TRUE(solve(c).unsat());
}

TEST(Cdcl, RandomAgainstTruthTable) {
  std::mt19937 rng(2024);
  int sat = 0;
  for (int i = 0; i < 500; ++i) {
    int n = 3 + i % 16;
    int m = static_cast<int>(n * (3.0 + (i % 7) * 0.4));
    Cnf c = srk::test::random_3cnf(rng, n, m);
    auto r = solve(c);
    ASSERT_NE(r.status, SolveStatus::Unknown);
    ASSERT_EQ(r.sat(), srk::test::brute_force_sat(c)) << emit_dimacs(c);
    if (r.sat()) {
      ++sat;
      ASSERT_TRUE(c.satisfied_by(r.model));
    }
  }
  // The mix should exercise both answers.
  EXPECT_GT(sat, 50);
  EXPECT_LT(sat, 450);
}

// Every learned clause holds in every model of the input.
TEST(Cdcl, LearnedClausesAreEntailed) {
  std::mt19937 rng(99);
  std::size_t learned = 0;
  for (int i = 0; i < 60; ++i) {
    const int n = 14;
    Cnf c = srk::test::random_3cnf(rng, n, 60);
    CdclSolver s(c);
    s.solve();
    learned += s.learned_clauses().size();
    std::vector<bool> a(n + 1);
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      for (int v = 1; v <= n; ++v) a[v] = (m >> (v - 1)) & 1;
      if (!c.satisfied_by(a)) continue;
      for (const auto& l : s.learned_clauses()) {
        bool ok = false;
        for (int lit : l) ok = ok || (lit > 0) == a[std::abs(lit)];
        ASSERT_TRUE(ok);
      }
    }
  }
  EXPECT_GT(learned, 0u);
}

TEST(Cdcl, Pigeonhole) {
  for (int n = 2; n <= 6; ++n) EXPECT_TRUE(solve(pigeonhole(n)).unsat()) << n;
}

TEST(Cdcl, BudgetGivesUnknown) {
  SolverOptions opts;
  opts.conflict_budget = 5;
  auto r = solve(pigeonhole(8), opts);
  EXPECT_EQ(r.status, SolveStatus::Unknown);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Cdcl, IncrementalClauses) {
  CdclSolver s(3);
  s.add_clause({1, 2, 3});
  auto r = s.solve();
  ASSERT_TRUE(r.sat());
  s.add_clause({-1});
  s.add_clause({-2});
  r = s.solve();
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.value(3));
  s.add_clause({-3});
  EXPECT_TRUE(s.solve().unsat());
}

TEST(Cdcl, OptionsDoNotChangeAnswers) {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    Cnf c = srk::test::random_3cnf(rng, 16, 70);
    SolverOptions alt;
    alt.restart_base = 4;
    alt.var_decay = 0.8;
    alt.initial_phase = true;
    EXPECT_EQ(solve(c).status, solve(c, alt).status);
  }
}

TEST(Cdcl, SolverOutputFormat) {
  SolveResult r;
  r.status = SolveStatus::Satisfiable;
  r.model = {false, true, false};
  EXPECT_EQ(format_solver_output(r), "s SATISFIABLE\nv 1 -2 0\n");
  r.status = SolveStatus::Unsatisfiable;
  EXPECT_EQ(format_solver_output(r), "s UNSATISFIABLE\n");
}
