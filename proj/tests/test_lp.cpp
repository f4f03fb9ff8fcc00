#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "lp_oracle.hpp"
#include "pescg/lp.hpp"
#include "pescg/util.hpp"

using namespace pescg;
using Rational = boost::multiprecision::cpp_rational;

static LpColumn col(double obj, std::vector<std::pair<int, double>> entries,
                    double lb = 0.0, double ub = kInf) {
  LpColumn c;
  c.obj = obj;
  c.entries = std::move(entries);
  c.lb = lb;
  c.ub = ub;
  return c;
}

TEST_CASE("simplex solves a textbook inequality LP") {
  // min -3x - 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18, x, y >= 0
  // Optimum at (2, 6): objective -36.
  LinearProgram lp;
  lp.add_row('<', 4);
  lp.add_row('<', 12);
  lp.add_row('<', 18);
  lp.add_col(col(-3, {{0, 1}, {2, 3}}));
  lp.add_col(col(-5, {{1, 2}, {2, 2}}));
  LpSolution s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.obj == doctest::Approx(-36));
  CHECK(s.x[0] == doctest::Approx(2));
  CHECK(s.x[1] == doctest::Approx(6));
  // Dual sign convention: y_i <= 0 cannot happen for active '<' rows of a
  // minimization with negative costs; duals must reproduce the objective.
  double dual_obj = 0;
  for (int i = 0; i < 3; ++i) dual_obj += s.y[i] * lp.rhs[i];
  CHECK(dual_obj == doctest::Approx(-36));
}

TEST_CASE("equality and >= rows need phase 1") {
  // min x + 2y  s.t.  x + y = 3, x - y >= 1, x, y >= 0.  Opt (3, 0): 3? No:
  // y free to 1 gives x=2,y=1 obj 4 > 3; optimum x=3,y=0, obj 3.
  LinearProgram lp;
  lp.add_row('=', 3);
  lp.add_row('>', 1);
  lp.add_col(col(1, {{0, 1}, {1, 1}}));
  lp.add_col(col(2, {{0, 1}, {1, -1}}));
  LpSolution s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.obj == doctest::Approx(3));
  CHECK(s.x[0] == doctest::Approx(3));
  CHECK(s.x[1] == doctest::Approx(0));
}

TEST_CASE("infeasible and unbounded LPs are reported as such") {
  {
    LinearProgram lp;  // x <= 1 and x >= 2
    lp.add_row('<', 1);
    lp.add_row('>', 2);
    lp.add_col(col(0, {{0, 1}, {1, 1}}));
    CHECK(lp_solve(lp).status == LpStatus::infeasible);
  }
  {
    LinearProgram lp;  // min -x, x >= 1
    lp.add_row('>', 1);
    lp.add_col(col(-1, {{0, 1}}));
    CHECK(lp_solve(lp).status == LpStatus::unbounded);
  }
}

TEST_CASE("variable bounds: upper bounds and bound flips") {
  // min -x - y  s.t.  x + y <= 8, x in [0, 3], y in [1, 4].  Opt (3, 4): -7.
  LinearProgram lp;
  lp.add_row('<', 8);
  lp.add_col(col(-1, {{0, 1}}, 0, 3));
  lp.add_col(col(-1, {{0, 1}}, 1, 4));
  LpSolution s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.obj == doctest::Approx(-7));
  CHECK(s.x[0] == doctest::Approx(3));
  CHECK(s.x[1] == doctest::Approx(4));
}

TEST_CASE("nonzero lower bounds feed phase 1 correctly") {
  // min x + y  s.t.  x + y >= 5, x in [2, 10], y in [0, 1].  Opt (4, 1): 5.
  LinearProgram lp;
  lp.add_row('>', 5);
  lp.add_col(col(1, {{0, 1}}, 2, 10));
  lp.add_col(col(1, {{0, 1}}, 0, 1));
  LpSolution s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.obj == doctest::Approx(5));
}

TEST_CASE("free variables") {
  // min x  s.t.  x + y = 2, y <= 1, y >= 0, x free.  Opt x = 1.
  LinearProgram lp;
  lp.add_row('=', 2);
  lp.add_col(col(1, {{0, 1}}, -kInf, kInf));
  lp.add_col(col(0, {{0, 1}}, 0, 1));
  LpSolution s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.obj == doctest::Approx(1));
}

TEST_CASE("warm-started column addition never increases the objective") {
  // Set-cover-ish master: two '=' rows, expensive initial columns.
  LinearProgram lp;
  lp.add_row('=', 1);
  lp.add_row('=', 1);
  lp.add_col(col(10, {{0, 1}}));
  lp.add_col(col(10, {{1, 1}}));
  SimplexSolver solver(lp);
  LpSolution s0 = solver.solve();
  REQUIRE(s0.status == LpStatus::optimal);
  CHECK(s0.obj == doctest::Approx(20));

  solver.add_columns({col(7, {{0, 1}, {1, 1}})});
  LpSolution s1 = solver.solve();
  REQUIRE(s1.status == LpStatus::optimal);
  CHECK(s1.obj == doctest::Approx(7));
  CHECK(s1.obj <= s0.obj + 1e-9);
  CHECK(s1.x.size() == 3);

  // Adding a non-improving column leaves the optimum unchanged.
  solver.add_columns({col(50, {{0, 1}})});
  LpSolution s2 = solver.solve();
  REQUIRE(s2.status == LpStatus::optimal);
  CHECK(s2.obj == doctest::Approx(7));
  // Reduced cost of the useless column is nonnegative at optimality.
  CHECK(s2.redcost[3] >= -1e-9);
}

TEST_CASE("iterated column addition matches cold solves") {
  Rng rng(7);
  LinearProgram lp;
  int m = 6;
  for (int i = 0; i < m; ++i) lp.add_row('=', 1);  // all-ones column keeps this feasible
  for (int j = 0; j < 4; ++j) {
    std::vector<std::pair<int, double>> e;
    for (int i = 0; i < m; ++i)
      if (rng.below(2)) e.push_back({i, 1.0});
    if (e.empty()) e.push_back({0, 1.0});
    lp.add_col(col(20 + static_cast<double>(rng.below(10)), e));
  }
  // Ensure feasibility with one all-rows column.
  {
    std::vector<std::pair<int, double>> e;
    for (int i = 0; i < m; ++i) e.push_back({i, 1.0});
    lp.add_col(col(100, e));
  }
  SimplexSolver warm(lp);
  LpSolution prev = warm.solve();
  REQUIRE(prev.status == LpStatus::optimal);
  for (int round = 0; round < 10; ++round) {
    std::vector<std::pair<int, double>> e;
    for (int i = 0; i < m; ++i)
      if (rng.below(2)) e.push_back({i, 1.0});
    if (e.empty()) e.push_back({static_cast<int>(rng.below(m)), 1.0});
    LpColumn c = col(1 + static_cast<double>(rng.below(25)), e);
    warm.add_columns({c});
    LpSolution cur = warm.solve();
    REQUIRE(cur.status == LpStatus::optimal);
    CHECK(cur.obj <= prev.obj + 1e-7);
    LpSolution cold = lp_solve(warm.lp());
    REQUIRE(cold.status == LpStatus::optimal);
    CHECK(cur.obj == doctest::Approx(cold.obj).epsilon(1e-9));
    prev = cur;
  }
}

// ---------------------------------------------------------------------------
// Randomized cross-check against the exact rational tableau oracle.
// ---------------------------------------------------------------------------

TEST_CASE("random LPs agree with the exact tableau oracle") {
  Rng rng(20240518);
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int m = 1 + static_cast<int>(rng.below(8));
    int n = 1 + static_cast<int>(rng.below(8));
    std::vector<std::vector<int>> a(m, std::vector<int>(n));
    std::vector<int> b(m), c(n);
    std::vector<char> sense(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a[i][j] = static_cast<int>(rng.below(7)) - 3;
      b[i] = static_cast<int>(rng.below(9));  // nonnegative: skew feasible
      sense[i] = "<=>"[rng.below(3)];
    }
    // Mostly positive costs so bounded optima dominate, with enough negative
    // ones to still hit unbounded cases.
    for (int j = 0; j < n; ++j) c[j] = static_cast<int>(rng.below(11)) - 2;

    LinearProgram lp;
    for (int i = 0; i < m; ++i) lp.add_row(sense[i], b[i]);
    for (int j = 0; j < n; ++j) {
      std::vector<std::pair<int, double>> e;
      for (int i = 0; i < m; ++i)
        if (a[i][j]) e.push_back({i, static_cast<double>(a[i][j])});
      lp.add_col(col(c[j], e));
    }
    LpSolution got = lp_solve(lp);

    std::vector<std::vector<Rational>> qa(m, std::vector<Rational>(n));
    std::vector<Rational> qb(m), qc(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) qa[i][j] = a[i][j];
      qb[i] = b[i];
    }
    for (int j = 0; j < n; ++j) qc[j] = c[j];
    auto want = lp_oracle::solve<Rational>(qa, sense, qb, qc);

    INFO("trial ", trial, " m=", m, " n=", n);
    switch (want.status) {
      case lp_oracle::Status::optimal: {
        REQUIRE(got.status == LpStatus::optimal);
        double w = static_cast<double>(want.obj);
        CHECK(got.obj == doctest::Approx(w).epsilon(1e-7));
        // Primal feasibility of the reported point.
        for (int i = 0; i < m; ++i) {
          double lhs = 0;
          for (int j = 0; j < n; ++j) lhs += a[i][j] * got.x[j];
          if (sense[i] == '<') CHECK(lhs <= b[i] + 1e-6);
          if (sense[i] == '>') CHECK(lhs >= b[i] - 1e-6);
          if (sense[i] == '=') CHECK(lhs == doctest::Approx(b[i]).epsilon(1e-6));
        }
        for (int j = 0; j < n; ++j) CHECK(got.x[j] >= -1e-7);
        // Dual feasibility: reduced costs nonnegative for x >= 0 variables.
        for (int j = 0; j < n; ++j)
          if (got.x[j] > 1e-7) CHECK(std::abs(got.redcost[j]) < 1e-6);
        ++optimal;
        break;
      }
      case lp_oracle::Status::infeasible:
        CHECK(got.status == LpStatus::infeasible);
        ++infeasible;
        break;
      case lp_oracle::Status::unbounded:
        CHECK(got.status == LpStatus::unbounded);
        ++unbounded;
        break;
    }
  }
  // The generator must exercise all three outcomes to be a meaningful test.
  CHECK(optimal > 50);
  CHECK(infeasible > 20);
  CHECK(unbounded > 20);
}

TEST_CASE("medium random equality LPs agree with the oracle") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    int m = 10, n = 18;
    std::vector<std::vector<int>> a(m, std::vector<int>(n, 0));
    std::vector<int> b(m), c(n);
    std::vector<char> sense(m, '=');
    // Build b as A * (random nonnegative point) so the LP is feasible.
    std::vector<int> x0(n);
    for (int j = 0; j < n; ++j) x0[j] = static_cast<int>(rng.below(3));
    for (int i = 0; i < m; ++i) {
      int acc = 0;
      for (int j = 0; j < n; ++j) {
        a[i][j] = static_cast<int>(rng.below(5)) - 2;
        acc += a[i][j] * x0[j];
      }
      b[i] = acc;
    }
    for (int j = 0; j < n; ++j) c[j] = 1 + static_cast<int>(rng.below(9));

    LinearProgram lp;
    for (int i = 0; i < m; ++i) lp.add_row('=', b[i]);
    for (int j = 0; j < n; ++j) {
      std::vector<std::pair<int, double>> e;
      for (int i = 0; i < m; ++i)
        if (a[i][j]) e.push_back({i, static_cast<double>(a[i][j])});
      lp.add_col(col(c[j], e));
    }
    LpSolution got = lp_solve(lp);
    REQUIRE(got.status == LpStatus::optimal);

    std::vector<std::vector<Rational>> qa(m, std::vector<Rational>(n));
    std::vector<Rational> qb(m), qc(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) qa[i][j] = a[i][j];
      qb[i] = b[i];
    }
    for (int j = 0; j < n; ++j) qc[j] = c[j];
    auto want = lp_oracle::solve<Rational>(qa, sense, qb, qc);
    REQUIRE(want.status == lp_oracle::Status::optimal);
    INFO("trial ", trial);
    CHECK(got.obj == doctest::Approx(static_cast<double>(want.obj)).epsilon(1e-7));
  }
}

TEST_CASE("LP dump is parseable-looking text") {
  LinearProgram lp;
  lp.add_row('<', 4, "cap");
  lp.add_col(col(-3, {{0, 1}}, 0, 2));
  std::string text = lp.dump();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("cap:") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("validate rejects malformed programs") {
  LinearProgram lp;
  lp.add_row('<', 1);
  LpColumn bad;
  bad.lb = 2;
  bad.ub = 1;
  lp.add_col(bad);
  CHECK_THROWS_AS(lp.validate(), Error);

  LinearProgram lp2;
  lp2.add_row('?', 1);
  CHECK_THROWS_AS(lp2.validate(), Error);
}
