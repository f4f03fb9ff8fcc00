#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pescg/master.hpp"
#include "pescg/polyhedra.hpp"
#include "pescg/reference.hpp"

using namespace pescg;

namespace {

/// Project the current master solution (pool values plus transfer arcs).
ProjectedSolution project_master(const MasterSolver& ms) {
  return project(ms.expansion(), ms.cycle_pool(), ms.cycle_values(),
                 ms.arc_values());
}

std::vector<int> bounds_l(const EventActivityNetwork& ean) {
  std::vector<int> l(ean.activities.size());
  for (const Activity& a : ean.activities) l[a.id] = a.l;
  return l;
}

std::vector<int> bounds_u(const EventActivityNetwork& ean) {
  std::vector<int> u(ean.activities.size());
  for (const Activity& a : ean.activities) u[a.id] = a.u;
  return u;
}

std::vector<double> tension_of(const Timetable& tt) {
  return std::vector<double>(tt.x.begin(), tt.x.end());
}

}  // namespace

TEST_CASE("integral projection of the one-line instance") {
  ExpandedNetwork d = expand(builtin_instance("single4"));
  MasterSolver ms(d, MasterModel::cxpesp);
  REQUIRE(ms.solve().status == SolveStatus::optimal);
  ProjectedSolution ps = project_master(ms);

  std::vector<double> sorted = ps.x;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<double>{1.0, 1.0, 3.0, 3.0});
  CHECK(ps.objective == doctest::Approx(8.0));
  CHECK(ps.max_violation <= 1e-9);
  CHECK(ps.warning.empty());

  // Integral projections round to a feasible timetable with the same value.
  Timetable tt;
  for (double v : ps.pi) tt.pi.push_back(static_cast<int>(std::lround(v)));
  for (double v : ps.x) tt.x.push_back(static_cast<int>(std::lround(v)));
  for (double v : ps.p) tt.p.push_back(static_cast<int>(std::lround(v)));
  tt.validate(d.ean);
}

TEST_CASE("fractional LP points project into the natural relaxation") {
  for (int variant = 0; variant < 2; ++variant) {
    EventActivityNetwork ean = builtin_instance("2linecross", 3);
    ExpandedNetwork d =
        variant ? expand_waiting_variant(ean) : expand(ean);
    MasterSolver ms(d, variant ? MasterModel::cxpespw : MasterModel::cxpesp);
    ColgenResult r = ms.solve();
    REQUIRE(r.status == SolveStatus::optimal);
    ProjectedSolution ps = project_master(ms);
    CHECK(ps.max_violation <= 1e-7);
    CHECK(ps.objective == doctest::Approx(r.objective));

    // The valid inequalities hold on every line cycle of the projection.
    std::vector<int> l = bounds_l(ean), u = bounds_u(ean);
    Rng rng(7 + variant);
    for (int L = 0; L < ean.num_lines(); ++L) {
      std::vector<int> gamma = line_cycle_gamma(ean, L);
      CHECK(check_cycle_inequality(gamma, ps.x, l, u, ean.T).pass);
      CHECK(check_change_cycle_inequality(gamma, ps.x, l, ean.T).pass);
      for (int trial = 0; trial < 100; ++trial) {
        std::set<int> F;
        for (size_t a = 0; a < gamma.size(); ++a)
          if (gamma[a] && rng.below(2))
            F.insert(static_cast<int>(a));
        CHECK(check_flip_cycle_inequality(gamma, F, ps.x, l, u, ean.T).pass);
      }
    }
  }
}

TEST_CASE("projection rejects inputs violating the master rows") {
  ExpandedNetwork d = expand(builtin_instance("single4"));
  std::vector<CycleColumn> cycles = enumerate_cycles(d, 0);
  REQUIRE(!cycles.empty());
  std::vector<double> values(cycles.size(), 0.0);
  values[0] = 0.5;  // line mass 0.5 != 1
  CHECK_THROWS_AS(project(d, cycles, values, {}), Error);
  CHECK_THROWS_AS(project(d, cycles, {}, {}), Error);  // size mismatch
}

TEST_CASE("projection of an empty network is empty") {
  EventActivityNetwork ean;
  ean.T = 3;
  ExpandedNetwork d = expand(ean);
  ProjectedSolution ps = project(d, {}, {}, {});
  CHECK(ps.x.empty());
  CHECK(ps.objective == 0.0);
}

TEST_CASE("projection warns when a lower bound reaches the period") {
  EventActivityNetwork ean = builtin_instance("single4");
  for (Activity& a : ean.activities)
    if (a.kind == ActivityKind::driving) {
      a.l = a.u = 4;  // cycle duration 12 remains a multiple of T = 4
      a.segments = {{a.omega, 4, 4}};
    }
  ExpandedNetwork d = expand(ean);
  MasterSolver ms(d, MasterModel::cxpesp);
  REQUIRE(ms.solve().status == SolveStatus::optimal);
  ProjectedSolution ps = project_master(ms);
  CHECK(!ps.warning.empty());
  CHECK(ps.x[0] + ps.x[1] + ps.x[2] + ps.x[3] == doctest::Approx(12.0));
}

TEST_CASE("cycle inequality on the one-line optimum") {
  EventActivityNetwork ean = builtin_instance("single4");
  std::vector<int> gamma = line_cycle_gamma(ean, 0);
  IneqVerdict v = check_cycle_inequality(gamma, {1, 3, 1, 3}, bounds_l(ean),
                                         bounds_u(ean), 4, "line_0");
  CHECK(v.pass);
  CHECK(v.lhs == doctest::Approx(2.0));  // 8 / 4 within [ceil(6/4), floor(8/4)]
  CHECK(v.rhs == doctest::Approx(2.0));
  CHECK(v.text == "2 <= 2 <= 2");
}

TEST_CASE("inequalities hold for every exact integral solution") {
  struct Probe {
    const char* name;
    int T;
  };
  for (const Probe& pr :
       {Probe{"single4", 4}, Probe{"single3", 3}, Probe{"2linecross", 5}}) {
    EventActivityNetwork ean = builtin_instance(pr.name, pr.T);
    SolveResult sr = pesp_exact(ean);
    REQUIRE(sr.status == SolveStatus::optimal);
    std::vector<double> x = tension_of(sr.timetable);
    std::vector<int> l = bounds_l(ean), u = bounds_u(ean);
    Rng rng(42);
    for (int L = 0; L < ean.num_lines(); ++L) {
      std::vector<int> gamma = line_cycle_gamma(ean, L);
      std::vector<int> rev = gamma;
      for (int& g : rev) g = -g;  // the reversed orientation is also a cycle
      for (const std::vector<int>& g : {gamma, rev}) {
        CHECK(check_cycle_inequality(g, x, l, u, ean.T).pass);
        CHECK(check_change_cycle_inequality(g, x, l, ean.T).pass);
        for (int trial = 0; trial < 25; ++trial) {
          std::set<int> F;
          for (size_t a = 0; a < g.size(); ++a)
            if (g[a] && rng.below(2)) F.insert(static_cast<int>(a));
          CHECK(check_flip_cycle_inequality(g, F, x, l, u, ean.T).pass);
        }
      }
    }
  }
}

TEST_CASE("boundary and degenerate inequality cases") {
  // x = l on a cycle whose lower-bound sum is a period multiple.
  std::vector<int> gamma{1, 1, 1};
  std::vector<int> l{1, 2, 1}, u{2, 3, 2};
  IneqVerdict cyc = check_cycle_inequality(gamma, {1, 2, 1}, l, u, 4);
  CHECK(cyc.pass);
  CHECK(cyc.lhs == doctest::Approx(1.0));

  // xi = 0 makes the change-cycle right-hand side zero.
  IneqVerdict cc = check_change_cycle_inequality(gamma, {1.5, 2.5, 1}, l, 4);
  CHECK(cc.rhs == 0.0);
  CHECK(cc.pass);
}

TEST_CASE("flip with an empty set equals the change-cycle evaluator") {
  Rng rng(20240517);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const int T = 2 + static_cast<int>(rng.below(11));
    std::vector<int> gamma(n), l(n), u(n);
    std::vector<double> x(n);
    for (int a = 0; a < n; ++a) {
      gamma[a] = static_cast<int>(rng.below(3)) - 1;
      l[a] = static_cast<int>(rng.below(10));
      u[a] = l[a] + static_cast<int>(rng.below(6));
      x[a] = rng.uniform(l[a], u[a] + 1e-12);
    }
    IneqVerdict flip = check_flip_cycle_inequality(gamma, {}, x, l, u, T);
    IneqVerdict cc = check_change_cycle_inequality(gamma, x, l, T);
    CHECK(flip.lhs == doctest::Approx(cc.lhs));
    CHECK(flip.rhs == doctest::Approx(cc.rhs));
    CHECK(flip.pass == cc.pass);
  }
}

TEST_CASE("non-line cycle counterexample: flip inequality fails as 0 >= 4") {
  // A mixed cycle through both lines and two transfers, all forward: four
  // fixed drivings, two turnarounds at their lower bound, two transfers at
  // their upper bound.
  std::vector<int> gamma{1, 1, 1, 1, 1, 1, 1, 1};
  std::vector<int> l{1, 1, 1, 1, 2, 2, 0, 0};
  std::vector<int> u{1, 1, 1, 1, 3, 3, 1, 1};
  std::vector<double> x{1, 1, 1, 1, 2, 2, 1, 1};
  std::set<int> F{6, 7};

  IneqVerdict v = check_flip_cycle_inequality(gamma, F, x, l, u, 4, "mixed");
  CHECK_FALSE(v.pass);
  CHECK(v.lhs == doctest::Approx(0.0));
  CHECK(v.rhs == doctest::Approx(4.0));
  CHECK(v.text == "0 >= 4");
  CHECK(v.F_size == 2);

  // The same tension is outside the split closure of that cycle, while the
  // lattice itself is nonempty (both bound vectors qualify).
  CHECK_FALSE(split_closure_member(gamma, x, l, u, 4));
  CHECK(split_closure_member(gamma, std::vector<double>(l.begin(), l.end()),
                             l, u, 4));
}

TEST_CASE("split closure holds on line cycles of projected LP points") {
  for (const char* name : {"single4", "2linecross"}) {
    EventActivityNetwork ean = builtin_instance(name, name[0] == 's' ? 4 : 3);
    ExpandedNetwork d = expand(ean);
    MasterSolver ms(d, MasterModel::cxpesp);
    REQUIRE(ms.solve().status == SolveStatus::optimal);
    ProjectedSolution ps = project_master(ms);
    for (const SplitVerdict& v : check_split_closure_linecycles(ean, ps.x)) {
      CAPTURE(name);
      CAPTURE(v.line);
      CHECK(v.member);
      CHECK(v.lattice_points >= 1);
    }
  }
}

TEST_CASE("split closure membership of a lattice vertex") {
  std::vector<int> gamma{1, 1};
  std::vector<int> l{1, 3}, u{2, 4};
  CHECK(split_closure_member(gamma, {1.0, 3.0}, l, u, 4));  // g l / T = 1
  CHECK_THROWS_AS(
      split_closure_member(gamma, {1.0, 3.0}, {0, 0}, {99, 99}, 4, 100),
      Error);
}

TEST_CASE("image membership separates the fractional arc point") {
  ExpandedNetwork d = expand(builtin_instance("single3"));
  std::map<int, double> xbar;
  for (const Activity& act : d.ean.activities)
    for (int id : d.arcs_of_activity[act.id])
      xbar[id] = act.kind == ActivityKind::driving ? 1.0 / 3 : 1.0 / 6;
  CHECK(verify_not_in_image(xbar, d));

  // Any cycle-convexity point maps into the image by construction.
  std::vector<CycleColumn> cycles = enumerate_cycles(d, 0);
  REQUIRE(cycles.size() == 3);
  std::map<int, double> mixed, integral;
  for (const CycleColumn& c : cycles)
    for (int a : c.arcs) mixed[a] += 1.0 / 3;
  for (int a : cycles[1].arcs) integral[a] = 1.0;
  CHECK_FALSE(verify_not_in_image(mixed, d));
  CHECK_FALSE(verify_not_in_image(integral, d));
}

TEST_CASE("integral master points are pairwise distinct under the arc map") {
  for (const char* name : {"single3", "single4"}) {
    ExpandedNetwork d = expand(builtin_instance(name));
    std::vector<CycleColumn> cycles = enumerate_cycles(d, 0);
    for (size_t i = 0; i < cycles.size(); ++i)
      for (size_t j = i + 1; j < cycles.size(); ++j) {
        std::vector<int> a = cycles[i].arcs, b = cycles[j].arcs;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a != b);
      }
  }
}

TEST_CASE("per-line bound stays below the column-generation value") {
  for (int T : {3, 5}) {
    EventActivityNetwork ean = builtin_instance("2linecross", T);
    ExpandedNetwork d = expand(ean);
    MasterSolver ms(d, MasterModel::cxpesp);
    ColgenResult r = ms.solve();
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(per_line_lower_bound(ean) <= r.objective + 1e-6);
  }
  // One line, no transfers: the bound is tight.
  EventActivityNetwork ean = builtin_instance("single3");
  CHECK(per_line_lower_bound(ean) == doctest::Approx(6.0));
}

TEST_CASE("verdict table serialization") {
  IneqVerdict v = check_change_cycle_inequality({1, 1}, {1, 1}, {1, 1}, 4,
                                                "line_0");
  std::string tsv = verdict_tsv({v});
  CHECK(tsv.rfind("check;cycle;F_size;lhs;rhs;pass\n", 0) == 0);
  CHECK(tsv.find("change-cycle;line_0;0;") != std::string::npos);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 2);
}
