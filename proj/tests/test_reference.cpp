#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "pescg/reference.hpp"

using namespace pescg;

// A two-event network with explicit activities and no line structure, for
// hand-computable cases.
static EventActivityNetwork tiny(int T, std::vector<std::tuple<int, int, int, int>> acts) {
  EventActivityNetwork ean;
  ean.T = T;
  int maxev = 0;
  for (auto& [tail, head, l, u] : acts) maxev = std::max({maxev, tail, head});
  for (int i = 0; i <= maxev; ++i) {
    Event e;
    e.id = i;
    e.name = "e" + std::to_string(i);
    ean.events.push_back(e);
  }
  for (auto& [tail, head, l, u] : acts) {
    Activity a;
    a.id = static_cast<int>(ean.activities.size());
    a.tail = tail;
    a.head = head;
    a.l = l;
    a.u = u;
    a.omega = 1.0;
    a.segments = {Segment{1.0, l, u}};
    a.name = "a" + std::to_string(a.id);
    ean.activities.push_back(a);
  }
  ean.validate();
  return ean;
}

TEST_CASE("brute force: the 4-event loop has optimum 8") {
  SolveResult r = pesp_bruteforce(builtin_instance("single4"));
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.objective == doctest::Approx(8.0));
  std::multiset<int> tensions(r.timetable.x.begin(), r.timetable.x.end());
  CHECK(tensions == std::multiset<int>{1, 1, 3, 3});

  SolveResult slack = pesp_bruteforce(builtin_instance("single4"), WeightMode::slack);
  REQUIRE(slack.status == SolveStatus::optimal);
  CHECK(slack.objective == doctest::Approx(2.0));  // 8 minus sum of lower bounds 6
}

TEST_CASE("brute force: antiparallel unit activities at T = 3 are infeasible") {
  // x12 + x21 = 2 which is not a multiple of 3, so no timetable exists.
  EventActivityNetwork ean = tiny(3, {{0, 1, 1, 1}, {1, 0, 1, 1}});
  CHECK(pesp_bruteforce(ean).status == SolveStatus::infeasible);
  CHECK(pesp_exact(ean).status == SolveStatus::infeasible);
}

TEST_CASE("brute force: forced single tension") {
  EventActivityNetwork ean = tiny(5, {{0, 1, 2, 2}});
  SolveResult r = pesp_bruteforce(ean);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.objective == doctest::Approx(2.0));
  CHECK(r.timetable.x[0] == 2);
}

TEST_CASE("brute force: enumeration cap is enforced") {
  // 16 free events at T = 5: 5^15 assignments exceed the default cap.
  EventActivityNetwork ean = builtin_instance("2linecross", 5);
  CHECK_THROWS_AS(pesp_bruteforce(ean), Error);
  // The contracted network with 8 events fits comfortably.
  SolveResult r = pesp_bruteforce(contract_degree2(ean));
  CHECK(r.status == SolveStatus::optimal);
}

TEST_CASE("variable elimination agrees with brute force on builtins") {
  for (const char* name : {"single4", "single3"}) {
    for (WeightMode mode : {WeightMode::tension, WeightMode::slack}) {
      SolveResult bf = pesp_bruteforce(builtin_instance(name), mode);
      SolveResult ve = pesp_exact(builtin_instance(name), mode);
      REQUIRE(bf.status == SolveStatus::optimal);
      REQUIRE(ve.status == SolveStatus::optimal);
      CHECK(ve.objective == doctest::Approx(bf.objective));
    }
  }
  EventActivityNetwork c = contract_degree2(builtin_instance("2linecross", 5));
  SolveResult bf = pesp_bruteforce(c);
  SolveResult ve = pesp_exact(c);
  REQUIRE(bf.status == SolveStatus::optimal);
  REQUIRE(ve.status == SolveStatus::optimal);
  CHECK(ve.objective == doctest::Approx(bf.objective));
}

TEST_CASE("variable elimination agrees with brute force on random networks") {
  Rng rng(424242);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    int T = 2 + static_cast<int>(rng.below(5));
    int n = 2 + static_cast<int>(rng.below(4));
    int m = 1 + static_cast<int>(rng.below(7));
    std::vector<std::tuple<int, int, int, int>> acts;
    for (int i = 0; i < m; ++i) {
      int a = static_cast<int>(rng.below(n));
      int b = static_cast<int>(rng.below(n));
      if (a == b) b = (b + 1) % n;
      int l = static_cast<int>(rng.below(T));
      int u = l + static_cast<int>(rng.below(3));
      acts.push_back({a, b, l, u});
    }
    EventActivityNetwork ean = tiny(T, acts);
    SolveResult bf = pesp_bruteforce(ean);
    SolveResult ve = pesp_exact(ean);
    INFO("trial ", trial, " T=", T, " n=", n, " m=", m);
    REQUIRE(bf.status == ve.status);
    if (bf.status == SolveStatus::optimal) {
      CHECK(ve.objective == doctest::Approx(bf.objective));
      ve.timetable.validate(ean);
      ++optimal;
    } else {
      ++infeasible;
    }
  }
  CHECK(optimal > 10);
  CHECK(infeasible > 10);
}

TEST_CASE("relaxation values on the figure instances") {
  CHECK(pesp_lp_value(builtin_instance("single4")) == doctest::Approx(6.0));
  CHECK(pesp_lp_value(builtin_instance("single3")) == doctest::Approx(4.0));
  CHECK(xpesp_lp_value(builtin_instance("single4")) == doctest::Approx(6.0));
  CHECK(xpesp_lp_value(builtin_instance("single3")) == doctest::Approx(4.0));
  // Both relaxations collapse to the weighted lower-bound sum; two
  // independent routes must agree.
  for (const char* name : {"single4", "single3", "2linecross"}) {
    EventActivityNetwork ean = builtin_instance(name);
    CHECK(pesp_lp_value(ean) == doctest::Approx(ean.weighted_lower_bound()));
    CHECK(xpesp_lp_value(ean) == doctest::Approx(ean.weighted_lower_bound()));
  }
}

TEST_CASE("expanded LP verification mode reproduces the closed form") {
  CHECK(xpesp_lp_value_verified(builtin_instance("single4")) == doctest::Approx(6.0));
  CHECK(xpesp_lp_value_verified(builtin_instance("single3")) == doctest::Approx(4.0));
  EventActivityNetwork ean = builtin_instance("2linecross", 3);
  CHECK(xpesp_lp_value_verified(ean) == doctest::Approx(ean.weighted_lower_bound()));
  // All-zero lower bounds: the relaxation value is 0.
  EventActivityNetwork z = tiny(4, {{0, 1, 0, 2}, {1, 0, 0, 3}});
  CHECK(xpesp_lp_value(z) == doctest::Approx(0.0));
  CHECK(xpesp_lp_value_verified(z) == doctest::Approx(0.0));
}

TEST_CASE("cycle enumeration: single3 has exactly 3 cycles of duration 6") {
  ExpandedNetwork d = expand(builtin_instance("single3"));
  std::vector<CycleColumn> cs = enumerate_cycles(d, 0);
  REQUIRE(cs.size() == 3);
  for (const CycleColumn& c : cs) {
    CHECK(c.tau == 6);
    CHECK(c.theta == doctest::Approx(6.0));
    CHECK(c.arcs.size() == 4);
    CHECK(c.nodes.size() == 4);
    // Consecutive arcs chain head to tail, and the walk closes.
    for (size_t i = 0; i < c.arcs.size(); ++i) {
      const ExpandedArc& a = d.arcs[c.arcs[i]];
      const ExpandedArc& b = d.arcs[c.arcs[(i + 1) % c.arcs.size()]];
      CHECK(a.head == b.tail);
    }
  }
  // Cycles must visit distinct event copies: all node ids distinct per cycle.
  for (const CycleColumn& c : cs) {
    std::set<int> uniq(c.nodes.begin(), c.nodes.end());
    CHECK(uniq.size() == c.nodes.size());
  }
}

TEST_CASE("cycle enumeration respects fixing and the cap") {
  ExpandedNetwork d0 = expand(builtin_instance("2linecross", 5));
  std::vector<CycleColumn> all = enumerate_cycles(d0, 0);
  ExpandedNetwork d = fix_event(d0, d0.ean.line_cycles[0][0]);
  std::vector<CycleColumn> fixed = enumerate_cycles(d, 0);
  CHECK(fixed.size() * 5 == all.size());  // one time class survives
  CHECK_THROWS_AS(enumerate_cycles(d0, 0, 2), Error);
  CHECK_THROWS_AS(enumerate_cycles(d0, 7), Error);
}

TEST_CASE("full LP oracle: figure values") {
  SolveResult r4 = cxpesp_lp_full(expand(builtin_instance("single4")));
  REQUIRE(r4.status == SolveStatus::optimal);
  CHECK(r4.objective == doctest::Approx(8.0));
  SolveResult r3 = cxpesp_lp_full(expand(builtin_instance("single3")));
  REQUIRE(r3.status == SolveStatus::optimal);
  CHECK(r3.objective == doctest::Approx(6.0));
  // Without transfers the LP decouples: optimum is the cheapest cycle.
  double best = 1e18;
  for (const CycleColumn& c : enumerate_cycles(expand(builtin_instance("single4")), 0))
    best = std::min(best, c.theta);
  CHECK(r4.objective == doctest::Approx(best));
}

TEST_CASE("full LP oracle on 2linecross, both transfer models") {
  EventActivityNetwork ean = builtin_instance("2linecross", 5);
  make_transfers_free(ean);
  SolveResult std_lp = cxpesp_lp_full(expand(ean));
  SolveResult wait_lp = cxpesp_lp_full(expand_waiting_variant(ean));
  REQUIRE(std_lp.status == SolveStatus::optimal);
  REQUIRE(wait_lp.status == SolveStatus::optimal);
  // With all transfers free both relaxations have the same value.
  CHECK(std_lp.objective == doctest::Approx(wait_lp.objective));

  // With the original tight transfer windows the waiting variant can only be
  // weaker (lower or equal LP value).
  EventActivityNetwork tight = builtin_instance("2linecross", 5);
  SolveResult std_t = cxpesp_lp_full(expand(tight));
  SolveResult wait_t = cxpesp_lp_full(expand_waiting_variant(tight));
  REQUIRE(std_t.status == SolveStatus::optimal);
  REQUIRE(wait_t.status == SolveStatus::optimal);
  CHECK(std_t.objective >= wait_t.objective - 1e-6);
}

TEST_CASE("ordering chain across the relaxations") {
  for (const char* name : {"single4", "single3"}) {
    EventActivityNetwork ean = builtin_instance(name);
    double xlp = xpesp_lp_value(ean);
    double plp = pesp_lp_value(ean);
    SolveResult clp = cxpesp_lp_full(expand(ean));
    SolveResult ip = pesp_bruteforce(ean);
    REQUIRE(clp.status == SolveStatus::optimal);
    REQUIRE(ip.status == SolveStatus::optimal);
    CHECK(xlp <= clp.objective + 1e-6);
    CHECK(clp.objective <= ip.objective + 1e-6);
    CHECK(plp <= ip.objective + 1e-6);
  }
  EventActivityNetwork ean = contract_degree2(builtin_instance("2linecross", 5));
  SolveResult clp = cxpesp_lp_full(expand(ean));
  SolveResult ip = pesp_bruteforce(ean);
  REQUIRE(clp.status == SolveStatus::optimal);
  REQUIRE(ip.status == SolveStatus::optimal);
  CHECK(xpesp_lp_value(ean) <= clp.objective + 1e-6);
  CHECK(clp.objective <= ip.objective + 1e-6);
}

TEST_CASE("contraction preserves the exact optimum") {
  EventActivityNetwork full = builtin_instance("2linecross", 5);
  EventActivityNetwork contracted = contract_degree2(full);
  SolveResult ve_full = pesp_exact(full);
  SolveResult ve_contracted = pesp_exact(contracted);
  REQUIRE(ve_full.status == SolveStatus::optimal);
  REQUIRE(ve_contracted.status == SolveStatus::optimal);
  CHECK(ve_full.objective == doctest::Approx(ve_contracted.objective));
}

TEST_CASE("slack optimum of 2linecross at T = 5 under free transfers") {
  EventActivityNetwork ean = builtin_instance("2linecross", 5);
  make_transfers_free(ean);
  SolveResult r = pesp_bruteforce(contract_degree2(ean), WeightMode::slack);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.objective == doctest::Approx(4.0));
}

TEST_CASE("solve-result TSV serialization") {
  SolveResult r = pesp_bruteforce(builtin_instance("single4"));
  std::string tsv = r.tsv();
  CHECK(tsv.rfind("status;objective;time_ms\n", 0) == 0);
  CHECK(tsv.find("optimal;8") != std::string::npos);
  SolveResult bad;
  CHECK(bad.tsv().find("infeasible;--;") != std::string::npos);
}
