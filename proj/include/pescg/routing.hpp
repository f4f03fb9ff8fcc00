#pragma once

#include <string>
#include <vector>

#include "pescg/expansion.hpp"
#include "pescg/instance.hpp"
#include "pescg/reference.hpp"

namespace pescg {

/// A station-to-station path on the event-activity network itself: the
/// passenger boards at a departure event of the origin station and alights
/// at an arrival event of the destination.  Turnarounds are never ridden.
struct CandidatePath {
  std::vector<int> events;  // visited events; front departs at s, back arrives at t
  std::vector<int> acts;    // activity ids joining consecutive events
  long l_cost = 0;          // sum of activity lower bounds
  long u_cost = 0;          // sum of activity upper bounds
};

/// All simple s-t paths that can be a shortest path for some tension within
/// the bounds, via the sound superset criterion: keep p iff
/// l_cost(p) <= min over all s-t paths of u_cost.  Throws when s or t is
/// unknown, s == t, no path exists, or more than cap paths are explored.
std::vector<CandidatePath> candidate_paths(const EventActivityNetwork& ean,
                                           int s, int t, long cap = 100000L);

/// Per OD pair: the subgraph of the expansion induced by all candidate
/// paths (the union of their activities' arcs); the implicit path set P_st
/// is the set of simple entry-to-exit paths inside this subgraph.
struct RoutingGraph {
  int od = -1;  // index into the ODMatrix entries
  int s = -1;
  int t = -1;
  bool reachable = false;
  std::vector<int> arcs;          // expanded arc ids, sorted, unique
  std::vector<int> entry_events;  // departure events at s used by candidates
  std::vector<int> exit_events;   // arrival events at t used by candidates

  std::string dump_tsv(const ExpandedNetwork& d) const;
};

std::vector<RoutingGraph> build_routing_graphs(const ExpandedNetwork& d,
                                               const ODMatrix& od,
                                               long cap = 100000L);

/// One passenger-path variable of the routing master.
struct PathColumn {
  int od = -1;
  std::vector<int> arcs;  // expanded arc ids in travel order
  long tau = 0;           // sum of arc durations
  double cost = 0.0;      // demand * tau
};

/// Oracle: every simple entry-to-exit path of the routing graph (cap bound).
std::vector<PathColumn> enumerate_expanded_paths(const ExpandedNetwork& d,
                                                 const RoutingGraph& g,
                                                 long demand,
                                                 long cap = 1000000L);

struct PathPricingResult {
  bool found = false;     // a column with reduced cost < -1e-7 exists
  bool reachable = true;  // some entry-to-exit path exists at all
  PathColumn col;
  double redcost = 0.0;   // best path cost minus nu_st (when reachable)
};

/// One Dijkstra run per OD pair: arc cost demand * tau_a + rho[arc]
/// (rho >= 0 entrywise; an empty vector means zero).  The cheapest
/// entry-to-exit path is emitted iff its cost < nu_st - 1e-7.
PathPricingResult price_path(const ExpandedNetwork& d, const RoutingGraph& g,
                             long demand, double nu_st,
                             const std::vector<double>& rho = {});

/// Weighted shortest-path lower bound: sum over OD pairs of demand times the
/// length of a shortest s-t path with every activity at its lower bound.
/// Throws when some pair is unreachable.
double ttp_shortest_path_bound(const EventActivityNetwork& ean,
                               const ODMatrix& od);

/// Exact optimum of timetabling with integrated passenger routing: enumerate
/// all vehicle-feasible timetables line by line, route every OD pair on a
/// shortest path under the realized durations, and minimize vehicle cost
/// plus demand-weighted travel time.  cap bounds the timetable combinations.
SolveResult ttp_bruteforce(const EventActivityNetwork& ean, const ODMatrix& od,
                           long cap = 100000000L);

/// Full-enumeration LP of the routing master: every cycle of every line and
/// every path of every routing graph materialized, with all coupling rows.
/// The direct oracle for the column-generation version.
SolveResult cxttp_lp_full(const ExpandedNetwork& d, const ODMatrix& od,
                          long cycle_cap = 1000000L, long path_cap = 1000000L);

}  // namespace pescg
