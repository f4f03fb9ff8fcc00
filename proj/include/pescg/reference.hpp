#pragma once

#include <string>
#include <vector>

#include "pescg/expansion.hpp"
#include "pescg/instance.hpp"

namespace pescg {

// Small exact solvers used as oracles for the column-generation code paths.
// They share no machinery with the master/pricing implementation on purpose.

enum class WeightMode { tension, slack };
enum class SolveStatus { optimal, infeasible, time_limit };

const char* to_string(SolveStatus s);

struct Timetable {
  std::vector<int> pi;  // event -> [0, T-1]
  std::vector<int> x;   // activity -> tension in [l, u]
  std::vector<int> p;   // activity -> periodic offset, x = pi_w - pi_v + T p

  /// Throws unless all invariants hold for the given network.
  void validate(const EventActivityNetwork& ean) const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;  // present iff optimal
  Timetable timetable;     // filled by the pi-based solvers
  std::vector<double> cycle_weights;  // filled by the LP oracles (per column)
  long nodes = 0;          // enumeration / search effort
  double time_ms = 0.0;

  std::string tsv() const;  // "status;objective;time_ms"
};

/// Exhaustive enumeration of timetables with one event pinned to 0.  For each
/// pi the cheapest feasible tension per activity is chosen (valid since all
/// weights are nonnegative).  Throws when T^(|V|-1) exceeds the cap.
SolveResult pesp_bruteforce(const EventActivityNetwork& ean,
                            WeightMode mode = WeightMode::tension,
                            long cap = 100000000L);

/// Exact optimum by bucket (variable) elimination over the activity graph;
/// handles instances whose treewidth is small even when T^(|V|-1) is not.
/// cell_cap bounds the largest intermediate table.
SolveResult pesp_exact(const EventActivityNetwork& ean,
                       WeightMode mode = WeightMode::tension,
                       long cell_cap = 50000000L);

/// Optimum of the natural LP relaxation (continuous pi and p), solved with
/// the production LP engine.  Always equals the weighted lower-bound sum.
double pesp_lp_value(const EventActivityNetwork& ean);

/// LP bound of the arc-based expanded model: the weighted sum of activity
/// lower bounds, returned in closed form.
double xpesp_lp_value(const EventActivityNetwork& ean);

/// Verification mode: materialize the full arc-based LP (partition rows per
/// vehicle activity, flow conservation per node, transfer couplings) and
/// solve it; throws if the value differs from xpesp_lp_value by > 1e-6.
double xpesp_lp_value_verified(const EventActivityNetwork& ean);

/// One cycle through an expanded line cycle: a time choice per cycle event
/// such that consecutive copies are joined by expansion arcs.
struct CycleColumn {
  int line = -1;
  std::vector<int> arcs;   // expansion arc ids, in cycle order
  std::vector<int> nodes;  // node ids (tails of the arcs), in cycle order
  double theta = 0.0;      // sum of omega_a tau_a
  long tau = 0;            // total duration; a multiple of T
};

/// All cycles of line L in the expansion (cap on their number).
std::vector<CycleColumn> enumerate_cycles(const ExpandedNetwork& d, int line,
                                          long cap = 1000000L);

/// Full LP with every cycle and every transfer (and waiting) arc materialized:
/// the direct oracle for the column-generation master.  Respects d.variant.
/// cycle_weights holds the cycle part of the optimal solution, ordered as the
/// concatenation of enumerate_cycles over lines.
SolveResult cxpesp_lp_full(const ExpandedNetwork& d, long cap = 1000000L);

}  // namespace pescg
