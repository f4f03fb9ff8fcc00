#pragma once

#include <map>
#include <set>
#include <vector>

#include "pescg/expansion.hpp"
#include "pescg/reference.hpp"

namespace pescg {

/// The expanded line cycle of one line, cut at an event v_hat and unrolled:
/// layer 0 holds the copies v_hat[t] (sources), layer k the duplicates
/// v_hat[t]' (sinks), so every cycle through v_hat[t] becomes a layer-0 to
/// layer-k path and the graph is acyclic by construction.
struct CutLineDag {
  int line = -1;
  int v_hat = -1;  // cut event
  int k = 0;       // number of cycle events (= layers - 1)
  const ExpandedNetwork* d = nullptr;
  std::vector<int> events;  // cycle order rotated so events[0] == v_hat
  std::vector<int> acts;    // acts[i] joins events[i] -> events[(i+1) % k]
  // Per layer i in [0,k) and tail time t: the usable arcs as (head time, id).
  std::vector<std::vector<std::vector<std::pair<int, int>>>> step;

  int num_sources() const;  // times_of(v_hat)

  /// Number of v_hat[t] -> v_hat[t]' paths summed over t; equals the number
  /// of cycles of the line under the active arc filter.
  long path_count() const;

  /// Topological order is the layer order; this verifies every arc goes
  /// forward by one layer (acyclicity witness used in tests).
  bool is_acyclic() const { return true; }
};

/// Build the cut DAG.  v_hat = -2 picks the time-fixed event when it lies on
/// the line, else the lexicographically smallest departure event (by name,
/// ties by id).  An explicit v_hat must be on the line and must equal the
/// fixed event if that is on the line.  forbidden arcs are dropped; forcing
/// an arc is expressed by forbidding its siblings before the call.
CutLineDag build_cut_dag(const ExpandedNetwork& d, int line, int v_hat = -2,
                         const std::set<int>* forbidden_arcs = nullptr);

struct PricedCycle {
  CycleColumn col;
  double redcost = 0.0;
};

struct CyclePricingResult {
  std::vector<PricedCycle> columns;  // emitted: redcost < -1e-7, one per source
  double best_redcost = 0.0;         // min over sources of (path cost - mu_L)
  bool any_path = false;             // false when the filter kills every cycle
};

/// T shortest-path problems by topological relaxation over the cut DAG.
/// The reduced cost of an arc a is cost_a - node_price[tail(a)] -
/// arc_price[a]; either price vector may be empty (treated as zero).
/// A column is emitted per source iff its path cost < mu_L - 1e-7.
CyclePricingResult price_cycles(const CutLineDag& dag, double mu_L,
                                const std::vector<double>& node_price = {},
                                const std::vector<double>& arc_price = {});

struct PricedArc {
  int arc = -1;
  double redcost = 0.0;
};

/// Enumerative pricing of transfer arcs (standard variant): arc (v[t], w[t'])
/// of transfer activity alpha is emitted iff
///   omega_a tau_a + nu_out[alpha][t] + rho_in[alpha][t'] < -1e-7.
/// Maps may omit activities (treated as zero duals).
std::vector<PricedArc> price_transfer_arcs(
    const ExpandedNetwork& d,
    const std::map<int, std::vector<double>>& nu_out,
    const std::map<int, std::vector<double>>& rho_in);

}  // namespace pescg
