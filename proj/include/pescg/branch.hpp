#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pescg/master.hpp"

namespace pescg {

/// One node of the branch-and-bound tree over the colgen master.  Branching
/// restricts the expansion arc set: "force a" is expressed as forbidding all
/// sibling arcs of a's activity group, so the pricers stay exact.
struct BranchNode {
  int id = -1;
  int parent = -1;
  int depth = 0;
  std::set<int> forbidden;  // expanded arc ids removed below this node
  std::set<int> forced;     // at most one arc per activity group
  double bound = 0.0;       // LP bound inherited / proven at this node
  std::string status;       // open | pruned | infeasible | fractional |
                            // integral | depth_capped
};

struct BranchLimits {
  double time_limit_s = 1e18;
  int max_nodes = 1000000;
  double zeta = 1.0;  // dual smoothing factor handed to the node colgen
};

struct BranchResult {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;    // incumbent value (present iff one was found)
  double lower_bound = 0.0;  // best proven dual bound (= objective at optimal)
  bool has_incumbent = false;

  std::vector<CycleColumn> cycles;  // incumbent: one cycle per line
  std::map<int, double> z;          // incumbent: completed transfer/waiting arcs

  long nodes = 0;  // nodes whose LP was solved
  int rounds = 0;  // colgen rounds summed over all nodes
  long columns = 0;
  double pricing_s = 0.0;
  double total_s = 0.0;
  std::vector<BranchNode> tree;  // full node record, in creation order

  /// `rounds;cycles;pricing_s;total_s;nodes` (header + one data row).
  std::string tsv() const;
};

/// The vehicle arc a maximizing min(f_a, 1 - f_a), ties by smallest arc id.
/// Throws when every fraction is integral within the integrality tolerance.
int select_branch_arc(const std::map<int, double>& fractions);

/// Given one chosen cycle per line, extend to a full integral solution by
/// assigning the transfer variables: standard variant picks the single arc
/// joining the covered tail/head copies; waiting variant routes one unit
/// along the transfer arc and the waiting chain up to the covered head.
/// Returns the assignment and adds its cost to *cost.  Throws when some
/// transfer window cannot bridge the covered copies.
std::map<int, double> complete_transfers(const ExpandedNetwork& d,
                                         const std::vector<CycleColumn>& chosen,
                                         double* cost);

/// Exact IP optimum of the cycle-based masters by best-bound branch-and-price
/// on a single shared MasterSolver (the column pool persists across nodes).
BranchResult branch_and_price(const ExpandedNetwork& d, MasterModel model,
                              const BranchLimits& limits = {});

}  // namespace pescg
