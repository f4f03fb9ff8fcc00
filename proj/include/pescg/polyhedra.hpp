#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pescg/expansion.hpp"
#include "pescg/reference.hpp"

namespace pescg {

/// Projection of a cycle/arc solution of the expanded masters down to event
/// potentials, periodic offsets, and activity tensions.
struct ProjectedSolution {
  std::vector<double> pi;  // per event, in [0, T-1]
  std::vector<double> p;   // per activity, the periodic offset mass
  std::vector<double> x;   // per activity, the tension sum tau_a * value_a
  double objective = 0.0;  // omega-weighted tension
  /// Largest violation of l <= x <= u and of x = pi_head - pi_tail + T p.
  double max_violation = 0.0;
  /// Non-empty when the projection identities are only guaranteed for
  /// instances with every activity lower bound below the period.
  std::string warning;
};

/// Project a master solution (one value per given cycle plus transfer arc
/// values) to (pi, p, x).  Throws unless the input satisfies the master row
/// system (line partitions and transfer couplings) within 1e-7.
ProjectedSolution project(const ExpandedNetwork& d,
                          const std::vector<CycleColumn>& cycles,
                          const std::vector<double>& values,
                          const std::map<int, double>& z);

/// Verdict of one valid-inequality evaluation; lhs/rhs are the two sides in
/// the "lhs >= rhs" reading (the two-sided cycle inequality reports the
/// scaled cycle tension as lhs and its upper bound as rhs).
struct IneqVerdict {
  std::string check;
  std::string cycle;  // caller-chosen label
  int F_size = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  std::string text;  // human-readable "lhs >= rhs" style summary

  std::string tsv_row() const;  // check;cycle;F_size;lhs;rhs;pass
};

std::string verdict_tsv(const std::vector<IneqVerdict>& v);  // with header

/// Oriented cycles are sign vectors over the activities; line cycles are all
/// forward.
std::vector<int> line_cycle_gamma(const EventActivityNetwork& ean, int line);

/// ceil((g+ l - g- u)/T) <= g x / T <= floor((g+ u - g- l)/T).
IneqVerdict check_cycle_inequality(const std::vector<int>& gamma,
                                   const std::vector<double>& x,
                                   const std::vector<int>& l,
                                   const std::vector<int>& u, int T,
                                   const std::string& label = "");

/// (T - xi) g+ (x - l) + xi g- (x - l) >= xi (T - xi), xi = [-g l]_T.
IneqVerdict check_change_cycle_inequality(const std::vector<int>& gamma,
                                          const std::vector<double>& x,
                                          const std::vector<int>& l, int T,
                                          const std::string& label = "");

/// The four-sum flip inequality for an arbitrary flipped subset F;
/// F = {} reduces to the change-cycle inequality.
IneqVerdict check_flip_cycle_inequality(const std::vector<int>& gamma,
                                        const std::set<int>& F,
                                        const std::vector<double>& x,
                                        const std::vector<int>& l,
                                        const std::vector<int>& u, int T,
                                        const std::string& label = "");

/// Membership of x (restricted to the cycle support) in the convex hull of
/// the integer tensions y with l <= y <= u and g y / T integral, decided by
/// an auxiliary LP over the enumerated lattice points (cap on their count).
bool split_closure_member(const std::vector<int>& gamma,
                          const std::vector<double>& x,
                          const std::vector<int>& l, const std::vector<int>& u,
                          int T, long cap = 100000L);

struct SplitVerdict {
  int line = -1;
  bool member = false;
  long lattice_points = 0;
};

/// The split-closure membership test for every line cycle of the instance.
std::vector<SplitVerdict> check_split_closure_linecycles(
    const EventActivityNetwork& ean, const std::vector<double>& x,
    long cap = 100000L);

/// Decide by LP feasibility whether the arc vector xbar (over the vehicle
/// arcs of the expansion) is the image of a cycle-convexity point, i.e.
/// whether some x >= 0 with sum 1 per line reproduces xbar on every arc.
/// Returns true iff xbar is NOT in the image.
bool verify_not_in_image(const std::map<int, double>& xbar,
                         const ExpandedNetwork& d, long cap = 1000000L);

/// Sum over lines of the cheapest line cycle plus the weighted transfer
/// lower bounds; a valid lower bound on the cycle-master LP value.
double per_line_lower_bound(const EventActivityNetwork& ean,
                            long cap = 1000000L);

}  // namespace pescg
