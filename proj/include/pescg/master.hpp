#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pescg/expansion.hpp"
#include "pescg/lp.hpp"
#include "pescg/pricing.hpp"
#include "pescg/reference.hpp"
#include "pescg/routing.hpp"

namespace pescg {

enum class MasterModel { cxpesp, cxpespw, cxttp };

const char* to_string(MasterModel m);

/// Semantic dual vector of the restricted master; used both raw and as a
/// stabilization center (smoothed duals are convex combinations of these).
struct DualValues {
  std::vector<double> mu;                         // per line partition row
  std::map<int, std::vector<double>> nu_out;      // transfer -> per tail time
  std::map<int, std::vector<double>> rho_in;      // transfer -> per head time
  std::map<int, double> cap;                      // transfer -> waiting-cap row
  std::vector<double> nu_od;                      // per OD partition row
  std::map<std::pair<int, int>, double> rho_od;   // (od, arc) coupling row, >= 0
};

struct ColgenOptions {
  double zeta = 1.0;          // dual smoothing factor in (0, 1]
  double time_limit_s = 1e18;
  int max_rounds = 100000;
};

struct ColgenResult {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;     // RMP value (upper bound on the master LP)
  double lower_bound = 0.0;   // best Lagrangian bound proven during the run
  int rounds = 0;
  long columns_added = 0;     // cycle columns generated in this solve
  int mispricings = 0;        // smoothed rounds that had to be re-priced
  double pricing_s = 0.0;
  double total_s = 0.0;
  std::string infeasible_report;  // rows kept feasible only by artificials
};

/// Restricted master for the cycle-based formulations, with exact pricing.
/// The column pool persists across solve() calls; arc filters (from
/// branching) deactivate pool columns and prune the pricing DAGs per call.
class MasterSolver {
 public:
  MasterSolver(const ExpandedNetwork& d, MasterModel model,
               const ODMatrix* od = nullptr);
  ~MasterSolver();

  ColgenResult solve(const ColgenOptions& opts = {},
                     const std::set<int>* forbidden_arcs = nullptr);

  const ExpandedNetwork& expansion() const { return d_; }
  MasterModel model() const { return model_; }

  // Solution access; valid after a solve() that returned optimal/time_limit.
  const std::vector<CycleColumn>& cycle_pool() const { return pool_; }
  const std::vector<double>& cycle_values() const { return cycle_values_; }
  std::map<int, double> arc_values() const;   // z value per expanded arc id
  const std::vector<PathColumn>& path_pool() const { return path_pool_; }
  const std::vector<double>& path_values() const { return path_values_; }

  /// Fraction f_a = sum of x_c over active cycles containing vehicle arc a.
  std::map<int, double> vehicle_arc_fractions() const;

  const std::string& pricing_log() const { return log_; }

  /// Rows of the most recent LP build (partition + coupling + cap rows).
  int row_count() const;

  /// `instance;T;rounds;cycles;pricing_s;total_s;factor`
  std::string stats_tsv(const std::string& instance, const ColgenResult& r,
                        double zeta) const;

 private:
  struct Rows;  // per-rebuild row registry

  void build_lp(const std::set<int>& forbidden);
  DualValues extract_duals(const std::vector<double>& y) const;
  DualValues smooth(const DualValues& cur, const DualValues& center,
                    double zeta) const;

  ExpandedNetwork d_;
  MasterModel model_;
  ODMatrix od_;
  std::vector<RoutingGraph> graphs_;

  std::vector<CycleColumn> pool_;
  std::set<std::vector<int>> pool_keys_;       // arc lists, dedup
  std::set<int> z_pool_;                       // priced transfer arcs (standard)
  std::vector<PathColumn> path_pool_;
  std::set<std::vector<int>> path_keys_;
  std::set<std::pair<int, int>> lazy_rows_;    // instantiated (od, arc) rows

  std::vector<double> cycle_values_;
  std::map<int, double> arc_values_;
  std::vector<double> path_values_;

  std::unique_ptr<Rows> rows_;
  std::unique_ptr<SimplexSolver> solver_;
  std::vector<int> active_cycles_;  // pool indices present in the current LP
  std::vector<int> active_z_;       // arc ids present in the current LP
  double artificial_cost_ = 0.0;
  std::string log_;
};

struct EqualityReport {
  double standard_value = 0.0;
  double waiting_value = 0.0;
  bool all_transfers_free = false;
  bool equal = false;      // |difference| <= 1e-6
  bool monotone = false;   // standard >= waiting - 1e-6
  std::string text;
};

/// Solve both transfer models' LP relaxations and compare: with exclusively
/// free transfers the values must agree; in general the standard model's
/// value dominates.  Throws with a diagnostic dump when either fails.
EqualityReport lp_equality_check(const EventActivityNetwork& ean);

}  // namespace pescg
