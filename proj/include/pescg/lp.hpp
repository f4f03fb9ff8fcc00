#pragma once

#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pescg/util.hpp"

namespace pescg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numerical_error };

const char* to_string(LpStatus s);

struct LpColumn {
  std::vector<std::pair<int, double>> entries;  // (row, coefficient)
  double obj = 0.0;
  double lb = 0.0;
  double ub = kInf;
  std::string label;
};

/// Minimization LP in row-sense form.
struct LinearProgram {
  std::vector<char> row_sense;  // '=', '<', '>'
  std::vector<double> rhs;
  std::vector<LpColumn> cols;
  std::vector<std::string> row_labels;

  int num_rows() const { return static_cast<int>(row_sense.size()); }
  int num_cols() const { return static_cast<int>(cols.size()); }

  int add_row(char sense, double rhs_value, const std::string& label = "");
  int add_col(LpColumn col);

  void validate() const;

  /// CPLEX-style LP text for external cross-checks.
  std::string dump() const;
};

struct LpSolution {
  LpStatus status = LpStatus::numerical_error;
  double obj = 0.0;
  std::vector<double> x;        // per structural column
  std::vector<double> y;        // dual value per row
  std::vector<double> redcost;  // per structural column
  int iterations = 0;
  std::string diagnostics;
};

/// Bounded-variable revised primal simplex with a dense basis inverse,
/// eta-style updates, periodic refactorization, and random bound shaking
/// (fixed seed) after a degeneracy streak.  One instance per master problem;
/// supports warm-started column addition.
class SimplexSolver {
 public:
  explicit SimplexSolver(LinearProgram lp);

  /// Solve from scratch (two phases) or continue from the last basis when
  /// columns were added since the last solve.
  LpSolution solve();

  /// Append columns; the current basis stays primal feasible, so the next
  /// solve() continues phase 2 from it (objective never increases).
  void add_columns(const std::vector<LpColumn>& cols);

  const LinearProgram& lp() const { return lp_; }

 private:
  enum class VStat : char { basic, at_lower, at_upper, nonbasic_free };

  struct Var {
    double c = 0.0;
    double lb = 0.0, ub = kInf;
    std::vector<std::pair<int, double>> col;
    bool artificial = false;
    double norm = 1.0;  // sqrt(1 + ||A_j||^2); static steepest-edge weight
  };

  LinearProgram lp_;
  int m_ = 0;
  std::vector<Var> vars_;
  std::vector<VStat> vstat_;
  std::vector<int> basis_;      // row -> var
  std::vector<double> binv_;    // dense m x m, row major
  std::vector<double> xb_;      // values of basic variables per row
  bool basis_ready_ = false;
  int pivots_since_refactor_ = 0;
  int degenerate_streak_ = 0;
  int total_iterations_ = 0;
  std::mt19937 rng_{20240517u};     // bound shaking; fixed for determinism
  std::vector<double> beps_;        // per-var bound relaxation; empty = exact

  double nb_value(int j) const;
  void build_initial_basis();
  bool refactorize();           // recompute binv_ and xb_; false if singular
  void recompute_xb();
  std::vector<double> duals(bool phase1) const;
  double cost(int j, bool phase1) const {
    return phase1 ? (vars_[j].artificial ? 1.0 : 0.0) : vars_[j].c;
  }
  /// One simplex phase; returns status (optimal means phase finished).
  LpStatus run_phase(bool phase1, int max_iters, std::string* diag);
  LpSolution extract(LpStatus status, const std::string& diag);
};

/// Convenience: construct, solve, return.
LpSolution lp_solve(LinearProgram lp);

}  // namespace pescg
