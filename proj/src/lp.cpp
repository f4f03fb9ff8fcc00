#include "pescg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pescg {

namespace {
constexpr double kPivTol = 1e-9;    // reduced-cost / pivot eligibility
constexpr double kZeroTol = 1e-11;  // treat as exact zero
constexpr double kMinPivot = 1e-8;  // smallest admissible basis pivot
constexpr int kRefactorEvery = 100;
constexpr int kPerturbAfter = 50;   // degenerate steps before bound shaking
constexpr double kPerturb = 1e-8;   // bound-relaxation magnitude
}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical_error: return "numerical_error";
  }
  return "?";
}

int LinearProgram::add_row(char sense, double rhs_value, const std::string& label) {
  row_sense.push_back(sense);
  rhs.push_back(rhs_value);
  row_labels.push_back(label);
  return num_rows() - 1;
}

int LinearProgram::add_col(LpColumn col) {
  cols.push_back(std::move(col));
  return num_cols() - 1;
}

void LinearProgram::validate() const {
  for (char s : row_sense)
    if (s != '=' && s != '<' && s != '>') throw Error("bad row sense");
  for (const LpColumn& c : cols) {
    if (c.lb > c.ub) throw Error("column with lb > ub: " + c.label);
    for (const auto& [r, v] : c.entries) {
      if (r < 0 || r >= num_rows()) throw Error("column entry outside rows");
      if (!std::isfinite(v)) throw Error("non-finite coefficient");
    }
  }
}

std::string LinearProgram::dump() const {
  std::ostringstream out;
  auto cname = [&](int j) {
    return cols[j].label.empty() ? "x" + std::to_string(j) : cols[j].label;
  };
  out << "Minimize\n obj:";
  for (int j = 0; j < num_cols(); ++j)
    if (cols[j].obj != 0.0) out << " + " << cols[j].obj << ' ' << cname(j);
  out << "\nSubject To\n";
  std::vector<std::vector<std::pair<int, double>>> rows(num_rows());
  for (int j = 0; j < num_cols(); ++j)
    for (const auto& [r, v] : cols[j].entries) rows[r].push_back({j, v});
  for (int i = 0; i < num_rows(); ++i) {
    out << ' ' << (row_labels[i].empty() ? "r" + std::to_string(i) : row_labels[i])
        << ':';
    for (const auto& [j, v] : rows[i]) out << " + " << v << ' ' << cname(j);
    out << (row_sense[i] == '=' ? " = " : row_sense[i] == '<' ? " <= " : " >= ")
        << rhs[i] << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < num_cols(); ++j) {
    out << ' ';
    if (cols[j].lb == -kInf)
      out << "-inf";
    else
      out << cols[j].lb;
    out << " <= " << cname(j) << " <= ";
    if (cols[j].ub == kInf)
      out << "+inf";
    else
      out << cols[j].ub;
    out << '\n';
  }
  out << "End\n";
  return out.str();
}

// ---------------------------------------------------------------------------

SimplexSolver::SimplexSolver(LinearProgram lp) : lp_(std::move(lp)) {
  lp_.validate();
  m_ = lp_.num_rows();
  vars_.reserve(lp_.num_cols() + m_);
  for (const LpColumn& c : lp_.cols) {
    Var v;
    v.c = c.obj;
    v.lb = c.lb;
    v.ub = c.ub;
    v.col = c.entries;
    double n2 = 1.0;
    for (const auto& [row, a] : v.col) n2 += a * a;
    v.norm = std::sqrt(n2);
    vars_.push_back(std::move(v));
  }
  for (int i = 0; i < m_; ++i) {
    Var s;
    s.c = 0.0;
    s.col = {{i, 1.0}};
    s.norm = std::sqrt(2.0);
    switch (lp_.row_sense[i]) {
      case '=': s.lb = 0.0; s.ub = 0.0; break;
      case '<': s.lb = 0.0; s.ub = kInf; break;
      case '>': s.lb = -kInf; s.ub = 0.0; break;
    }
    vars_.push_back(std::move(s));
  }
  vstat_.assign(vars_.size(), VStat::at_lower);
}

double SimplexSolver::nb_value(int j) const {
  switch (vstat_[j]) {
    case VStat::at_lower: return vars_[j].lb;
    case VStat::at_upper: return vars_[j].ub;
    case VStat::nonbasic_free: return 0.0;
    case VStat::basic: break;
  }
  throw Error("internal: nb_value of basic variable");
}

void SimplexSolver::build_initial_basis() {
  // Discard artificials from a previous aborted solve.
  size_t core = static_cast<size_t>(lp_.num_cols() + m_);
  vars_.resize(core);
  vstat_.resize(core);

  for (size_t j = 0; j < vars_.size(); ++j) {
    const Var& v = vars_[j];
    if (v.lb > -kInf)
      vstat_[j] = VStat::at_lower;
    else if (v.ub < kInf)
      vstat_[j] = VStat::at_upper;
    else
      vstat_[j] = VStat::nonbasic_free;
  }

  // Residual of each row with all structurals at their nonbasic value; the
  // slack absorbs it when its bounds allow, else an artificial does.
  std::vector<double> r = lp_.rhs;
  for (int j = 0; j < lp_.num_cols(); ++j) {
    double val = nb_value(j);
    if (val == 0.0) continue;
    for (const auto& [row, a] : vars_[j].col) r[row] -= a * val;
  }

  basis_.assign(m_, -1);
  binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
  xb_.assign(m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;

  for (int i = 0; i < m_; ++i) {
    int sj = lp_.num_cols() + i;
    const Var& s = vars_[sj];
    if (r[i] >= s.lb - kZeroTol && r[i] <= s.ub + kZeroTol) {
      basis_[i] = sj;
      vstat_[sj] = VStat::basic;
      xb_[i] = std::clamp(r[i], s.lb, s.ub);
    } else {
      double pin = r[i] > s.ub ? s.ub : s.lb;
      vstat_[sj] = r[i] > s.ub ? VStat::at_upper : VStat::at_lower;
      double excess = r[i] - pin;
      Var art;
      art.c = 0.0;
      art.lb = 0.0;
      art.ub = kInf;
      art.artificial = true;
      art.col = {{i, excess > 0 ? 1.0 : -1.0}};
      art.norm = std::sqrt(2.0);
      vars_.push_back(std::move(art));
      vstat_.push_back(VStat::basic);
      basis_[i] = static_cast<int>(vars_.size()) - 1;
      xb_[i] = std::fabs(excess);
    }
  }
  // Artificials may carry coefficient -1, so the basis matrix is not the
  // identity; factorize it properly (also fixes xb_ for pinned slacks).
  if (!refactorize()) throw Error("internal: singular initial basis");
  degenerate_streak_ = 0;
}

void SimplexSolver::recompute_xb() {
  std::vector<double> r = lp_.rhs;
  for (size_t j = 0; j < vars_.size(); ++j) {
    if (vstat_[j] == VStat::basic) continue;
    double val = nb_value(j);
    if (val == 0.0) continue;
    for (const auto& [row, a] : vars_[j].col) r[row] -= a * val;
  }
  for (int i = 0; i < m_; ++i) {
    double s = 0.0;
    const double* bi = &binv_[static_cast<size_t>(i) * m_];
    for (int k = 0; k < m_; ++k) s += bi[k] * r[k];
    xb_[i] = s;
  }
}

bool SimplexSolver::refactorize() {
  // Gauss-Jordan inversion of the basis matrix with partial pivoting.
  std::vector<double> a(static_cast<size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i)
    for (const auto& [row, v] : vars_[basis_[i]].col)
      a[static_cast<size_t>(row) * m_ + i] = v;
  std::vector<double> inv(static_cast<size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) inv[static_cast<size_t>(i) * m_ + i] = 1.0;

  for (int c = 0; c < m_; ++c) {
    int piv = -1;
    double best = 1e-11;
    for (int i = c; i < m_; ++i) {
      double v = std::fabs(a[static_cast<size_t>(i) * m_ + c]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv < 0) return false;
    if (piv != c) {
      for (int k = 0; k < m_; ++k) {
        std::swap(a[static_cast<size_t>(piv) * m_ + k], a[static_cast<size_t>(c) * m_ + k]);
        std::swap(inv[static_cast<size_t>(piv) * m_ + k],
                  inv[static_cast<size_t>(c) * m_ + k]);
      }
    }
    double d = a[static_cast<size_t>(c) * m_ + c];
    for (int k = 0; k < m_; ++k) {
      a[static_cast<size_t>(c) * m_ + k] /= d;
      inv[static_cast<size_t>(c) * m_ + k] /= d;
    }
    for (int i = 0; i < m_; ++i) {
      if (i == c) continue;
      double f = a[static_cast<size_t>(i) * m_ + c];
      if (f == 0.0) continue;
      for (int k = 0; k < m_; ++k) {
        a[static_cast<size_t>(i) * m_ + k] -= f * a[static_cast<size_t>(c) * m_ + k];
        inv[static_cast<size_t>(i) * m_ + k] -= f * inv[static_cast<size_t>(c) * m_ + k];
      }
    }
  }
  // The inversion above produced B^{-1} acting on row space directly.
  binv_ = std::move(inv);
  recompute_xb();
  pivots_since_refactor_ = 0;
  return true;
}

std::vector<double> SimplexSolver::duals(bool phase1) const {
  std::vector<double> y(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    double cb = cost(basis_[i], phase1);
    if (cb == 0.0) continue;
    const double* bi = &binv_[static_cast<size_t>(i) * m_];
    for (int k = 0; k < m_; ++k) y[k] += cb * bi[k];
  }
  return y;
}

LpStatus SimplexSolver::run_phase(bool phase1, int max_iters, std::string* diag) {
  std::vector<double> w(m_);
  // Devex reference weights, seeded with the static column norms.  The
  // scored pricing (reduced cost squared over weight) approximates steepest
  // edge and cuts the zigzagging of plain Dantzig pricing by orders of
  // magnitude on degenerate masters.
  std::vector<double> gamma(vars_.size());
  auto reset_gamma = [&] {
    for (size_t j = 0; j < vars_.size(); ++j)
      gamma[j] = vars_[j].norm * vars_[j].norm;
  };
  reset_gamma();
  for (;;) {
    if (total_iterations_++ > max_iters) {
      if (diag)
        *diag = "streak=" + std::to_string(degenerate_streak_) +
                " iters=" + std::to_string(total_iterations_);
      return LpStatus::iteration_limit;
    }

    // Zero-step pivots pile up on the massively degenerate vertices of
    // set-partitioning masters; neither Bland's rule nor randomized pricing
    // leaves such a plateau in reasonable time.  Shake instead: relax every
    // bound by a tiny random epsilon, which makes the ratio test strictly
    // positive almost surely, and drop the relaxation again at optimality
    // (the few repair iterations then run on the exact bounds).
    if (degenerate_streak_ > kPerturbAfter && beps_.empty()) {
      std::uniform_real_distribution<double> u(0.5 * kPerturb, kPerturb);
      beps_.resize(vars_.size());
      for (double& e : beps_) e = u(rng_);
      degenerate_streak_ = 0;
    }

    std::vector<double> y = duals(phase1);

    int enter = -1, dir = 0;
    double best = 0.0;
    for (size_t j = 0; j < vars_.size(); ++j) {
      if (vstat_[j] == VStat::basic) continue;
      const Var& v = vars_[j];
      if (v.lb == v.ub) continue;  // fixed, cannot move
      if (!phase1 && v.artificial) continue;
      double d = cost(static_cast<int>(j), phase1);
      for (const auto& [row, a] : v.col) d -= y[row] * a;
      int cand = 0;
      if ((vstat_[j] == VStat::at_lower || vstat_[j] == VStat::nonbasic_free) &&
          d < -kPivTol)
        cand = +1;
      else if ((vstat_[j] == VStat::at_upper || vstat_[j] == VStat::nonbasic_free) &&
               d > kPivTol)
        cand = -1;
      if (!cand) continue;
      const double score = d * d / gamma[j];
      if (score > best) {
        best = score;
        enter = static_cast<int>(j);
        dir = cand;
      }
    }
    if (enter < 0) {
      if (beps_.empty()) return LpStatus::optimal;
      // Optimal under the shaken bounds; restore the exact ones.  Basic
      // variables may sit outside their bounds by at most the epsilon scale,
      // and the refactorization removes the drift the shaken pivots left in
      // the basic values.
      beps_.clear();
      if (!refactorize()) return LpStatus::numerical_error;
      continue;
    }

    // w = B^{-1} A_enter
    std::fill(w.begin(), w.end(), 0.0);
    for (const auto& [row, a] : vars_[enter].col)
      for (int i = 0; i < m_; ++i) w[i] += binv_[static_cast<size_t>(i) * m_ + row] * a;

    const Var& ev = vars_[enter];
    double step = (ev.lb > -kInf && ev.ub < kInf) ? ev.ub - ev.lb : kInf;
    int leave_row = -1;
    bool leave_at_lower = true;
    for (int i = 0; i < m_; ++i) {
      double rate = dir * w[i];  // xb_i decreases at this rate
      const Var& bv = vars_[basis_[i]];
      const double eps = beps_.empty() ? 0.0 : beps_[basis_[i] % beps_.size()];
      double room, limit;
      if (rate > kZeroTol) {
        if (bv.lb == -kInf) continue;
        room = xb_[i] - (bv.lb - eps);
        limit = room / rate;
      } else if (rate < -kZeroTol) {
        if (bv.ub == kInf) continue;
        room = (bv.ub + eps) - xb_[i];
        limit = room / (-rate);
      } else {
        continue;
      }
      if (limit < -1e-9) limit = 0.0;
      bool better =
          limit < step - kZeroTol ||
          (limit < step + kZeroTol && leave_row >= 0 &&
           std::fabs(w[i]) > std::fabs(w[leave_row]));
      if (better) {
        step = std::max(0.0, limit);
        leave_row = i;
        leave_at_lower = rate > 0;
      }
    }

    if (step == kInf) {
      if (diag) *diag = "unbounded entering column " + std::to_string(enter);
      return LpStatus::unbounded;
    }
    degenerate_streak_ = step <= 1e-10 ? degenerate_streak_ + 1 : 0;

    if (leave_row < 0) {
      // Bound flip of the entering variable.
      for (int i = 0; i < m_; ++i) xb_[i] -= dir * step * w[i];
      vstat_[enter] = vstat_[enter] == VStat::at_lower ? VStat::at_upper : VStat::at_lower;
      continue;
    }

    double enter_val = nb_value(enter) + dir * step;
    int leaving = basis_[leave_row];
    for (int i = 0; i < m_; ++i)
      if (i != leave_row) xb_[i] -= dir * step * w[i];
    xb_[leave_row] = enter_val;

    double piv = w[leave_row];
    if (std::fabs(piv) < kMinPivot) {
      if (diag) *diag = "tiny pivot";
      if (!refactorize()) return LpStatus::numerical_error;
      continue;
    }

    // Devex update against the pivot row of the current basis inverse (read
    // before the rank-one update below overwrites it).
    {
      const double* rho = &binv_[static_cast<size_t>(leave_row) * m_];
      const double gq = gamma[enter];
      double gmax = 1.0;
      for (size_t j = 0; j < vars_.size(); ++j) {
        if (vstat_[j] == VStat::basic || static_cast<int>(j) == enter) continue;
        double aj = 0.0;
        for (const auto& [row, a] : vars_[j].col) aj += rho[row] * a;
        if (aj == 0.0) continue;
        const double candw = (aj / piv) * (aj / piv) * gq;
        if (candw > gamma[j]) gamma[j] = candw;
        if (gamma[j] > gmax) gmax = gamma[j];
      }
      gamma[leaving] = std::max(gq / (piv * piv), 1.0);
      if (gmax > 1e10) reset_gamma();  // stale reference framework
    }

    double* br = &binv_[static_cast<size_t>(leave_row) * m_];
    for (int k = 0; k < m_; ++k) br[k] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave_row) continue;
      double f = w[i];
      if (f == 0.0) continue;
      double* bi = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) bi[k] -= f * br[k];
    }
    basis_[leave_row] = enter;
    vstat_[enter] = VStat::basic;
    vstat_[leaving] = leave_at_lower ? VStat::at_lower : VStat::at_upper;
    if (vars_[leaving].lb == -kInf && leave_at_lower)
      vstat_[leaving] = VStat::nonbasic_free;  // defensive; ratio test avoids this

    if (++pivots_since_refactor_ >= kRefactorEvery)
      if (!refactorize()) return LpStatus::numerical_error;
  }
}

LpSolution SimplexSolver::extract(LpStatus status, const std::string& diag) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = total_iterations_;
  sol.diagnostics = diag;
  if (status != LpStatus::optimal) return sol;

  sol.x.assign(lp_.num_cols(), 0.0);
  std::vector<int> row_of(vars_.size(), -1);
  for (int i = 0; i < m_; ++i) row_of[basis_[i]] = i;
  for (int j = 0; j < lp_.num_cols(); ++j)
    sol.x[j] = row_of[j] >= 0 ? xb_[row_of[j]] : nb_value(j);
  sol.obj = 0.0;
  for (int j = 0; j < lp_.num_cols(); ++j) sol.obj += vars_[j].c * sol.x[j];
  sol.y = duals(false);
  sol.redcost.assign(lp_.num_cols(), 0.0);
  for (int j = 0; j < lp_.num_cols(); ++j) {
    double d = vars_[j].c;
    for (const auto& [row, a] : vars_[j].col) d -= sol.y[row] * a;
    sol.redcost[j] = d;
  }
  return sol;
}

LpSolution SimplexSolver::solve() {
  total_iterations_ = 0;  // the budget below is per call, not per lifetime
  degenerate_streak_ = 0;
  beps_.clear();
  int max_iters = 20000 + 50 * (m_ + static_cast<int>(vars_.size()));
  std::string diag;

  if (!basis_ready_) {
    build_initial_basis();
    bool have_artificials = static_cast<int>(vars_.size()) > lp_.num_cols() + m_;
    if (have_artificials) {
      LpStatus st = run_phase(true, max_iters, &diag);
      if (st != LpStatus::optimal) return extract(st, diag);
      double p1 = 0.0;
      for (int i = 0; i < m_; ++i)
        if (vars_[basis_[i]].artificial) p1 += xb_[i];
      if (p1 > 1e-7) {
        LpSolution sol;
        sol.status = LpStatus::infeasible;
        sol.iterations = total_iterations_;
        sol.diagnostics = "phase-1 objective " + std::to_string(p1);
        return sol;
      }
      for (Var& v : vars_)
        if (v.artificial) v.lb = v.ub = 0.0;
      for (size_t j = 0; j < vars_.size(); ++j)
        if (vars_[j].artificial && vstat_[j] != VStat::basic)
          vstat_[j] = VStat::at_lower;
    }
    basis_ready_ = true;
  }

  LpStatus st = run_phase(false, max_iters, &diag);
  if (st == LpStatus::numerical_error) {
    // One cold restart with a fresh factorization before giving up.
    basis_ready_ = false;
    build_initial_basis();
    bool have_artificials = static_cast<int>(vars_.size()) > lp_.num_cols() + m_;
    if (have_artificials) {
      LpStatus st1 = run_phase(true, max_iters, &diag);
      if (st1 != LpStatus::optimal) return extract(st1, diag);
      for (Var& v : vars_)
        if (v.artificial) v.lb = v.ub = 0.0;
      for (size_t j = 0; j < vars_.size(); ++j)
        if (vars_[j].artificial && vstat_[j] != VStat::basic)
          vstat_[j] = VStat::at_lower;
    }
    basis_ready_ = true;
    st = run_phase(false, max_iters, &diag);
  }
  return extract(st, diag);
}

void SimplexSolver::add_columns(const std::vector<LpColumn>& cols) {
  for (const LpColumn& c : cols) {
    int j = lp_.add_col(c);
    Var v;
    v.c = c.obj;
    v.lb = c.lb;
    v.ub = c.ub;
    v.col = c.entries;
    double n2 = 1.0;
    for (const auto& [row, a] : v.col) n2 += a * a;
    v.norm = std::sqrt(n2);
    // Artificials sit past the structural block; keep structurals contiguous.
    vars_.insert(vars_.begin() + j, std::move(v));
    VStat st = c.lb > -kInf    ? VStat::at_lower
               : c.ub < kInf   ? VStat::at_upper
                               : VStat::nonbasic_free;
    vstat_.insert(vstat_.begin() + j, st);
    for (int& b : basis_)
      if (b >= j) ++b;
    double val = st == VStat::at_lower ? c.lb : st == VStat::at_upper ? c.ub : 0.0;
    if (val != 0.0) basis_ready_ = false;  // shifts the basic solution; restart cold
  }
  lp_.validate();
}

LpSolution lp_solve(LinearProgram lp) {
  SimplexSolver s(std::move(lp));
  return s.solve();
}

}  // namespace pescg
