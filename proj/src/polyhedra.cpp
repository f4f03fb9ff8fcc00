#include "pescg/polyhedra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pescg/lp.hpp"
#include "pescg/util.hpp"

namespace pescg {

namespace {

constexpr double kRowTol = 1e-7;  // master row system check in project()

double get(const std::map<int, double>& m, int k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

/// Number as text, integers without a decimal point.
std::string fmt(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) < 1e-9) {
    std::ostringstream os;
    os << static_cast<long long>(r);
    return os.str();
  }
  std::ostringstream os;
  os << v;
  return os.str();
}

/// Periodic offset carried by one expanded arc: tau and the time step differ
/// by an exact multiple of the period.
int wrap_count(const ExpandedNetwork& d, const ExpandedArc& a) {
  const int dt = d.node_time(a.head) - d.node_time(a.tail);
  const int k = (a.tau - dt) / d.T;
  if (k * d.T != a.tau - dt)
    throw Error("projection: arc duration is inconsistent with its time step");
  return k;
}

}  // namespace

ProjectedSolution project(const ExpandedNetwork& d,
                          const std::vector<CycleColumn>& cycles,
                          const std::vector<double>& values,
                          const std::map<int, double>& z) {
  const EventActivityNetwork& ean = d.ean;
  if (cycles.size() != values.size())
    throw Error("projection: one value per cycle required");

  // Row system: line partitions.
  std::vector<double> line_mass(ean.num_lines(), 0.0);
  std::map<int, double> y;  // node coverage
  std::map<int, double> xbar;  // vehicle arc values
  for (size_t i = 0; i < cycles.size(); ++i) {
    if (values[i] < -kRowTol)
      throw Error("projection: negative cycle value");
    line_mass.at(cycles[i].line) += values[i];
    for (int v : cycles[i].nodes) y[v] += values[i];
    for (int a : cycles[i].arcs) xbar[a] += values[i];
  }
  for (int L = 0; L < ean.num_lines(); ++L)
    if (std::abs(line_mass[L] - 1.0) > kRowTol)
      throw Error("projection: line " + std::to_string(L) +
                  " cycle mass is " + fmt(line_mass[L]) + ", not 1");

  // Row system: transfer couplings tie the z mass to the node coverage.
  for (int alpha : ean.transfer_activities()) {
    const Activity& act = ean.activities[alpha];
    std::map<int, double> out, in;
    for (int id : d.arcs_of_activity[alpha]) {
      out[d.arcs[id].tail] += get(z, id);
      in[d.arcs[id].head] += get(z, id);
    }
    for (int t = 0; t < d.times_of(act.tail); ++t) {
      const int v = d.node(act.tail, t);
      if (std::abs(get(out, v) - get(y, v)) > kRowTol)
        throw Error("projection: transfer " + act.name +
                    " tail coupling violated at t=" + std::to_string(t));
    }
    if (d.variant == Variant::standard) {
      for (int t = 0; t < d.times_of(act.head); ++t) {
        const int w = d.node(act.head, t);
        if (std::abs(get(in, w) - get(y, w)) > kRowTol)
          throw Error("projection: transfer " + act.name +
                      " head coupling violated at t=" + std::to_string(t));
      }
    } else {
      // Flow conservation on the waiting chain: what enters a head copy
      // either waits on or is absorbed by the covered cycle node.
      for (int t = 0; t < d.T; ++t) {
        const int w = d.node(act.head, t);
        const int wait_in =
            d.waiting_arcs_of_activity[alpha][mod(t - 1, d.T)];
        const int wait_out = d.waiting_arcs_of_activity[alpha][t];
        const double balance =
            get(in, w) + get(z, wait_in) - get(z, wait_out) - get(y, w);
        if (std::abs(balance) > kRowTol)
          throw Error("projection: transfer " + act.name +
                      " waiting-chain balance violated at t=" +
                      std::to_string(t));
      }
    }
  }

  ProjectedSolution out;
  out.pi.assign(ean.events.size(), 0.0);
  out.p.assign(ean.activities.size(), 0.0);
  out.x.assign(ean.activities.size(), 0.0);

  for (const auto& [a, v] : xbar)
    out.pi[d.node_event(d.arcs[a].tail)] += d.node_time(d.arcs[a].tail) * v;

  for (const Activity& act : ean.activities) {
    const bool vehicle = ean.is_vehicle(act);
    if (act.l >= d.T && out.warning.empty())
      out.warning = "activity " + act.name +
                    " has a lower bound >= period; the projection identities "
                    "are only guaranteed below the period";
    auto add = [&](int id, double v) {
      const ExpandedArc& a = d.arcs[id];
      out.x[act.id] += a.tau * v;
      out.p[act.id] += wrap_count(d, a) * v;
    };
    for (int id : d.arcs_of_activity[act.id])
      add(id, vehicle ? get(xbar, id) : get(z, id));
    if (!vehicle && d.variant == Variant::waiting)
      for (int id : d.waiting_arcs_of_activity[act.id]) add(id, get(z, id));
    out.objective += act.omega * out.x[act.id];

    const double recomposed =
        out.pi[act.head] - out.pi[act.tail] + d.T * out.p[act.id];
    out.max_violation = std::max(
        {out.max_violation, act.l - out.x[act.id], out.x[act.id] - act.u,
         std::abs(out.x[act.id] - recomposed)});
  }
  for (double pv : out.pi)
    out.max_violation =
        std::max({out.max_violation, -pv, pv - (d.T - 1.0)});
  return out;
}

std::string IneqVerdict::tsv_row() const {
  std::ostringstream os;
  os << check << ';' << cycle << ';' << F_size << ';' << fmt(lhs) << ';'
     << fmt(rhs) << ';' << (pass ? "pass" : "fail") << '\n';
  return os.str();
}

std::string verdict_tsv(const std::vector<IneqVerdict>& v) {
  std::string out = "check;cycle;F_size;lhs;rhs;pass\n";
  for (const IneqVerdict& e : v) out += e.tsv_row();
  return out;
}

std::vector<int> line_cycle_gamma(const EventActivityNetwork& ean, int line) {
  std::vector<int> gamma(ean.activities.size(), 0);
  for (int a : ean.line_cycle_acts.at(line)) gamma[a] = 1;
  return gamma;
}

IneqVerdict check_cycle_inequality(const std::vector<int>& gamma,
                                   const std::vector<double>& x,
                                   const std::vector<int>& l,
                                   const std::vector<int>& u, int T,
                                   const std::string& label) {
  double lo_num = 0.0, hi_num = 0.0, gx = 0.0;
  for (size_t a = 0; a < gamma.size(); ++a) {
    if (gamma[a] == 1) {
      lo_num += l[a];
      hi_num += u[a];
    } else if (gamma[a] == -1) {
      lo_num -= u[a];
      hi_num -= l[a];
    }
    gx += gamma[a] * x[a];
  }
  const double lo = std::ceil(lo_num / T - tol::objective);
  const double hi = std::floor(hi_num / T + tol::objective);
  IneqVerdict v;
  v.check = "cycle";
  v.cycle = label;
  v.lhs = gx / T;
  v.rhs = hi;
  v.pass = lo - tol::objective <= v.lhs && v.lhs <= hi + tol::objective;
  v.text = fmt(lo) + " <= " + fmt(v.lhs) + " <= " + fmt(hi);
  return v;
}

IneqVerdict check_change_cycle_inequality(const std::vector<int>& gamma,
                                          const std::vector<double>& x,
                                          const std::vector<int>& l, int T,
                                          const std::string& label) {
  long gl = 0;
  for (size_t a = 0; a < gamma.size(); ++a) gl += gamma[a] * l[a];
  const long xi = mod(-gl, T);
  double lhs = 0.0;
  for (size_t a = 0; a < gamma.size(); ++a) {
    if (gamma[a] == 1)
      lhs += (T - xi) * (x[a] - l[a]);
    else if (gamma[a] == -1)
      lhs += xi * (x[a] - l[a]);
  }
  IneqVerdict v;
  v.check = "change-cycle";
  v.cycle = label;
  v.lhs = lhs;
  v.rhs = static_cast<double>(xi) * (T - xi);
  v.pass = lhs >= v.rhs - tol::objective;
  v.text = fmt(lhs) + " >= " + fmt(v.rhs);
  return v;
}

IneqVerdict check_flip_cycle_inequality(const std::vector<int>& gamma,
                                        const std::set<int>& F,
                                        const std::vector<double>& x,
                                        const std::vector<int>& l,
                                        const std::vector<int>& u, int T,
                                        const std::string& label) {
  long shift = 0;
  for (size_t a = 0; a < gamma.size(); ++a)
    shift -= gamma[a] * (F.count(static_cast<int>(a)) ? u[a] : l[a]);
  const long xi = mod(shift, T);
  double lhs = 0.0;
  for (size_t a = 0; a < gamma.size(); ++a) {
    const bool flipped = F.count(static_cast<int>(a)) > 0;
    if (gamma[a] == 1)
      lhs += flipped ? xi * (u[a] - x[a]) : (T - xi) * (x[a] - l[a]);
    else if (gamma[a] == -1)
      lhs += flipped ? (T - xi) * (u[a] - x[a]) : xi * (x[a] - l[a]);
  }
  IneqVerdict v;
  v.check = "flip-cycle";
  v.cycle = label;
  v.F_size = static_cast<int>(F.size());
  v.lhs = lhs;
  v.rhs = static_cast<double>(xi) * (T - xi);
  v.pass = lhs >= v.rhs - tol::objective;
  v.text = fmt(lhs) + " >= " + fmt(v.rhs);
  return v;
}

bool split_closure_member(const std::vector<int>& gamma,
                          const std::vector<double>& x,
                          const std::vector<int>& l, const std::vector<int>& u,
                          int T, long cap) {
  std::vector<int> support;
  long combos = 1;
  for (size_t a = 0; a < gamma.size(); ++a)
    if (gamma[a] != 0) {
      support.push_back(static_cast<int>(a));
      const long width = u[a] - l[a] + 1;
      if (combos > cap / width)
        throw Error("split closure: lattice enumeration cap exceeded");
      combos *= width;
    }

  // Enumerate the lattice tensions on the support with integral cycle sum.
  std::vector<std::vector<int>> lattice;
  std::vector<int> yv(support.size());
  auto rec = [&](auto&& self, size_t i, long gy) -> void {
    if (i == support.size()) {
      if (mod(gy, T) == 0) lattice.push_back(yv);
      return;
    }
    const int a = support[i];
    for (int val = l[a]; val <= u[a]; ++val) {
      yv[i] = val;
      self(self, i + 1, gy + static_cast<long>(gamma[a]) * val);
    }
  };
  rec(rec, 0, 0);
  if (lattice.empty()) return false;

  // One convex multiplier per lattice point; equality within a small band so
  // that projected LP solutions survive round-off.
  LinearProgram lp;
  const int row_sum = lp.add_row('=', 1.0);
  std::vector<int> row_lo(support.size()), row_hi(support.size());
  for (size_t i = 0; i < support.size(); ++i) {
    row_lo[i] = lp.add_row('>', x[support[i]] - kRowTol);
    row_hi[i] = lp.add_row('<', x[support[i]] + kRowTol);
  }
  for (const std::vector<int>& point : lattice) {
    LpColumn col;
    col.entries.emplace_back(row_sum, 1.0);
    for (size_t i = 0; i < support.size(); ++i) {
      col.entries.emplace_back(row_lo[i], static_cast<double>(point[i]));
      col.entries.emplace_back(row_hi[i], static_cast<double>(point[i]));
    }
    lp.add_col(col);
  }
  return lp_solve(std::move(lp)).status == LpStatus::optimal;
}

std::vector<SplitVerdict> check_split_closure_linecycles(
    const EventActivityNetwork& ean, const std::vector<double>& x, long cap) {
  std::vector<int> l(ean.activities.size()), u(ean.activities.size());
  for (const Activity& a : ean.activities) {
    l[a.id] = a.l;
    u[a.id] = a.u;
  }
  std::vector<SplitVerdict> out;
  for (int L = 0; L < ean.num_lines(); ++L) {
    SplitVerdict v;
    v.line = L;
    const std::vector<int> gamma = line_cycle_gamma(ean, L);
    long pts = 1;
    for (size_t a = 0; a < gamma.size(); ++a)
      if (gamma[a]) pts *= u[a] - l[a] + 1;
    v.lattice_points = pts;
    v.member = split_closure_member(gamma, x, l, u, ean.T, cap);
    out.push_back(v);
  }
  return out;
}

bool verify_not_in_image(const std::map<int, double>& xbar,
                         const ExpandedNetwork& d, long cap) {
  LinearProgram lp;
  // One row per vehicle arc (a narrow band around xbar) plus the line
  // convexity rows; feasibility of the resulting system is image membership.
  std::map<int, std::pair<int, int>> arc_rows;
  for (int a : d.vehicle_arcs()) {
    const double v = get(xbar, a);
    arc_rows[a] = {lp.add_row('>', v - kRowTol), lp.add_row('<', v + kRowTol)};
  }
  for (int L = 0; L < d.ean.num_lines(); ++L) {
    const int row = lp.add_row('=', 1.0);
    for (const CycleColumn& c : enumerate_cycles(d, L, cap)) {
      LpColumn col;
      col.entries.emplace_back(row, 1.0);
      for (int a : c.arcs) {
        col.entries.emplace_back(arc_rows.at(a).first, 1.0);
        col.entries.emplace_back(arc_rows.at(a).second, 1.0);
      }
      lp.add_col(col);
    }
  }
  return lp_solve(std::move(lp)).status != LpStatus::optimal;
}

double per_line_lower_bound(const EventActivityNetwork& ean, long cap) {
  ExpandedNetwork d = expand(ean);
  double bound = 0.0;
  for (int L = 0; L < ean.num_lines(); ++L) {
    double best = kInf;
    for (const CycleColumn& c : enumerate_cycles(d, L, cap))
      best = std::min(best, c.theta);
    if (std::isinf(best))
      throw Error("per-line bound: line " + std::to_string(L) +
                  " has no feasible cycle");
    bound += best;
  }
  for (int tr : ean.transfer_activities())
    bound += ean.activities[tr].lower_cost();
  return bound;
}

}  // namespace pescg
