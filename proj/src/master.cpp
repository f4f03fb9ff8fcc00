#include "pescg/master.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "pescg/util.hpp"

namespace pescg {

namespace {
constexpr double kInfD = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}
}  // namespace

const char* to_string(MasterModel m) {
  switch (m) {
    case MasterModel::cxpesp: return "cxpesp";
    case MasterModel::cxpespw: return "cxpespw";
    case MasterModel::cxttp: return "cxttp";
  }
  return "?";
}

/// Row registry of one LP build; rebuilt whenever the row set changes.
struct MasterSolver::Rows {
  LinearProgram lp;
  std::vector<int> line_row;
  std::map<int, std::vector<int>> out_row;  // transfer -> row per tail time
  std::map<int, std::vector<int>> in_row;   // transfer -> row per head time
  std::map<int, int> cap_row;               // waiting variant, tight transfers
  std::vector<int> od_row;
  std::map<std::pair<int, int>, int> couple;    // (od, arc) -> row
  std::vector<std::vector<int>> rows_of_node;   // +1 coverage rows per node
  // Column bookkeeping: kind 'c' (cycle, pool index), 'z' (arc id),
  // 'p' (path pool index), 'a' (artificial, row id).
  std::vector<std::pair<char, int>> col_map;
};

MasterSolver::~MasterSolver() = default;

MasterSolver::MasterSolver(const ExpandedNetwork& d, MasterModel model,
                           const ODMatrix* od)
    : d_(d), model_(model) {
  d_.ean.validate();
  if (model_ == MasterModel::cxpespw && d_.variant != Variant::waiting)
    throw Error("master: waiting-arc model requires the waiting-arc expansion");
  if (model_ != MasterModel::cxpespw && d_.variant != Variant::standard)
    throw Error("master: this model requires the standard expansion");
  if (model_ == MasterModel::cxttp) {
    if (!od) throw Error("master: routing model requires an OD matrix");
    od_ = *od;
    graphs_ = build_routing_graphs(d_, od_);
  }
  double base = 0.0;
  for (const Activity& a : d_.ean.activities)
    base += a.lower_cost() + a.omega * d_.T;
  artificial_cost_ = 10.0 * base;
  if (model_ == MasterModel::cxttp) {
    double dem = 0.0;
    for (const ODEntry& e : od_.entries) dem += static_cast<double>(e.demand);
    artificial_cost_ *= std::max(1.0, dem);
  }
}

namespace {

/// Greedy initial column: the minimal-duration cycle of a line (ties by the
/// smaller source time), or nothing when the filtered DAG has no cycle left.
bool greedy_min_duration_cycle(const CutLineDag& dag, CycleColumn* out) {
  const ExpandedNetwork& d = *dag.d;
  const int T = d.T;
  const int k = dag.k;
  const long kUnreached = std::numeric_limits<long>::max() / 4;
  long best_tau = kUnreached;
  for (int t0 = 0; t0 < dag.num_sources(); ++t0) {
    std::vector<std::vector<long>> dist(k + 1,
                                        std::vector<long>(T, kUnreached));
    std::vector<std::vector<int>> parent(k + 1, std::vector<int>(T, -1));
    dist[0][t0] = 0;
    for (int pos = 0; pos < k; ++pos)
      for (int t = 0; t < T; ++t) {
        if (dist[pos][t] >= kUnreached) continue;
        for (const auto& [t2, id] : dag.step[pos][t])
          if (dist[pos][t] + d.arcs[id].tau < dist[pos + 1][t2]) {
            dist[pos + 1][t2] = dist[pos][t] + d.arcs[id].tau;
            parent[pos + 1][t2] = id;
          }
      }
    if (dist[k][t0] >= best_tau) continue;
    best_tau = dist[k][t0];
    CycleColumn c;
    c.line = dag.line;
    c.arcs.resize(k);
    c.nodes.resize(k);
    c.theta = 0.0;
    c.tau = 0;
    int t = t0;
    for (int pos = k; pos > 0; --pos) {
      const int id = parent[pos][t];
      c.arcs[pos - 1] = id;
      c.nodes[pos - 1] = d.arcs[id].tail;
      c.theta += d.arcs[id].cost;
      c.tau += d.arcs[id].tau;
      t = d.node_time(d.arcs[id].tail);
    }
    *out = std::move(c);
  }
  return best_tau < kUnreached;
}

}  // namespace

void MasterSolver::build_lp(const std::set<int>& forbidden) {
  const EventActivityNetwork& ean = d_.ean;
  rows_ = std::make_unique<Rows>();
  Rows& R = *rows_;
  LinearProgram& lp = R.lp;

  R.line_row.resize(ean.num_lines());
  for (int L = 0; L < ean.num_lines(); ++L)
    R.line_row[L] = lp.add_row('=', 1.0, "line_" + std::to_string(L));

  R.rows_of_node.assign(ean.events.size() * static_cast<size_t>(d_.T), {});
  if (model_ != MasterModel::cxttp) {
    for (int alpha : ean.transfer_activities()) {
      const Activity& a = ean.activities[alpha];
      auto& outr = R.out_row[alpha];
      outr.resize(d_.times_of(a.tail));
      for (int t = 0; t < d_.times_of(a.tail); ++t) {
        outr[t] = lp.add_row('=', 0.0, "out_" + std::to_string(alpha) + "_" +
                                           std::to_string(t));
        R.rows_of_node[d_.node(a.tail, t)].push_back(outr[t]);
      }
      auto& inr = R.in_row[alpha];
      const int head_rows =
          model_ == MasterModel::cxpespw ? d_.T : d_.times_of(a.head);
      inr.resize(head_rows);
      for (int t = 0; t < head_rows; ++t) {
        inr[t] = lp.add_row('=', 0.0, "in_" + std::to_string(alpha) + "_" +
                                          std::to_string(t));
        if (t < d_.times_of(a.head))
          R.rows_of_node[d_.node(a.head, t)].push_back(inr[t]);
      }
      if (model_ == MasterModel::cxpespw && !a.is_free(d_.T))
        R.cap_row[alpha] = lp.add_row(
            '<', static_cast<double>(a.u - a.l), "cap_" + std::to_string(alpha));
    }
  } else {
    R.od_row.resize(od_.entries.size());
    for (size_t i = 0; i < od_.entries.size(); ++i)
      R.od_row[i] = lp.add_row('=', 1.0, "od_" + std::to_string(i));
    for (const auto& key : lazy_rows_)
      R.couple[key] = lp.add_row('>', 0.0,
                                 "cpl_" + std::to_string(key.first) + "_" +
                                     std::to_string(key.second));
  }

  // Ensure every line owns at least one pool column compatible with the
  // filter; otherwise the artificial on its partition row carries the node.
  for (int L = 0; L < ean.num_lines(); ++L) {
    bool has = false;
    for (const CycleColumn& c : pool_) {
      if (c.line != L) continue;
      bool ok = true;
      for (int a : c.arcs) ok = ok && !forbidden.count(a);
      if (ok) { has = true; break; }
    }
    if (has) continue;
    CutLineDag dag = build_cut_dag(d_, L, -2, &forbidden);
    CycleColumn c;
    if (greedy_min_duration_cycle(dag, &c) && !pool_keys_.count(c.arcs)) {
      pool_keys_.insert(c.arcs);
      pool_.push_back(std::move(c));
    }
  }

  auto cycle_column = [&](const CycleColumn& c) {
    LpColumn col;
    col.obj = c.theta;
    col.lb = 0.0;
    col.ub = kInf;
    std::map<int, double> coef;
    coef[R.line_row[c.line]] += 1.0;
    for (int n : c.nodes)
      for (int r : R.rows_of_node[n]) coef[r] += 1.0;
    if (model_ == MasterModel::cxttp)
      for (int a : c.arcs)
        for (size_t i = 0; i < od_.entries.size(); ++i) {
          auto it = R.couple.find({static_cast<int>(i), a});
          if (it != R.couple.end()) coef[it->second] += 1.0;
        }
    for (const auto& [r, v] : coef) col.entries.push_back({r, v});
    return col;
  };
  auto z_column = [&](int arc) {
    const ExpandedArc& a = d_.arcs[arc];
    LpColumn col;
    col.obj = a.cost;
    col.lb = 0.0;
    col.ub = kInf;
    if (a.cls == ArcClass::transfer) {
      col.entries.push_back(
          {R.out_row.at(a.alpha)[d_.node_time(a.tail)], -1.0});
      col.entries.push_back(
          {R.in_row.at(a.alpha)[d_.node_time(a.head)], -1.0});
    } else {  // waiting arc at the transfer's head event
      const int t = d_.node_time(a.tail);
      col.entries.push_back({R.in_row.at(a.alpha)[t], 1.0});
      col.entries.push_back({R.in_row.at(a.alpha)[(t + 1) % d_.T], -1.0});
      auto it = R.cap_row.find(a.alpha);
      if (it != R.cap_row.end()) col.entries.push_back({it->second, 1.0});
    }
    return col;
  };
  auto path_column = [&](const PathColumn& p) {
    LpColumn col;
    col.obj = p.cost;
    col.lb = 0.0;
    col.ub = kInf;
    col.entries.push_back({R.od_row[p.od], 1.0});
    for (int a : p.arcs) {
      auto it = R.couple.find({p.od, a});
      if (it != R.couple.end()) col.entries.push_back({it->second, -1.0});
    }
    return col;
  };

  active_cycles_.clear();
  for (size_t i = 0; i < pool_.size(); ++i) {
    bool ok = true;
    for (int a : pool_[i].arcs) ok = ok && !forbidden.count(a);
    if (!ok) continue;
    active_cycles_.push_back(static_cast<int>(i));
    LpColumn col = cycle_column(pool_[i]);
    col.label = "cyc_" + std::to_string(i);
    lp.add_col(col);
    R.col_map.push_back({'c', static_cast<int>(i)});
  }

  active_z_.clear();
  if (model_ == MasterModel::cxpespw) {
    for (int alpha : d_.ean.transfer_activities()) {
      for (int arc : d_.arcs_of_activity[alpha])
        if (!forbidden.count(arc)) active_z_.push_back(arc);
      for (int arc : d_.waiting_arcs_of_activity[alpha])
        active_z_.push_back(arc);
    }
  } else if (model_ == MasterModel::cxpesp) {
    for (int arc : z_pool_)
      if (!forbidden.count(arc)) active_z_.push_back(arc);
  }
  for (int arc : active_z_) {
    LpColumn col = z_column(arc);
    col.label = "z_" + std::to_string(arc);
    lp.add_col(col);
    R.col_map.push_back({'z', arc});
  }

  if (model_ == MasterModel::cxttp)
    for (size_t i = 0; i < path_pool_.size(); ++i) {
      bool ok = true;
      for (int a : path_pool_[i].arcs) ok = ok && !forbidden.count(a);
      if (!ok) continue;
      LpColumn col = path_column(path_pool_[i]);
      col.label = "path_" + std::to_string(i);
      lp.add_col(col);
      R.col_map.push_back({'p', static_cast<int>(i)});
    }

  // Artificial slack columns guaranteeing a feasible start: +1 on partition
  // rows and lazy coupling rows, a +/- pair on every equality coupling row.
  auto artificial = [&](int row, double sign) {
    LpColumn col;
    col.obj = artificial_cost_;
    col.lb = 0.0;
    col.ub = kInf;
    col.entries.push_back({row, sign});
    col.label = "art_" + std::to_string(row) + (sign > 0 ? "p" : "m");
    lp.add_col(col);
    R.col_map.push_back({'a', row});
  };
  for (int r : R.line_row) artificial(r, 1.0);
  for (int r : R.od_row) artificial(r, 1.0);
  for (const auto& [alpha, rows] : R.out_row) {
    (void)alpha;
    for (int r : rows) { artificial(r, 1.0); artificial(r, -1.0); }
  }
  for (const auto& [alpha, rows] : R.in_row) {
    (void)alpha;
    for (int r : rows) { artificial(r, 1.0); artificial(r, -1.0); }
  }
  for (const auto& [key, r] : R.couple) {
    (void)key;
    artificial(r, 1.0);
  }

  lp.validate();
  solver_ = std::make_unique<SimplexSolver>(lp);  // keep R.lp for row labels
}

DualValues MasterSolver::extract_duals(const std::vector<double>& y) const {
  const Rows& R = *rows_;
  DualValues dv;
  dv.mu.resize(R.line_row.size());
  for (size_t L = 0; L < R.line_row.size(); ++L) dv.mu[L] = y[R.line_row[L]];
  for (const auto& [alpha, rows] : R.out_row) {
    auto& v = dv.nu_out[alpha];
    v.resize(rows.size());
    for (size_t t = 0; t < rows.size(); ++t) v[t] = y[rows[t]];
  }
  for (const auto& [alpha, rows] : R.in_row) {
    auto& v = dv.rho_in[alpha];
    v.resize(rows.size());
    for (size_t t = 0; t < rows.size(); ++t) v[t] = y[rows[t]];
  }
  for (const auto& [alpha, r] : R.cap_row) dv.cap[alpha] = y[r];
  dv.nu_od.resize(R.od_row.size());
  for (size_t i = 0; i < R.od_row.size(); ++i) dv.nu_od[i] = y[R.od_row[i]];
  for (const auto& [key, r] : R.couple) dv.rho_od[key] = y[r];
  return dv;
}

DualValues MasterSolver::smooth(const DualValues& cur, const DualValues& center,
                                double zeta) const {
  if (zeta >= 1.0) return cur;
  auto mix = [&](double a, double b) { return zeta * a + (1.0 - zeta) * b; };
  DualValues s = cur;
  for (size_t i = 0; i < s.mu.size(); ++i)
    s.mu[i] = mix(s.mu[i], i < center.mu.size() ? center.mu[i] : 0.0);
  for (auto& [alpha, v] : s.nu_out) {
    auto it = center.nu_out.find(alpha);
    for (size_t t = 0; t < v.size(); ++t)
      v[t] = mix(v[t], it != center.nu_out.end() ? it->second[t] : 0.0);
  }
  for (auto& [alpha, v] : s.rho_in) {
    auto it = center.rho_in.find(alpha);
    for (size_t t = 0; t < v.size(); ++t)
      v[t] = mix(v[t], it != center.rho_in.end() ? it->second[t] : 0.0);
  }
  for (auto& [alpha, v] : s.cap) {
    auto it = center.cap.find(alpha);
    v = mix(v, it != center.cap.end() ? it->second : 0.0);
  }
  for (size_t i = 0; i < s.nu_od.size(); ++i)
    s.nu_od[i] = mix(s.nu_od[i], i < center.nu_od.size() ? center.nu_od[i] : 0.0);
  for (auto& [key, v] : s.rho_od) {
    auto it = center.rho_od.find(key);
    v = mix(v, it != center.rho_od.end() ? it->second : 0.0);
  }
  return s;
}

ColgenResult MasterSolver::solve(const ColgenOptions& opts,
                                 const std::set<int>* forbidden_arcs) {
  if (opts.zeta <= 0.0 || opts.zeta > 1.0)
    throw Error("master: smoothing factor must be in (0, 1]");
  const auto t0 = Clock::now();
  const std::set<int> forbidden =
      forbidden_arcs ? *forbidden_arcs : std::set<int>{};
  const EventActivityNetwork& ean = d_.ean;

  ColgenResult res;
  res.lower_bound = -kInfD;
  if (model_ == MasterModel::cxttp)
    for (const RoutingGraph& g : graphs_)
      if (!g.reachable) {
        res.status = SolveStatus::infeasible;
        res.infeasible_report =
            "od pair " + std::to_string(g.od) + " unreachable";
        return res;
      }

  build_lp(forbidden);
  std::vector<CutLineDag> dags;
  for (int L = 0; L < ean.num_lines(); ++L)
    dags.push_back(build_cut_dag(d_, L, -2, &forbidden));

  DualValues center;  // initial stabilization center: all-zero duals
  LpSolution sol;
  auto log_line = [&](int round, const char* family, long cands, long added,
                      double best, double us) {
    std::ostringstream os;
    os << round << ';' << family << ';' << cands << ';' << added << ';'
       << best << ';' << static_cast<long>(us) << '\n';
    log_ += os.str();
  };

  bool converged = false;
  while (res.rounds < opts.max_rounds) {
    sol = solver_->solve();
    if (sol.status == LpStatus::numerical_error ||
        sol.status == LpStatus::iteration_limit) {
      // The warm basis went sour; rebuild the RMP cold from the pools.
      build_lp(forbidden);
      sol = solver_->solve();
    }
    if (sol.status == LpStatus::infeasible)
      throw Error("master: RMP infeasible despite artificial columns");
    if (sol.status != LpStatus::optimal)
      throw Error(std::string("master: RMP solve failed: ") +
                  to_string(sol.status) + " " + sol.diagnostics);
    ++res.rounds;

    if (seconds_since(t0) > opts.time_limit_s) break;

    // Routing model: instantiate violated coupling rows before pricing.
    if (model_ == MasterModel::cxttp) {
      std::map<std::pair<int, int>, double> usage;
      for (size_t j = 0; j < rows_->col_map.size(); ++j) {
        if (rows_->col_map[j].first != 'p' || sol.x[j] <= tol::feasibility)
          continue;
        const PathColumn& p = path_pool_[rows_->col_map[j].second];
        for (int a : p.arcs)
          if (d_.arcs[a].cls == ArcClass::vehicle)
            usage[{p.od, a}] += sol.x[j];
      }
      std::map<int, double> coverage;
      for (size_t j = 0; j < rows_->col_map.size(); ++j) {
        if (rows_->col_map[j].first != 'c' || sol.x[j] <= tol::feasibility)
          continue;
        for (int a : pool_[rows_->col_map[j].second].arcs)
          coverage[a] += sol.x[j];
      }
      long fresh = 0;
      for (const auto& [key, use] : usage) {
        if (use <= coverage[key.second] + tol::feasibility) continue;
        if (lazy_rows_.insert(key).second) ++fresh;
      }
      if (fresh > 0) {
        log_line(res.rounds, "rows", fresh, fresh, 0.0, 0.0);
        build_lp(forbidden);
        continue;  // re-solve with the tightened row system
      }
    }

    const DualValues cur = extract_duals(sol.y);
    bool mispriced_this_round = false;
    double zeta = opts.zeta;

    while (true) {
      const DualValues dv = smooth(cur, center, zeta);
      const auto tp = Clock::now();

      // Row prices for the cycle pricer.
      std::vector<double> node_price(ean.events.size() * d_.T, 0.0);
      for (const auto& [alpha, v] : dv.nu_out) {
        const Activity& a = ean.activities[alpha];
        for (size_t t = 0; t < v.size(); ++t)
          node_price[d_.node(a.tail, static_cast<int>(t))] += v[t];
      }
      for (const auto& [alpha, v] : dv.rho_in) {
        const Activity& a = ean.activities[alpha];
        for (int t = 0; t < d_.times_of(a.head); ++t)
          node_price[d_.node(a.head, t)] += v[t];
      }
      std::vector<double> arc_price;
      if (!dv.rho_od.empty()) {
        arc_price.assign(d_.arcs.size(), 0.0);
        for (const auto& [key, v] : dv.rho_od) arc_price[key.second] += v;
      }

      long added = 0;
      long cand = 0;
      double best_rc = 0.0;
      double lb = 0.0;
      bool lb_valid = true;
      for (size_t L = 0; L < dv.mu.size(); ++L) lb += dv.mu[L];
      for (double v : dv.nu_od) lb += v;
      for (const auto& [alpha, v] : dv.cap)
        lb += static_cast<double>(ean.activities[alpha].u -
                                  ean.activities[alpha].l) * v;

      std::vector<LpColumn> new_cols;
      std::vector<std::pair<char, int>> new_map;

      for (int L = 0; L < ean.num_lines(); ++L) {
        CyclePricingResult pr =
            price_cycles(dags[L], dv.mu[L], node_price, arc_price);
        if (pr.any_path) lb += std::min(0.0, pr.best_redcost);
        else lb_valid = false;  // the filter removed every cycle of the line
        cand += static_cast<long>(pr.columns.size());
        for (PricedCycle& pc : pr.columns) {
          best_rc = std::min(best_rc, pc.redcost);
          if (pool_keys_.count(pc.col.arcs)) continue;
          pool_keys_.insert(pc.col.arcs);
          const int idx = static_cast<int>(pool_.size());
          pool_.push_back(pc.col);
          // Rebuild the row footprint through the active registry.
          LpColumn col;
          col.obj = pc.col.theta;
          col.label = "cyc_" + std::to_string(idx);
          std::map<int, double> coef;
          coef[rows_->line_row[pc.col.line]] += 1.0;
          for (int n : pc.col.nodes)
            for (int r : rows_->rows_of_node[n]) coef[r] += 1.0;
          if (model_ == MasterModel::cxttp)
            for (int a : pc.col.arcs)
              for (size_t i = 0; i < od_.entries.size(); ++i) {
                auto it = rows_->couple.find({static_cast<int>(i), a});
                if (it != rows_->couple.end()) coef[it->second] += 1.0;
              }
          for (const auto& [r, v] : coef) col.entries.push_back({r, v});
          new_cols.push_back(col);
          new_map.push_back({'c', idx});
          ++added;
        }
      }
      log_line(res.rounds, "cycle", cand, added,
               cand ? best_rc : 0.0,
               std::chrono::duration<double, std::micro>(Clock::now() - tp)
                   .count());
      res.columns_added += added;

      long z_added = 0;
      if (model_ == MasterModel::cxpesp) {
        const auto tz = Clock::now();
        std::vector<PricedArc> hits =
            price_transfer_arcs(d_, dv.nu_out, dv.rho_in);
        // Filtered arcs cannot enter and must not count as violations.
        if (!forbidden.empty())
          hits.erase(std::remove_if(hits.begin(), hits.end(),
                                    [&](const PricedArc& pa) {
                                      return forbidden.count(pa.arc) > 0;
                                    }),
                     hits.end());
        for (const PricedArc& pa : hits) {
          if (z_pool_.count(pa.arc)) continue;
          z_pool_.insert(pa.arc);
          const ExpandedArc& a = d_.arcs[pa.arc];
          LpColumn col;
          col.obj = a.cost;
          col.label = "z_" + std::to_string(pa.arc);
          col.entries.push_back(
              {rows_->out_row.at(a.alpha)[d_.node_time(a.tail)], -1.0});
          col.entries.push_back(
              {rows_->in_row.at(a.alpha)[d_.node_time(a.head)], -1.0});
          new_cols.push_back(col);
          new_map.push_back({'z', pa.arc});
          ++z_added;
        }
        if (!hits.empty()) lb_valid = false;  // z arcs carry no convexity row
        log_line(res.rounds, "transfer", static_cast<long>(hits.size()),
                 z_added, hits.empty() ? 0.0 : hits.front().redcost,
                 std::chrono::duration<double, std::micro>(Clock::now() - tz)
                     .count());
      } else if (model_ == MasterModel::cxpespw) {
        // All z variables are present from the start, but the Lagrangian
        // bound is only valid if none of them prices negative under the
        // (possibly smoothed) duals in use.
        for (int alpha : ean.transfer_activities()) {
          const auto& nu = dv.nu_out.at(alpha);
          const auto& rho = dv.rho_in.at(alpha);
          const auto capit = dv.cap.find(alpha);
          const double capdual = capit == dv.cap.end() ? 0.0 : capit->second;
          for (int arc : d_.arcs_of_activity[alpha]) {
            const ExpandedArc& a = d_.arcs[arc];
            if (a.cost + nu[d_.node_time(a.tail)] +
                    rho[d_.node_time(a.head)] < -1e-12)
              lb_valid = false;
          }
          for (int arc : d_.waiting_arcs_of_activity[alpha]) {
            const ExpandedArc& a = d_.arcs[arc];
            const int t = d_.node_time(a.tail);
            if (a.cost - rho[t] + rho[(t + 1) % d_.T] - capdual < -1e-12)
              lb_valid = false;
          }
        }
      }

      long p_added = 0;
      if (model_ == MasterModel::cxttp) {
        const auto ty = Clock::now();
        long p_cand = 0;
        double pbest = 0.0;
        for (size_t i = 0; i < graphs_.size(); ++i) {
          std::vector<double> rho(d_.arcs.size(), 0.0);
          bool any_rho = false;
          for (const auto& [key, v] : dv.rho_od)
            if (key.first == static_cast<int>(i)) {
              rho[key.second] = std::max(0.0, v);
              any_rho = true;
            }
          PathPricingResult pr =
              price_path(d_, graphs_[i], od_.entries[i].demand, dv.nu_od[i],
                         any_rho ? rho : std::vector<double>{});
          if (!pr.reachable) { lb_valid = false; continue; }
          lb += std::min(0.0, pr.redcost);
          if (!pr.found) continue;
          ++p_cand;
          pbest = std::min(pbest, pr.redcost);
          if (path_keys_.count(pr.col.arcs)) continue;
          path_keys_.insert(pr.col.arcs);
          const int idx = static_cast<int>(path_pool_.size());
          path_pool_.push_back(pr.col);
          LpColumn col;
          col.obj = pr.col.cost;
          col.label = "path_" + std::to_string(idx);
          col.entries.push_back({rows_->od_row[pr.col.od], 1.0});
          for (int a : pr.col.arcs) {
            auto it = rows_->couple.find({pr.col.od, a});
            if (it != rows_->couple.end())
              col.entries.push_back({it->second, -1.0});
          }
          new_cols.push_back(col);
          new_map.push_back({'p', idx});
          ++p_added;
        }
        log_line(res.rounds, "path", p_cand, p_added, pbest,
                 std::chrono::duration<double, std::micro>(Clock::now() - ty)
                     .count());
      }

      res.pricing_s +=
          std::chrono::duration<double>(Clock::now() - tp).count();

      // Lagrangian bound: valid whenever every variable family without a
      // convexity row priced clean; an improvement moves the stabilization
      // center to the current RMP duals.
      if (lb_valid && lb > res.lower_bound) {
        res.lower_bound = lb;
        center = cur;
      }

      if (!new_cols.empty()) {
        solver_->add_columns(new_cols);
        for (auto& e : new_map) rows_->col_map.push_back(e);
        break;  // next round
      }
      if (zeta < 1.0) {
        // Mispricing: the smoothed duals found nothing; certify with the
        // true duals before declaring optimality.
        zeta = 1.0;
        mispriced_this_round = true;
        continue;
      }
      converged = true;
      break;
    }
    if (mispriced_this_round) ++res.mispricings;
    if (converged) break;
    if (seconds_since(t0) > opts.time_limit_s) break;
  }

  // Extract the final solution.
  sol = solver_->solve();
  if (sol.status != LpStatus::optimal)
    throw Error(std::string("master: final RMP extraction failed: ") +
                to_string(sol.status) + " " + sol.diagnostics);
  cycle_values_.assign(pool_.size(), 0.0);
  arc_values_.clear();
  path_values_.assign(path_pool_.size(), 0.0);
  double art = 0.0;
  std::string art_rows;
  for (size_t j = 0; j < rows_->col_map.size(); ++j) {
    const auto [kind, id] = rows_->col_map[j];
    const double v = sol.x[j];
    switch (kind) {
      case 'c': cycle_values_[id] += v; break;
      case 'z': if (v > tol::feasibility) arc_values_[id] += v; break;
      case 'p': path_values_[id] += v; break;
      case 'a':
        if (v > tol::integrality) {
          art += v;
          if (!art_rows.empty()) art_rows += ", ";
          art_rows += rows_->lp.row_labels[id];
        }
        break;
    }
  }

  res.total_s = seconds_since(t0);
  if (art > tol::integrality) {
    res.status = SolveStatus::infeasible;
    res.infeasible_report = "artificial columns active on rows: " + art_rows;
  } else if (converged) {
    res.status = SolveStatus::optimal;
    res.objective = sol.obj;
    if (res.lower_bound == -kInfD || res.lower_bound > sol.obj)
      res.lower_bound = sol.obj;
  } else {
    res.status = SolveStatus::time_limit;
    res.objective = sol.obj;
  }
  return res;
}

std::map<int, double> MasterSolver::arc_values() const { return arc_values_; }

int MasterSolver::row_count() const {
  return rows_ ? rows_->lp.num_rows() : 0;
}

std::map<int, double> MasterSolver::vehicle_arc_fractions() const {
  std::map<int, double> f;
  for (size_t i = 0; i < pool_.size(); ++i) {
    if (cycle_values_[i] <= tol::feasibility) continue;
    for (int a : pool_[i].arcs) f[a] += cycle_values_[i];
  }
  return f;
}

std::string MasterSolver::stats_tsv(const std::string& instance,
                                    const ColgenResult& r, double zeta) const {
  std::ostringstream os;
  os << "instance;T;rounds;cycles;pricing_s;total_s;factor\n";
  os << instance << ';' << d_.T << ';' << r.rounds << ';' << r.columns_added
     << ';' << r.pricing_s << ';' << r.total_s << ';' << zeta << '\n';
  return os.str();
}

EqualityReport lp_equality_check(const EventActivityNetwork& ean) {
  EqualityReport rep;
  rep.all_transfers_free = true;
  for (int tr : ean.transfer_activities())
    rep.all_transfers_free =
        rep.all_transfers_free && ean.activities[tr].is_free(ean.T);

  ExpandedNetwork ds = expand(ean);
  MasterSolver ms(ds, MasterModel::cxpesp);
  ColgenResult rs = ms.solve();
  if (rs.status != SolveStatus::optimal)
    throw Error("lp_equality_check: standard model did not solve");
  rep.standard_value = rs.objective;

  ExpandedNetwork dw = expand_waiting_variant(ean);
  MasterSolver mw(dw, MasterModel::cxpespw);
  ColgenResult rw = mw.solve();
  if (rw.status != SolveStatus::optimal)
    throw Error("lp_equality_check: waiting-arc model did not solve");
  rep.waiting_value = rw.objective;

  rep.equal = std::abs(rep.standard_value - rep.waiting_value) <= tol::objective;
  rep.monotone = rep.standard_value >= rep.waiting_value - tol::objective;
  std::ostringstream os;
  os << "standard=" << rep.standard_value << " waiting=" << rep.waiting_value
     << " free=" << (rep.all_transfers_free ? "yes" : "no");
  rep.text = os.str();
  if (!rep.monotone)
    throw Error("lp_equality_check: dominance violated: " + rep.text);
  if (rep.all_transfers_free && !rep.equal)
    throw Error("lp_equality_check: equality violated: " + rep.text);
  return rep;
}

}  // namespace pescg
