#include "pescg/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pescg/util.hpp"

namespace pescg {

namespace {
constexpr double kInfD = std::numeric_limits<double>::infinity();
}

int CutLineDag::num_sources() const { return d->times_of(v_hat); }

long CutLineDag::path_count() const {
  const int T = d->T;
  long total = 0;
  for (int t0 = 0; t0 < num_sources(); ++t0) {
    std::vector<long> cur(T, 0);
    cur[t0] = 1;
    for (int pos = 0; pos < k; ++pos) {
      std::vector<long> next(T, 0);
      for (int t = 0; t < T; ++t) {
        if (cur[t] == 0) continue;
        for (const auto& [t2, id] : step[pos][t]) {
          (void)id;
          next[t2] += cur[t];
        }
      }
      cur.swap(next);
    }
    total += cur[t0];  // the path must close at its source time
  }
  return total;
}

CutLineDag build_cut_dag(const ExpandedNetwork& d, int line, int v_hat,
                         const std::set<int>* forbidden_arcs) {
  const EventActivityNetwork& ean = d.ean;
  if (line < 0 || line >= ean.num_lines()) throw Error("build_cut_dag: bad line");
  const std::vector<int>& cyc = ean.line_cycles[line];
  const std::vector<int>& cyc_acts = ean.line_cycle_acts[line];
  const int k = static_cast<int>(cyc.size());

  const bool fixed_on_line =
      d.fixed_event >= 0 && ean.events[d.fixed_event].line == line;
  if (v_hat == -2) {
    if (fixed_on_line) {
      v_hat = d.fixed_event;
    } else {
      // Lexicographically smallest departure event of the line, ties by id.
      v_hat = -1;
      for (int e : cyc) {
        if (ean.events[e].kind != EventKind::dep) continue;
        if (v_hat < 0 || ean.events[e].name < ean.events[v_hat].name ||
            (ean.events[e].name == ean.events[v_hat].name && e < v_hat))
          v_hat = e;
      }
      if (v_hat < 0) v_hat = cyc.front();  // cycle without departures (raw EANs)
    }
  }
  if (fixed_on_line && v_hat != d.fixed_event)
    throw Error("build_cut_dag: cut event must be the time-fixed event");

  auto pos_it = std::find(cyc.begin(), cyc.end(), v_hat);
  if (pos_it == cyc.end()) throw Error("build_cut_dag: cut event not on line");
  const int offset = static_cast<int>(pos_it - cyc.begin());

  CutLineDag dag;
  dag.line = line;
  dag.v_hat = v_hat;
  dag.k = k;
  dag.d = &d;
  dag.events.resize(k);
  dag.acts.resize(k);
  for (int i = 0; i < k; ++i) {
    dag.events[i] = cyc[(offset + i) % k];
    dag.acts[i] = cyc_acts[(offset + i) % k];
  }

  const int T = d.T;
  dag.step.assign(k, std::vector<std::vector<std::pair<int, int>>>(T));
  for (int i = 0; i < k; ++i) {
    const Activity& act = ean.activities[dag.acts[i]];
    if (act.tail != dag.events[i])
      throw Error("build_cut_dag: cycle activity oriented against the cycle");
    for (int id : d.arcs_of_activity[dag.acts[i]]) {
      if (forbidden_arcs && forbidden_arcs->count(id)) continue;
      const ExpandedArc& a = d.arcs[id];
      const int t = d.node_time(a.tail);
      const int t2 = d.node_time(a.head);
      dag.step[i][t].emplace_back(t2, id);
    }
  }
  return dag;
}

CyclePricingResult price_cycles(const CutLineDag& dag, double mu_L,
                                const std::vector<double>& node_price,
                                const std::vector<double>& arc_price) {
  const ExpandedNetwork& d = *dag.d;
  const int T = d.T;
  const int k = dag.k;
  auto np = [&](int node) {
    return node_price.empty() ? 0.0 : node_price[node];
  };
  auto ap = [&](int arc) { return arc_price.empty() ? 0.0 : arc_price[arc]; };

  CyclePricingResult res;
  res.best_redcost = kInfD;

  for (int t0 = 0; t0 < dag.num_sources(); ++t0) {
    std::vector<std::vector<double>> dist(k + 1, std::vector<double>(T, kInfD));
    // parent[pos][t]: arc used to reach layer pos, time t (-1 = unreached).
    std::vector<std::vector<int>> parent(k + 1, std::vector<int>(T, -1));
    dist[0][t0] = 0.0;
    for (int pos = 0; pos < k; ++pos) {
      for (int t = 0; t < T; ++t) {
        if (dist[pos][t] == kInfD) continue;
        const int tail = d.node(dag.events[pos], t);
        for (const auto& [t2, id] : dag.step[pos][t]) {
          const double w = d.arcs[id].cost - np(tail) - ap(id);
          const double cand = dist[pos][t] + w;
          if (cand < dist[pos + 1][t2] - 1e-15) {
            dist[pos + 1][t2] = cand;
            parent[pos + 1][t2] = id;
          }
        }
      }
    }
    if (dist[k][t0] == kInfD) continue;
    res.any_path = true;
    const double rc = dist[k][t0] - mu_L;
    res.best_redcost = std::min(res.best_redcost, rc);
    if (rc < -tol::pricing) {
      PricedCycle pc;
      pc.redcost = rc;
      pc.col.line = dag.line;
      pc.col.arcs.resize(k);
      pc.col.nodes.resize(k);
      int t = t0;
      for (int pos = k; pos > 0; --pos) {
        const int id = parent[pos][t];
        const ExpandedArc& a = d.arcs[id];
        pc.col.arcs[pos - 1] = id;
        pc.col.nodes[pos - 1] = a.tail;
        pc.col.theta += a.cost;
        pc.col.tau += a.tau;
        t = d.node_time(a.tail);
      }
      if (t != t0) throw Error("price_cycles: path reconstruction broke");
      if (pc.col.tau % T != 0) throw Error("price_cycles: cycle duration not a multiple of T");
      res.columns.push_back(std::move(pc));
    }
  }
  if (!res.any_path) res.best_redcost = kInfD;
  return res;
}

std::vector<PricedArc> price_transfer_arcs(
    const ExpandedNetwork& d,
    const std::map<int, std::vector<double>>& nu_out,
    const std::map<int, std::vector<double>>& rho_in) {
  std::vector<PricedArc> out;
  for (int alpha : d.ean.transfer_activities()) {
    const auto* nu = [&]() -> const std::vector<double>* {
      auto it = nu_out.find(alpha);
      return it == nu_out.end() ? nullptr : &it->second;
    }();
    const auto* rho = [&]() -> const std::vector<double>* {
      auto it = rho_in.find(alpha);
      return it == rho_in.end() ? nullptr : &it->second;
    }();
    for (int id : d.arcs_of_activity[alpha]) {
      const ExpandedArc& a = d.arcs[id];
      const int t = d.node_time(a.tail);
      const int t2 = d.node_time(a.head);
      double rc = a.cost;
      if (nu) rc += (*nu)[t];
      if (rho) rc += (*rho)[t2];
      if (rc < -tol::pricing) out.push_back({id, rc});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PricedArc& x, const PricedArc& y) {
              return x.redcost < y.redcost ||
                     (x.redcost == y.redcost && x.arc < y.arc);
            });
  return out;
}

}  // namespace pescg
