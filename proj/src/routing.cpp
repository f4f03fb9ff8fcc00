#include "pescg/routing.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "pescg/lp.hpp"
#include "pescg/util.hpp"

namespace pescg {

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();

/// Activities a passenger can ride, as an adjacency list over events.
std::vector<std::vector<int>> passenger_adjacency(const EventActivityNetwork& ean) {
  std::vector<std::vector<int>> out(ean.events.size());
  for (const Activity& a : ean.activities)
    if (a.kind != ActivityKind::turnaround) out[a.tail].push_back(a.id);
  return out;
}

void require_stations(const EventActivityNetwork& ean) {
  for (const Event& e : ean.events)
    if (e.station < 0)
      throw Error("routing requires an instance with station information");
}

/// Realized duration of an activity when tail/head times are fixed:
/// tau = l + ((dt - l) mod T), feasible iff tau <= u.
int realized_tau(const Activity& a, int dt, int T) {
  return a.l + static_cast<int>(mod(dt - a.l, T));
}

}  // namespace

std::vector<CandidatePath> candidate_paths(const EventActivityNetwork& ean,
                                           int s, int t, long cap) {
  require_stations(ean);
  const int S = static_cast<int>(ean.station_names.size());
  if (s < 0 || s >= S || t < 0 || t >= S)
    throw Error("candidate_paths: unknown station");
  if (s == t) throw Error("candidate_paths: origin equals destination");

  const auto adj = passenger_adjacency(ean);
  std::vector<CandidatePath> all;
  std::vector<char> visited(ean.events.size(), 0);
  CandidatePath cur;
  long explored = 0;

  // Depth-first enumeration of simple paths from every departure at s.
  auto dfs = [&](auto&& self, int e) -> void {
    if (++explored > cap) throw Error("candidate_paths: path cap exceeded");
    if (ean.events[e].kind == EventKind::arr && ean.events[e].station == t) {
      all.push_back(cur);
      return;  // arriving at the destination ends the trip
    }
    visited[e] = 1;
    for (int aid : adj[e]) {
      const Activity& a = ean.activities[aid];
      if (visited[a.head]) continue;
      cur.events.push_back(a.head);
      cur.acts.push_back(aid);
      cur.l_cost += a.l;
      cur.u_cost += a.u;
      self(self, a.head);
      cur.events.pop_back();
      cur.acts.pop_back();
      cur.l_cost -= a.l;
      cur.u_cost -= a.u;
    }
    visited[e] = 0;
  };

  for (const Event& e : ean.events) {
    if (e.kind != EventKind::dep || e.station != s) continue;
    cur = CandidatePath{};
    cur.events.push_back(e.id);
    dfs(dfs, e.id);
  }
  if (all.empty()) throw Error("candidate_paths: destination unreachable");

  long min_u = std::numeric_limits<long>::max();
  for (const CandidatePath& p : all) min_u = std::min(min_u, p.u_cost);
  std::vector<CandidatePath> kept;
  for (CandidatePath& p : all)
    if (p.l_cost <= min_u) kept.push_back(std::move(p));
  return kept;
}

std::string RoutingGraph::dump_tsv(const ExpandedNetwork& d) const {
  std::ostringstream os;
  os << "arc_id;alpha;t;t';tau;cost;kind\n";
  for (int id : arcs) {
    const ExpandedArc& a = d.arcs[id];
    os << id << ';' << a.alpha << ';' << d.node_time(a.tail) << ';'
       << d.node_time(a.head) << ';' << a.tau << ';' << a.cost << ';'
       << to_string(d.ean.activities[a.alpha].kind) << '\n';
  }
  return os.str();
}

std::vector<RoutingGraph> build_routing_graphs(const ExpandedNetwork& d,
                                               const ODMatrix& od, long cap) {
  std::vector<RoutingGraph> out;
  for (size_t i = 0; i < od.entries.size(); ++i) {
    const ODEntry& e = od.entries[i];
    RoutingGraph g;
    g.od = static_cast<int>(i);
    g.s = e.s;
    g.t = e.t;
    std::vector<CandidatePath> cands;
    try {
      cands = candidate_paths(d.ean, e.s, e.t, cap);
    } catch (const Error&) {
      g.reachable = false;  // flagged, not fatal: the pair simply has no path
      out.push_back(std::move(g));
      continue;
    }
    std::set<int> arcs, entries, exits;
    for (const CandidatePath& p : cands) {
      entries.insert(p.events.front());
      exits.insert(p.events.back());
      for (int aid : p.acts)
        for (int arc : d.arcs_of_activity[aid])
          if (d.arcs[arc].cls != ArcClass::waiting) arcs.insert(arc);
    }
    g.reachable = true;
    g.arcs.assign(arcs.begin(), arcs.end());
    g.entry_events.assign(entries.begin(), entries.end());
    g.exit_events.assign(exits.begin(), exits.end());
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<PathColumn> enumerate_expanded_paths(const ExpandedNetwork& d,
                                                 const RoutingGraph& g,
                                                 long demand, long cap) {
  std::vector<PathColumn> out;
  if (!g.reachable) return out;
  std::map<int, std::vector<int>> adj;  // node -> arc ids
  for (int id : g.arcs) adj[d.arcs[id].tail].push_back(id);
  std::set<int> exits;
  for (int e : g.exit_events)
    for (int t = 0; t < d.times_of(e); ++t) exits.insert(d.node(e, t));

  std::set<int> visited;
  std::vector<int> cur;
  long tau = 0;
  long explored = 0;
  auto dfs = [&](auto&& self, int node) -> void {
    if (++explored > cap) throw Error("enumerate_expanded_paths: cap exceeded");
    if (exits.count(node) && !cur.empty()) {
      PathColumn pc;
      pc.od = g.od;
      pc.arcs = cur;
      pc.tau = tau;
      pc.cost = static_cast<double>(demand) * static_cast<double>(tau);
      out.push_back(std::move(pc));
      // A path may continue through an arrival toward a later arrival; those
      // longer paths are distinct columns and are enumerated as well.
    }
    visited.insert(node);
    auto it = adj.find(node);
    if (it != adj.end()) {
      for (int id : it->second) {
        const ExpandedArc& a = d.arcs[id];
        if (visited.count(a.head)) continue;
        cur.push_back(id);
        tau += a.tau;
        self(self, a.head);
        cur.pop_back();
        tau -= a.tau;
      }
    }
    visited.erase(node);
  };
  for (int e : g.entry_events)
    for (int t = 0; t < d.times_of(e); ++t) dfs(dfs, d.node(e, t));
  return out;
}

PathPricingResult price_path(const ExpandedNetwork& d, const RoutingGraph& g,
                             long demand, double nu_st,
                             const std::vector<double>& rho) {
  PathPricingResult res;
  if (!g.reachable) {
    res.reachable = false;
    return res;
  }
  std::map<int, std::vector<int>> adj;
  for (int id : g.arcs) adj[d.arcs[id].tail].push_back(id);
  std::set<int> exits;
  for (int e : g.exit_events)
    for (int t = 0; t < d.times_of(e); ++t) exits.insert(d.node(e, t));

  std::map<int, double> dist;
  std::map<int, int> parent;  // node -> arc used to reach it
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (int e : g.entry_events)
    for (int t = 0; t < d.times_of(e); ++t) {
      dist[d.node(e, t)] = 0.0;
      pq.push({0.0, d.node(e, t)});
    }
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v] + 1e-15) continue;
    auto it = adj.find(v);
    if (it == adj.end()) continue;
    for (int id : it->second) {
      const ExpandedArc& a = d.arcs[id];
      const double w = static_cast<double>(demand) * a.tau +
                       (rho.empty() ? 0.0 : rho[id]);
      auto dit = dist.find(a.head);
      if (dit == dist.end() || dv + w < dit->second - 1e-15) {
        dist[a.head] = dv + w;
        parent[a.head] = id;
        pq.push({dv + w, a.head});
      }
    }
  }

  double best = kInfD;
  int best_node = -1;
  for (int v : exits) {
    auto it = dist.find(v);
    if (it != dist.end() && it->second < best - 1e-15) {
      best = it->second;
      best_node = v;
    }
  }
  if (best_node < 0) {
    res.reachable = false;
    return res;
  }
  res.redcost = best - nu_st;
  if (res.redcost < -tol::pricing) {
    res.found = true;
    res.col.od = g.od;
    int v = best_node;
    while (parent.count(v)) {
      const int id = parent[v];
      res.col.arcs.push_back(id);
      res.col.tau += d.arcs[id].tau;
      v = d.arcs[id].tail;
    }
    std::reverse(res.col.arcs.begin(), res.col.arcs.end());
    res.col.cost =
        static_cast<double>(demand) * static_cast<double>(res.col.tau);
  }
  return res;
}

double ttp_shortest_path_bound(const EventActivityNetwork& ean,
                               const ODMatrix& od) {
  require_stations(ean);
  const auto adj = passenger_adjacency(ean);
  double total = 0.0;
  for (const ODEntry& e : od.entries) {
    // Dijkstra over events with every activity at its lower bound.
    std::vector<long> dist(ean.events.size(),
                           std::numeric_limits<long>::max());
    using Item = std::pair<long, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (const Event& ev : ean.events)
      if (ev.kind == EventKind::dep && ev.station == e.s) {
        dist[ev.id] = 0;
        pq.push({0, ev.id});
      }
    while (!pq.empty()) {
      auto [dv, v] = pq.top();
      pq.pop();
      if (dv > dist[v]) continue;
      for (int aid : adj[v]) {
        const Activity& a = ean.activities[aid];
        if (dv + a.l < dist[a.head]) {
          dist[a.head] = dv + a.l;
          pq.push({dist[a.head], a.head});
        }
      }
    }
    long best = std::numeric_limits<long>::max();
    for (const Event& ev : ean.events)
      if (ev.kind == EventKind::arr && ev.station == e.t)
        best = std::min(best, dist[ev.id]);
    if (best == std::numeric_limits<long>::max())
      throw Error("ttp_shortest_path_bound: unreachable OD pair");
    total += static_cast<double>(e.demand) * static_cast<double>(best);
  }
  return total;
}

namespace {

struct LineAssign {
  std::vector<int> pi;  // time per cycle position
  double cost = 0.0;    // vehicle cost of the line under this timetable
};

/// All vehicle-feasible timetables of one line along its cycle order.
std::vector<LineAssign> line_assignments(const EventActivityNetwork& ean,
                                         int L, bool pin_first) {
  const std::vector<int>& cyc = ean.line_cycles[L];
  const std::vector<int>& acts = ean.line_cycle_acts[L];
  const int k = static_cast<int>(cyc.size());
  const int T = ean.T;
  std::vector<LineAssign> out;
  std::vector<int> pi(k, 0);
  auto dfs = [&](auto&& self, int i, double cost) -> void {
    if (i == k) {
      const Activity& close = ean.activities[acts[k - 1]];
      const int tau = realized_tau(close, pi[0] - pi[k - 1], T);
      if (tau > close.u) return;
      out.push_back({pi, cost + close.cost(tau)});
      return;
    }
    const Activity& a = ean.activities[acts[i - 1]];
    for (int t = 0; t < T; ++t) {
      const int tau = realized_tau(a, t - pi[i - 1], T);
      if (tau > a.u) continue;
      pi[i] = t;
      self(self, i + 1, cost + a.cost(tau));
    }
  };
  for (int t0 = 0; t0 < (pin_first ? 1 : T); ++t0) {
    pi[0] = t0;
    dfs(dfs, 1, 0.0);
  }
  return out;
}

}  // namespace

SolveResult ttp_bruteforce(const EventActivityNetwork& ean, const ODMatrix& od,
                           long cap) {
  require_stations(ean);
  ean.validate();
  const int T = ean.T;
  const int L = ean.num_lines();
  if (L == 0) throw Error("ttp_bruteforce: no lines");
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::vector<LineAssign>> per_line(L);
  long combos = 1;
  for (int i = 0; i < L; ++i) {
    per_line[i] = line_assignments(ean, i, /*pin_first=*/i == 0);
    if (per_line[i].empty())
      return {SolveStatus::infeasible, 0.0, {}, {}, 0, 0.0};
    if (combos > cap / static_cast<long>(per_line[i].size()))
      throw Error("ttp_bruteforce: combination cap exceeded");
    combos *= static_cast<long>(per_line[i].size());
  }

  const auto adj = passenger_adjacency(ean);
  std::vector<int> pi(ean.events.size(), -1);

  // Route all OD pairs under the realized durations; infinity = unroutable.
  auto route_cost = [&]() -> double {
    double total = 0.0;
    for (const ODEntry& e : od.entries) {
      std::vector<long> dist(ean.events.size(),
                             std::numeric_limits<long>::max());
      using Item = std::pair<long, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      for (const Event& ev : ean.events)
        if (ev.kind == EventKind::dep && ev.station == e.s) {
          dist[ev.id] = 0;
          pq.push({0, ev.id});
        }
      while (!pq.empty()) {
        auto [dv, v] = pq.top();
        pq.pop();
        if (dv > dist[v]) continue;
        for (int aid : adj[v]) {
          const Activity& a = ean.activities[aid];
          const int tau = realized_tau(a, pi[a.head] - pi[a.tail], T);
          if (tau > a.u) continue;  // this connection is not offered
          if (dv + tau < dist[a.head]) {
            dist[a.head] = dv + tau;
            pq.push({dist[a.head], a.head});
          }
        }
      }
      long best = std::numeric_limits<long>::max();
      for (const Event& ev : ean.events)
        if (ev.kind == EventKind::arr && ev.station == e.t)
          best = std::min(best, dist[ev.id]);
      if (best == std::numeric_limits<long>::max()) return kInfD;
      total += static_cast<double>(e.demand) * static_cast<double>(best);
    }
    return total;
  };

  SolveResult res;
  res.status = SolveStatus::infeasible;
  double best = kInfD;
  std::vector<int> choice(L, 0);
  auto walk = [&](auto&& self, int line, double veh) -> void {
    if (veh >= best) return;  // vehicle cost alone already dominates
    if (line == L) {
      ++res.nodes;
      const double cost = veh + route_cost();
      if (cost < best) best = cost;
      return;
    }
    for (size_t i = 0; i < per_line[line].size(); ++i) {
      const LineAssign& la = per_line[line][i];
      const std::vector<int>& cyc = ean.line_cycles[line];
      for (size_t j = 0; j < cyc.size(); ++j) pi[cyc[j]] = la.pi[j];
      self(self, line + 1, veh + la.cost);
    }
  };
  walk(walk, 0, 0.0);

  if (best < kInfD) {
    res.status = SolveStatus::optimal;
    res.objective = best;
  }
  res.time_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

SolveResult cxttp_lp_full(const ExpandedNetwork& d, const ODMatrix& od,
                          long cycle_cap, long path_cap) {
  if (d.variant != Variant::standard)
    throw Error("cxttp_lp_full: standard variant required");
  const EventActivityNetwork& ean = d.ean;
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<RoutingGraph> graphs = build_routing_graphs(d, od);
  for (const RoutingGraph& g : graphs)
    if (!g.reachable) return {SolveStatus::infeasible, 0.0, {}, {}, 0, 0.0};

  LinearProgram lp;
  std::vector<int> line_row(ean.num_lines());
  for (int L = 0; L < ean.num_lines(); ++L)
    line_row[L] = lp.add_row('=', 1.0, "line_" + std::to_string(L));
  std::vector<int> od_row(od.entries.size());
  for (size_t i = 0; i < od.entries.size(); ++i)
    od_row[i] = lp.add_row('=', 1.0, "od_" + std::to_string(i));

  // Coupling rows per (OD pair, vehicle arc of its routing graph).
  std::map<std::pair<int, int>, int> couple;  // (od, arc) -> row
  std::vector<std::vector<PathColumn>> paths(od.entries.size());
  for (size_t i = 0; i < od.entries.size(); ++i) {
    paths[i] = enumerate_expanded_paths(d, graphs[i], od.entries[i].demand,
                                        path_cap);
    for (int arc : graphs[i].arcs)
      if (d.arcs[arc].cls == ArcClass::vehicle)
        couple[{static_cast<int>(i), arc}] =
            lp.add_row('>', 0.0,
                       "cpl_" + std::to_string(i) + "_" + std::to_string(arc));
  }

  std::vector<CycleColumn> cycles;
  for (int L = 0; L < ean.num_lines(); ++L) {
    std::vector<CycleColumn> cs = enumerate_cycles(d, L, cycle_cap);
    cycles.insert(cycles.end(), cs.begin(), cs.end());
  }

  const double inf = std::numeric_limits<double>::infinity();
  for (size_t ci = 0; ci < cycles.size(); ++ci) {
    const CycleColumn& c = cycles[ci];
    LpColumn col;
    col.obj = c.theta;
    col.lb = 0.0;
    col.ub = inf;
    col.label = "cyc_" + std::to_string(ci);
    col.entries.push_back({line_row[c.line], 1.0});
    for (int arc : c.arcs)
      for (size_t i = 0; i < od.entries.size(); ++i) {
        auto it = couple.find({static_cast<int>(i), arc});
        if (it != couple.end()) col.entries.push_back({it->second, 1.0});
      }
    lp.add_col(col);
  }
  for (size_t i = 0; i < od.entries.size(); ++i)
    for (size_t pj = 0; pj < paths[i].size(); ++pj) {
      const PathColumn& p = paths[i][pj];
      LpColumn col;
      col.obj = p.cost;
      col.lb = 0.0;
      col.ub = inf;
      col.label = "path_" + std::to_string(i) + "_" + std::to_string(pj);
      col.entries.push_back({od_row[i], 1.0});
      for (int arc : p.arcs) {
        auto it = couple.find({static_cast<int>(i), arc});
        if (it != couple.end()) col.entries.push_back({it->second, -1.0});
      }
      lp.add_col(col);
    }

  SimplexSolver solver(lp);
  LpSolution sol = solver.solve();
  SolveResult res;
  res.nodes = sol.iterations;
  if (sol.status == LpStatus::optimal) {
    res.status = SolveStatus::optimal;
    res.objective = sol.obj;
    res.cycle_weights.assign(sol.x.begin(), sol.x.begin() + cycles.size());
  } else if (sol.status == LpStatus::infeasible) {
    res.status = SolveStatus::infeasible;
  } else {
    throw Error("cxttp_lp_full: LP solver failed");
  }
  res.time_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

}  // namespace pescg
