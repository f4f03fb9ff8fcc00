#include "pescg/branch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "pescg/util.hpp"

namespace pescg {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kInfD = std::numeric_limits<double>::infinity();

double seconds_since(const Clock::time_point& t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Time of each event's covered copy under one chosen cycle per line.
std::vector<int> covered_times(const ExpandedNetwork& d,
                               const std::vector<CycleColumn>& chosen) {
  std::vector<int> t(d.ean.events.size(), -1);
  for (const CycleColumn& c : chosen)
    for (int v : c.nodes) t[d.node_event(v)] = d.node_time(v);
  for (size_t e = 0; e < t.size(); ++e)
    if (t[e] < 0)
      throw Error("transfer completion: event " + std::to_string(e) +
                  " is not covered by any chosen cycle");
  return t;
}

}  // namespace

std::string BranchResult::tsv() const {
  std::ostringstream os;
  os << "rounds;cycles;pricing_s;total_s;nodes\n";
  os << rounds << ';' << columns << ';' << pricing_s << ';' << total_s << ';'
     << nodes << '\n';
  return os.str();
}

int select_branch_arc(const std::map<int, double>& fractions) {
  int best = -1;
  double best_score = tol::integrality;
  for (const auto& [arc, f] : fractions) {
    const double score = std::min(f, 1.0 - f);
    if (score > best_score + 1e-15) {  // strict: ties keep the smallest id
      best_score = score;
      best = arc;
    }
  }
  if (best < 0)
    throw Error("select_branch_arc: the cycle solution is already integral");
  return best;
}

std::map<int, double> complete_transfers(const ExpandedNetwork& d,
                                         const std::vector<CycleColumn>& chosen,
                                         double* cost) {
  const std::vector<int> at = covered_times(d, chosen);
  std::map<int, double> z;
  for (int alpha : d.ean.transfer_activities()) {
    const Activity& act = d.ean.activities[alpha];
    const int tv = at[act.tail], tw = at[act.head];
    if (d.variant == Variant::standard) {
      // The coupling rows pin both endpoints, so at most one arc of the
      // group joins the covered copies; cost-minimal selection with the
      // smallest-head-time tie-break reduces to that arc.
      int pick = -1;
      for (int id : d.arcs_of_activity[alpha]) {
        const ExpandedArc& a = d.arcs[id];
        if (a.tail != d.node(act.tail, tv) || a.head != d.node(act.head, tw))
          continue;
        if (pick < 0 || a.cost < d.arcs[pick].cost - tol::feasibility)
          pick = id;
      }
      if (pick < 0)
        throw Error("transfer completion: window of activity " + act.name +
                    " cannot join the covered event copies");
      z[pick] = 1.0;
      if (cost) *cost += d.arcs[pick].cost;
    } else {
      // One unit enters the head event at time tv + l and walks the unit
      // waiting arcs up to the covered head copy; the walk length is the
      // slack and must respect the window width.
      const ExpandedArc& in = d.arcs[d.arcs_of_activity[alpha][tv]];
      const int start = d.node_time(in.head);
      const int steps = static_cast<int>(mod(tw - start, d.T));
      if (steps > act.u - act.l)
        throw Error("transfer completion: waiting chain of activity " +
                    act.name + " exceeds the window width");
      z[in.id] = 1.0;
      if (cost) *cost += in.cost;
      for (int s = 0; s < steps; ++s) {
        const int wa =
            d.waiting_arcs_of_activity[alpha][mod(start + s, d.T)];
        z[wa] += 1.0;
        if (cost) *cost += d.arcs[wa].cost;
      }
    }
  }
  return z;
}

BranchResult branch_and_price(const ExpandedNetwork& d, MasterModel model,
                              const BranchLimits& limits) {
  if (model != MasterModel::cxpesp && model != MasterModel::cxpespw)
    throw Error("branch_and_price: only the cycle masters are branched");
  const auto t0 = Clock::now();

  MasterSolver ms(d, model);
  const int depth_cap = 10 * static_cast<int>(d.ean.events.size());

  BranchResult R;
  R.objective = kInfD;
  R.lower_bound = -kInfD;

  // Best-bound node selection; equal bounds break ties FIFO via the id.
  using Key = std::pair<double, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> open;

  BranchNode root;
  root.id = 0;
  root.bound = -kInfD;
  root.status = "open";
  R.tree.push_back(root);
  open.emplace(root.bound, root.id);

  bool out_of_budget = false;
  while (!open.empty()) {
    if (seconds_since(t0) > limits.time_limit_s ||
        R.nodes >= limits.max_nodes) {
      out_of_budget = true;
      break;
    }
    const auto [bound, id] = open.top();
    open.pop();
    BranchNode& node = R.tree[id];
    if (R.has_incumbent && bound >= R.objective - tol::objective) {
      node.status = "pruned";
      continue;
    }

    ColgenOptions opts;
    opts.zeta = limits.zeta;
    opts.time_limit_s = limits.time_limit_s - seconds_since(t0);
    ColgenResult cr = ms.solve(opts, &node.forbidden);
    ++R.nodes;
    R.rounds += cr.rounds;
    R.columns += cr.columns_added;
    R.pricing_s += cr.pricing_s;

    if (cr.status == SolveStatus::infeasible) {
      node.status = "infeasible";
      node.bound = kInfD;
      continue;
    }
    // Restriction can only raise the LP value, so the inherited bound stands.
    node.bound = std::max(
        node.bound,
        cr.status == SolveStatus::optimal ? cr.objective : cr.lower_bound);
    if (cr.status == SolveStatus::time_limit) {
      open.emplace(node.bound, node.id);  // still open; counts for the interval
      out_of_budget = true;
      break;
    }
    if (R.has_incumbent && node.bound >= R.objective - tol::objective) {
      node.status = "pruned";
      continue;
    }

    bool integral = true;
    const std::vector<double>& cv = ms.cycle_values();
    for (double v : cv)
      integral = integral &&
                 (v <= tol::integrality || v >= 1.0 - tol::integrality);
    if (integral) {
      node.status = "integral";
      std::vector<CycleColumn> chosen;
      for (size_t i = 0; i < cv.size(); ++i)
        if (cv[i] > 0.5) chosen.push_back(ms.cycle_pool()[i]);
      double value = 0.0;
      for (const CycleColumn& c : chosen) value += c.theta;
      std::map<int, double> z = complete_transfers(d, chosen, &value);
      if (!R.has_incumbent || value < R.objective - tol::objective) {
        R.has_incumbent = true;
        R.objective = value;
        R.cycles = std::move(chosen);
        R.z = std::move(z);
      }
      continue;
    }

    node.status = "fractional";
    if (node.depth >= depth_cap) {
      node.status = "depth_capped";
      continue;
    }
    const int arc = select_branch_arc(ms.vehicle_arc_fractions());
    const int alpha = d.arcs[arc].alpha;

    BranchNode off;  // forbid the arc
    off.id = static_cast<int>(R.tree.size());
    off.parent = node.id;
    off.depth = node.depth + 1;
    off.forbidden = node.forbidden;
    off.forbidden.insert(arc);
    off.forced = node.forced;
    off.bound = node.bound;
    off.status = "open";

    BranchNode on;  // force the arc: forbid every sibling of its group
    on.id = off.id + 1;
    on.parent = node.id;
    on.depth = node.depth + 1;
    on.forbidden = node.forbidden;
    for (int sib : d.arcs_of_activity[alpha])
      if (sib != arc) on.forbidden.insert(sib);
    on.forced = node.forced;
    on.forced.insert(arc);
    on.bound = node.bound;
    on.status = "open";

    R.tree.push_back(off);
    R.tree.push_back(on);
    open.emplace(R.tree[off.id].bound, off.id);
    open.emplace(R.tree[on.id].bound, on.id);
  }

  R.total_s = seconds_since(t0);
  if (out_of_budget) {
    R.status = SolveStatus::time_limit;
    double lb = R.has_incumbent ? R.objective : kInfD;
    while (!open.empty()) {
      lb = std::min(lb, open.top().first);
      open.pop();
    }
    R.lower_bound = lb;
  } else if (R.has_incumbent) {
    R.status = SolveStatus::optimal;
    R.lower_bound = R.objective;
  } else {
    R.status = SolveStatus::infeasible;
    R.objective = 0.0;
    R.lower_bound = 0.0;
  }
  return R;
}

}  // namespace pescg
