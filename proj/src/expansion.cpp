#include "pescg/expansion.hpp"

#include <algorithm>
#include <sstream>

namespace pescg {

long ExpandedNetwork::num_nodes() const {
  long n = static_cast<long>(ean.events.size()) * T;
  if (fixed_event >= 0) n -= (T - 1);
  return n;
}

long ExpandedNetwork::predicted_arc_count_unfixed() const {
  long total = 0;
  for (const Activity& a : ean.activities) {
    long span = std::min<long>(static_cast<long>(a.u) - a.l + 1, T);
    total += span * T;
  }
  return total;
}

std::vector<int> ExpandedNetwork::vehicle_arcs() const {
  std::vector<int> out;
  for (const ExpandedArc& a : arcs)
    if (a.cls == ArcClass::vehicle) out.push_back(a.id);
  return out;
}

std::string ExpandedNetwork::dump_tsv() const {
  std::ostringstream out;
  out << "arc_id;alpha;t;t';tau;omega;kind\n";
  for (const ExpandedArc& a : arcs) {
    const char* kind = a.cls == ArcClass::vehicle    ? "vehicle"
                       : a.cls == ArcClass::transfer ? "transfer"
                                                     : "waiting";
    out << a.id << ';' << a.alpha << ';' << node_time(a.tail) << ';'
        << node_time(a.head) << ';' << a.tau << ';' << ean.activities[a.alpha].omega
        << ';' << kind << '\n';
  }
  return out.str();
}

static int resolve_fixed_event(const EventActivityNetwork& ean, int v) {
  if (v == -2) return ean.max_degree_event();
  if (v >= static_cast<int>(ean.events.size()))
    throw Error("fixed event " + std::to_string(v) + " not found");
  return v;
}

ExpandedNetwork expand(const EventActivityNetwork& ean, ExpandOptions opts) {
  if (ean.T < 2 && ean.T != 1) throw Error("period must be >= 2");
  ExpandedNetwork d;
  d.ean = ean;
  d.T = ean.T;
  d.variant = opts.variant;
  d.fixed_event = resolve_fixed_event(ean, opts.fixed_event);
  const int T = d.T;

  d.arcs_of_activity.assign(ean.activities.size(), {});
  d.waiting_arcs_of_activity.assign(ean.activities.size(), {});

  auto add_arc = [&](int tail, int head, int alpha, int tau, double cost, ArcClass cls) {
    ExpandedArc a;
    a.id = static_cast<int>(d.arcs.size());
    a.tail = tail;
    a.head = head;
    a.alpha = alpha;
    a.tau = tau;
    a.cost = cost;
    a.cls = cls;
    d.arcs.push_back(a);
    return a.id;
  };

  for (const Activity& act : ean.activities) {
    const bool vehicle = ean.is_vehicle(act);
    if (!vehicle && opts.variant == Variant::waiting) {
      // Waiting-arc variant: T transfer arcs at the lower bound plus T unit
      // waiting arcs at the head event.  Head copies with t >= 1 stay usable
      // as pure routing nodes even when the head event is time-fixed; only
      // the tail times are restricted (they must meet a cycle node).
      int v = act.tail, w = act.head;
      for (int t = 0; t < d.times_of(v); ++t) {
        int t2 = static_cast<int>(mod(t + act.l, T));
        int id = add_arc(d.node(v, t), d.node(w, t2), act.id, act.l, act.cost(act.l),
                         ArcClass::transfer);
        d.arcs_of_activity[act.id].push_back(id);
      }
      for (int t = 0; t < T; ++t) {
        int id = add_arc(d.node(w, t), d.node(w, static_cast<int>(mod(t + 1, T))),
                         act.id, 1, act.omega, ArcClass::waiting);
        d.waiting_arcs_of_activity[act.id].push_back(id);
      }
      continue;
    }
    for (int t = 0; t < d.times_of(act.tail); ++t)
      for (int t2 = 0; t2 < d.times_of(act.head); ++t2) {
        long r = mod(static_cast<long>(t2) - t - act.l, T);
        if (r > static_cast<long>(act.u) - act.l) continue;
        int tau = static_cast<int>(r + act.l);
        int id = add_arc(d.node(act.tail, t), d.node(act.head, t2), act.id, tau,
                         act.cost(tau), vehicle ? ArcClass::vehicle : ArcClass::transfer);
        d.arcs_of_activity[act.id].push_back(id);
      }
  }
  return d;
}

ExpandedNetwork expand_waiting_variant(const EventActivityNetwork& ean, int fixed_event) {
  ExpandOptions opts;
  opts.variant = Variant::waiting;
  opts.fixed_event = fixed_event;
  return expand(ean, opts);
}

ExpandedNetwork fix_event(const ExpandedNetwork& d, int v) {
  ExpandOptions opts;
  opts.variant = d.variant;
  opts.fixed_event = resolve_fixed_event(d.ean, v);
  return expand(d.ean, opts);
}

EventActivityNetwork contract_degree2(const EventActivityNetwork& ean,
                                      ContractionMap* map) {
  // Work line by line on the line-cycle orderings; only events whose entire
  // incident activity set is the two adjacent cycle activities are merged.
  int ne = static_cast<int>(ean.events.size());
  int na = static_cast<int>(ean.activities.size());

  std::vector<int> deg(ne, 0);
  for (const Activity& a : ean.activities) {
    deg[a.tail]++;
    deg[a.head]++;
  }

  struct Slot {
    int event;
    Activity act;               // activity leaving this event along the cycle
    std::vector<int> chain;     // original activity ids merged into act
  };
  std::vector<std::vector<Slot>> lines(ean.line_cycles.size());
  std::vector<bool> removed(ne, false);

  for (size_t L = 0; L < ean.line_cycles.size(); ++L) {
    auto& slots = lines[L];
    for (size_t i = 0; i < ean.line_cycles[L].size(); ++i) {
      Slot s;
      s.event = ean.line_cycles[L][i];
      s.act = ean.activities[ean.line_cycle_acts[L][i]];
      s.chain = {s.act.id};
      slots.push_back(std::move(s));
    }
    bool changed = true;
    while (changed && slots.size() >= 5) {
      changed = false;
      for (size_t i = 0; i < slots.size(); ++i) {
        int e = slots[i].event;
        if (deg[e] != 2) continue;  // transfers or other structure attach here
        // Merge the activity entering e (previous slot) with the one leaving.
        size_t prev = (i + slots.size() - 1) % slots.size();
        Activity& in = lines[L][prev].act;
        const Activity& out = slots[i].act;
        in.head = out.head;
        in.u += out.u;
        in.l += out.l;
        in.omega += out.omega;
        in.segments.insert(in.segments.end(), out.segments.begin(), out.segments.end());
        in.name += "+" + out.name;
        for (int c : slots[i].chain) lines[L][prev].chain.push_back(c);
        removed[e] = true;
        slots.erase(slots.begin() + i);
        changed = true;
        break;
      }
    }
  }

  EventActivityNetwork out;
  out.T = ean.T;
  out.station_names = ean.station_names;
  out.line_names = ean.line_names;
  std::vector<int> new_event_id(ne, -1);
  for (const Event& e : ean.events) {
    if (removed[e.id]) continue;
    Event ne2 = e;
    ne2.id = static_cast<int>(out.events.size());
    new_event_id[e.id] = ne2.id;
    out.events.push_back(ne2);
  }
  std::vector<std::vector<int>> chains;
  std::vector<bool> in_cycle(na, false);
  for (const auto& acts : ean.line_cycle_acts)
    for (int a : acts) in_cycle[a] = true;

  out.line_cycles.assign(ean.line_cycles.size(), {});
  out.line_cycle_acts.assign(ean.line_cycles.size(), {});
  for (size_t L = 0; L < lines.size(); ++L) {
    for (const Slot& s : lines[L]) {
      Activity a = s.act;
      a.id = static_cast<int>(out.activities.size());
      a.tail = new_event_id[a.tail];
      a.head = new_event_id[a.head];
      out.activities.push_back(a);
      chains.push_back(s.chain);
      out.line_cycles[L].push_back(new_event_id[s.event]);
      out.line_cycle_acts[L].push_back(a.id);
    }
  }
  // Everything outside line cycles (transfers and free-standing activities)
  // passes through unchanged.
  for (const Activity& a : ean.activities) {
    if (in_cycle[a.id]) continue;
    Activity na2 = a;
    na2.id = static_cast<int>(out.activities.size());
    na2.tail = new_event_id[a.tail];
    na2.head = new_event_id[a.head];
    if (na2.tail < 0 || na2.head < 0)
      throw Error("internal: contracted an event with non-cycle activities");
    out.activities.push_back(na2);
    chains.push_back({a.id});
  }
  out.validate();
  if (map) {
    map->event_of_original = new_event_id;
    map->chains = std::move(chains);
  }
  return out;
}

}  // namespace pescg
