#include "pescg/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace pescg {

// ---------------------------------------------------------------------------
// LineNetwork
// ---------------------------------------------------------------------------

int LineNetwork::station_id(const std::string& name) const {
  for (size_t i = 0; i < stations.size(); ++i)
    if (stations[i] == name) return static_cast<int>(i);
  return -1;
}

int LineNetwork::add_station(const std::string& name) {
  int id = station_id(name);
  if (id >= 0) return id;
  stations.push_back(name);
  return static_cast<int>(stations.size()) - 1;
}

// ---------------------------------------------------------------------------
// Enums
// ---------------------------------------------------------------------------

const char* to_string(EventKind k) { return k == EventKind::dep ? "dep" : "arr"; }
const char* to_string(Direction d) { return d == Direction::fwd ? "+" : "-"; }
const char* to_string(ActivityKind k) {
  switch (k) {
    case ActivityKind::driving: return "driving";
    case ActivityKind::waiting: return "waiting";
    case ActivityKind::turnaround: return "turnaround";
    case ActivityKind::transfer: return "transfer";
  }
  return "?";
}

static ActivityKind activity_kind_from(const std::string& s, int lineno) {
  if (s == "driving") return ActivityKind::driving;
  if (s == "waiting") return ActivityKind::waiting;
  if (s == "turnaround") return ActivityKind::turnaround;
  if (s == "transfer") return ActivityKind::transfer;
  throw Error("line " + std::to_string(lineno) + ": unknown activity kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Activity cost
// ---------------------------------------------------------------------------

double Activity::cost(int tau) const {
  if (segments.size() == 1) return segments[0].omega * tau;
  // Cheapest split: every segment at its lower bound, remaining slack to the
  // cheapest segments first (capped at each segment's own window).
  long base_l = 0;
  double c = 0.0;
  for (const Segment& s : segments) {
    base_l += s.l;
    c += s.omega * s.l;
  }
  long slack = tau - base_l;
  if (slack < 0) throw Error("activity cost called with tau below lower bound");
  std::vector<int> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return segments[a].omega < segments[b].omega;
  });
  for (int i : order) {
    if (slack <= 0) break;
    long take = std::min<long>(slack, segments[i].u - segments[i].l);
    c += segments[i].omega * take;
    slack -= take;
  }
  if (slack > 0) throw Error("activity cost called with tau above upper bound");
  return c;
}

double Activity::lower_cost() const {
  double c = 0.0;
  for (const Segment& s : segments) c += s.omega * s.l;
  return c;
}

// ---------------------------------------------------------------------------
// EventActivityNetwork
// ---------------------------------------------------------------------------

std::vector<int> EventActivityNetwork::transfer_activities() const {
  std::vector<int> out;
  for (const Activity& a : activities)
    if (a.kind == ActivityKind::transfer) out.push_back(a.id);
  return out;
}

std::vector<int> EventActivityNetwork::vehicle_activities() const {
  std::vector<int> out;
  for (const Activity& a : activities)
    if (a.kind != ActivityKind::transfer) out.push_back(a.id);
  return out;
}

int EventActivityNetwork::degree(int event) const {
  int d = 0;
  for (const Activity& a : activities)
    if (a.tail == event || a.head == event) ++d;
  return d;
}

int EventActivityNetwork::max_degree_event() const {
  int best = 0, best_deg = -1;
  for (const Event& e : events) {
    int d = degree(e.id);
    if (d > best_deg) {
      best_deg = d;
      best = e.id;
    }
  }
  return best;
}

double EventActivityNetwork::weighted_lower_bound() const {
  double c = 0.0;
  for (const Activity& a : activities) c += a.lower_cost();
  return c;
}

void EventActivityNetwork::validate() const {
  if (T < 1) throw Error("period must be >= 1");
  for (size_t i = 0; i < events.size(); ++i)
    if (events[i].id != static_cast<int>(i)) throw Error("event ids not contiguous");
  std::set<std::tuple<int, int, int, int>> tuples;
  for (const Event& e : events) {
    if (e.station >= 0 && e.line >= 0) {
      auto key = std::make_tuple(e.station, e.line, static_cast<int>(e.kind),
                                 static_cast<int>(e.dir));
      if (!tuples.insert(key).second)
        throw Error("duplicate event tuple at event '" + e.name + "'");
    }
  }
  for (size_t i = 0; i < activities.size(); ++i) {
    const Activity& a = activities[i];
    if (a.id != static_cast<int>(i)) throw Error("activity ids not contiguous");
    if (a.l > a.u)
      throw Error("activity '" + a.name + "': lower bound exceeds upper bound");
    if (a.l < 0) throw Error("activity '" + a.name + "': negative lower bound");
    if (a.segments.empty()) throw Error("activity '" + a.name + "': no segments");
    for (const Segment& s : a.segments)
      if (s.omega < 0)
        throw Error("activity '" + a.name + "': negative weight rejected");
    if (a.tail < 0 || a.tail >= static_cast<int>(events.size()) || a.head < 0 ||
        a.head >= static_cast<int>(events.size()))
      throw Error("activity '" + a.name + "': endpoint out of range");
  }
  // Line cycles must be closed paths over their listed vehicle activities.
  for (size_t L = 0; L < line_cycles.size(); ++L) {
    const auto& cyc = line_cycles[L];
    const auto& acts = line_cycle_acts[L];
    if (cyc.size() != acts.size()) throw Error("line cycle arity mismatch");
    for (size_t i = 0; i < cyc.size(); ++i) {
      const Activity& a = activities[acts[i]];
      if (a.tail != cyc[i] || a.head != cyc[(i + 1) % cyc.size()])
        throw Error("line cycle of line " + std::to_string(L) + " is not closed");
      if (a.kind == ActivityKind::transfer)
        throw Error("line cycle contains a transfer activity");
    }
  }
}

// ---------------------------------------------------------------------------
// BoundTable
// ---------------------------------------------------------------------------

const Bound& BoundTable::lookup(ActivityKind kind, int station_a, int station_b) const {
  auto key = std::make_tuple(kind, std::min(station_a, station_b),
                             std::max(station_a, station_b));
  auto it = overrides.find(key);
  if (it != overrides.end()) return it->second;
  auto dit = defaults.find(kind);
  if (dit == defaults.end())
    throw Error(std::string("missing bound entry for activity kind '") +
                to_string(kind) + "'");
  return dit->second;
}

// ---------------------------------------------------------------------------
// build_ean
// ---------------------------------------------------------------------------

static std::string event_name(const LineNetwork& ln, int station, int line,
                              EventKind k, Direction d) {
  return std::string(to_string(k)) + "_" + ln.stations[station] + "_" +
         ln.line_names[line] + "_" + to_string(d);
}

EventActivityNetwork build_ean(const LineNetwork& ln, const BoundTable& bounds, int T) {
  if (T < 1) throw Error("period must be >= 1");
  EventActivityNetwork ean;
  ean.T = T;
  ean.station_names = ln.stations;
  ean.line_names = ln.line_names;

  // event lookup: (station, line, kind, dir) -> id
  std::map<std::tuple<int, int, int, int>, int> idx;
  auto get = [&](int station, int line, EventKind k, Direction d) -> int {
    auto key = std::make_tuple(station, line, static_cast<int>(k), static_cast<int>(d));
    auto it = idx.find(key);
    return it == idx.end() ? -1 : it->second;
  };
  auto add_event = [&](int station, int line, EventKind k, Direction d) -> int {
    int id = get(station, line, k, d);
    if (id >= 0) return id;
    Event e;
    e.id = static_cast<int>(ean.events.size());
    e.station = station;
    e.line = line;
    e.kind = k;
    e.dir = d;
    e.name = event_name(ln, station, line, k, d);
    ean.events.push_back(e);
    idx[std::make_tuple(station, line, static_cast<int>(k), static_cast<int>(d))] = e.id;
    return e.id;
  };
  auto add_activity = [&](int tail, int head, ActivityKind k, const Bound& b) -> int {
    Activity a;
    a.id = static_cast<int>(ean.activities.size());
    a.tail = tail;
    a.head = head;
    a.kind = k;
    a.l = b.l;
    a.u = b.u;
    a.omega = b.omega;
    a.segments = {Segment{b.omega, b.l, b.u}};
    if (b.omega < 0) throw Error("negative weight rejected");
    if (b.l > b.u) throw Error("bound with lower > upper rejected");
    a.name = std::string(to_string(k)) + "_" + ean.events[tail].name + "_to_" +
             ean.events[head].name;
    ean.activities.push_back(a);
    return a.id;
  };

  for (size_t L = 0; L < ln.lines.size(); ++L) {
    const std::vector<int>& path = ln.lines[L];
    if (path.size() < 2) throw Error("line '" + ln.line_names[L] + "' has < 2 stations");
    int n = static_cast<int>(path.size());
    // Events: per direction, a departure at every stop except the last and an
    // arrival at every stop except the first.
    for (Direction d : {Direction::fwd, Direction::bwd}) {
      for (int i = 0; i + 1 < n; ++i) {
        int from = (d == Direction::fwd) ? path[i] : path[n - 1 - i];
        int to = (d == Direction::fwd) ? path[i + 1] : path[n - 2 - i];
        add_event(from, static_cast<int>(L), EventKind::dep, d);
        add_event(to, static_cast<int>(L), EventKind::arr, d);
      }
    }
    // Driving + waiting + turnarounds, assembled directly in line-cycle order.
    std::vector<int> cyc, acts;
    auto ev = [&](int station, EventKind k, Direction d) {
      int id = get(station, static_cast<int>(L), k, d);
      if (id < 0) throw Error("internal: missing event during line construction");
      return id;
    };
    for (Direction d : {Direction::fwd, Direction::bwd}) {
      for (int i = 0; i + 1 < n; ++i) {
        int from = (d == Direction::fwd) ? path[i] : path[n - 1 - i];
        int to = (d == Direction::fwd) ? path[i + 1] : path[n - 2 - i];
        cyc.push_back(ev(from, EventKind::dep, d));
        acts.push_back(add_activity(ev(from, EventKind::dep, d), ev(to, EventKind::arr, d),
                                    ActivityKind::driving,
                                    bounds.lookup(ActivityKind::driving, from, to)));
        cyc.push_back(ev(to, EventKind::arr, d));
        if (i + 2 < n) {  // interior stop: waiting
          acts.push_back(add_activity(ev(to, EventKind::arr, d), ev(to, EventKind::dep, d),
                                      ActivityKind::waiting,
                                      bounds.lookup(ActivityKind::waiting, to, to)));
        } else {  // end of direction: turnaround into the other direction
          int st = to;
          Direction back = (d == Direction::fwd) ? Direction::bwd : Direction::fwd;
          acts.push_back(add_activity(ev(st, EventKind::arr, d), ev(st, EventKind::dep, back),
                                      ActivityKind::turnaround,
                                      bounds.lookup(ActivityKind::turnaround, st, st)));
        }
      }
    }
    ean.line_cycles.push_back(std::move(cyc));
    ean.line_cycle_acts.push_back(std::move(acts));
  }

  // Transfers: arr(s, L, d1) -> dep(s, L', d2) for L != L', both endpoints present.
  int num_stations = static_cast<int>(ln.stations.size());
  int num_lines = static_cast<int>(ln.lines.size());
  for (int s = 0; s < num_stations; ++s)
    for (int L = 0; L < num_lines; ++L)
      for (int Lp = 0; Lp < num_lines; ++Lp) {
        if (L == Lp) continue;
        for (Direction d1 : {Direction::fwd, Direction::bwd})
          for (Direction d2 : {Direction::fwd, Direction::bwd}) {
            int a = get(s, L, EventKind::arr, d1);
            int b = get(s, Lp, EventKind::dep, d2);
            if (a >= 0 && b >= 0)
              add_activity(a, b, ActivityKind::transfer,
                           bounds.lookup(ActivityKind::transfer, s, s));
          }
      }

  ean.validate();
  return ean;
}

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

static LineNetwork two_station_line() {
  LineNetwork ln;
  ln.add_station("A");
  ln.add_station("B");
  ln.line_names = {"L"};
  ln.lines = {{0, 1}};
  return ln;
}

EventActivityNetwork builtin_instance(const std::string& name, int T) {
  if (name == "single4") {
    if (T <= 0) T = 4;
    BoundTable b;
    b.defaults[ActivityKind::driving] = {1, 1, 1.0};
    b.defaults[ActivityKind::turnaround] = {2, 3, 1.0};
    return build_ean(two_station_line(), b, T);
  }
  if (name == "single3") {
    if (T <= 0) T = 3;
    BoundTable b;
    b.defaults[ActivityKind::driving] = {1, 1, 1.0};
    b.defaults[ActivityKind::turnaround] = {1, 2, 1.0};
    return build_ean(two_station_line(), b, T);
  }
  if (name == "2linecross") {
    if (T <= 0) T = 5;
    LineNetwork ln;
    for (const char* s : {"1", "2", "3", "4", "5"}) ln.add_station(s);
    ln.line_names = {"L1", "L2"};
    ln.lines = {{0, 1, 2}, {3, 1, 4}};
    BoundTable b;
    b.defaults[ActivityKind::driving] = {1, 1, 1.0};
    b.defaults[ActivityKind::waiting] = {0, 1, 1.0};
    b.defaults[ActivityKind::turnaround] = {2, 3, 1.0};
    b.defaults[ActivityKind::transfer] = {0, 1, 1.0};
    return build_ean(ln, b, T);
  }
  if (name == "3berlin") {
    if (T <= 0) T = 5;
    LineNetwork ln;
    int RS = ln.add_station("RathausSteglitz");
    int SP = ln.add_station("Spichernstr");
    int LP = ln.add_station("Leopoldplatz");
    int OS = ln.add_station("OsloerStr");
    int AT = ln.add_station("AltTegel");
    int HT = ln.add_station("HalleschesTor");
    int AM = ln.add_station("AltMariendorf");
    int KL = ln.add_station("KrummeLanke");
    int WS = ln.add_station("WarschauerStr");
    ln.line_names = {"orange", "violet", "green"};
    ln.lines = {{RS, SP, LP, OS}, {AT, LP, HT, AM}, {KL, SP, HT, WS}};
    BoundTable b;
    b.defaults[ActivityKind::waiting] = {0, T - 1, 1.0};
    b.defaults[ActivityKind::turnaround] = {2, T + 1, 1.0};
    b.defaults[ActivityKind::transfer] = {0, T - 1, 1.0};
    auto drive = [&](int a, int c, int t) {
      b.overrides[{ActivityKind::driving, std::min(a, c), std::max(a, c)}] =
          Bound{t, t, 1.0};
    };
    drive(RS, SP, 9); drive(SP, LP, 11); drive(LP, OS, 2);
    drive(AT, LP, 13); drive(LP, HT, 12); drive(HT, AM, 13);
    drive(KL, SP, 19); drive(SP, HT, 12); drive(HT, WS, 9);
    return build_ean(ln, b, T);
  }
  throw Error("unknown builtin instance '" + name + "'");
}

void make_transfers_free(EventActivityNetwork& ean) {
  for (Activity& a : ean.activities)
    if (a.kind == ActivityKind::transfer) {
      a.u = a.l + ean.T - 1;
      a.segments = {Segment{a.omega, a.l, a.u}};
    }
}

// ---------------------------------------------------------------------------
// OD matrices
// ---------------------------------------------------------------------------

ODMatrix builtin_od(const EventActivityNetwork& ean, const std::string& name) {
  // Fixed-seed demands over all ordered station pairs; the committed data
  // files were produced by exactly this generator (seed 20240517).
  (void)name;
  Rng rng(20240517);
  ODMatrix od;
  int n = static_cast<int>(ean.station_names.size());
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      if (s == t) continue;
      od.entries.push_back({s, t, static_cast<long>(1 + rng.below(10))});
    }
  return od;
}

ODMatrix parse_od(const std::string& text, const EventActivityNetwork& ean) {
  ODMatrix od;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<std::pair<int, int>> seen;
  auto station = [&](const std::string& nm) {
    for (size_t i = 0; i < ean.station_names.size(); ++i)
      if (ean.station_names[i] == nm) return static_cast<int>(i);
    throw Error("line " + std::to_string(lineno) + ": unknown station '" + nm + "'");
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string s, t, d;
    if (!std::getline(row, s, ';') || !std::getline(row, t, ';') || !std::getline(row, d))
      throw Error("line " + std::to_string(lineno) + ": expected 's;t;d'");
    ODEntry e;
    e.s = station(s);
    e.t = station(t);
    e.demand = std::stol(d);
    if (e.demand <= 0)
      throw Error("line " + std::to_string(lineno) + ": demand must be positive");
    if (!seen.insert({e.s, e.t}).second)
      throw Error("line " + std::to_string(lineno) + ": duplicate OD pair");
    od.entries.push_back(e);
  }
  return od;
}

std::string serialize_od(const ODMatrix& od, const EventActivityNetwork& ean) {
  std::ostringstream out;
  for (const ODEntry& e : od.entries)
    out << ean.station_names[e.s] << ';' << ean.station_names[e.t] << ';' << e.demand
        << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_semi(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ';') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

EventActivityNetwork parse_instance(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  int T = -1;
  LineNetwork ln;
  BoundTable bounds;
  bool have_line_stmt = false;

  // EAN-table state
  enum class Section { none, events, activities };
  Section section = Section::none;
  bool table_mode = false;
  EventActivityNetwork tbl;
  std::map<std::string, int> ev_by_name;
  std::map<std::string, int> line_by_name;
  std::vector<std::pair<std::string, std::vector<std::string>>> cycle_stmts;

  auto err = [&](const std::string& msg) -> Error {
    return Error("line " + std::to_string(lineno) + ": " + msg);
  };
  auto get_line_id = [&](const std::string& nm) {
    auto it = line_by_name.find(nm);
    if (it != line_by_name.end()) return it->second;
    int id = static_cast<int>(tbl.line_names.size());
    tbl.line_names.push_back(nm);
    line_by_name[nm] = id;
    return id;
  };
  auto get_event = [&](const std::string& nm) {
    auto it = ev_by_name.find(nm);
    if (it != ev_by_name.end()) return it->second;
    Event e;
    e.id = static_cast<int>(tbl.events.size());
    e.name = nm;
    tbl.events.push_back(e);
    ev_by_name[nm] = e.id;
    return e.id;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string s = raw;
    if (auto pos = s.find('#'); pos != std::string::npos) s = s.substr(0, pos);
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
      s.pop_back();
    if (s.empty()) continue;

    if (s == "events") {
      section = Section::events;
      table_mode = true;
      continue;
    }
    if (s == "activities") {
      section = Section::activities;
      table_mode = true;
      continue;
    }

    std::vector<std::string> tok = split_ws(s);
    const std::string& kw = tok[0];
    if (kw == "period") {
      if (tok.size() != 2) throw err("expected 'period <T>'");
      T = std::stoi(tok[1]);
      continue;
    }
    if (kw == "station") {
      if (tok.size() != 2) throw err("expected 'station <id>'");
      ln.add_station(tok[1]);
      if (table_mode || section != Section::none) throw err("station after table section");
      continue;
    }
    if (kw == "line") {
      if (tok.size() < 3) throw err("expected 'line <id> <stations...>'");
      ln.line_names.push_back(tok[1]);
      std::vector<int> path;
      for (size_t i = 2; i < tok.size(); ++i) {
        int sid = ln.station_id(tok[i]);
        if (sid < 0) throw err("unknown station '" + tok[i] + "'");
        path.push_back(sid);
      }
      ln.lines.push_back(path);
      have_line_stmt = true;
      continue;
    }
    if (kw == "bound" || kw == "override") {
      bool ov = (kw == "override");
      size_t need = ov ? 6 : 4;
      if (tok.size() < need || tok.size() > need + 1)
        throw err("malformed '" + kw + "' statement");
      ActivityKind kind = activity_kind_from(tok[1], lineno);
      size_t at = 2;
      int sa = -1, sb = -1;
      if (ov) {
        sa = ln.station_id(tok[2]);
        if (sa < 0) throw err("unknown station '" + tok[2] + "'");
        sb = (tok[3] == ".") ? sa : ln.station_id(tok[3]);
        if (sb < 0) throw err("unknown station '" + tok[3] + "'");
        at = 4;
      }
      Bound b;
      b.l = std::stoi(tok[at]);
      b.u = std::stoi(tok[at + 1]);
      b.omega = (tok.size() == need + 1) ? std::stod(tok[at + 2]) : 1.0;
      if (b.l > b.u) throw err("bound with lower > upper");
      if (b.omega < 0) throw err("negative weight rejected");
      if (ov)
        bounds.overrides[{kind, std::min(sa, sb), std::max(sa, sb)}] = b;
      else
        bounds.defaults[kind] = b;
      continue;
    }
    if (kw == "cycle") {
      if (tok.size() < 4) throw err("expected 'cycle <line> <events...>'");
      cycle_stmts.emplace_back(tok[1], std::vector<std::string>(tok.begin() + 2, tok.end()));
      continue;
    }

    if (section == Section::events) {
      // id;name;station;line;kind;dir    (station may be ".")
      std::vector<std::string> f = split_semi(s);
      if (f.size() != 6) throw err("event row needs 6 ';'-separated fields");
      Event e;
      e.id = static_cast<int>(tbl.events.size());
      e.name = f[1];
      if (ev_by_name.count(e.name)) throw err("duplicate event '" + e.name + "'");
      if (f[2] != ".") {
        int sid = -1;
        for (size_t i = 0; i < tbl.station_names.size(); ++i)
          if (tbl.station_names[i] == f[2]) sid = static_cast<int>(i);
        if (sid < 0) {
          sid = static_cast<int>(tbl.station_names.size());
          tbl.station_names.push_back(f[2]);
        }
        e.station = sid;
      }
      if (f[3] != ".") e.line = get_line_id(f[3]);
      if (f[4] == "dep") e.kind = EventKind::dep;
      else if (f[4] == "arr") e.kind = EventKind::arr;
      else throw err("unknown event kind '" + f[4] + "'");
      if (f[5] == "+") e.dir = Direction::fwd;
      else if (f[5] == "-") e.dir = Direction::bwd;
      else throw err("unknown direction '" + f[5] + "'");
      tbl.events.push_back(e);
      ev_by_name[e.name] = e.id;
      continue;
    }
    if (section == Section::activities || (table_mode == false && s.find(';') != std::string::npos)) {
      // id;kind;tail;head;l;u;omega[;segments]
      table_mode = true;
      std::vector<std::string> f = split_semi(s);
      if (f.size() != 7 && f.size() != 8)
        throw err("activity row needs 7 ';'-separated fields");
      Activity a;
      a.id = static_cast<int>(tbl.activities.size());
      a.name = f[0];
      a.kind = activity_kind_from(f[1], lineno);
      a.tail = get_event(f[2]);
      a.head = get_event(f[3]);
      a.l = std::stoi(f[4]);
      a.u = std::stoi(f[5]);
      a.omega = std::stod(f[6]);
      if (a.l > a.u) throw err("bound-order error: lower > upper");
      if (a.omega < 0) throw err("negative weight rejected");
      a.segments = {Segment{a.omega, a.l, a.u}};
      if (f.size() == 8 && !f[7].empty()) {
        a.segments.clear();
        std::istringstream segs(f[7]);
        std::string part;
        while (std::getline(segs, part, '|')) {
          Segment seg;
          if (sscanf(part.c_str(), "%lf,%d,%d", &seg.omega, &seg.l, &seg.u) != 3)
            throw err("malformed segment spec '" + part + "'");
          a.segments.push_back(seg);
        }
        if (a.segments.empty()) throw err("empty segment spec");
      }
      tbl.activities.push_back(a);
      continue;
    }
    throw err("syntax error near '" + kw + "'");
  }

  if (T < 1) throw Error("missing or invalid 'period' statement");

  if (have_line_stmt && !table_mode) {
    return build_ean(ln, bounds, T);
  }
  if (!table_mode) throw Error("instance defines neither lines nor an EAN table");

  tbl.T = T;
  // Line cycles: explicit `cycle` statements win; otherwise derive by
  // following vehicle activities within each line where possible.
  if (!cycle_stmts.empty()) {
    tbl.line_cycles.assign(tbl.line_names.size(), {});
    tbl.line_cycle_acts.assign(tbl.line_names.size(), {});
    for (auto& [lname, evs] : cycle_stmts) {
      auto lit = line_by_name.find(lname);
      if (lit == line_by_name.end()) throw Error("cycle for unknown line '" + lname + "'");
      std::vector<int>& cyc = tbl.line_cycles[lit->second];
      for (const std::string& nm : evs) {
        auto eit = ev_by_name.find(nm);
        if (eit == ev_by_name.end()) throw Error("cycle names unknown event '" + nm + "'");
        cyc.push_back(eit->second);
      }
      std::vector<int>& acts = tbl.line_cycle_acts[lit->second];
      for (size_t i = 0; i < cyc.size(); ++i) {
        int from = cyc[i], to = cyc[(i + 1) % cyc.size()];
        int found = -1;
        for (const Activity& a : tbl.activities)
          if (a.tail == from && a.head == to && a.kind != ActivityKind::transfer)
            found = a.id;
        if (found < 0) throw Error("cycle of line '" + lname + "' is not closed");
        acts.push_back(found);
      }
    }
  } else if (!tbl.line_names.empty()) {
    // Derivation: per line, each event must have exactly one outgoing vehicle
    // activity within the line; follow it until the walk closes.
    tbl.line_cycles.assign(tbl.line_names.size(), {});
    tbl.line_cycle_acts.assign(tbl.line_names.size(), {});
    for (size_t L = 0; L < tbl.line_names.size(); ++L) {
      std::vector<int> members;
      for (const Event& e : tbl.events)
        if (e.line == static_cast<int>(L)) members.push_back(e.id);
      if (members.empty()) continue;
      std::map<int, int> next_act;
      bool ok = true;
      for (int ev : members) {
        int cnt = 0, act = -1;
        for (const Activity& a : tbl.activities)
          if (a.tail == ev && a.kind != ActivityKind::transfer &&
              tbl.events[a.head].line == static_cast<int>(L)) {
            ++cnt;
            act = a.id;
          }
        if (cnt != 1) { ok = false; break; }
        next_act[ev] = act;
      }
      if (!ok) continue;  // not a full line structure; leave the cycle empty
      int start = members.front(), cur = start;
      std::vector<int>& cyc = tbl.line_cycles[L];
      std::vector<int>& acts = tbl.line_cycle_acts[L];
      do {
        cyc.push_back(cur);
        int a = next_act[cur];
        acts.push_back(a);
        cur = tbl.activities[a].head;
      } while (cur != start && cyc.size() <= members.size());
      if (cur != start || cyc.size() != members.size()) {
        cyc.clear();
        acts.clear();
      }
    }
  }
  tbl.validate();
  return tbl;
}

std::string serialize_instance(const EventActivityNetwork& ean) {
  std::ostringstream out;
  out << "period " << ean.T << '\n';
  out << "events\n";
  for (const Event& e : ean.events)
    out << e.id << ';' << e.name << ';'
        << (e.station >= 0 ? ean.station_names[e.station] : ".") << ';'
        << (e.line >= 0 ? ean.line_names[e.line] : ".") << ';' << to_string(e.kind)
        << ';' << to_string(e.dir) << '\n';
  out << "activities\n";
  for (const Activity& a : ean.activities) {
    out << a.id << ';' << to_string(a.kind) << ';' << ean.events[a.tail].name << ';'
        << ean.events[a.head].name << ';' << a.l << ';' << a.u << ';' << a.omega;
    if (a.segments.size() > 1) {
      out << ';';
      for (size_t i = 0; i < a.segments.size(); ++i) {
        if (i) out << '|';
        out << a.segments[i].omega << ',' << a.segments[i].l << ',' << a.segments[i].u;
      }
    }
    out << '\n';
  }
  for (size_t L = 0; L < ean.line_cycles.size(); ++L) {
    if (ean.line_cycles[L].empty()) continue;
    out << "cycle " << ean.line_names[L];
    for (int ev : ean.line_cycles[L]) out << ' ' << ean.events[ev].name;
    out << '\n';
  }
  return out.str();
}

InstanceStats instance_stats(const EventActivityNetwork& ean) {
  InstanceStats st;
  st.num_events = static_cast<int>(ean.events.size());
  st.num_activities = static_cast<int>(ean.activities.size());
  st.num_lines = ean.num_lines();
  st.T = ean.T;
  for (const auto& cyc : ean.line_cycles)
    st.max_cycle_nodes = std::max(st.max_cycle_nodes, static_cast<int>(cyc.size()));
  return st;
}

}  // namespace pescg
