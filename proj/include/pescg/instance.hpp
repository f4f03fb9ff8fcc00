#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pescg/util.hpp"

namespace pescg {

// ---------------------------------------------------------------------------
// Line networks
// ---------------------------------------------------------------------------

/// A line network: stations, undirected edges, and lines (simple station
/// paths).  Line frequency is implicitly 1.
struct LineNetwork {
  std::vector<std::string> stations;           // index = station id
  std::vector<std::string> line_names;         // index = line id
  std::vector<std::vector<int>> lines;         // per line: station ids along the path

  int station_id(const std::string& name) const;
  int add_station(const std::string& name);    // idempotent
};

// ---------------------------------------------------------------------------
// Event-activity networks
// ---------------------------------------------------------------------------

enum class EventKind { dep, arr };
enum class Direction { fwd, bwd };  // the two driving directions of a line
enum class ActivityKind { driving, waiting, turnaround, transfer };

const char* to_string(EventKind k);
const char* to_string(Direction d);
const char* to_string(ActivityKind k);

struct Event {
  int id = -1;
  int station = -1;  // -1 for events parsed from a raw EAN table without stations
  int line = -1;
  EventKind kind = EventKind::dep;
  Direction dir = Direction::fwd;
  std::string name;  // unique; derived from the 4-tuple or taken from the file
};

/// One piece of a (possibly merged) activity.  Plain activities have a single
/// segment.  Degree-2 contraction concatenates segments; the cost of a total
/// duration tau is then the cheapest split of tau among the segments, which
/// is exactly what the time expansion linearizes.
struct Segment {
  double omega = 1.0;
  int l = 0;
  int u = 0;
};

struct Activity {
  int id = -1;
  int tail = -1;  // event id
  int head = -1;  // event id
  ActivityKind kind = ActivityKind::driving;
  int l = 0;      // aggregate lower bound (= sum of segment lower bounds)
  int u = 0;      // aggregate upper bound
  double omega = 1.0;  // aggregate weight (sum of segment weights; reporting only)
  std::vector<Segment> segments;  // nonempty; singleton unless merged
  std::string name;

  /// True iff the bound window covers a full period: u - l >= T - 1.
  bool is_free(int T) const { return u - l >= T - 1; }

  /// Cost of realizing total duration tau (l <= tau <= u required):
  /// each segment takes its lower bound, remaining slack goes to the
  /// cheapest segments first.  Equals omega * tau for single segments.
  double cost(int tau) const;

  /// Sum of omega_i * l_i over segments (the activity's weighted lower bound).
  double lower_cost() const;
};

/// Event-activity network N with period T and per-line line-cycle orderings.
struct EventActivityNetwork {
  int T = 0;
  std::vector<Event> events;
  std::vector<Activity> activities;
  std::vector<std::string> station_names;  // may be empty for raw EAN tables
  std::vector<std::string> line_names;

  /// Per line: event ids in closed-path order (forward direction, turnaround,
  /// backward direction, turnaround).  Consecutive entries (cyclically) are
  /// joined by exactly one vehicle activity, listed in line_cycle_acts.
  std::vector<std::vector<int>> line_cycles;
  std::vector<std::vector<int>> line_cycle_acts;

  int num_lines() const { return static_cast<int>(line_cycles.size()); }
  bool is_vehicle(const Activity& a) const { return a.kind != ActivityKind::transfer; }

  std::vector<int> transfer_activities() const;
  std::vector<int> vehicle_activities() const;

  /// Total degree (in + out) of an event in N.
  int degree(int event) const;

  /// Event of maximum degree, ties broken by smallest id (the fixing rule).
  int max_degree_event() const;

  /// Line of an event (every event belongs to exactly one line).
  int line_of_event(int event) const { return events[event].line; }

  /// Sum over all activities of the weighted lower bound (objective offset
  /// between tension and slack reporting).
  double weighted_lower_bound() const;

  /// Internal consistency (line cycles closed, ids contiguous, l <= u).
  void validate() const;
};

// ---------------------------------------------------------------------------
// Bound tables & construction
// ---------------------------------------------------------------------------

struct Bound {
  int l = 0;
  int u = 0;
  double omega = 1.0;
};

/// Per-kind default bounds with optional per-station-pair overrides.
/// Driving overrides are keyed by the unordered station pair; waiting /
/// turnaround / transfer overrides by (station, station) with equal entries
/// (the file syntax uses "." for the second station).
struct BoundTable {
  std::map<ActivityKind, Bound> defaults;
  std::map<std::tuple<ActivityKind, int, int>, Bound> overrides;

  const Bound& lookup(ActivityKind kind, int station_a, int station_b) const;
};

/// Build the event-activity network from a line network: dep/arr events per
/// line edge and direction; driving, waiting, turnaround activities per line;
/// transfer activities arr(L) -> dep(L') for every station shared by two
/// distinct lines and every direction pair where both endpoints exist.
EventActivityNetwork build_ean(const LineNetwork& ln, const BoundTable& bounds, int T);

/// The bundled instances.  T <= 0 picks the instance default
/// (single4: 4, single3: 3, 2linecross: 5, 3berlin: 5).
EventActivityNetwork builtin_instance(const std::string& name, int T = 0);

/// Widen every transfer activity to a free window [l, l + T - 1].
void make_transfers_free(EventActivityNetwork& ean);

// ---------------------------------------------------------------------------
// OD matrices
// ---------------------------------------------------------------------------

struct ODEntry {
  int s = -1;  // station id
  int t = -1;
  long demand = 0;  // > 0
};

struct ODMatrix {
  std::vector<ODEntry> entries;
};

/// Deterministic bundled OD matrix for a builtin (all ordered station pairs,
/// demands from a fixed-seed generator; matches the committed data/ files).
ODMatrix builtin_od(const EventActivityNetwork& ean, const std::string& name);

ODMatrix parse_od(const std::string& text, const EventActivityNetwork& ean);
std::string serialize_od(const ODMatrix& od, const EventActivityNetwork& ean);

// ---------------------------------------------------------------------------
// Parsing & serialization
// ---------------------------------------------------------------------------

/// Parse the line-oriented instance format (period/station/line/bound/override
/// statements) or the direct EAN-table form (events/activities sections).
EventActivityNetwork parse_instance(const std::string& text);

/// Serialize to the EAN-table form; parse_instance round-trips it.
std::string serialize_instance(const EventActivityNetwork& ean);

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct InstanceStats {
  int num_events = 0;
  int num_activities = 0;
  int num_lines = 0;
  int T = 0;
  int max_cycle_nodes = 0;  // k, the longest line cycle
};

InstanceStats instance_stats(const EventActivityNetwork& ean);

}  // namespace pescg
