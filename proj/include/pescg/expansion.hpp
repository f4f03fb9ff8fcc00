#pragma once

#include <string>
#include <vector>

#include "pescg/instance.hpp"

namespace pescg {

enum class Variant { standard, waiting };  // transfer modeling of the expansion

enum class ArcClass { vehicle, transfer, waiting };

struct ExpandedArc {
  int id = -1;
  int tail = -1;      // node index = event * T + t
  int head = -1;
  int alpha = -1;     // origin activity id
  int tau = 0;        // fixed duration
  double cost = 0.0;  // activity cost of tau (omega * tau for plain activities)
  ArcClass cls = ArcClass::vehicle;
};

/// Time expansion D of an event-activity network.  Nodes are (event, t)
/// pairs addressed as event * T + t; when an event is fixed to time 0, its
/// copies with t >= 1 simply have no incident arcs and do not count as nodes.
struct ExpandedNetwork {
  EventActivityNetwork ean;  // owned copy; contraction must run before expand
  int T = 0;
  Variant variant = Variant::standard;
  int fixed_event = -1;  // -1: none

  std::vector<ExpandedArc> arcs;
  std::vector<std::vector<int>> arcs_of_activity;  // activity id -> arc ids
  // Waiting-arc variant only: per transfer activity, the T waiting arcs at the
  // head event, indexed by their tail time t (arc (w[t], w[t+1 mod T])).
  std::vector<std::vector<int>> waiting_arcs_of_activity;

  int node(int event, int t) const { return event * T + t; }
  int node_event(int v) const { return v / T; }
  int node_time(int v) const { return v % T; }
  bool node_exists(int event, int t) const {
    return t >= 0 && t < T && (event != fixed_event || t == 0);
  }
  /// Times available for an event ({0} when fixed, [T] otherwise).
  int times_of(int event) const { return event == fixed_event ? 1 : T; }

  long num_nodes() const;  // |V(D)| counting only existing copies

  /// Arc count predicted by the span formula: T * sum over activities of
  /// min(u - l + 1, T), adjusted for a fixed event.
  long predicted_arc_count_unfixed() const;

  std::vector<int> vehicle_arcs() const;

  /// Diagnostic TSV: arc_id;alpha;t;t';tau;omega;kind
  std::string dump_tsv() const;
};

struct ExpandOptions {
  Variant variant = Variant::standard;
  int fixed_event = -1;  // -1: none; -2: auto (max degree, smallest id)
};

/// Build the time expansion: per activity alpha all arcs (v[t], w[t']) with
/// (t' - t - l) mod T <= u - l, duration tau = (t' - t - l) mod T + l.
ExpandedNetwork expand(const EventActivityNetwork& ean, ExpandOptions opts = {});

/// Waiting-arc variant: vehicle arcs as in expand; per transfer (v, w) only
/// the T arcs (v[t], w[(t + l) mod T]) plus T waiting arcs
/// (w[t], w[(t+1) mod T]) with duration 1 and the transfer's weight.
ExpandedNetwork expand_waiting_variant(const EventActivityNetwork& ean,
                                       int fixed_event = -1);

/// Re-expand with event v pinned to time 0 (v = -2 picks the max-degree
/// event, ties by smallest id).
ExpandedNetwork fix_event(const ExpandedNetwork& d, int v);

/// Degree-2 contraction of the event-activity network.  An event is merged
/// away iff its only two incident activities are vehicle activities of the
/// same line and the line cycle keeps at least 4 events.  The returned map
/// gives, per merged activity, the chain of original activity ids.
struct ContractionMap {
  std::vector<int> event_of_original;        // original event id -> new id or -1
  std::vector<std::vector<int>> chains;      // new activity id -> original activity ids
};

EventActivityNetwork contract_degree2(const EventActivityNetwork& ean,
                                      ContractionMap* map = nullptr);

}  // namespace pescg
