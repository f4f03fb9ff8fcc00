// Python bindings for the timetabling solver suite: instances, expansions,
// the exact oracles, column generation, and branch-and-price.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pescg/branch.hpp"
#include "pescg/master.hpp"
#include "pescg/polyhedra.hpp"
#include "pescg/reference.hpp"
#include "pescg/routing.hpp"

namespace py = pybind11;
using namespace pescg;

namespace {

WeightMode weight_mode(const std::string& s) {
  if (s == "tension") return WeightMode::tension;
  if (s == "slack") return WeightMode::slack;
  throw Error("objective must be 'tension' or 'slack'");
}

MasterModel master_model(const std::string& s) {
  if (s == "cxpesp") return MasterModel::cxpesp;
  if (s == "cxpespw") return MasterModel::cxpespw;
  if (s == "cxttp") return MasterModel::cxttp;
  throw Error("model must be 'cxpesp', 'cxpespw', or 'cxttp'");
}

py::dict solve_dict(const SolveResult& r) {
  py::dict d;
  d["status"] = std::string(to_string(r.status));
  if (r.status == SolveStatus::optimal) d["objective"] = r.objective;
  d["nodes"] = r.nodes;
  d["time_ms"] = r.time_ms;
  return d;
}

py::dict colgen_dict(const ColgenResult& r) {
  py::dict d;
  d["status"] = std::string(to_string(r.status));
  if (r.status != SolveStatus::infeasible) {
    d["objective"] = r.objective;
    d["lower_bound"] = r.lower_bound;
  }
  d["rounds"] = r.rounds;
  d["columns_added"] = r.columns_added;
  d["mispricings"] = r.mispricings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pescg, m) {
  m.doc() = "Periodic timetabling solvers on time-expanded networks";

  py::register_exception<Error>(m, "SolverError");

  py::class_<EventActivityNetwork>(m, "EventActivityNetwork")
      .def_readonly("T", &EventActivityNetwork::T)
      .def_property_readonly(
          "num_events",
          [](const EventActivityNetwork& n) { return n.events.size(); })
      .def_property_readonly(
          "num_activities",
          [](const EventActivityNetwork& n) { return n.activities.size(); })
      .def_property_readonly("num_lines", &EventActivityNetwork::num_lines)
      .def("weighted_lower_bound", &EventActivityNetwork::weighted_lower_bound)
      .def("validate", &EventActivityNetwork::validate)
      .def("serialize",
           [](const EventActivityNetwork& n) { return serialize_instance(n); });

  py::class_<ExpandedNetwork>(m, "ExpandedNetwork")
      .def_readonly("T", &ExpandedNetwork::T)
      .def_readonly("fixed_event", &ExpandedNetwork::fixed_event)
      .def_property_readonly("num_nodes", &ExpandedNetwork::num_nodes)
      .def_property_readonly(
          "num_arcs",
          [](const ExpandedNetwork& d) { return d.arcs.size(); })
      .def("predicted_arc_count_unfixed",
           &ExpandedNetwork::predicted_arc_count_unfixed)
      .def("dump_tsv", &ExpandedNetwork::dump_tsv);

  py::class_<ODMatrix>(m, "ODMatrix")
      .def_property_readonly("num_entries", [](const ODMatrix& od) {
        return od.entries.size();
      });

  m.def("builtin_instance", &builtin_instance, py::arg("name"),
        py::arg("T") = 0,
        "Bundled instance: single3, single4, 2linecross, 3berlin");
  m.def("parse_instance", &parse_instance, py::arg("text"));
  m.def("make_transfers_free", [](EventActivityNetwork ean) {
    make_transfers_free(ean);
    return ean;
  });
  m.def("contract_degree2",
        [](const EventActivityNetwork& ean) { return contract_degree2(ean); });

  m.def(
      "expand",
      [](const EventActivityNetwork& ean, const std::string& variant,
         int fix_event) {
        if (variant == "waiting") return expand_waiting_variant(ean, fix_event);
        if (variant != "standard")
          throw Error("variant must be 'standard' or 'waiting'");
        return expand(ean, {Variant::standard, fix_event});
      },
      py::arg("ean"), py::arg("variant") = "standard",
      py::arg("fix_event") = -2);

  m.def(
      "pesp_bruteforce",
      [](const EventActivityNetwork& ean, const std::string& objective,
         long cap) {
        return solve_dict(pesp_bruteforce(ean, weight_mode(objective), cap));
      },
      py::arg("ean"), py::arg("objective") = "tension",
      py::arg("cap") = 100000000L);
  m.def(
      "pesp_exact",
      [](const EventActivityNetwork& ean, const std::string& objective) {
        return solve_dict(pesp_exact(ean, weight_mode(objective)));
      },
      py::arg("ean"), py::arg("objective") = "tension");
  m.def("pesp_lp_value", &pesp_lp_value, py::arg("ean"));
  m.def("xpesp_lp_value", &xpesp_lp_value, py::arg("ean"));

  m.def(
      "cxpesp_lp_full",
      [](const ExpandedNetwork& d, long cap) {
        return solve_dict(cxpesp_lp_full(d, cap));
      },
      py::arg("d"), py::arg("cap") = 1000000L);

  m.def(
      "colgen",
      [](const ExpandedNetwork& d, const std::string& model, double zeta,
         double time_limit_s, const ODMatrix* od) {
        MasterSolver ms(d, master_model(model), od);
        ColgenOptions opts;
        opts.zeta = zeta;
        opts.time_limit_s = time_limit_s;
        return colgen_dict(ms.solve(opts));
      },
      py::arg("d"), py::arg("model") = "cxpesp", py::arg("zeta") = 1.0,
      py::arg("time_limit_s") = 1e18, py::arg("od") = nullptr);

  m.def(
      "branch_and_price",
      [](const ExpandedNetwork& d, const std::string& model,
         double time_limit_s, double zeta) {
        BranchLimits lim;
        lim.time_limit_s = time_limit_s;
        lim.zeta = zeta;
        BranchResult r = branch_and_price(d, master_model(model), lim);
        py::dict out;
        out["status"] = std::string(to_string(r.status));
        if (r.has_incumbent) out["objective"] = r.objective;
        out["lower_bound"] = r.lower_bound;
        out["nodes"] = r.nodes;
        out["rounds"] = r.rounds;
        return out;
      },
      py::arg("d"), py::arg("model") = "cxpesp",
      py::arg("time_limit_s") = 1e18, py::arg("zeta") = 1.0);

  m.def("builtin_od", &builtin_od, py::arg("ean"), py::arg("name"));
  m.def("parse_od", &parse_od, py::arg("text"), py::arg("ean"));
  m.def("serialize_od", &serialize_od, py::arg("od"), py::arg("ean"));
  m.def("ttp_shortest_path_bound", &ttp_shortest_path_bound, py::arg("ean"),
        py::arg("od"));

  m.def(
      "lp_equality_check",
      [](const EventActivityNetwork& ean) {
        EqualityReport r = lp_equality_check(ean);
        py::dict d;
        d["standard_value"] = r.standard_value;
        d["waiting_value"] = r.waiting_value;
        d["all_transfers_free"] = r.all_transfers_free;
        d["equal"] = r.equal;
        d["monotone"] = r.monotone;
        return d;
      },
      py::arg("ean"));
}
