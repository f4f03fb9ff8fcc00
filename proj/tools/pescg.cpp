// Command-line front end: configure one solve, print a human-readable
// summary, and optionally write a machine-readable TSV report.
#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pescg/branch.hpp"
#include "pescg/master.hpp"
#include "pescg/polyhedra.hpp"
#include "pescg/reference.hpp"
#include "pescg/routing.hpp"

using namespace pescg;

namespace {

struct RunConfig {
  std::string builtin;
  std::string instance_path;
  std::string model = "cxpesp";
  std::string mode = "lp";
  std::string objective = "tension";
  int T = 0;                 // 0: instance default
  double zeta = 1.0;
  bool free_transfers = false;
  bool contract = false;
  int fix_event = -2;        // -2 auto, -1 none, >= 0 explicit
  double time_limit_s = 1e18;
  long cycle_cap = 0;  // 0: library default
  unsigned long long seed = 20240517ull;
  std::string od_path;
  std::string report_path;
  bool with_gap = false;
  int workers = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  const double r = std::round(v);
  std::ostringstream os;
  if (std::abs(v - r) < 1e-9)
    os << static_cast<long long>(r);
  else
    os << v;
  return os.str();
}

/// Closed-gap column as the experiment tables print it: percentage of the
/// integer slack covered by the LP bound, "--" when the integer slack is 0,
/// empty when no integer value is available.
std::string closed_gap(double lp_slack, double ip_slack, bool have_ip) {
  if (!have_ip) return "";
  if (ip_slack <= 1e-9) return "--";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << 100.0 * lp_slack / ip_slack;
  return os.str();
}

struct Outcome {
  SolveStatus status = SolveStatus::infeasible;
  double value = 0.0;        // in the requested objective convention
  double lower = 0.0;        // dual bound, same convention
  bool interval = false;     // report value as [lower, value]
  std::string gap;           // closed-gap column, possibly empty
  std::string extra;         // human-readable details
};

int run(const RunConfig& cfg) {
  if (cfg.builtin.empty() == cfg.instance_path.empty())
    throw CLI::ValidationError(
        "exactly one of --builtin / --instance is required");
  if (cfg.workers != 1)
    throw CLI::ValidationError("only --workers 1 is supported");

  EventActivityNetwork ean =
      cfg.builtin.empty()
          ? parse_instance(read_file(cfg.instance_path))
          : builtin_instance(cfg.builtin, cfg.T);
  if (!cfg.builtin.empty() && cfg.T > 0 && ean.T != cfg.T)
    throw Error("period override failed");
  if (cfg.builtin.empty() && cfg.T > 0) {
    ean.T = cfg.T;
    ean.validate();
  }
  if (cfg.free_transfers) make_transfers_free(ean);
  if (cfg.contract) ean = contract_degree2(ean);
  const double wlb = ean.weighted_lower_bound();
  const bool slack = cfg.objective == "slack";
  auto convert = [&](double tension) { return slack ? tension - wlb : tension; };

  const WeightMode wm = slack ? WeightMode::slack : WeightMode::tension;
  Outcome out;

  const long brute_cap = cfg.cycle_cap > 0 ? cfg.cycle_cap : 100000000L;

  if (cfg.model == "pesp-bruteforce") {
    SolveResult r;
    try {
      r = pesp_bruteforce(ean, wm, brute_cap);
    } catch (const Error&) {
      // Enumeration cap exceeded; the bucket-elimination solver computes the
      // same optimum on instances whose event count rules enumeration out.
      r = pesp_exact(ean, wm);
    }
    out.status = r.status;
    out.value = r.objective;
    out.lower = r.objective;
  } else if (cfg.model == "pesp-lp") {
    out.status = SolveStatus::optimal;
    out.value = convert(pesp_lp_value(ean));
    out.lower = out.value;
  } else if (cfg.model == "xpesp-lp") {
    out.status = SolveStatus::optimal;
    out.value = convert(xpesp_lp_value(ean));
    out.lower = out.value;
  } else if (cfg.model == "cxpesp" || cfg.model == "cxpespw") {
    const bool waiting = cfg.model == "cxpespw";
    ExpandedNetwork d = waiting ? expand_waiting_variant(ean, cfg.fix_event)
                                : expand(ean, {Variant::standard, cfg.fix_event});
    const MasterModel mm = waiting ? MasterModel::cxpespw : MasterModel::cxpesp;
    if (cfg.mode == "lp") {
      MasterSolver ms(d, mm);
      ColgenOptions opts;
      opts.zeta = cfg.zeta;
      opts.time_limit_s = cfg.time_limit_s;
      ColgenResult r = ms.solve(opts);
      out.status = r.status;
      out.value = convert(r.objective);
      out.lower = convert(r.lower_bound);
      out.interval = r.status == SolveStatus::time_limit;
      out.extra = "rounds " + std::to_string(r.rounds) + ", columns " +
                  std::to_string(r.columns_added);
      if (r.status == SolveStatus::infeasible) out.extra = r.infeasible_report;
    } else {
      BranchLimits lim;
      lim.time_limit_s = cfg.time_limit_s;
      lim.zeta = cfg.zeta;
      BranchResult r = branch_and_price(d, mm, lim);
      out.status = r.status;
      out.value = convert(r.objective);
      out.lower = convert(r.lower_bound);
      out.interval = r.status == SolveStatus::time_limit;
      out.extra = "nodes " + std::to_string(r.nodes);
      if (cfg.with_gap && r.status == SolveStatus::optimal) {
        MasterSolver ms(d, mm);
        ColgenResult lp = ms.solve();
        if (lp.status == SolveStatus::optimal)
          out.gap = closed_gap(lp.objective - wlb, r.objective - wlb, true);
      }
    }
  } else if (cfg.model == "cxttp") {
    if (cfg.mode != "lp")
      throw CLI::ValidationError("model cxttp supports --mode lp only");
    if (cfg.builtin.empty() && cfg.od_path.empty())
      throw CLI::ValidationError("model cxttp requires --od for file instances");
    ODMatrix od = cfg.od_path.empty()
                      ? builtin_od(ean, cfg.builtin)
                      : parse_od(read_file(cfg.od_path), ean);
    ExpandedNetwork d = expand(ean, {Variant::standard, cfg.fix_event});
    MasterSolver ms(d, MasterModel::cxttp, &od);
    ColgenOptions opts;
    opts.zeta = cfg.zeta;
    opts.time_limit_s = cfg.time_limit_s;
    ColgenResult r = ms.solve(opts);
    out.status = r.status;
    out.value = r.objective;  // travel-time objective; slack does not apply
    out.lower = r.lower_bound;
    out.interval = r.status == SolveStatus::time_limit;
    if (r.status == SolveStatus::infeasible) out.extra = r.infeasible_report;
    if (cfg.with_gap && r.status == SolveStatus::optimal) {
      const double qp = ttp_shortest_path_bound(ean, od);
      SolveResult ip = ttp_bruteforce(ean, od, brute_cap);
      if (ip.status == SolveStatus::optimal) {
        const double denom = r.objective - qp;
        out.gap = denom <= 1e-9
                      ? "--"
                      : fmt((ip.objective - qp) / denom);
        out.extra = "qp " + fmt(qp) + ", ip " + fmt(ip.objective);
      }
    }
  } else {
    throw CLI::ValidationError("unknown model " + cfg.model);
  }

  // Human-readable summary.
  std::cout << "instance: "
            << (cfg.builtin.empty() ? cfg.instance_path : cfg.builtin)
            << "  T=" << ean.T << '\n';
  std::cout << "model: " << cfg.model << "  mode: " << cfg.mode
            << "  objective: " << cfg.objective << '\n';
  std::cout << "status: " << to_string(out.status) << '\n';
  if (out.status != SolveStatus::infeasible) {
    if (out.interval)
      std::cout << "objective: [" << fmt(out.lower) << ", " << fmt(out.value)
                << "]\n";
    else
      std::cout << "objective: " << fmt(out.value) << '\n';
  }
  if (!out.gap.empty()) std::cout << "closed gap %: " << out.gap << '\n';
  if (!out.extra.empty()) std::cout << out.extra << '\n';

  // Machine-readable report: deterministic fields only, so identical
  // configurations reproduce byte-identical files.
  if (!cfg.report_path.empty()) {
    std::ofstream rep(cfg.report_path);
    if (!rep) throw Error("cannot write " + cfg.report_path);
    rep << "instance;model;mode;T;objective;seed;status;value;gap\n";
    rep << (cfg.builtin.empty() ? cfg.instance_path : cfg.builtin) << ';'
        << cfg.model << ';' << cfg.mode << ';' << ean.T << ';'
        << cfg.objective << ';' << cfg.seed << ';' << to_string(out.status)
        << ';';
    if (out.status == SolveStatus::infeasible)
      rep << "";
    else if (out.interval)
      rep << '[' << fmt(out.lower) << ", " << fmt(out.value) << ']';
    else
      rep << fmt(out.value);
    rep << ';' << out.gap << '\n';
  }

  switch (out.status) {
    case SolveStatus::optimal: return 0;
    case SolveStatus::time_limit: return 2;
    case SolveStatus::infeasible: return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic timetabling solvers on time-expanded networks"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* solve = app.add_subcommand("solve", "run one configured solve");
  solve->add_option("--builtin", cfg.builtin,
                    "bundled instance (single3, single4, 2linecross, 3berlin)");
  solve->add_option("--instance", cfg.instance_path, "instance file");
  solve->add_option("--model", cfg.model,
                    "pesp-bruteforce | pesp-lp | xpesp-lp | cxpesp | cxpespw | "
                    "cxttp");
  solve->add_option("--mode", cfg.mode, "lp | ip")
      ->check(CLI::IsMember({"lp", "ip"}));
  solve->add_option("--objective", cfg.objective, "tension | slack")
      ->check(CLI::IsMember({"tension", "slack"}));
  solve->add_option("-T,--period", cfg.T, "period override");
  solve->add_option("--zeta", cfg.zeta, "dual smoothing factor in (0, 1]")
      ->check(CLI::Range(1e-9, 1.0));
  solve->add_flag("--free-transfers", cfg.free_transfers,
                  "widen every transfer window to a full period");
  solve->add_flag("--contract", cfg.contract, "degree-2 contraction first");
  solve->add_option("--fix-event", cfg.fix_event,
                    "-2 auto, -1 none, otherwise the event id pinned to 0");
  solve->add_option("--time-limit", cfg.time_limit_s, "seconds")
      ->check(CLI::PositiveNumber);
  solve->add_option("--cycle-cap", cfg.cycle_cap,
                    "enumeration cap for the exhaustive oracle models");
  solve->add_option("--seed", cfg.seed, "recorded in the report");
  solve->add_option("--od", cfg.od_path, "OD matrix file (cxttp)");
  solve->add_option("--report", cfg.report_path, "TSV report path");
  solve->add_flag("--with-gap", cfg.with_gap,
                  "also solve the exact oracle and print the closed gap");
  solve->add_option("--workers", cfg.workers, "worker count (1 only)");

  if (const char* cap = std::getenv("PESCG_CYCLE_CAP"))
    cfg.cycle_cap = std::atol(cap);

  try {
    app.parse(argc, argv);
    return run(cfg);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
