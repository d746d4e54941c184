#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmhd/bench.hpp"
#include "rmhd/diagnostics.hpp"
#include "rmhd/json_io.hpp"
#include "rmhd/rmhd.hpp"

// Command-line front end.  Machine-readable output (JSON/CSV) goes to the
// output stream or --out file; diagnostics go to the error stream.
// Exit codes: 0 ok, 1 validation error, 2 solver failure, 3 verification
// violation.

namespace rmhd::cli {

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct EosChoice {
  bool per_trial_gamma = false;
  std::optional<Eos> eos;  // set unless per_trial_gamma
  std::string label;
};

// --eos {gamma,mathews,rc}; --gamma is required iff --eos gamma and may be
// the literal "rand" where allowed (per-trial index draw in bench/verify).
inline EosChoice resolve_eos(const std::string& eos_name, const std::string& gamma_arg,
                             bool allow_rand) {
  EosChoice c;
  if (eos_name == "mathews") {
    if (!gamma_arg.empty())
      throw CLI::ValidationError("--gamma is only valid with --eos gamma");
    c.eos = Eos::mathews();
    c.label = "mathews";
    return c;
  }
  if (eos_name == "rc") {
    if (!gamma_arg.empty())
      throw CLI::ValidationError("--gamma is only valid with --eos gamma");
    c.eos = Eos::ryu_chattopadhyay();
    c.label = "rc";
    return c;
  }
  if (eos_name != "gamma")
    throw CLI::ValidationError("--eos must be one of gamma|mathews|rc");
  if (gamma_arg.empty())
    throw CLI::ValidationError("--eos gamma requires --gamma");
  if (gamma_arg == "rand") {
    if (!allow_rand)
      throw CLI::ValidationError("--gamma rand is not valid for this subcommand");
    c.per_trial_gamma = true;
    c.label = "gamma:rand";
    return c;
  }
  double g = 0.0;
  try {
    g = std::stod(gamma_arg);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--gamma must be a number" +
                               std::string(allow_rand ? " or 'rand'" : ""));
  }
  if (!(g > 1.0 && g <= 2.0))
    throw CLI::ValidationError("--gamma must satisfy 1 < gamma <= 2");
  c.eos = Eos::gamma_law(g);
  c.label = "gamma:" + gamma_arg;
  return c;
}

// Output sink: --out file when given, else the provided stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw CLI::ValidationError("cannot open output file: " + path);
      out_ = file_.get();
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{
      "Conservative-to-primitive variable recovery for special relativistic "
      "MHD: a constraint-preserving Newton solver with reference solvers, "
      "random stress suites, and verification sweeps."};
  app.require_subcommand(1);

  // ---- shared option state -------------------------------------------------
  std::string eos_name = "gamma";
  std::string gamma_arg;
  std::string solver_name = "pcp-hybrid";
  std::string out_path;
  double tol = 1e-14;
  int max_iter = 500;
  int osc_limit = 3;
  uint64_t seed = 1;

  const auto add_eos_opts = [&](CLI::App* sub) {
    sub->add_option("--eos", eos_name, "equation of state: gamma|mathews|rc")
        ->default_val("gamma");
    sub->add_option("--gamma", gamma_arg,
                    "adiabatic index in (1,2]; required iff --eos gamma "
                    "(bench/verify also accept 'rand' for a per-trial draw)");
  };
  const auto add_solver_opts = [&](CLI::App* sub) {
    sub->add_option("--solver", solver_name,
                    "pcp-hybrid|pcp-xic|naive-w|bisection|brent")
        ->default_val("pcp-hybrid");
    sub->add_option("--tol", tol, "absolute tolerance on successive iterates")
        ->default_val(1e-14);
    sub->add_option("--max-iter", max_iter, "iteration cap")->default_val(500);
    sub->add_option("--osc-limit", osc_limit,
                    "cap on sign oscillations of consecutive F values")
        ->default_val(3);
  };
  const auto solver_mode = [&]() -> SolverMode {
    if (solver_name == "pcp-hybrid") return SolverMode::PcpHybrid;
    if (solver_name == "pcp-xic") return SolverMode::PcpXiC;
    if (solver_name == "naive-w") return SolverMode::NaiveW;
    if (solver_name == "bisection") return SolverMode::Bisection;
    if (solver_name == "brent") return SolverMode::Brent;
    throw CLI::ValidationError("unknown --solver: " + solver_name);
  };
  const auto solver_config = [&]() {
    SolverConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.osc_limit = osc_limit;
    cfg.mode = solver_mode();
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.osc_limit < 0)
      throw CLI::ValidationError("need tol > 0, max-iter >= 1, osc-limit >= 0");
    return cfg;
  };

  // ---- recover --------------------------------------------------------------
  auto* rec = app.add_subcommand("recover",
                                 "recover primitive variables from one state");
  std::string input_path;
  bool want_trace = false;
  rec->add_option("--input", input_path, "state JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  add_eos_opts(rec);
  add_solver_opts(rec);
  rec->add_flag("--trace", want_trace, "include the iterate trace in the output");
  rec->add_option("--out", out_path, "write the JSON report to a file");

  // ---- bench ----------------------------------------------------------------
  auto* ben = app.add_subcommand("bench", "random stress suite with statistics");
  int suite_id = 1;
  long trials = 1000000;
  std::string per_trial_path;
  ben->add_option("--suite", suite_id, "1 (broad range) or 2 (low rho/p, W >= 7)")
      ->required()
      ->check(CLI::Range(1, 2));
  ben->add_option("--trials", trials, "number of independent trials")
      ->default_val(1000000)
      ->check(CLI::PositiveNumber);
  ben->add_option("--seed", seed, "64-bit seed for the per-trial rng streams")
      ->default_val(1);
  add_eos_opts(ben);
  add_solver_opts(ben);
  ben->add_option("--out", out_path, "write the stats CSV to a file");
  ben->add_option("--per-trial", per_trial_path, "dump per-trial records CSV");

  // ---- profile ---------------------------------------------------------------
  auto* prof = app.add_subcommand(
      "profile", "sample F and W over a xi grid, stable vs naive Lorentz form");
  double pD = 1.0, pE = 0.0, pm2 = 0.0, pB = 0.0, ptau = 0.0;
  int points = 2000;
  double xi_min = 0.0, xi_max = 0.0;
  std::string grid_kind = "log";
  prof->add_option("--D", pD, "lab-frame density")->required();
  prof->add_option("--E", pE, "energy density")->required();
  prof->add_option("--m2", pm2, "momentum norm squared |m|^2")->required();
  prof->add_option("--B", pB, "magnetic field norm |B|")->required();
  prof->add_option("--tau", ptau, "m . B")->required();
  add_eos_opts(prof);
  prof->add_option("--points", points, "grid size")->default_val(2000);
  prof->add_option("--xi-min", xi_min, "grid start (default: xi_c)");
  prof->add_option("--xi-max", xi_max, "grid end (default: 2E - B^2)");
  prof->add_option("--grid", grid_kind, "log|linear")->default_val("log");
  prof->add_option("--out", out_path, "write the CSV to a file");

  // ---- verify ----------------------------------------------------------------
  auto* ver = app.add_subcommand(
      "verify", "sweep random states and verify the solver's structural claims");
  int vsuite = 1;
  long vtrials = 1000;
  int grid_points = 256;
  ver->add_option("--suite", vsuite, "1 or 2")->required()->check(CLI::Range(1, 2));
  ver->add_option("--trials", vtrials, "number of states")
      ->default_val(1000)
      ->check(CLI::PositiveNumber);
  ver->add_option("--seed", seed, "64-bit seed")->default_val(1);
  add_eos_opts(ver);
  add_solver_opts(ver);
  ver->add_option("--grid-points", grid_points, "xi grid size per state")
      ->default_val(256);
  ver->add_option("--out", out_path, "write the JSON report to a file");

  try {
    std::vector<const char*> argv;
    argv.push_back("rmhd-c2p");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());

    using detail::fmt17;

    if (rec->parsed()) {
      const detail::EosChoice ec = detail::resolve_eos(eos_name, gamma_arg, false);
      SolverConfig cfg = solver_config();
      cfg.record_trace = want_trace;

      std::ifstream in(input_path);
      io::json j;
      in >> j;
      const io::StateInput st = io::parse_state(j);
      const Conserved u =
          st.conserved ? *st.conserved : prim_to_cons(*st.primitive, *ec.eos);

      const RecoveryResult res = recover(u, *ec.eos, cfg);
      io::json rj = io::report_to_json(res.report, want_trace);
      rj["eos"] = ec.label;
      rj["solver"] = to_string(cfg.mode);
      rj["conserved"] = io::to_json(u);
      if (res.primitive) {
        rj["primitive"] = io::to_json(*res.primitive);
        if (st.primitive) {
          rj["error_v"] = (res.primitive->v - st.primitive->v).norm();
          rj["error_rho_rel"] =
              std::abs(res.primitive->rho - st.primitive->rho) / st.primitive->rho;
          rj["error_p_rel"] =
              std::abs(res.primitive->p - st.primitive->p) / st.primitive->p;
        }
      }
      detail::Sink sink(out_path, out);
      sink.stream() << rj.dump(2) << "\n";
      return res.report.status == RecoveryStatus::Converged ? 0 : 2;
    }

    if (ben->parsed()) {
      const detail::EosChoice ec = detail::resolve_eos(eos_name, gamma_arg, true);
      const SolverConfig cfg = solver_config();

      bench::SuiteSpec spec;
      spec.suite = suite_id == 1 ? bench::Suite::Suite1 : bench::Suite::Suite2;
      spec.trials = trials;
      spec.seed = seed;
      spec.gamma_per_trial = ec.per_trial_gamma;
      if (ec.eos) spec.eos = *ec.eos;
      spec.mode = cfg.mode;

      std::unique_ptr<std::ofstream> pt;
      bench::TrialCallback cb;
      if (!per_trial_path.empty()) {
        pt = std::make_unique<std::ofstream>(per_trial_path);
        if (!*pt)
          throw CLI::ValidationError("cannot open per-trial file: " + per_trial_path);
        *pt << "trial,status,iterations,osc_count,initial_kind,pcp_violated,"
               "err_v,err_rho_rel,err_p_rel,gamma\n";
        cb = [&pt](long i, const bench::TrialRecord& r) {
          *pt << i << ',' << to_string(r.status) << ',' << r.iterations << ','
              << r.osc_count << ',' << to_string(r.initial_kind) << ','
              << (r.pcp_violated ? 1 : 0) << ',' << fmt17(r.err_v) << ','
              << fmt17(r.err_rho) << ',' << fmt17(r.err_p) << ','
              << fmt17(r.gamma) << '\n';
        };
      }

      const bench::SuiteStats st = bench::run_suite(spec, cfg, cb);

      detail::Sink sink(out_path, out);
      sink.stream() << "# rng=" << bench::kRngName << " seed=" << seed << "\n"
                    << "solver,suite,eos,trials,non_pcp,failures,iter_mean,"
                       "iter_max,err_mean,err_max,xid_branch_rate,wall_time_s\n"
                    << to_string(cfg.mode) << ',' << suite_id << ',' << ec.label
                    << ',' << st.trials << ',' << st.non_pcp << ',' << st.failures
                    << ',' << fmt17(st.iter_mean) << ',' << st.iter_max << ','
                    << fmt17(st.err_mean) << ',' << fmt17(st.err_max) << ','
                    << fmt17(st.xid_branch_rate()) << ','
                    << fmt17(st.wall_time_s) << "\n";
      return 0;
    }

    if (prof->parsed()) {
      const detail::EosChoice ec = detail::resolve_eos(eos_name, gamma_arg, false);
      const Scalars s = Scalars::from_raw(pD, pE, pm2, pB, ptau);
      if (points < 2) throw CLI::ValidationError("--points must be >= 2");

      const double lo = xi_min > 0.0 ? xi_min : xi_c(s);
      const double hi = xi_max > 0.0 ? xi_max : xi_upper(s);
      if (!(lo > 0.0 && hi > lo))
        throw CLI::ValidationError("profile: need 0 < xi-min < xi-max");
      if (grid_kind != "log" && grid_kind != "linear")
        throw CLI::ValidationError("--grid must be log or linear");

      detail::Sink sink(out_path, out);
      std::ostream& os = sink.stream();
      os << "xi,f_stable,f_naive,w_stable,w_naive,fb_sign\n";
      for (int k = 0; k < points; ++k) {
        const double frac = static_cast<double>(k) / (points - 1);
        const double xi = grid_kind == "log" ? lo * std::pow(hi / lo, frac)
                                             : lo + frac * (hi - lo);
        const auto fs = master_f(xi, s, *ec.eos);
        const auto fn = master_f_naive(xi, s, *ec.eos);
        const auto ws = lorentz_w_stable(xi, s);
        const auto wn = lorentz_w_naive(xi, s);
        const double fb = aux_quartics(xi, s).fb;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        os << fmt17(xi) << ',' << fmt17(fs ? *fs : nan) << ','
           << fmt17(fn ? *fn : nan) << ',' << fmt17(ws ? *ws : nan) << ','
           << fmt17(wn ? *wn : nan) << ','
           << (fb > 0.0 ? 1 : (fb < 0.0 ? -1 : 0)) << '\n';
      }
      return 0;
    }

    // verify
    const detail::EosChoice ec = detail::resolve_eos(eos_name, gamma_arg, true);
    const SolverConfig cfg = solver_config();
    diag::VerifySpec vs;
    vs.suite = vsuite == 1 ? bench::Suite::Suite1 : bench::Suite::Suite2;
    vs.trials = vtrials;
    vs.seed = seed;
    vs.gamma_per_trial = ec.per_trial_gamma;
    if (ec.eos) vs.eos = *ec.eos;
    vs.grid_points = grid_points;
    vs.check_inequality = true;

    const diag::TheoryReport rep = diag::verify_suite(vs, cfg);
    io::json j{{"rng", bench::kRngName},
               {"seed", seed},
               {"suite", vsuite},
               {"eos", ec.label},
               {"solver", to_string(cfg.mode)},
               {"states", rep.states},
               {"inequality_violations", rep.inequality_violations},
               {"inequality_monotone_decreases", rep.inequality_monotone_decreases},
               {"monotonicity_violations", rep.monotonicity_violations},
               {"ordering_violations", rep.ordering_violations},
               {"safe_interval_violations", rep.safe_interval_violations},
               {"solver_failures", rep.solver_failures},
               {"patterns",
                {{"monotone", rep.pattern_monotone},
                 {"single_inflection", rep.pattern_inflection},
                 {"other", rep.pattern_other}}},
               {"ok", rep.ok()}};
    detail::Sink sink(out_path, out);
    sink.stream() << j.dump(2) << "\n";
    return rep.ok() ? 0 : 3;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rmhd::cli
