#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "rmhd/recovery.hpp"
#include "rmhd/state.hpp"

// Random stress suites.  Suite 1 draws broad-range states (densities and
// pressures up to 1e3, speeds up to 1-1e-10, fields up to 100 per component);
// Suite 2 concentrates on low density/pressure with Lorentz factors >= ~7.
// Every trial owns an independent splitmix64 stream keyed by (seed, index),
// so results are reproducible regardless of execution order.

namespace rmhd::bench {

struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t s) : state(s) {}
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // uniform on [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline constexpr const char* kRngName = "splitmix64";

inline SplitMix64 trial_rng(uint64_t seed, uint64_t trial) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return SplitMix64(z ^ (z >> 31));
}

enum class Suite { Suite1 = 1, Suite2 = 2 };

struct SampledTrial {
  Primitive q;
  double gamma;  // per-trial adiabatic index; NaN when not drawn
};

// Draw one primitive state.  Draw order is fixed: [gamma], rho, direction
// (redrawn on the measure-zero |u| = 0), speed, p, B.
template <class Rng>
SampledTrial sample_primitive(Suite suite, Rng& rng, bool per_trial_gamma) {
  SampledTrial t;
  t.gamma = std::numeric_limits<double>::quiet_NaN();
  if (per_trial_gamma) {
    double u = rng.uniform01();
    while (u == 0.0) u = rng.uniform01();  // gamma = 1 is outside the EOS range
    t.gamma = 1.0 + u;
  }

  const bool s1 = suite == Suite::Suite1;
  t.q.rho = s1 ? 1000.0 * rng.uniform01() + 1e-11 : 0.01 * rng.uniform01() + 1e-13;

  Vec3 u;
  double n2;
  do {
    u = {2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0,
         2.0 * rng.uniform01() - 1.0};
    n2 = u.norm2();
  } while (n2 == 0.0);
  const double vmag = s1 ? (1.0 - 1e-10) * rng.uniform01()
                         : (0.01 - 1e-16) * rng.uniform01() + 0.99;
  t.q.v = (vmag / std::sqrt(n2)) * u;

  t.q.p = s1 ? 1000.0 * rng.uniform01() + 1e-11 : 0.01 * rng.uniform01() + 1e-13;

  const double bs = s1 ? 100.0 : 10.0;
  t.q.B = {2.0 * bs * rng.uniform01() - bs, 2.0 * bs * rng.uniform01() - bs,
           2.0 * bs * rng.uniform01() - bs};
  return t;
}

struct TrialRecord {
  RecoveryStatus status = RecoveryStatus::MaxIterExceeded;
  int iterations = 0;
  int osc_count = 0;
  bool pcp_violated = false;
  InitialKind initial_kind = InitialKind::Other;
  double err_v = std::numeric_limits<double>::quiet_NaN();      // |v' - v|
  double err_rho = std::numeric_limits<double>::quiet_NaN();    // relative
  double err_p = std::numeric_limits<double>::quiet_NaN();      // relative
  double gamma = std::numeric_limits<double>::quiet_NaN();
  bool success() const { return status == RecoveryStatus::Converged; }
};

// Forward-map the state, recover it, and measure the error.  All solver
// outcomes are data; nothing here throws for solver-side reasons.
inline TrialRecord run_trial(const Primitive& q, const Eos& eos,
                             const SolverConfig& cfg) {
  TrialRecord rec;
  const Conserved u = prim_to_cons(q, eos);
  const RecoveryResult res = recover(u, eos, cfg);
  rec.status = res.report.status;
  rec.iterations = res.report.iterations;
  rec.osc_count = res.report.osc_count;
  rec.pcp_violated = res.report.pcp_violated;
  rec.initial_kind = res.report.initial_kind;
  if (res.primitive) {
    rec.err_v = (res.primitive->v - q.v).norm();
    rec.err_rho = std::abs(res.primitive->rho - q.rho) / q.rho;
    rec.err_p = std::abs(res.primitive->p - q.p) / q.p;
  }
  return rec;
}

struct SuiteSpec {
  Suite suite = Suite::Suite1;
  long trials = 1000000;
  uint64_t seed = 0;
  bool gamma_per_trial = true;        // adiabatic index 1+U drawn per trial
  Eos eos = Eos::gamma_law(2.0);      // used when gamma_per_trial is false
  SolverMode mode = SolverMode::PcpHybrid;
};

struct SuiteStats {
  long trials = 0;
  long successes = 0;
  long failures = 0;
  long non_pcp = 0;
  long xid_count = 0;
  double iter_mean = 0.0;  // over successes, like the error statistics
  int iter_max = 0;
  double err_mean = 0.0;
  double err_max = 0.0;
  double wall_time_s = 0.0;
  double xid_branch_rate() const {
    return trials > 0 ? static_cast<double>(xid_count) / static_cast<double>(trials)
                      : 0.0;
  }
};

namespace detail {
// Compensated accumulator; with the fixed trial order this makes the means
// bit-reproducible.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};
}  // namespace detail

using TrialCallback = std::function<void(long, const TrialRecord&)>;

inline SuiteStats run_suite(const SuiteSpec& spec, const SolverConfig& base_cfg,
                            const TrialCallback& on_trial = {}) {
  SolverConfig cfg = base_cfg;
  cfg.mode = spec.mode;

  SuiteStats st;
  st.trials = spec.trials;
  detail::KahanSum iter_sum, err_sum;

  const auto t0 = std::chrono::steady_clock::now();
  for (long i = 0; i < spec.trials; ++i) {
    SplitMix64 rng = trial_rng(spec.seed, static_cast<uint64_t>(i));
    const SampledTrial t = sample_primitive(spec.suite, rng, spec.gamma_per_trial);
    const Eos eos = spec.gamma_per_trial ? Eos::gamma_law(t.gamma) : spec.eos;
    TrialRecord rec = run_trial(t.q, eos, cfg);
    rec.gamma = t.gamma;

    if (rec.pcp_violated) ++st.non_pcp;
    if (rec.initial_kind == InitialKind::XiD) ++st.xid_count;
    if (rec.success()) {
      ++st.successes;
      iter_sum.add(static_cast<double>(rec.iterations));
      st.iter_max = std::max(st.iter_max, rec.iterations);
      err_sum.add(rec.err_v);
      st.err_max = std::max(st.err_max, rec.err_v);
    } else {
      ++st.failures;
    }
    if (on_trial) on_trial(i, rec);
  }
  const auto t1 = std::chrono::steady_clock::now();
  st.wall_time_s = std::chrono::duration<double>(t1 - t0).count();

  if (st.successes > 0) {
    st.iter_mean = iter_sum.s / static_cast<double>(st.successes);
    st.err_mean = err_sum.s / static_cast<double>(st.successes);
  }
  return st;
}

// Fraction of trials whose hybrid branch took the cheap xi_d start.
inline double hybrid_branch_rate(const SuiteSpec& spec, const SolverConfig& cfg) {
  return run_suite(spec, cfg).xid_branch_rate();
}

}  // namespace rmhd::bench
