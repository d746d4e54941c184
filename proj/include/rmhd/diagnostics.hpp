#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rmhd/bench.hpp"
#include "rmhd/master.hpp"
#include "rmhd/recovery.hpp"

// Numerical verification of the structural claims behind the solver:
//   - xi F''' + 4 F'' > 0 on the physical range (gamma-law), equivalently
//     xi^4 F'' strictly increasing,
//   - F' is either monotone or falls-then-rises (exactly two patterns),
//   - root ordering xi_d > xi_c > xi_b > xi_a,
//   - the computed starts land in the safe interval (xi_b, xi_*].
// Everything here is off the hot path; derivatives beyond F' come from
// Richardson-extrapolated central differences.

namespace rmhd::diag {

enum class FPrimePattern { Monotone, SingleInflection, Other };

inline const char* to_string(FPrimePattern p) {
  switch (p) {
    case FPrimePattern::Monotone: return "monotone";
    case FPrimePattern::SingleInflection: return "single_inflection";
    case FPrimePattern::Other: return "other";
  }
  return "?";
}

// Log-spaced xi grid on (xi_b (1+1e-6), xi_upper], endpoints included at the
// top only.
inline std::vector<double> default_xi_grid(const Scalars& s, int n = 256) {
  const double lo = bracket_roots_ab(s).xi_b * (1.0 + 1e-6);
  const double hi = xi_upper(s);
  std::vector<double> g(static_cast<size_t>(n));
  const double r = hi / lo;
  for (int k = 0; k < n; ++k)
    g[static_cast<size_t>(k)] = lo * std::pow(r, static_cast<double>(k + 1) / n);
  g.back() = hi;
  return g;
}

namespace detail {

// F'' and F''' by central differences of F' with one Richardson step.
// Shrinks the step when a stencil point leaves the real domain (possible just
// above xi_b when the state has tiny D).
struct HighDerivs {
  double f2 = 0.0;
  double f3 = 0.0;
  bool ok = false;
};

inline HighDerivs fpp_fppp(double xi, const Scalars& s, const Eos& eos) {
  HighDerivs out;
  double h = xi * 1e-4;
  for (int attempt = 0; attempt < 4; ++attempt, h /= 16.0) {
    const auto d0 = rmhd::detail::eval_f_df(xi, s, eos, false);
    const auto dp = rmhd::detail::eval_f_df(xi + h, s, eos, false);
    const auto dm = rmhd::detail::eval_f_df(xi - h, s, eos, false);
    const auto dp2 = rmhd::detail::eval_f_df(xi + 0.5 * h, s, eos, false);
    const auto dm2 = rmhd::detail::eval_f_df(xi - 0.5 * h, s, eos, false);
    if (!(d0 && dp && dm && dp2 && dm2)) continue;
    const double c1h = (dp->df - dm->df) / (2.0 * h);
    const double c1h2 = (dp2->df - dm2->df) / h;
    out.f2 = (4.0 * c1h2 - c1h) / 3.0;
    const double c2h = (dp->df - 2.0 * d0->df + dm->df) / (h * h);
    const double c2h2 = (dp2->df - 2.0 * d0->df + dm2->df) / (0.25 * h * h);
    out.f3 = (4.0 * c2h2 - c2h) / 3.0;
    out.ok = true;
    return out;
  }
  return out;
}

}  // namespace detail

struct InequalityCheck {
  long points = 0;
  long pointwise_violations = 0;   // xi F''' + 4 F'' <= -1e-4 |scale|
  long monotone_decreases = 0;     // decreases of xi^4 F'' along the grid
};

inline InequalityCheck check_crucial_inequality(const Scalars& s, double gamma,
                                                std::span<const double> grid) {
  const Eos eos = Eos::gamma_law(gamma);
  InequalityCheck out;
  std::vector<double> seq;
  seq.reserve(grid.size());
  for (const double xi : grid) {
    const auto d = detail::fpp_fppp(xi, s, eos);
    if (!d.ok) continue;
    ++out.points;
    const double val = xi * d.f3 + 4.0 * d.f2;
    const double scale = std::abs(xi * d.f3) + std::abs(4.0 * d.f2);
    if (val <= -1e-4 * scale) ++out.pointwise_violations;
    seq.push_back(xi * xi * xi * xi * d.f2);
  }
  double smax = 0.0;
  for (const double v : seq) smax = std::max(smax, std::abs(v));
  for (size_t k = 0; k + 1 < seq.size(); ++k) {
    const double drop = seq[k] - seq[k + 1];
    if (drop > 1e-4 * (std::abs(seq[k]) + std::abs(seq[k + 1])) + 1e-10 * smax)
      ++out.monotone_decreases;
  }
  return out;
}

inline FPrimePattern classify_fprime_pattern(const Scalars& s, const Eos& eos,
                                             std::span<const double> grid) {
  std::vector<double> df;
  df.reserve(grid.size());
  double dfmax = 0.0;
  for (const double xi : grid) {
    const auto e = rmhd::detail::eval_f_df(xi, s, eos, false);
    if (!e) continue;
    df.push_back(e->df);
    dfmax = std::max(dfmax, std::abs(e->df));
  }
  const double tol = 1e-9 * dfmax;
  std::vector<int> signs;
  for (size_t k = 0; k + 1 < df.size(); ++k) {
    const double d = df[k + 1] - df[k];
    if (std::abs(d) <= tol) continue;  // flat to rounding
    const int sg = d > 0.0 ? 1 : -1;
    if (signs.empty() || signs.back() != sg) signs.push_back(sg);
  }
  if (signs.size() <= 1) return FPrimePattern::Monotone;
  if (signs.size() == 2 && signs[0] == -1 && signs[1] == 1)
    return FPrimePattern::SingleInflection;
  return FPrimePattern::Other;
}

struct RootOrdering {
  double xi_a = 0.0, xi_b = 0.0, xi_c = 0.0, xi_d = 0.0;
  bool ok = false;
};

inline RootOrdering check_root_ordering(const Scalars& s) {
  RootOrdering r;
  const BracketRoots br = bracket_roots_ab(s);
  r.xi_a = br.xi_a;
  r.xi_b = br.xi_b;
  r.xi_c = rmhd::xi_c(s);
  r.xi_d = rmhd::xi_d(s);
  r.ok = r.xi_d > r.xi_c && r.xi_c > r.xi_b && r.xi_b > r.xi_a;
  return r;
}

struct SafeIntervalCheck {
  double xi_b = 0.0, xi_c = 0.0, xi_star = 0.0;
  double xi_d = std::numeric_limits<double>::quiet_NaN();  // set when hybrid used it
  bool converged = false;
  bool ok = false;
};

inline SafeIntervalCheck check_safe_interval(const Scalars& s, const Eos& eos,
                                             const SolverConfig& cfg) {
  SafeIntervalCheck r;
  r.xi_b = bracket_roots_ab(s).xi_b;
  r.xi_c = rmhd::xi_c(s);
  const RecoveryReport rep = solve(s, eos, cfg);
  r.converged = rep.status == RecoveryStatus::Converged;
  r.xi_star = rep.xi;
  if (!r.converged) return r;
  r.ok = r.xi_b < r.xi_c && r.xi_c <= r.xi_star;
  if (rep.initial_kind == InitialKind::XiD) {
    r.xi_d = rmhd::xi_d(s);
    r.ok = r.ok && r.xi_b < r.xi_d && r.xi_d <= r.xi_star;
  }
  return r;
}

// -------------------------------------------------------------------------
// Suite-level sweep combining all checks.

struct TheoryReport {
  long states = 0;
  long inequality_violations = 0;       // pointwise form
  long inequality_monotone_decreases = 0;
  long monotonicity_violations = 0;     // F must increase along the grid
  long ordering_violations = 0;
  long safe_interval_violations = 0;
  long solver_failures = 0;
  long pattern_monotone = 0;
  long pattern_inflection = 0;
  long pattern_other = 0;
  bool ok() const {
    return inequality_violations == 0 && inequality_monotone_decreases == 0 &&
           monotonicity_violations == 0 && ordering_violations == 0 &&
           safe_interval_violations == 0 && solver_failures == 0 &&
           pattern_other == 0;
  }
};

struct VerifySpec {
  bench::Suite suite = bench::Suite::Suite1;
  long trials = 1000;
  uint64_t seed = 0;
  bool gamma_per_trial = true;
  Eos eos = Eos::gamma_law(2.0);
  int grid_points = 256;
  bool check_inequality = true;  // gamma-law states only
};

inline TheoryReport verify_suite(const VerifySpec& vs, const SolverConfig& cfg) {
  TheoryReport rep;
  for (long i = 0; i < vs.trials; ++i) {
    bench::SplitMix64 rng = bench::trial_rng(vs.seed, static_cast<uint64_t>(i));
    const bench::SampledTrial t =
        bench::sample_primitive(vs.suite, rng, vs.gamma_per_trial);
    const Eos eos = vs.gamma_per_trial ? Eos::gamma_law(t.gamma) : vs.eos;
    const Scalars s = derived_scalars(prim_to_cons(t.q, eos));
    ++rep.states;

    if (!check_root_ordering(s).ok) ++rep.ordering_violations;

    const SafeIntervalCheck si = check_safe_interval(s, eos, cfg);
    if (!si.converged)
      ++rep.solver_failures;
    else if (!si.ok)
      ++rep.safe_interval_violations;

    const std::vector<double> grid = default_xi_grid(s, vs.grid_points);

    // F itself must be increasing on the grid.
    double prev = -std::numeric_limits<double>::infinity();
    double fmax = 0.0;
    std::vector<double> fvals;
    fvals.reserve(grid.size());
    for (const double xi : grid) {
      const auto f = master_f(xi, s, eos);
      fvals.push_back(f ? *f : std::numeric_limits<double>::quiet_NaN());
      if (f) fmax = std::max(fmax, std::abs(*f));
    }
    for (const double f : fvals) {
      if (std::isnan(f)) {
        ++rep.monotonicity_violations;
        break;
      }
      if (f < prev - 1e-12 * fmax) {
        ++rep.monotonicity_violations;
        break;
      }
      prev = f;
    }

    switch (classify_fprime_pattern(s, eos, grid)) {
      case FPrimePattern::Monotone: ++rep.pattern_monotone; break;
      case FPrimePattern::SingleInflection: ++rep.pattern_inflection; break;
      case FPrimePattern::Other: ++rep.pattern_other; break;
    }

    if (vs.check_inequality && eos.kind() == EosKind::GammaLaw) {
      const InequalityCheck ic = check_crucial_inequality(s, eos.gamma(), grid);
      rep.inequality_violations += ic.pointwise_violations;
      rep.inequality_monotone_decreases += ic.monotone_decreases;
    }
  }
  return rep;
}

}  // namespace rmhd::diag
