#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "rmhd/eos.hpp"
#include "rmhd/master.hpp"
#include "rmhd/state.hpp"

namespace rmhd {

enum class SolverMode { PcpHybrid, PcpXiC, NaiveW, Bisection, Brent };

enum class RecoveryStatus {
  Converged,
  MaxIterExceeded,
  NonReal,           // an iterate left the domain where W(xi) is real
  NonPhysical,       // final value does not map to physical primitives
  InadmissibleInput  // conserved state fails the admissibility test
};

enum class InitialKind { XiD, XiC, Other };

struct SolverConfig {
  double tol = 1e-14;   // absolute tolerance on |xi_{n+1} - xi_n|
  int max_iter = 500;
  int osc_limit = 3;    // sign-oscillation cap on consecutive F values
  SolverMode mode = SolverMode::PcpHybrid;
  bool record_trace = false;
};

struct RecoveryReport {
  RecoveryStatus status = RecoveryStatus::MaxIterExceeded;
  double xi = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  int osc_count = 0;
  bool pcp_violated = false;  // some iterate left the physical range
  InitialKind initial_kind = InitialKind::Other;
  std::vector<std::pair<double, double>> trace;  // (xi_n, F(xi_n)) when enabled
};

inline const char* to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::Converged: return "converged";
    case RecoveryStatus::MaxIterExceeded: return "max_iter_exceeded";
    case RecoveryStatus::NonReal: return "non_real";
    case RecoveryStatus::NonPhysical: return "non_physical";
    case RecoveryStatus::InadmissibleInput: return "inadmissible_input";
  }
  return "?";
}

inline const char* to_string(InitialKind k) {
  switch (k) {
    case InitialKind::XiD: return "xi_d";
    case InitialKind::XiC: return "xi_c";
    case InitialKind::Other: return "other";
  }
  return "?";
}

inline const char* to_string(SolverMode m) {
  switch (m) {
    case SolverMode::PcpHybrid: return "pcp-hybrid";
    case SolverMode::PcpXiC: return "pcp-xic";
    case SolverMode::NaiveW: return "naive-w";
    case SolverMode::Bisection: return "bisection";
    case SolverMode::Brent: return "brent";
  }
  return "?";
}

struct InitialGuess {
  double xi0;
  InitialKind kind;
  std::optional<double> f_at_xi0;  // cached F(xi_d) when the cheap branch won
};

// Hybrid start: take xi_d when F(xi_d) <= 0 (then xi_d is below the root and
// inside the safe interval), else fall back to the cubic root xi_c.  With no
// magnetic coupling the cubic root collapses to E, so skip the formula.
// NaiveW uses the same rule with the stable F so its starting point is
// identical to the PCP run; its loop then re-evaluates everything naively.
inline InitialGuess initial_guess(const Scalars& s, const Eos& eos, SolverMode mode) {
  if (s.B == 0.0 && s.tau == 0.0) return {s.E, InitialKind::XiC, std::nullopt};
  if (mode == SolverMode::PcpXiC) return {xi_c(s), InitialKind::XiC, std::nullopt};
  const double xd = xi_d(s);
  const auto fd = master_f(xd, s, eos);
  if (fd && *fd <= 0.0) return {xd, InitialKind::XiD, fd};
  return {xi_c(s), InitialKind::XiC, std::nullopt};
}

namespace detail {

inline void note_range(double xi, const Scalars& s, RecoveryReport& rep) {
  if (!(xi > 0.0) || !(aux_quartics(xi, s).fb > 0.0)) rep.pcp_violated = true;
}

inline void finish(double xi, const Scalars& s, RecoveryReport& rep,
                   RecoveryStatus on_ok) {
  rep.xi = xi;
  note_range(xi, s, rep);
  if (on_ok == RecoveryStatus::Converged &&
      !(xi > 0.0 && aux_quartics(xi, s).fb > 0.0)) {
    rep.status = RecoveryStatus::NonPhysical;
  } else {
    rep.status = on_ok;
  }
}

inline RecoveryReport solve_newton(const Scalars& s, const Eos& eos,
                                   const SolverConfig& cfg) {
  RecoveryReport rep;
  const bool naive = cfg.mode == SolverMode::NaiveW;
  const InitialGuess g = initial_guess(s, eos, cfg.mode);
  rep.initial_kind = g.kind;

  double xi = g.xi0;
  double f_prev = 0.0;
  bool first = true;

  while (true) {
    if (!(xi > 0.0) || !std::isfinite(xi)) {
      rep.pcp_violated = true;
      rep.xi = xi;
      rep.status = RecoveryStatus::NonReal;
      return rep;
    }
    note_range(xi, s, rep);

    const auto e = eval_f_df(xi, s, eos, naive);
    if (!e) {
      rep.pcp_violated = true;
      rep.xi = xi;
      rep.status = RecoveryStatus::NonReal;
      return rep;
    }
    // first pass reuses the F(xi_d) cached by the hybrid branch test
    const double f = (first && !naive && g.f_at_xi0) ? *g.f_at_xi0 : e->f;
    first = false;
    if (cfg.record_trace) rep.trace.emplace_back(xi, f);

    const double xi_next = xi - f / e->df;
    ++rep.iterations;
    if (f_prev * f < 0.0) ++rep.osc_count;
    f_prev = f;

    if (!std::isfinite(xi_next)) {
      rep.pcp_violated = true;
      rep.xi = xi_next;
      rep.status = RecoveryStatus::NonReal;
      return rep;
    }

    const double delta = std::abs(xi - xi_next);
    xi = xi_next;

    if (delta <= cfg.tol) {
      finish(xi, s, rep, RecoveryStatus::Converged);
      return rep;
    }
    if (rep.osc_count > cfg.osc_limit) {
      // The loop guard gives up on oscillating sign changes; accept the
      // iterate only if the residual is already small on the state's scale.
      const auto fe = eval_f_df(xi, s, eos, naive);
      const double thresh = std::sqrt(cfg.tol) * std::max(1.0, s.E);
      if (fe && std::abs(fe->f) <= thresh)
        finish(xi, s, rep, RecoveryStatus::Converged);
      else
        finish(xi, s, rep, RecoveryStatus::MaxIterExceeded);
      return rep;
    }
    if (rep.iterations >= cfg.max_iter) {
      finish(xi, s, rep, RecoveryStatus::MaxIterExceeded);
      return rep;
    }
  }
}

inline RecoveryReport solve_bracketed(const Scalars& s, const Eos& eos,
                                      const SolverConfig& cfg, bool brent) {
  RecoveryReport rep;
  rep.initial_kind = InitialKind::Other;

  double a = xi_c(s);
  double b = xi_upper(s);
  const auto fa_o = master_f(a, s, eos);
  const auto fb_o = master_f(b, s, eos);
  if (!fa_o || !fb_o) {
    rep.status = RecoveryStatus::NonReal;
    return rep;
  }
  double fa = *fa_o, fb = *fb_o;
  if (!(fa * fb < 0.0)) {
    // Only possible when F(xi_c) rounds to >= 0 with the root at xi_c itself.
    finish(a, s, rep, RecoveryStatus::Converged);
    return rep;
  }

  const auto eval = [&](double x) -> std::optional<double> {
    const auto v = master_f(x, s, eos);
    if (v) {
      ++rep.iterations;
      note_range(x, s, rep);
      if (cfg.record_trace) rep.trace.emplace_back(x, *v);
    }
    return v;
  };

  if (!brent) {
    while (rep.iterations < cfg.max_iter) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;  // interval at machine resolution
      const auto fm = eval(mid);
      if (!fm) {
        rep.xi = mid;
        rep.status = RecoveryStatus::NonReal;
        return rep;
      }
      if (*fm == 0.0) {
        finish(mid, s, rep, RecoveryStatus::Converged);
        return rep;
      }
      if ((*fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = *fm;
      } else {
        b = mid;
        fb = *fm;
      }
      if (b - a <= cfg.tol) break;
    }
    const bool resolved = (b - a <= cfg.tol) || 0.5 * (a + b) <= a || 0.5 * (a + b) >= b;
    const double root = std::abs(fa) <= std::abs(fb) ? a : b;
    finish(root, s, rep,
           resolved ? RecoveryStatus::Converged : RecoveryStatus::MaxIterExceeded);
    return rep;
  }

  // Brent: inverse quadratic interpolation with bisection fallback.
  double c = b, fc = fb, d = b - a, e = d;
  for (; rep.iterations < cfg.max_iter;) {
    if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * cfg.tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      finish(b, s, rep, RecoveryStatus::Converged);
      return rep;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double sr = fb / fa;
      if (a == c) {
        p = 2.0 * xm * sr;
        q = 1.0 - sr;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = sr * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (sr - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    const auto fnew = eval(b);
    if (!fnew) {
      rep.xi = b;
      rep.status = RecoveryStatus::NonReal;
      return rep;
    }
    fb = *fnew;
  }
  finish(b, s, rep, RecoveryStatus::MaxIterExceeded);
  return rep;
}

inline std::optional<Primitive> try_extract(double xi, const Conserved& u,
                                            const Eos& eos) {
  if (!(xi > 0.0) || !std::isfinite(xi)) return std::nullopt;
  const double B2 = u.B.norm2();
  const double tau = dot(u.m, u.B);
  const Vec3 v = (1.0 / (xi + B2)) * (u.m + (tau / xi) * u.B);
  const double v2 = v.norm2();
  if (!(v2 < 1.0) || !v.finite()) return std::nullopt;
  const double W = 1.0 / std::sqrt(1.0 - v2);
  const double rho = u.D / W;
  const double h = xi / (u.D * W);
  const double p = rho * pressure_ratio(eos, h);
  const Primitive q{rho, v, u.B, p};
  if (!q.physical()) return std::nullopt;
  return q;
}

}  // namespace detail

// Root solve for xi = rho h W^2 given the scalar reductions of an admissible
// state.  Caller contract: the originating state passed the admissibility
// test; on other inputs the report carries an error status, never UB.
inline RecoveryReport solve(const Scalars& s, const Eos& eos,
                            const SolverConfig& cfg) {
  switch (cfg.mode) {
    case SolverMode::Bisection:
      return detail::solve_bracketed(s, eos, cfg, false);
    case SolverMode::Brent:
      return detail::solve_bracketed(s, eos, cfg, true);
    default:
      return detail::solve_newton(s, eos, cfg);
  }
}

// Primitive variables from a converged xi.
inline Primitive extract_primitives(double xi, const Conserved& u, const Eos& eos) {
  const auto q = detail::try_extract(xi, u, eos);
  if (!q)
    throw std::domain_error(
        "extract_primitives: xi is outside the physical range of this state");
  return *q;
}

struct RecoveryResult {
  std::optional<Primitive> primitive;
  RecoveryReport report;
};

// Full pipeline: admissibility test -> scalar reductions -> root solve ->
// primitive extraction.
inline RecoveryResult recover(const Conserved& u, const Eos& eos,
                              const SolverConfig& cfg) {
  RecoveryResult r;
  if (!is_admissible(u)) {
    r.report.status = RecoveryStatus::InadmissibleInput;
    return r;
  }
  const Scalars s = derived_scalars(u);
  r.report = solve(s, eos, cfg);
  if (r.report.status == RecoveryStatus::Converged) {
    if (auto q = detail::try_extract(r.report.xi, u, eos))
      r.primitive = *q;
    else
      r.report.status = RecoveryStatus::NonPhysical;
  }
  return r;
}

}  // namespace rmhd
