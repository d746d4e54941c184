#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "rmhd/eos.hpp"
#include "rmhd/state.hpp"

// The scalar reduction of con2prim: everything here is a function of the
// candidate xi = rho h W^2 and the scalar reductions of the conserved state.
//
// Domains (for an admissible state):
//   Omega1 = (xi_a, inf)   W(xi) real and positive; xi_a = largest root of f_a
//   Omega2 = (xi_b, inf)   recovered primitives physical; xi_b = root of f_b
//   the master function F is strictly increasing on Omega1 with its unique
//   physical root xi_* in Omega2, and xi_* < 2E - B^2.

namespace rmhd {

// Lorentz factor W(xi), cancellation-safe form.  With eta = xi + B^2 the
// bracket equals 1 - beta1/xi^2 - beta2/eta^2 but avoids forming the quartic
// f_a, which loses many digits for large-scale states.  Empty when xi is
// outside Omega1.
inline std::optional<double> lorentz_w_stable(double xi, const Scalars& s) {
  if (!(xi > 0.0)) return std::nullopt;
  const double eta = xi + s.B * s.B;
  const double bracket = (xi + s.alpha2) * (eta + s.m) / (eta * eta) +
                         s.beta1 * (1.0 / (eta * eta) - 1.0 / (xi * xi));
  if (!(bracket > 0.0) || !std::isfinite(bracket)) return std::nullopt;
  return 1.0 / std::sqrt(bracket);
}

// f_a: the quartic whose positivity defines Omega1.
// f_b: f_a - D^2 (xi + B^2)^2; positivity defines Omega2.
struct QuarticPair {
  double fa;
  double fb;
};

inline QuarticPair aux_quartics(double xi, const Scalars& s) {
  const double B2 = s.B * s.B;
  const double eta = xi + B2;
  const double fa = xi * xi * eta * eta -
                    (xi * xi * s.m * s.m + (2.0 * xi + B2) * s.tau * s.tau);
  const double fb = fa - s.D * s.D * eta * eta;
  return {fa, fb};
}

// Textbook form of W(xi) via f_a.  Kept for the round-off comparison; the
// subtraction inside f_a makes it noisy for large-scale states.
inline std::optional<double> lorentz_w_naive(double xi, const Scalars& s) {
  if (!(xi > 0.0)) return std::nullopt;
  const double fa = aux_quartics(xi, s).fa;
  if (!(fa > 0.0) || !std::isfinite(fa)) return std::nullopt;
  return xi * (xi + s.B * s.B) / std::sqrt(fa);
}

// Cubic whose unique positive root xi_c is a provably safe initial guess.
inline double cubic_fc(double xi, const Scalars& s) {
  const double B2 = s.B * s.B;
  return xi * xi * xi + (B2 - s.E) * xi * xi -
         0.5 * (B2 * s.D * s.D + s.tau * s.tau);
}

// Unique positive root of cubic_fc by the real two-branch closed form, then
// one Newton polish step (arccos/cbrt cost ~an ulp near the branch seam).
inline double xi_c(const Scalars& s) {
  const double a1 = s.alpha1;
  const double a0 = -0.5 * (s.B * s.B * s.D * s.D + s.tau * s.tau);
  const double delta = 27.0 * a0 + 4.0 * a1 * a1 * a1;

  double xc;
  if (delta > 0.0) {
    // Three real roots; only this combination is positive.  delta > 0 forces
    // alpha1 > 0, so the division is safe; clamp absorbs rounding at the seam.
    double arg = 1.0 + 13.5 * a0 / (a1 * a1 * a1);
    arg = std::min(1.0, std::max(-1.0, arg));
    const double theta = std::acos(arg);
    xc = -(a1 / 3.0) * (1.0 - 2.0 * std::cos(theta / 3.0 - M_PI / 3.0));
  } else {
    const double x1 = a1 * a1 * a1 + 13.5 * a0;
    const double x2 = 1.5 * std::sqrt(3.0 * a0 * delta);  // a0, delta <= 0
    xc = -(a1 + std::cbrt(x1 + x2) + std::cbrt(x1 - x2)) / 3.0;
  }

  const double dfc = xc * (3.0 * xc + 2.0 * a1);
  if (dfc != 0.0 && std::isfinite(dfc)) xc -= cubic_fc(xc, s) / dfc;

  const double scale = std::max({1.0, std::abs(a1 * a1 * a1), std::abs(a0)});
  if (!(xc > 0.0) || !(std::abs(cubic_fc(xc, s)) <= 1e-10 * scale))
    throw std::runtime_error("xi_c: closed-form root failed residual check");
  return xc;
}

// Cheap initial-guess candidate (Phi(U) - 2(B^2 - E)) / 3.  Requires an
// admissible state (positive radicand).
inline double xi_d(const Scalars& s) {
  const double rad =
      s.alpha1 * s.alpha1 + 3.0 * (s.E * s.E - (s.D * s.D + s.m * s.m));
  if (!(rad >= 0.0)) throw std::domain_error("xi_d: state not admissible");
  return (std::sqrt(rad) - 2.0 * s.alpha1) / 3.0;
}

// Simple upper bound on the physical root.
inline double xi_upper(const Scalars& s) { return 2.0 * s.E - s.B * s.B; }

namespace detail {

// Joint evaluation of F and F' at xi, with either Lorentz form.  Empty when
// W (or the EOS inversion) is not real there.
struct FdF {
  double f;
  double df;
  double w;
};

inline std::optional<FdF> eval_f_df(double xi, const Scalars& s, const Eos& eos,
                                    bool naive_w) {
  const auto wopt = naive_w ? lorentz_w_naive(xi, s) : lorentz_w_stable(xi, s);
  if (!wopt) return std::nullopt;
  const double w = *wopt;
  const double B2 = s.B * s.B;
  const double eta = xi + B2;
  const double w2 = w * w;
  const double phi_a = -(s.beta1 / (xi * xi * xi) + s.beta2 / (eta * eta * eta));

  double f, df;
  if (eos.kind() == EosKind::GammaLaw) {
    const double g0 = eos.gamma0();
    f = xi - g0 * (xi / w2 - s.D / w) -
        0.5 * (B2 / w2 + s.tau * s.tau / (xi * xi)) + s.alpha1;
    df = 1.0 + B2 * phi_a + s.tau * s.tau / (xi * xi * xi) -
         g0 * (1.0 / w2 - 2.0 * xi * phi_a + s.D * w * phi_a);
  } else {
    const double h = xi / (s.D * w);
    const double x = pressure_ratio(eos, h);
    const double xp = pressure_ratio_deriv(eos, h);
    if (!std::isfinite(x) || !std::isfinite(xp)) return std::nullopt;
    const double p = (s.D / w) * x;
    f = xi - p - 0.5 * (B2 / w2 + s.tau * s.tau / (xi * xi)) + s.alpha1;
    df = 1.0 + B2 * phi_a + s.tau * s.tau / (xi * xi * xi) +
         x * (s.D * w) * phi_a + xp * (xi * phi_a - 1.0 / w2);
  }
  if (!std::isfinite(f) || !std::isfinite(df)) return std::nullopt;
  return FdF{f, df, w};
}

}  // namespace detail

// Master function F(xi); its unique root in Omega2 is rho h W^2.
inline std::optional<double> master_f(double xi, const Scalars& s, const Eos& eos) {
  const auto e = detail::eval_f_df(xi, s, eos, /*naive_w=*/false);
  if (!e) return std::nullopt;
  return e->f;
}

// Variant built on the textbook Lorentz form, for round-off studies.
inline std::optional<double> master_f_naive(double xi, const Scalars& s,
                                            const Eos& eos) {
  const auto e = detail::eval_f_df(xi, s, eos, /*naive_w=*/true);
  if (!e) return std::nullopt;
  return e->f;
}

// F'(xi); positive everywhere on Omega1.
inline double master_df(double xi, const Scalars& s, const Eos& eos) {
  const auto e = detail::eval_f_df(xi, s, eos, /*naive_w=*/false);
  if (!e) throw std::domain_error("master_df: xi outside Omega1");
  return e->df;
}

struct MasterEval {
  double xi = 0.0;
  std::optional<double> w;
  std::optional<double> f;
  std::optional<double> df;
  bool pcp_ok = false;  // xi > 0 and f_b(xi) > 0
};

inline MasterEval master_eval(double xi, const Scalars& s, const Eos& eos) {
  MasterEval ev;
  ev.xi = xi;
  ev.pcp_ok = xi > 0.0 && aux_quartics(xi, s).fb > 0.0;
  if (const auto e = detail::eval_f_df(xi, s, eos, false)) {
    ev.w = e->w;
    ev.f = e->f;
    ev.df = e->df;
  }
  return ev;
}

// ---------------------------------------------------------------------------
// Diagnostic location of xi_a (largest non-negative root of f_a) and xi_b
// (unique root of f_b above it).  Sign-change scan on a geometric grid of
// [0, xi_upper], refined by bisection to ~1e-12 relative.  Never used in the
// recovery path.

struct BracketRoots {
  double xi_a;
  double xi_b;
};

namespace detail {

template <class F>
double bisect_sign_change(F&& f, double lo, double hi, double flo) {
  // keeps the invariant sign(f(lo)) == sign(flo) != sign(f(hi))
  for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline BracketRoots bracket_roots_ab(const Scalars& s) {
  const double hi = xi_upper(s);
  if (!(hi > 0.0)) throw std::runtime_error("bracket_roots_ab: 2E - B^2 <= 0");
  const auto fa = [&s](double x) { return aux_quartics(x, s).fa; };
  const auto fb = [&s](double x) { return aux_quartics(x, s).fb; };

  // Scan down from xi_upper; f_a > 0 everywhere above xi_a, so the first
  // non-positive sample brackets the largest root.
  double xi_a = 0.0;
  {
    const int n = 640;
    const double ratio = std::pow(1e-20, 1.0 / n);
    double above = hi;
    bool found = false;
    for (int i = 1; i <= n; ++i) {
      const double x = hi * std::pow(ratio, i);
      const double v = fa(x);
      if (v <= 0.0) {
        xi_a = (v == 0.0) ? x : detail::bisect_sign_change(fa, x, above, v);
        found = true;
        break;
      }
      above = x;
    }
    if (!found) xi_a = 0.0;  // below scan floor or exactly zero
  }

  // f_b < 0 just above xi_a and > 0 at xi_upper.
  double lo = std::max(xi_a * (1.0 + 1e-9), hi * 1e-20);
  double flo = fb(lo);
  if (!(flo < 0.0)) {
    // start did not land inside (xi_a, xi_b); creep up geometrically
    bool ok = false;
    for (double x = lo * 2.0; x < hi; x *= 2.0) {
      flo = fb(x);
      if (flo < 0.0) {
        lo = x;
        ok = true;
        break;
      }
    }
    if (!ok) throw std::runtime_error("bracket_roots_ab: failed to bracket xi_b");
  }
  if (!(fb(hi) > 0.0))
    throw std::runtime_error("bracket_roots_ab: f_b(xi_upper) <= 0");
  const double xi_b = detail::bisect_sign_change(fb, lo, hi, flo);
  return {xi_a, xi_b};
}

}  // namespace rmhd
