#pragma once

#include <cmath>
#include <stdexcept>

#include "rmhd/eos.hpp"

namespace rmhd {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
  double norm2() const { return dot(*this, *this); }
  double norm() const { return std::sqrt(norm2()); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

// Physical description: rest-mass density, velocity (c = 1), magnetic field,
// thermal pressure.  Valid states have rho > 0, p > 0, |v| < 1.
struct Primitive {
  double rho = 0.0;
  Vec3 v;
  Vec3 B;
  double p = 0.0;

  bool physical() const {
    return rho > 0.0 && std::isfinite(rho) && p > 0.0 && std::isfinite(p) &&
           v.finite() && v.norm2() < 1.0 && B.finite();
  }
};

// Evolved description: lab-frame density, momentum density, magnetic field,
// energy density.
struct Conserved {
  double D = 0.0;
  Vec3 m;
  Vec3 B;
  double E = 0.0;

  bool finite() const {
    return std::isfinite(D) && m.finite() && B.finite() && std::isfinite(E);
  }
};

// Scalar reductions of a conserved state.  The master function and its
// derivative depend on the state only through these.
struct Scalars {
  double m = 0.0;       // |m|
  double B = 0.0;       // |B|
  double tau = 0.0;     // m . B
  double alpha1 = 0.0;  // B^2 - E
  double alpha2 = 0.0;  // B^2 - m
  double beta1 = 0.0;   // tau^2 / B^2, exactly 0 when B = 0
  double beta2 = 0.0;   // m^2 - beta1  (>= 0 by Cauchy-Schwarz)
  double D = 0.0;
  double E = 0.0;

  // Assemble from raw reductions; used by the profile tool where states are
  // specified directly by (D, E, m^2, B, tau).
  static Scalars from_raw(double D, double E, double m2, double B, double tau) {
    if (!(m2 >= 0.0) || !(B >= 0.0))
      throw std::domain_error("Scalars: m^2 and B must be non-negative");
    if (tau * tau > m2 * B * B * (1.0 + 1e-12))
      throw std::domain_error("Scalars: tau^2 exceeds m^2 B^2");
    Scalars s;
    s.m = std::sqrt(m2);
    s.B = B;
    s.tau = tau;
    s.alpha1 = B * B - E;
    s.alpha2 = B * B - s.m;
    s.beta1 = (B == 0.0) ? 0.0 : (tau * tau) / (B * B);
    s.beta2 = std::max(0.0, m2 - s.beta1);
    s.D = D;
    s.E = E;
    return s;
  }
};

// Forward map Q -> U.
inline Conserved prim_to_cons(const Primitive& q, const Eos& eos) {
  const double v2 = q.v.norm2();
  if (!(v2 < 1.0)) throw std::domain_error("prim_to_cons: |v| >= 1");
  const double h = enthalpy(eos, q.rho, q.p);  // validates rho, p
  const double inv_w2 = 1.0 - v2;
  const double W = 1.0 / std::sqrt(inv_w2);
  const double B2 = q.B.norm2();
  const double vB = dot(q.v, q.B);
  const double rhohW2 = q.rho * h * W * W;
  const double p_tot = q.p + 0.5 * (inv_w2 * B2 + vB * vB);

  Conserved u;
  u.D = q.rho * W;
  u.m = rhohW2 * q.v + B2 * q.v - vB * q.B;
  u.B = q.B;
  u.E = rhohW2 - p_tot + B2;
  return u;
}

inline Scalars derived_scalars(const Conserved& u) {
  Scalars s;
  s.m = u.m.norm();
  s.B = u.B.norm();
  s.tau = dot(u.m, u.B);
  const double B2 = u.B.norm2();
  s.alpha1 = B2 - u.E;
  s.alpha2 = B2 - s.m;
  s.beta1 = (B2 == 0.0) ? 0.0 : (s.tau * s.tau) / B2;
  s.beta2 = std::max(0.0, u.m.norm2() - s.beta1);
  s.D = u.D;
  s.E = u.E;
  return s;
}

// Admissibility functions.  `real` is false when an intermediate radicand is
// negative; that only happens for inadmissible states, so callers treat it as
// "not admissible" rather than an error.
struct AdmissibilityEval {
  double phi = 0.0;
  double psi = 0.0;
  bool real = false;
};

inline AdmissibilityEval admissibility_functions(const Conserved& u) {
  AdmissibilityEval a;
  const double B2 = u.B.norm2();
  const double m2 = u.m.norm2();
  const double tau = dot(u.m, u.B);
  const double a1 = B2 - u.E;
  const double rad = a1 * a1 + 3.0 * (u.E * u.E - u.D * u.D - m2);
  if (!(rad >= 0.0)) return a;  // not computable: inadmissible
  a.phi = std::sqrt(rad);
  const double under = a.phi + a1;
  if (!(under >= 0.0)) return a;
  a.psi = (a.phi - 2.0 * a1) * std::sqrt(under) -
          std::sqrt(13.5 * (u.D * u.D * B2 + tau * tau));
  a.real = std::isfinite(a.phi) && std::isfinite(a.psi);
  return a;
}

// Membership test for the admissible set: D > 0, E > sqrt(D^2 + |m|^2),
// Psi > 0, all strict.
inline bool is_admissible(const Conserved& u) {
  if (!u.finite()) return false;
  if (!(u.D > 0.0)) return false;
  if (!(u.E - std::sqrt(u.D * u.D + u.m.norm2()) > 0.0)) return false;
  const AdmissibilityEval a = admissibility_functions(u);
  return a.real && a.psi > 0.0;
}

}  // namespace rmhd
