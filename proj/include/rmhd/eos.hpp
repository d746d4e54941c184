#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>

// Equation-of-state layer.
//
// Every supported EOS closes the system through the specific enthalpy
// h = H(rho, p), and all three kinds depend on (rho, p) only through the
// ratio x = p/rho.  That structure is what makes the scalar con2prim
// reduction cheap: the inverse p = P(rho, h) is rho * x(h) with x(h) in
// closed form, so the master-function loop never needs an inner iteration.

namespace rmhd {

enum class EosKind { GammaLaw, Mathews, RyuChattopadhyay };

class Eos {
 public:
  static Eos gamma_law(double gamma) {
    if (!(gamma > 1.0 && gamma <= 2.0))
      throw std::domain_error("Eos: adiabatic index must satisfy 1 < gamma <= 2");
    return Eos(EosKind::GammaLaw, gamma);
  }
  static Eos mathews() { return Eos(EosKind::Mathews, 0.0); }
  static Eos ryu_chattopadhyay() { return Eos(EosKind::RyuChattopadhyay, 0.0); }

  EosKind kind() const { return kind_; }

  // Adiabatic index; meaningful for GammaLaw only.
  double gamma() const { return gamma_; }

  // (gamma-1)/gamma, the coefficient used throughout the gamma-law fast path.
  double gamma0() const { return (gamma_ - 1.0) / gamma_; }

  const char* name() const {
    switch (kind_) {
      case EosKind::GammaLaw: return "gamma";
      case EosKind::Mathews: return "mathews";
      case EosKind::RyuChattopadhyay: return "rc";
    }
    return "?";
  }

 private:
  Eos(EosKind k, double g) : kind_(k), gamma_(g) {}
  EosKind kind_;
  double gamma_;
};

namespace detail {

// h as a function of x = p/rho.
inline double enthalpy_of_ratio(const Eos& eos, double x) {
  switch (eos.kind()) {
    case EosKind::GammaLaw:
      return 1.0 + x / eos.gamma0();
    case EosKind::Mathews:
      return 2.5 * x + std::sqrt(2.25 * x * x + 1.0);
    case EosKind::RyuChattopadhyay:
      return 2.0 * (6.0 * x * x + 4.0 * x + 1.0) / (3.0 * x + 2.0);
  }
  return 0.0;
}

// Inverse map x(h), the branch with x -> 0+ as h -> 1+.  Returns NaN when the
// expression is not real (possible for RC at h well below 1; never for h > 1).
inline double pressure_ratio(const Eos& eos, double h) {
  switch (eos.kind()) {
    case EosKind::GammaLaw:
      return eos.gamma0() * (h - 1.0);
    case EosKind::Mathews:
      return (5.0 * h - std::sqrt(9.0 * h * h + 16.0)) / 8.0;
    case EosKind::RyuChattopadhyay: {
      const double r = 9.0 * h * h + 48.0 * h - 32.0;
      if (r < 0.0) return std::numeric_limits<double>::quiet_NaN();
      return (3.0 * h - 8.0 + std::sqrt(r)) / 24.0;
    }
  }
  return 0.0;
}

// d x / d h.  Positive for all h in the physical range (h > 1).
inline double pressure_ratio_deriv(const Eos& eos, double h) {
  switch (eos.kind()) {
    case EosKind::GammaLaw:
      return eos.gamma0();
    case EosKind::Mathews:
      return (5.0 - 9.0 * h / std::sqrt(9.0 * h * h + 16.0)) / 8.0;
    case EosKind::RyuChattopadhyay: {
      const double r = 9.0 * h * h + 48.0 * h - 32.0;
      if (r < 0.0) return std::numeric_limits<double>::quiet_NaN();
      return (3.0 + (9.0 * h + 24.0) / std::sqrt(r)) / 24.0;
    }
  }
  return 0.0;
}

inline void require_positive_finite(double rho, double p) {
  if (!(rho > 0.0) || !std::isfinite(rho) || !(p > 0.0) || !std::isfinite(p))
    throw std::domain_error("eos: rho and p must be positive and finite");
}

}  // namespace detail

// Specific enthalpy h = H(rho, p).  Always > 1 for positive inputs.
inline double enthalpy(const Eos& eos, double rho, double p) {
  detail::require_positive_finite(rho, p);
  return detail::enthalpy_of_ratio(eos, p / rho);
}

// Inverse EOS p = P(rho, h).
inline double pressure_from_enthalpy(const Eos& eos, double rho, double h) {
  if (!(rho > 0.0) || !std::isfinite(rho) || !(h > 1.0) || !std::isfinite(h))
    throw std::domain_error("eos: need rho > 0 and h > 1");
  return rho * detail::pressure_ratio(eos, h);
}

struct PressureDerivs {
  double dp_drho;  // P_rho at fixed h
  double dp_dh;    // P_h at fixed rho; > 0
};

// Partial derivatives of P(rho, h).  With P = rho * x(h) these are x(h) and
// rho * x'(h).
inline PressureDerivs dpressure(const Eos& eos, double rho, double h) {
  if (!(rho > 0.0) || !std::isfinite(rho) || !(h > 1.0) || !std::isfinite(h))
    throw std::domain_error("eos: need rho > 0 and h > 1");
  return {detail::pressure_ratio(eos, h), rho * detail::pressure_ratio_deriv(eos, h)};
}

// ---------------------------------------------------------------------------
// Causality/physicality conditions on a candidate enthalpy function:
//   1. H differentiable (finite values and difference quotients),
//   2. H >= sqrt(1 + p^2/rho^2) + p/rho,
//   3. H (1/rho - H_p) < H_rho < 0,
//   4. H -> 1 as p -> 0+ (checked by linear-decay of H-1 in p).
// Derivatives are taken by central differences with relative step 1e-7.

struct EosConditionReport {
  long checked = 0;
  long violations[4] = {0, 0, 0, 0};
  bool ok() const {
    return violations[0] == 0 && violations[1] == 0 && violations[2] == 0 &&
           violations[3] == 0;
  }
  long total_violations() const {
    return violations[0] + violations[1] + violations[2] + violations[3];
  }
};

template <class EnthalpyFn>
EosConditionReport check_enthalpy_conditions(
    EnthalpyFn&& H, std::span<const std::pair<double, double>> samples) {
  EosConditionReport rep;
  for (const auto& [rho, p] : samples) {
    if (!(rho > 0.0 && p > 0.0)) throw std::domain_error("samples must be positive");
    ++rep.checked;
    const double h = H(rho, p);

    const double dp = p * 1e-7;
    const double dr = rho * 1e-7;
    const double h_p = (H(rho, p + dp) - H(rho, p - dp)) / (2.0 * dp);
    const double h_r = (H(rho + dr, p) - H(rho - dr, p)) / (2.0 * dr);

    if (!std::isfinite(h) || !std::isfinite(h_p) || !std::isfinite(h_r))
      ++rep.violations[0];

    const double x = p / rho;
    const double bound = std::sqrt(1.0 + x * x) + x;
    // FD noise allowance on the strict inequalities.
    const double slack2 = 1e-9 * std::max(1.0, bound);
    if (!(h >= bound - slack2)) ++rep.violations[1];

    const double lhs = h * (1.0 / rho - h_p);
    const double slack3 = 1e-5 * (std::abs(lhs) + std::abs(h_r) + 1e-300);
    if (!(lhs < h_r + slack3 && h_r < slack3)) ++rep.violations[2];

    // h(rho, rho*t) - 1 must decay at least linearly in t.
    const double e1 = H(rho, rho * 1e-6) - 1.0;
    const double e2 = H(rho, rho * 1e-8) - 1.0;
    if (!(e1 > 0.0 && e2 > 0.0 && e2 <= e1 / 50.0)) ++rep.violations[3];
  }
  return rep;
}

inline EosConditionReport check_eos_conditions(
    const Eos& eos, std::span<const std::pair<double, double>> samples) {
  return check_enthalpy_conditions(
      [&eos](double rho, double p) { return detail::enthalpy_of_ratio(eos, p / rho); },
      samples);
}

}  // namespace rmhd
