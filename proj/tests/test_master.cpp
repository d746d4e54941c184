#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>

#include "oracles.hpp"
#include "rmhd/master.hpp"

using namespace rmhd;
using Catch::Approx;

namespace {

// Independent root location for f_a / f_b: geometric scan from the top plus
// plain bisection.  Mirrors none of the library's internals.
double oracle_xi_a(const Scalars& s) {
  const auto fa = [&](double x) { return aux_quartics(x, s).fa; };
  const double hi = xi_upper(s);
  double above = hi;
  for (int i = 1; i <= 4000; ++i) {
    const double x = hi * std::pow(1e-22, i / 4000.0);
    if (fa(x) <= 0.0) return oracle::bisect(fa, x, above);
    above = x;
  }
  return 0.0;
}

double oracle_xi_b(const Scalars& s) {
  const auto fb = [&](double x) { return aux_quartics(x, s).fb; };
  const double hi = xi_upper(s);
  double lo = hi * 1e-22;
  while (!(fb(lo) < 0.0) && lo < hi) lo *= 2.0;
  return oracle::bisect(fb, lo, hi);
}

const Scalars static_mag = derived_scalars({1.0, {}, {1.0, 0.0, 0.0}, 2.5});
const Scalars pure_hydro = derived_scalars({1.0, {}, {}, 2.0});

}  // namespace

TEST_CASE("stable Lorentz factor on closed-form states") {
  CHECK(*lorentz_w_stable(3.0, static_mag) == Approx(1.0).epsilon(1e-15));

  // B-free reduction W = xi / sqrt((xi+m)(xi-m))
  Scalars s{};
  s.m = 0.6;
  s.alpha2 = -0.6;
  s.beta2 = 0.36;
  s.D = 1.0;
  s.E = 2.0;
  s.alpha1 = -2.0;
  CHECK(*lorentz_w_stable(1.0, s) == Approx(1.25).epsilon(1e-14));
  CHECK(*lorentz_w_naive(1.0, s) == Approx(1.25).epsilon(1e-14));
}

TEST_CASE("Lorentz factor goes non-real below xi_a") {
  // magnetized, oblique momentum so that tau != 0 and xi_a > 0
  const Eos g2 = Eos::gamma_law(2.0);
  const Primitive q{1.0, {0.9, 0.1, 0.0}, {1.0, 0.5, 0.0}, 0.5};
  const Scalars s = derived_scalars(prim_to_cons(q, g2));
  const double xa = oracle_xi_a(s);
  REQUIRE(xa > 0.0);
  CHECK_FALSE(lorentz_w_stable(0.5 * xa, s).has_value());
  CHECK(lorentz_w_stable(1.5 * xa, s).has_value());
  CHECK_FALSE(lorentz_w_naive(0.5 * xa, s).has_value());
}

TEST_CASE("stable and naive Lorentz forms agree at moderate scales") {
  bench::SplitMix64 rng(21);
  int tested = 0;
  for (int i = 0; i < 4000 && tested < 300; ++i) {
    Primitive q;
    q.rho = 0.1 + 10.0 * rng.uniform01();
    const double vmag = 0.9 * rng.uniform01();
    Vec3 u{2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0,
           2.0 * rng.uniform01() - 1.0};
    if (u.norm2() == 0.0) continue;
    q.v = (vmag / u.norm()) * u;
    q.p = 0.1 + 10.0 * rng.uniform01();
    q.B = {8.0 * rng.uniform01() - 4.0, 8.0 * rng.uniform01() - 4.0,
           8.0 * rng.uniform01() - 4.0};
    const Eos eos = Eos::gamma_law(1.0 + 0.9 * rng.uniform01() + 0.05);
    const Conserved c = prim_to_cons(q, eos);
    const Scalars s = derived_scalars(c);
    // keep to the moderate regime the agreement claim is about
    if (s.D < 1e-2 || s.D > 1e2 || s.E < 1e-2 || s.E > 1e2) continue;
    if (s.B > 1e2 || s.m > 1e2) continue;
    ++tested;
    const double xb = oracle_xi_b(s);
    for (int k = 1; k <= 10; ++k) {
      const double xi = xb * (1.0 + 1e-3) +
                        (xi_upper(s) - xb * (1.0 + 1e-3)) * k / 10.0;
      if (!(xi >= 1e-2 && xi <= 1e2)) continue;
      const auto ws = lorentz_w_stable(xi, s);
      const auto wn = lorentz_w_naive(xi, s);
      REQUIRE(ws.has_value());
      REQUIRE(wn.has_value());
      CHECK(std::abs(*ws - *wn) / *ws < 1e-10);
    }
  }
  REQUIRE(tested >= 100);
}

TEST_CASE("master function reduces to the linear closed form") {
  const Eos g2 = Eos::gamma_law(2.0);
  // pure hydro U=(1,0,0,2): F(xi) = xi/2 - 3/2
  for (const double xi : {0.5, 1.0, 2.0, 2.9, 3.0, 3.5, 4.0}) {
    CHECK(*master_f(xi, pure_hydro, g2) ==
          Approx(0.5 * xi - 1.5).margin(1e-14));
    CHECK(master_df(xi, pure_hydro, g2) == Approx(0.5).epsilon(1e-14));
  }
  CHECK(*master_f(3.0, pure_hydro, g2) == 0.0);

  // static magnetized: same line on the physical range, root at 3
  for (const double xi : {1.5, 2.0, 3.0, 4.0}) {
    CHECK(*master_f(xi, static_mag, g2) == Approx(0.5 * xi - 1.5).margin(1e-14));
  }
}

TEST_CASE("forward-map residual: F(rho h W^2) ~ 0 on random states") {
  for (const auto suite : {bench::Suite::Suite1, bench::Suite::Suite2}) {
    for (uint64_t i = 0; i < 1000; ++i) {
      const auto d = oracle::draw_state(suite, 31, i);
      const Scalars s = derived_scalars(d.u);
      const auto f = master_f(d.xi_true, s, d.eos);
      REQUIRE(f.has_value());
      CHECK(std::abs(*f) < 1e-8 * std::max(1.0, d.u.E));
    }
  }
}

TEST_CASE("master derivative matches finite differences inside Omega2") {
  for (uint64_t i = 0; i < 200; ++i) {
    const auto d = oracle::draw_state(bench::Suite::Suite1, 32, i);
    const Scalars s = derived_scalars(d.u);
    const double xb = oracle_xi_b(s);
    for (int k = 1; k <= 5; ++k) {
      const double xi = xb * (1.0 + 0.1 * k) + (d.xi_true - xb) * k / 5.0;
      const double fd = oracle::central_diff(
          [&](double x) { return *master_f(x, s, d.eos); }, xi, xi * 1e-7);
      const double df = master_df(xi, s, d.eos);
      CHECK(df == Approx(fd).epsilon(1e-5));
      CHECK(df > 0.0);
    }
  }
}

TEST_CASE("auxiliary quartics") {
  SECTION("pure hydro factorizations") {
    // B=0, tau=0, D=1, m=0: f_b = xi^4 - xi^2
    for (const double xi : {0.5, 1.0, 2.0}) {
      const auto [fa, fb] = aux_quartics(xi, pure_hydro);
      CHECK(fa == Approx(xi * xi * xi * xi).epsilon(1e-15));
      CHECK(fb == Approx(xi * xi * xi * xi - xi * xi).margin(1e-15));
    }
  }
  SECTION("static magnetized factorization f_b = (xi^2-1)(xi+1)^2") {
    for (const double xi : {0.5, 1.0, 1.5, 3.0}) {
      const auto fb = aux_quartics(xi, static_mag).fb;
      CHECK(fb ==
            Approx((xi * xi - 1.0) * (xi + 1.0) * (xi + 1.0)).margin(1e-12));
    }
  }
  SECTION("f_b positive at the physical root") {
    for (uint64_t i = 0; i < 1000; ++i) {
      const auto d = oracle::draw_state(bench::Suite::Suite2, 33, i);
      const Scalars s = derived_scalars(d.u);
      CHECK(aux_quartics(d.xi_true, s).fb > 0.0);
    }
  }
}

TEST_CASE("cubic f_c and its analytic root") {
  SECTION("pure hydro: f_c = xi^3 - 2 xi^2, root at E") {
    CHECK(cubic_fc(2.0, pure_hydro) == 0.0);
    CHECK(xi_c(pure_hydro) == Approx(2.0).epsilon(1e-15));
  }
  SECTION("static magnetized: delta <= 0 branch") {
    // f_c = xi^3 - 1.5 xi^2 - 0.5; cross-check branch quantities by hand
    const double a0 = -0.5, a1 = -1.5;
    CHECK(27.0 * a0 + 4.0 * a1 * a1 * a1 == Approx(-27.0));
    CHECK(a1 * a1 * a1 + 13.5 * a0 == Approx(-10.125));
    CHECK(1.5 * std::sqrt(3.0 * a0 * -27.0) == Approx(9.5459).margin(1e-4));
    const double expected = oracle::bisect(
        [&](double x) { return cubic_fc(x, static_mag); }, 1e-9, 2.0 * 2.5);
    CHECK(expected == Approx(1.678).margin(5e-4));
    CHECK(xi_c(static_mag) == Approx(expected).epsilon(1e-13));
  }
  SECTION("sign sweep: negative below the root, positive above") {
    const double xc = xi_c(static_mag);
    for (int k = 1; k <= 20; ++k) {
      CHECK(cubic_fc(xc * k / 21.0, static_mag) < 0.0);
      CHECK(cubic_fc(xc * (1.0 + 0.5 * k), static_mag) > 0.0);
    }
  }
  SECTION("residual and polish stability on random states") {
    for (const auto suite : {bench::Suite::Suite1, bench::Suite::Suite2}) {
      for (uint64_t i = 0; i < 5000; ++i) {
        const auto d = oracle::draw_state(suite, 34, i);
        const Scalars s = derived_scalars(d.u);
        const double xc = xi_c(s);
        REQUIRE(std::isfinite(xc));
        REQUIRE(xc > 0.0);
        const double e3 = std::max(1.0, s.E * s.E * s.E);
        REQUIRE(std::abs(cubic_fc(xc, s)) / e3 < 1e-12);
        // one extra polish step barely moves it
        const double dfc = xc * (3.0 * xc + 2.0 * s.alpha1);
        const double polished = xc - cubic_fc(xc, s) / dfc;
        REQUIRE(std::abs(polished - xc) <= 1e-10 * xc);
      }
    }
  }
}

TEST_CASE("xi_d values and root ordering") {
  CHECK(xi_d(pure_hydro) ==
        Approx((std::sqrt(13.0) + 4.0) / 3.0).epsilon(1e-14));
  CHECK(xi_d(pure_hydro) == Approx(2.535).margin(5e-4));
  CHECK(xi_d(static_mag) ==
        Approx((std::sqrt(18.0) + 3.0) / 3.0).epsilon(1e-14));
  CHECK(xi_d(static_mag) == Approx(2.414).margin(5e-4));

  Scalars bad{};  // E too small: negative radicand
  bad.D = 2.0;
  bad.m = 3.0;
  bad.E = 0.1;
  bad.alpha1 = -0.1;
  CHECK_THROWS_AS(xi_d(bad), std::domain_error);

  for (uint64_t i = 0; i < 2000; ++i) {
    const auto d = oracle::draw_state(bench::Suite::Suite1, 35, i);
    const Scalars s = derived_scalars(d.u);
    const double xa = oracle_xi_a(s);
    const double xb = oracle_xi_b(s);
    const double xc = xi_c(s);
    const double xd = xi_d(s);
    CAPTURE(xa, xb, xc, xd);
    REQUIRE(xd > xc);
    REQUIRE(xc > xb);
    REQUIRE(xb >= xa);
  }
}

TEST_CASE("xi_upper bounds the physical root") {
  CHECK(xi_upper(pure_hydro) == Approx(4.0));
  CHECK(xi_upper(static_mag) == Approx(4.0));
  for (uint64_t i = 0; i < 2000; ++i) {
    const auto d = oracle::draw_state(bench::Suite::Suite2, 36, i);
    CHECK(xi_upper(derived_scalars(d.u)) > d.xi_true);
  }
}

TEST_CASE("bracket_roots_ab") {
  SECTION("static magnetized: xi_a = 0, xi_b = 1") {
    const auto br = bracket_roots_ab(static_mag);
    CHECK(br.xi_a == 0.0);
    CHECK(br.xi_b == Approx(1.0).epsilon(1e-11));
  }
  SECTION("B-free state with momentum: xi_b = sqrt(1.36)") {
    Scalars s{};
    s.m = 0.6;
    s.alpha2 = -0.6;
    s.beta2 = 0.36;
    s.D = 1.0;
    s.E = 2.0;
    s.alpha1 = -2.0;
    const auto br = bracket_roots_ab(s);
    CHECK(br.xi_b == Approx(std::sqrt(1.36)).epsilon(1e-11));
  }
  SECTION("agrees with the oracle on random states") {
    for (uint64_t i = 0; i < 300; ++i) {
      const auto d = oracle::draw_state(bench::Suite::Suite1, 37, i);
      const Scalars s = derived_scalars(d.u);
      const auto br = bracket_roots_ab(s);
      const double xb = oracle_xi_b(s);
      CHECK(br.xi_b == Approx(xb).epsilon(1e-10));
      CHECK(br.xi_a >= 0.0);
      CHECK(br.xi_b > br.xi_a);
    }
  }
}

TEST_CASE("F is increasing and its derivative positive on the safe range") {
  for (uint64_t i = 0; i < 300; ++i) {
    const auto d = oracle::draw_state(bench::Suite::Suite1, 38, i);
    const Scalars s = derived_scalars(d.u);
    const double xb = oracle_xi_b(s);
    const double lo = xb * (1.0 + 1e-6);
    const double hi = xi_upper(s);
    double prev = -std::numeric_limits<double>::infinity();
    double fmax = 0.0;
    for (int k = 0; k < 64; ++k) {
      const double xi = lo * std::pow(hi / lo, (k + 1) / 64.0);
      const auto f = master_f(xi, s, d.eos);
      REQUIRE(f.has_value());
      fmax = std::max(fmax, std::abs(*f));
      CHECK(*f >= prev - 1e-12 * fmax);
      prev = *f;
      CHECK(master_df(xi, s, d.eos) > 0.0);
    }
  }
}

TEST_CASE("bracketing inequality F(xi_c) <= 0 <= F(xi_upper)") {
  for (const auto suite : {bench::Suite::Suite1, bench::Suite::Suite2}) {
    for (uint64_t i = 0; i < 2000; ++i) {
      const auto d = oracle::draw_state(suite, 39, i);
      const Scalars s = derived_scalars(d.u);
      const auto fc = master_f(xi_c(s), s, d.eos);
      const auto fu = master_f(xi_upper(s), s, d.eos);
      REQUIRE(fc.has_value());
      REQUIRE(fu.has_value());
      CHECK(*fc <= 0.0);
      CHECK(*fu >= 0.0);
    }
  }
  // fixed-EOS variants as well
  for (uint64_t i = 0; i < 500; ++i) {
    for (const Eos& eos : {Eos::mathews(), Eos::ryu_chattopadhyay()}) {
      const auto d = oracle::draw_state(bench::Suite::Suite1, 40, i, false, eos);
      const Scalars s = derived_scalars(d.u);
      CHECK(*master_f(xi_c(s), s, eos) <= 0.0);
      CHECK(*master_f(xi_upper(s), s, eos) >= 0.0);
    }
  }
}
