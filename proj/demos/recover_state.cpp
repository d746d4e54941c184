// Minimal library walkthrough: build a state, forward-map it, recover it.

#include <cstdio>

#include "rmhd/rmhd.hpp"

int main() {
  using namespace rmhd;

  const Eos eos = Eos::gamma_law(5.0 / 3.0);
  Primitive q;
  q.rho = 1.0;
  q.v = {0.3, -0.2, 0.1};
  q.B = {1.0, 0.5, -0.4};
  q.p = 0.5;

  const Conserved u = prim_to_cons(q, eos);
  std::printf("conserved: D=%g E=%g |m|=%g admissible=%d\n", u.D, u.E,
              u.m.norm(), is_admissible(u));

  SolverConfig cfg;  // hybrid start, tol 1e-14
  const RecoveryResult res = recover(u, eos, cfg);
  std::printf("status=%s xi=%.17g iterations=%d start=%s\n",
              to_string(res.report.status), res.report.xi,
              res.report.iterations, to_string(res.report.initial_kind));
  if (res.primitive) {
    const Primitive& r = *res.primitive;
    std::printf("recovered: rho=%.17g p=%.17g v=(%.17g, %.17g, %.17g)\n", r.rho,
                r.p, r.v.x, r.v.y, r.v.z);
  }
  return res.report.status == RecoveryStatus::Converged ? 0 : 1;
}
