#include "cartpush/observers.hpp"

#include <cmath>

#include "cartpush/errors.hpp"

namespace cartpush {

GobState gob_step(const GobState& g, double theta_measured, double u_applied, double h) {
  const double e = geometric_error(theta_measured, g.theta_hat());

  GobState out = g;
  // Exponential-map step, exact on SO(2): advance the estimate by the
  // corrected rate as an angle increment, then rebuild the matrix so the
  // rotation block never drifts from orthonormality.
  const double rate = g.omega_hat + g.l1 * fal(e, g.sigma[0], g.delta[0]);
  const double angle = g.theta_hat() + h * rate;
  out.rot_hat << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  out.omega_hat =
      g.omega_hat + h * (g.b * u_applied + g.l2 * fal(e, g.sigma[1], g.delta[1]) + g.d_hat);
  out.d_hat = g.d_hat + h * g.l3 * fal(e, g.sigma[2], g.delta[2]);
  // the estimate may run past the clip bounds, but only so far that it can
  // unwind quickly once the disturbance steps back down
  const double cap = g.windup_factor * std::max(std::abs(g.xi_min), std::abs(g.xi_max));
  out.d_hat = std::clamp(out.d_hat, -cap, cap);

  if (!std::isfinite(out.omega_hat) || !std::isfinite(out.d_hat)) {
    throw NonFinite("GOB state diverged");
  }
  return out;
}

EsoState eso_step(const EsoState& e, double r_measured, double u_applied, double h) {
  const double err = r_measured - e.z1;
  const double w = e.omega_o;

  EsoState out = e;
  out.z1 = e.z1 + h * (e.z2 + 3.0 * w * err);
  out.z2 = e.z2 + h * (e.b * u_applied + e.z3 + 3.0 * w * w * err);
  out.z3 = e.z3 + h * (w * w * w * err);
  if (!std::isfinite(out.z1) || !std::isfinite(out.z2) || !std::isfinite(out.z3)) {
    throw NonFinite("ESO state diverged");
  }
  return out;
}

}  // namespace cartpush
