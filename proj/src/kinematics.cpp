#include "cartpush/kinematics.hpp"

#include <cmath>

namespace cartpush {

Eigen::Vector2d offset_point_velocity(const Pose2& pose, const UnicycleCmd& cmd, double r) {
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  return {c * cmd.v - r * s * cmd.omega, s * cmd.v + r * c * cmd.omega};
}

UnicycleCmd unicycle_from_offset(const Pose2& pose, const Eigen::Vector2d& pdot, double r) {
  if (r <= kOffsetEps) throw DegenerateOffset("offset distance below 1e-6 m");
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  return {c * pdot.x() + s * pdot.y(), (-s * pdot.x() + c * pdot.y()) / r};
}

TTDerivative tt_derivative(const TTState& s, double v_c, double alpha,
                           const ModelParams& p) {
  constexpr double kSteerEps = 1e-6;
  if (std::abs(alpha) >= kPi / 2.0 - kSteerEps) {
    throw SteerSingular("virtual steering angle at +-pi/2");
  }
  const double ta = std::tan(alpha);
  const double c1 = std::cos(s.theta1), s1 = std::sin(s.theta1);
  const double t1 = std::tan(s.theta1);

  TTDerivative d;
  d.v0 = v_c * c1 * (1.0 + (p.R / p.L1) * ta * t1);
  d.dx_c = d.v0 * std::cos(s.theta0);
  d.dy_c = d.v0 * std::sin(s.theta0);
  d.dtheta0 = v_c * (s1 / p.L2 - (p.R / (p.L1 * p.L2)) * c1 * ta);
  d.dtheta1 = v_c * (ta / p.L1 - s1 / p.L2 + (p.R / (p.L1 * p.L2)) * c1 * ta);
  return d;
}

LFBaseCommands lf_base_commands(const LFState& s, const UnicycleCmd& mu_c,
                                const ModelParams& p) {
  if (p.R <= kOffsetEps || p.r_F <= kOffsetEps) {
    throw DegenerateOffset("LF model requires R and r_F above 1e-6 m");
  }
  const double c1 = std::cos(s.theta1), s1 = std::sin(s.theta1);
  const double c2 = std::cos(s.theta2), s2 = std::sin(s.theta2);
  // Leader back-point velocity split along / across the hitch direction.
  const double along = c2 * mu_c.v + p.r_L * s2 * mu_c.omega;   // w+ . mu_c
  const double across = s2 * mu_c.v - p.r_L * c2 * mu_c.omega;  // w- . mu_c

  LFBaseCommands out;
  out.v0 = along * c1;
  out.omega0 = along * s1 / p.r_F;
  out.omega2 = -across / p.R;
  out.omega1_rate = mu_c.omega - out.omega0 - out.omega2;
  return out;
}

LFDerivative lf_derivative(const LFState& s, const UnicycleCmd& mu_c, const ModelParams& p) {
  const LFBaseCommands b = lf_base_commands(s, mu_c, p);
  LFDerivative d;
  d.dx_c = mu_c.v * std::cos(s.theta_c);
  d.dy_c = mu_c.v * std::sin(s.theta_c);
  d.dtheta_c = mu_c.omega;
  d.dtheta1 = b.omega1_rate;
  d.dtheta2 = b.omega2;
  return d;
}

Eigen::VectorXd integrate_rk4(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& derivative,
    const Eigen::VectorXd& state, double dt, std::initializer_list<int> wrap) {
  const Eigen::VectorXd k1 = derivative(state);
  const Eigen::VectorXd k2 = derivative(state + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = derivative(state + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = derivative(state + dt * k3);
  if (!k1.allFinite() || !k2.allFinite() || !k3.allFinite() || !k4.allFinite()) {
    throw NonFinite("RK4 derivative evaluation is not finite");
  }
  Eigen::VectorXd next = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  for (int i : wrap) next[i] = wrap_angle(next[i]);
  return next;
}

}  // namespace cartpush
