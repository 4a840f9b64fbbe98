#include "cartpush/control_laws.hpp"

#include <cmath>

#include "cartpush/errors.hpp"

namespace cartpush {

double fal(double e, double sigma, double delta) {
  if (std::abs(e) < delta) return e / std::pow(delta, 1.0 - sigma);
  return std::pow(std::abs(e), sigma) * (e > 0.0 ? 1.0 : -1.0);
}

double fhan(double x1, double x2, double r, double h) {
  const double d = r * h;
  const double d0 = h * d;
  const double y = x1 + h * x2;
  double a;
  if (std::abs(y) > d0) {
    const double a0 = std::sqrt(d * d + 8.0 * r * std::abs(y));
    a = x2 + 0.5 * (a0 - d) * (y > 0.0 ? 1.0 : -1.0);
  } else {
    a = x2 + y / h;
  }
  if (std::abs(a) > d) return -r * (a > 0.0 ? 1.0 : -1.0);
  return -r * a / d;
}

double geometric_error(double theta, double theta_hat) {
  const auto rot = [](double a) {
    Eigen::Matrix2d m;
    m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return m;
  };
  const Eigen::Matrix2d r = rot(theta);
  const Eigen::Matrix2d rh = rot(theta_hat);
  const Eigen::Matrix2d skew = 0.5 * (rh.transpose() * r - r.transpose() * rh);
  return skew(1, 0);  // vee of [[0,-a],[a,0]]
}

TdState td_step(const TdState& td, double target, double h) {
  TdState out = td;
  out.z1 = td.z1 + h * td.z2;
  out.z2 = td.z2 + h * fhan(td.z1 - target, td.z2, td.r, h);
  out.z2 = std::clamp(out.z2, -td.v_max, td.v_max);
  return out;
}

Eigen::Vector3d adrc_control_force(const Eigen::Vector3d& z_d,
                                   const Eigen::Vector3d& zdot_d, const LocalState& state,
                                   const ControlGains& g) {
  Eigen::Vector3d e, edot;
  for (int i = 0; i < 2; ++i) {
    e[i] = geometric_error(z_d[i], state.z[i]);
    edot[i] = std::cos(z_d[i] - state.z[i]) * (zdot_d[i] - state.zdot[i]);
  }
  e[2] = z_d[2] - state.z[2];
  edot[2] = zdot_d[2] - state.zdot[2];

  Eigen::Vector3d u;
  for (int i = 0; i < 3; ++i) {
    u[i] = g.beta1 * fal(e[i], g.sigma1[i], g.delta1[i]) +
           g.beta2 * fal(edot[i], g.sigma2[i], g.delta2[i]);
  }
  return u;
}

Eigen::Vector3d adrc_control(const Eigen::Vector3d& z_d, const Eigen::Vector3d& zdot_d,
                             const LocalState& state, const Eigen::Vector3d& xi_hat,
                             const ControlGains& g) {
  const Eigen::Vector3d u = adrc_control_force(z_d, zdot_d, state, g);
  return (u - xi_hat).cwiseQuotient(g.b_z);
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> force_projection(
    const Eigen::Vector3d& tau_theta, const LocalCoords& psi, const JointConfig& q,
    double eta, const ArmGeometry& geom) {
  const auto [jv_l, jv_r] = virtual_jacobians(psi);
  const auto [j_l, j_r] = real_jacobians(q, geom);

  auto project = [&tau_theta](const Eigen::Matrix3d& j_real, const Eigen::Matrix3d& j_virt,
                              double share) {
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(j_real);
    const double cond = svd.singularValues()(0) / svd.singularValues()(2);
    if (!std::isfinite(cond) || cond > 1e6) {
      throw SingularJacobian("real arm Jacobian condition number above 1e6");
    }
    // tau = share * J^T (Jv^T)^-1 tau_theta; Jv^T is invertible away from
    // the R = 0 fold, solve instead of forming the inverse.
    const Eigen::Vector3d wrench =
        j_virt.transpose().fullPivLu().solve(tau_theta);
    return Eigen::Vector3d(share * j_real.transpose() * wrench);
  };

  return {project(j_l, jv_l, eta), project(j_r, jv_r, 1.0 - eta)};
}

TorqueCommand command_torque(const Eigen::Vector3d& pd_left, const Eigen::Vector3d& pd_right,
                             const Eigen::Vector3d& com_left,
                             const Eigen::Vector3d& com_right, double tau_limit) {
  TorqueCommand cmd;
  cmd.tau_left = pd_left + com_left;
  cmd.tau_right = pd_right + com_right;
  for (int i = 0; i < 3; ++i) {
    for (Eigen::Vector3d* tau : {&cmd.tau_left, &cmd.tau_right}) {
      if (std::abs((*tau)[i]) > tau_limit) {
        (*tau)[i] = std::clamp((*tau)[i], -tau_limit, tau_limit);
        cmd.saturated = true;
      }
    }
  }
  return cmd;
}

}  // namespace cartpush
