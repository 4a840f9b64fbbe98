#ifndef CARTPUSH_CONTROL_LAWS_HPP_
#define CARTPUSH_CONTROL_LAWS_HPP_

#include <Eigen/Dense>
#include <utility>

#include "cartpush/local_frame.hpp"
#include "cartpush/scara.hpp"

namespace cartpush {

/// Measured local-coordinate state the arm controllers act on.
struct LocalState {
  Eigen::Vector3d z = Eigen::Vector3d::Zero();     // theta1, theta2, R
  Eigen::Vector3d zdot = Eigen::Vector3d::Zero();  // their rates
};

/// Piecewise power-law error shaping: linear inside |e| < delta with slope
/// delta^(sigma-1), |e|^sigma * sign(e) outside. Odd and continuous.
double fal(double e, double sigma, double delta);

/// Han's time-optimal synthesis function; output saturates at |r|.
double fhan(double x1, double x2, double r, double h);

/// Geometric angle error: vee of the skew part of Rhat^T R. Equals
/// sin(theta - theta_hat) exactly.
double geometric_error(double theta, double theta_hat);

/// Tracking differentiator for one channel: z1 follows the target through
/// the fhan reference dynamics, z2 is the rate, hard-clamped at v_max.
struct TdState {
  double z1 = 0.0;
  double z2 = 0.0;
  double r = 100.0;     // aggressiveness of the reference dynamics
  double v_max = 2.0;   // hard rate limit
};

TdState td_step(const TdState& td, double target, double h);

/// Gains of the nonlinear disturbance rejection law plus the baseline
/// parameter blocks.
struct ControlGains {
  double beta1 = 60.0;
  double beta2 = 15.0;
  Eigen::Vector3d sigma1{0.8, 0.8, 0.9};
  Eigen::Vector3d sigma2{0.9, 0.9, 0.9};
  Eigen::Vector3d delta1{0.01, 0.01, 0.01};
  Eigen::Vector3d delta2{0.01, 0.01, 0.01};
  Eigen::Vector3d b_z{2.0, 3.0, 5.0};  // nominal inertia parameters

  // joint-space PD block
  Eigen::Vector3d kp_joint{2.0, 2.0, 2.0};
  Eigen::Vector3d kd_joint{0.2, 0.2, 0.2};

  // flat-output PD block (PD+F, DPD)
  Eigen::Vector3d kp_flat{25.0, 25.0, 25.0};
  Eigen::Vector3d kd_flat{6.0, 6.0, 6.0};
  Eigen::Vector3d ki_dpd{5.0, 5.0, 5.0};

  // MRAC block
  double a_m = 8.0;
  double b_m = 64.0;
  double gamma_z = 10000.0;
  double gamma_r = 10000.0;
  double mrac_gain_cap = 400.0;
  double zd_filter_tau = 0.15;
};

/// Nonlinear control force u_z = beta1 fal(e) + beta2 fal(edot), with the
/// geometric error on the two angle channels and linear error on R. The
/// rate error carries the cos(theta_d - theta) factor of the geometric
/// error derivative.
Eigen::Vector3d adrc_control_force(const Eigen::Vector3d& z_d, const Eigen::Vector3d& zdot_d,
                                   const LocalState& state, const ControlGains& g);

/// Full disturbance rejection law: tau = (u_z - xi_hat) / b_z elementwise.
Eigen::Vector3d adrc_control(const Eigen::Vector3d& z_d, const Eigen::Vector3d& zdot_d,
                             const LocalState& state, const Eigen::Vector3d& xi_hat,
                             const ControlGains& g);

/// Compensation force to joint torques: tau_l = eta J_l^T Jv_l^-T tau, the
/// right arm takes the (1 - eta) share. Throws SingularJacobian when either
/// real Jacobian is ill-conditioned.
std::pair<Eigen::Vector3d, Eigen::Vector3d> force_projection(
    const Eigen::Vector3d& tau_theta, const LocalCoords& psi, const JointConfig& q,
    double eta, const ArmGeometry& geom);

struct TorqueCommand {
  Eigen::Vector3d tau_left = Eigen::Vector3d::Zero();
  Eigen::Vector3d tau_right = Eigen::Vector3d::Zero();
  bool saturated = false;
};

/// Sums joint PD and projected compensation torques, saturating per joint.
TorqueCommand command_torque(const Eigen::Vector3d& pd_left, const Eigen::Vector3d& pd_right,
                             const Eigen::Vector3d& com_left,
                             const Eigen::Vector3d& com_right, double tau_limit);

}  // namespace cartpush

#endif  // CARTPUSH_CONTROL_LAWS_HPP_
