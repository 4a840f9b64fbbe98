#ifndef CARTPUSH_KINEMATICS_HPP_
#define CARTPUSH_KINEMATICS_HPP_

#include <Eigen/Dense>
#include <functional>

#include "cartpush/errors.hpp"
#include "cartpush/se2.hpp"

namespace cartpush {

/// Longitudinal and angular velocity of a nonholonomic body.
struct UnicycleCmd {
  double v = 0.0;
  double omega = 0.0;
};

/// Truck-trailer state: cart position, base heading theta0 and hitch angle
/// theta1. The cart heading is theta0 + theta1, derived, never stored.
struct TTState {
  double x_c = 0.0;
  double y_c = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;

  double theta_c() const { return wrap_angle(theta0 + theta1); }
};

struct TTDerivative {
  double dx_c = 0.0;
  double dy_c = 0.0;
  double dtheta0 = 0.0;
  double dtheta1 = 0.0;
  double v0 = 0.0;  // induced base speed
};

/// Leader-follower state: cart pose plus the two virtual joint angles.
/// The base heading is theta_c - theta1 - theta2, derived.
struct LFState {
  double x_c = 0.0;
  double y_c = 0.0;
  double theta_c = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;

  double theta0() const { return wrap_angle(theta_c - theta1 - theta2); }
};

struct LFDerivative {
  double dx_c = 0.0;
  double dy_c = 0.0;
  double dtheta_c = 0.0;
  double dtheta1 = 0.0;
  double dtheta2 = 0.0;
};

/// Base and arm rates induced by a cart twist under the LF model.
struct LFBaseCommands {
  double v0 = 0.0;
  double omega0 = 0.0;
  double omega2 = 0.0;
  double omega1_rate = 0.0;  // dtheta1/dt = omega_c - omega0 - omega2
};

/// Shared kinematic parameters of the virtual models.
struct ModelParams {
  double R = 0.4;       // Link1 length / hitch length
  double L_c = 0.4;     // Link2 length, gripper midpoint to cart center
  double L = 0.5;       // gripper separation
  double L1 = 0.4;      // half virtual truck length (TT)
  double L2 = 0.6;      // virtual trailer length (TT)
  double r_L = 0.2;     // leader back-point offset (LF)
  double r_F = 0.2;     // follower front-point offset (LF)
};

inline constexpr double kOffsetEps = 1e-6;

/// Velocity of a point offset by r along the heading of a unicycle.
Eigen::Vector2d offset_point_velocity(const Pose2& pose, const UnicycleCmd& cmd, double r);

/// Unique unicycle command reproducing a desired offset-point velocity.
/// Throws DegenerateOffset for r <= kOffsetEps.
UnicycleCmd unicycle_from_offset(const Pose2& pose, const Eigen::Vector2d& pdot, double r);

/// Truck-trailer transition rates for control (v_c, alpha).
/// Throws SteerSingular when |alpha| >= pi/2 - eps.
TTDerivative tt_derivative(const TTState& s, double v_c, double alpha, const ModelParams& p);

/// Base and arm rates for a cart twist mu_c = (v_c, omega_c).
/// Throws DegenerateOffset on tiny R or r_F.
LFBaseCommands lf_base_commands(const LFState& s, const UnicycleCmd& mu_c,
                                const ModelParams& p);

/// Leader-follower transition rates.
LFDerivative lf_derivative(const LFState& s, const UnicycleCmd& mu_c, const ModelParams& p);

/// Classical RK4 step over a plain state vector. `wrap` lists indices of
/// angular components re-wrapped after the step. Throws NonFinite when a
/// derivative evaluation is not finite.
Eigen::VectorXd integrate_rk4(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& derivative,
    const Eigen::VectorXd& state, double dt, std::initializer_list<int> wrap = {});

}  // namespace cartpush

#endif  // CARTPUSH_KINEMATICS_HPP_
