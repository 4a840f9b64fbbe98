#ifndef CARTPUSH_OBSERVERS_HPP_
#define CARTPUSH_OBSERVERS_HPP_

#include <Eigen/Dense>

#include "cartpush/control_laws.hpp"

namespace cartpush {

/// Geometric disturbance observer for one steering channel. The attitude
/// estimate lives on SO(2) and is corrected through the sin-type geometric
/// error, the disturbance state integrates a fal-shaped injection.
struct GobState {
  Eigen::Matrix2d rot_hat = Eigen::Matrix2d::Identity();
  double omega_hat = 0.0;
  double d_hat = 0.0;

  double l1 = 30.0;
  double l2 = 300.0;
  double l3 = 1000.0;
  Eigen::Vector3d sigma{0.9, 0.7, 0.5};
  Eigen::Vector3d delta{0.01, 0.01, 0.01};
  double b = 2.0;          // nominal inertia parameter of the channel
  double xi_min = -10.0;
  double xi_max = 10.0;
  double windup_factor = 1.5;  // |d_hat| soft cap as a multiple of the clip range

  double theta_hat() const { return std::atan2(rot_hat(1, 0), rot_hat(0, 0)); }
  double xi_hat() const { return std::clamp(d_hat, xi_min, xi_max); }
};

/// One observer step from the measured angle and the applied channel force.
/// Throws NonFinite if the state leaves the finite range.
GobState gob_step(const GobState& g, double theta_measured, double u_applied, double h);

/// Third-order linear extended state observer for the R channel with
/// bandwidth-parameterized gains (3w, 3w^2, w^3).
struct EsoState {
  double z1 = 0.0;  // position estimate
  double z2 = 0.0;  // rate estimate
  double z3 = 0.0;  // disturbance estimate

  double omega_o = 20.0;
  double b = 5.0;
};

EsoState eso_step(const EsoState& e, double r_measured, double u_applied, double h);

}  // namespace cartpush

#endif  // CARTPUSH_OBSERVERS_HPP_
