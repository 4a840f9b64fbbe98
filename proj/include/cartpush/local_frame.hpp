#ifndef CARTPUSH_LOCAL_FRAME_HPP_
#define CARTPUSH_LOCAL_FRAME_HPP_

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "cartpush/se2.hpp"

namespace cartpush {

/// Virtual two-link arm coordinates [theta1, theta2, R, L].
///
/// Joint1 sits at the arm base, Joint2 at the midpoint between the grippers
/// and the end-effector at the cart center. theta1 is the orientation of
/// Link1 relative to the base heading, theta2 the relative orientation of
/// Link2 at the gripper midpoint, R the Link1 length and L the gripper
/// separation along the handle.
struct LocalCoords {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double R = 0.4;
  double L = 0.5;

  /// Total deflection of Link2 relative to the base heading.
  double theta_def() const { return theta1 + theta2; }
};

/// Workspace box for the local coordinates. Exceeding it is a scenario
/// failure, not a hard fault.
struct WorkspaceLimits {
  double theta_max = kPi / 2.0;  // applies to |theta1| and |theta2|
  double r_min = 0.05;
  double r_max = 0.8;

  bool contains(const LocalCoords& psi) const {
    return std::abs(psi.theta1) < theta_max && std::abs(psi.theta2) < theta_max &&
           psi.R >= r_min && psi.R <= r_max;
  }
};

/// Geometry of the two identical planar 3-DoF arms plus the cart half-link.
struct ArmGeometry {
  double l1 = 0.45;
  double l2 = 0.45;
  double l3 = 0.25;
  double mount_y_left = 0.22;    // shoulder offset of the left arm in base frame
  double mount_y_right = -0.22;  // shoulder offset of the right arm
  double mount_x = 0.0;
  double cart_half_link = 0.4;  // L_c, gripper midpoint to cart center

  double reach() const { return l1 + l2 + l3; }
  Eigen::Vector2d mount(bool left) const {
    return {mount_x, left ? mount_y_left : mount_y_right};
  }
};

/// Joint angles of both arms, radians.
struct JointConfig {
  Eigen::Vector3d q_left = Eigen::Vector3d::Zero();
  Eigen::Vector3d q_right = Eigen::Vector3d::Zero();
};

/// World cart pose from the base pose and local coordinates.
/// With theta1 = theta2 = 0 the cart sits straight ahead of the base at
/// distance R + L_c with matching heading.
Pose2 cart_pose_from_base(const Pose2& base, const LocalCoords& psi, double cart_half_link);

/// Base pose from world cart pose and local coordinates (inverse chain).
Pose2 base_pose_from_cart(const Pose2& cart, const LocalCoords& psi, double cart_half_link);

/// Gripper target poses (left, right) in the base frame; the mapping g.
std::pair<Transform2, Transform2> arm_targets_from_local(const LocalCoords& psi);

/// Inverse of arm_targets_from_local; the mapping g^-1.
///
/// `expected_l` enables the rigid-handle length check. Throws
/// InconsistentGrasp when targets violate the symmetric rigid grasp beyond
/// `grasp_tol` (meters for lengths, radians for orientation mismatch).
LocalCoords local_from_arm_targets(const Transform2& left, const Transform2& right,
                                   std::optional<double> expected_l = std::nullopt,
                                   double grasp_tol = 1e-6);

/// Jacobians of the left/right gripper pose (x, y, phi) with respect to
/// (theta1, theta2, R), evaluated on the virtual arm.
std::pair<Eigen::Matrix3d, Eigen::Matrix3d> virtual_jacobians(const LocalCoords& psi);

}  // namespace cartpush

#endif  // CARTPUSH_LOCAL_FRAME_HPP_
