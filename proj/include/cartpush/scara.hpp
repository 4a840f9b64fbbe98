#ifndef CARTPUSH_SCARA_HPP_
#define CARTPUSH_SCARA_HPP_

#include <utility>

#include "cartpush/local_frame.hpp"

namespace cartpush {

/// Elbow solution of the planar 3R inverse kinematics. kOut keeps each arm's
/// elbow away from the handle (left arm elbow to the left, right arm elbow to
/// the right).
enum class ElbowBranch { kOut, kIn };

struct IkOptions {
  ElbowBranch left = ElbowBranch::kOut;
  ElbowBranch right = ElbowBranch::kOut;
  double singular_eps = 1e-6;  // |cos q2| within this of 1 flags NearSingular
};

struct IkResult {
  JointConfig q;
  bool near_singular_left = false;
  bool near_singular_right = false;
};

/// Forward kinematics of both planar 3R arms; gripper poses in base frame.
std::pair<Transform2, Transform2> scara_fk(const JointConfig& q, const ArmGeometry& geom);

/// Inverse kinematics for both arms. Throws Unreachable when a target lies
/// outside the position annulus of the 2R subchain.
IkResult scara_ik(const Transform2& left_target, const Transform2& right_target,
                  const ArmGeometry& geom, const IkOptions& opts = {});

/// Geometric Jacobians (x, y, phi vs the three joint angles) of both arms.
std::pair<Eigen::Matrix3d, Eigen::Matrix3d> real_jacobians(const JointConfig& q,
                                                           const ArmGeometry& geom);

}  // namespace cartpush

#endif  // CARTPUSH_SCARA_HPP_
