#include "cartpush/local_frame.hpp"

#include <cmath>
#include <sstream>

#include "cartpush/errors.hpp"

namespace cartpush {

namespace {

// Base -> cart transform of the virtual chain: Link1 of length R at theta1,
// Link2 of length L_c at theta1 + theta2, end frame aligned with Link2.
Transform2 chain_transform(const LocalCoords& psi, double cart_half_link) {
  const Transform2 joint1 = Transform2::rotation(psi.theta1);
  const Transform2 link1 = Transform2::translation(psi.R, 0.0);
  const Transform2 joint2 = Transform2::rotation(psi.theta2);
  const Transform2 link2 = Transform2::translation(cart_half_link, 0.0);
  return joint1 * link1 * joint2 * link2;
}

}  // namespace

Pose2 cart_pose_from_base(const Pose2& base, const LocalCoords& psi, double cart_half_link) {
  const Transform2 t = Transform2::from_pose(base) * chain_transform(psi, cart_half_link);
  return t.to_pose();
}

Pose2 base_pose_from_cart(const Pose2& cart, const LocalCoords& psi, double cart_half_link) {
  const Transform2 t =
      Transform2::from_pose(cart) * chain_transform(psi, cart_half_link).inverse();
  return t.to_pose();
}

std::pair<Transform2, Transform2> arm_targets_from_local(const LocalCoords& psi) {
  const double def = psi.theta_def();
  const Eigen::Vector2d mid{psi.R * std::cos(psi.theta1), psi.R * std::sin(psi.theta1)};
  // Handle axis is perpendicular to Link2; the left gripper sits on the +y
  // side of the handle in the centered configuration.
  const Eigen::Vector2d axis{-std::sin(def), std::cos(def)};
  const Eigen::Vector2d pl = mid + 0.5 * psi.L * axis;
  const Eigen::Vector2d pr = mid - 0.5 * psi.L * axis;
  return {Transform2::from_parts(def, pl), Transform2::from_parts(def, pr)};
}

LocalCoords local_from_arm_targets(const Transform2& left, const Transform2& right,
                                   std::optional<double> expected_l, double grasp_tol) {
  const Eigen::Vector2d pl = left.translation_part();
  const Eigen::Vector2d pr = right.translation_part();
  const double orient_err = std::abs(angle_diff(left.angle(), right.angle()));
  if (orient_err > grasp_tol) {
    std::ostringstream os;
    os << "gripper orientations differ by " << orient_err << " rad";
    throw InconsistentGrasp(os.str());
  }
  const double span = (pl - pr).norm();
  if (expected_l && std::abs(span - *expected_l) > grasp_tol) {
    std::ostringstream os;
    os << "handle span " << span << " differs from expected " << *expected_l;
    throw InconsistentGrasp(os.str());
  }
  if (span <= grasp_tol) throw InconsistentGrasp("gripper targets coincide");

  const double def = left.angle();
  // The handle must be perpendicular to the common gripper heading.
  const Eigen::Vector2d axis = (pl - pr) / span;
  const Eigen::Vector2d expected_axis{-std::sin(def), std::cos(def)};
  if ((axis - expected_axis).norm() > 1e-4) {
    throw InconsistentGrasp("handle axis not perpendicular to gripper heading");
  }

  LocalCoords psi;
  const Eigen::Vector2d mid = 0.5 * (pl + pr);
  psi.L = span;
  psi.R = mid.norm();
  psi.theta1 = psi.R > 1e-12 ? std::atan2(mid.y(), mid.x()) : def;
  psi.theta2 = wrap_angle(def - psi.theta1);
  return psi;
}

std::pair<Eigen::Matrix3d, Eigen::Matrix3d> virtual_jacobians(const LocalCoords& psi) {
  const double def = psi.theta_def();
  const double c1 = std::cos(psi.theta1), s1 = std::sin(psi.theta1);
  const double cd = std::cos(def), sd = std::sin(def);
  const double hl = 0.5 * psi.L;

  Eigen::Matrix3d jl, jr;
  // columns: d/dtheta1, d/dtheta2, d/dR; rows: x, y, phi
  jl << -psi.R * s1 - hl * cd, -hl * cd, c1,
         psi.R * c1 - hl * sd, -hl * sd, s1,
         1.0, 1.0, 0.0;
  jr << -psi.R * s1 + hl * cd, hl * cd, c1,
         psi.R * c1 + hl * sd, hl * sd, s1,
         1.0, 1.0, 0.0;
  return {jl, jr};
}

}  // namespace cartpush
