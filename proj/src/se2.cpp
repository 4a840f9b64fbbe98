#include "cartpush/se2.hpp"

namespace cartpush {

Transform2 Transform2::rotation(double angle) {
  return from_parts(angle, Eigen::Vector2d::Zero());
}

Transform2 Transform2::translation(double x, double y) {
  return from_parts(0.0, {x, y});
}

Transform2 Transform2::from_parts(double angle, const Eigen::Vector2d& t) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  m.block<2, 1>(0, 2) = t;
  return Transform2(m);
}

Pose2 Transform2::to_pose() const { return {m_(0, 2), m_(1, 2), angle()}; }

Transform2 Transform2::inverse() const {
  const Eigen::Matrix2d rt = rotation_part().transpose();
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.block<2, 2>(0, 0) = rt;
  m.block<2, 1>(0, 2) = -rt * translation_part();
  return Transform2(m);
}

Eigen::Vector2d Transform2::apply(const Eigen::Vector2d& p) const {
  return rotation_part() * p + translation_part();
}

Transform2 operator*(const Transform2& a, const Transform2& b) {
  // Re-derive the product from angle and translation so the rotation block
  // never drifts from orthonormality under long composition chains.
  const double angle = a.angle() + b.angle();
  const Eigen::Vector2d t = a.rotation_part() * b.translation_part() + a.translation_part();
  return Transform2::from_parts(angle, t);
}

Transform2 compose(const Transform2& a, const Transform2& b) { return a * b; }

}  // namespace cartpush
