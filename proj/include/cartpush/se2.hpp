#ifndef CARTPUSH_SE2_HPP_
#define CARTPUSH_SE2_HPP_

#include <Eigen/Dense>

#include "cartpush/angles.hpp"

namespace cartpush {

/// An SE(2) pose (x, y, theta) with theta kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  Eigen::Vector2d position() const { return {x, y}; }
  Eigen::Vector2d heading() const { return {std::cos(theta), std::sin(theta)}; }
};

/// Homogeneous SE(2) transform. The rotation block stays orthonormal with
/// determinant +1 and the bottom row is (0, 0, 1).
class Transform2 {
 public:
  Transform2() : m_(Eigen::Matrix3d::Identity()) {}

  static Transform2 identity() { return Transform2(); }
  static Transform2 rotation(double angle);
  static Transform2 translation(double x, double y);
  static Transform2 from_parts(double angle, const Eigen::Vector2d& t);
  static Transform2 from_pose(const Pose2& p) { return from_parts(p.theta, {p.x, p.y}); }

  Pose2 to_pose() const;
  double angle() const { return std::atan2(m_(1, 0), m_(0, 0)); }
  Eigen::Vector2d translation_part() const { return m_.block<2, 1>(0, 2); }
  Eigen::Matrix2d rotation_part() const { return m_.block<2, 2>(0, 0); }
  const Eigen::Matrix3d& matrix() const { return m_; }

  Transform2 inverse() const;
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;

  friend Transform2 operator*(const Transform2& a, const Transform2& b);

 private:
  explicit Transform2(const Eigen::Matrix3d& m) : m_(m) {}
  Eigen::Matrix3d m_;
};

/// Standard homogeneous product a then b applied from the right.
Transform2 compose(const Transform2& a, const Transform2& b);

}  // namespace cartpush

#endif  // CARTPUSH_SE2_HPP_
