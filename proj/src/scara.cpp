#include "cartpush/scara.hpp"

#include <cmath>
#include <sstream>

#include "cartpush/errors.hpp"

namespace cartpush {

namespace {

Transform2 arm_fk(const Eigen::Vector3d& q, const Eigen::Vector2d& mount,
                  const ArmGeometry& g) {
  const double a1 = q[0];
  const double a12 = q[0] + q[1];
  const double a123 = a12 + q[2];
  const Eigen::Vector2d p =
      mount + g.l1 * Eigen::Vector2d{std::cos(a1), std::sin(a1)} +
      g.l2 * Eigen::Vector2d{std::cos(a12), std::sin(a12)} +
      g.l3 * Eigen::Vector2d{std::cos(a123), std::sin(a123)};
  return Transform2::from_parts(a123, p);
}

// elbow_sign +1 places the elbow on the -y side of the shoulder-to-wrist
// line (q2 = +acos), -1 on the +y side.
Eigen::Vector3d arm_ik(const Transform2& target, const Eigen::Vector2d& mount,
                       const ArmGeometry& g, double elbow_sign, double eps,
                       bool* near_singular) {
  const double phi = target.angle();
  // wrist center: pull back along the gripper heading by l3
  const Eigen::Vector2d w =
      target.translation_part() - g.l3 * Eigen::Vector2d{std::cos(phi), std::sin(phi)} - mount;
  const double d2 = w.squaredNorm();
  const double c2 = (d2 - g.l1 * g.l1 - g.l2 * g.l2) / (2.0 * g.l1 * g.l2);
  if (c2 > 1.0 + 1e-12 || c2 < -1.0 - 1e-12) {
    std::ostringstream os;
    os << "wrist target at distance " << std::sqrt(d2) << " outside annulus ["
       << std::abs(g.l1 - g.l2) << ", " << g.l1 + g.l2 << "]";
    throw Unreachable(os.str());
  }
  const double c2c = std::clamp(c2, -1.0, 1.0);
  *near_singular = std::abs(c2c) > 1.0 - eps;
  const double q2 = elbow_sign * std::acos(c2c);
  const double q1 =
      std::atan2(w.y(), w.x()) - std::atan2(g.l2 * std::sin(q2), g.l1 + g.l2 * std::cos(q2));
  const double q3 = wrap_angle(phi - q1 - q2);
  return {wrap_angle(q1), q2, q3};
}

double elbow_sign_for(bool left_arm, ElbowBranch branch) {
  // Elbow-out keeps the left elbow on the +y side and the right elbow on
  // the -y side, clear of the handle between them.
  const double out_sign = left_arm ? -1.0 : 1.0;
  return branch == ElbowBranch::kOut ? out_sign : -out_sign;
}

}  // namespace

std::pair<Transform2, Transform2> scara_fk(const JointConfig& q, const ArmGeometry& geom) {
  return {arm_fk(q.q_left, geom.mount(true), geom),
          arm_fk(q.q_right, geom.mount(false), geom)};
}

IkResult scara_ik(const Transform2& left_target, const Transform2& right_target,
                  const ArmGeometry& geom, const IkOptions& opts) {
  IkResult r;
  r.q.q_left = arm_ik(left_target, geom.mount(true), geom, elbow_sign_for(true, opts.left),
                      opts.singular_eps, &r.near_singular_left);
  r.q.q_right = arm_ik(right_target, geom.mount(false), geom,
                       elbow_sign_for(false, opts.right), opts.singular_eps,
                       &r.near_singular_right);
  return r;
}

std::pair<Eigen::Matrix3d, Eigen::Matrix3d> real_jacobians(const JointConfig& q,
                                                           const ArmGeometry& g) {
  auto one = [&g](const Eigen::Vector3d& qa) {
    const double a1 = qa[0];
    const double a12 = qa[0] + qa[1];
    const double a123 = a12 + qa[2];
    const double s1 = std::sin(a1), c1 = std::cos(a1);
    const double s12 = std::sin(a12), c12 = std::cos(a12);
    const double s123 = std::sin(a123), c123 = std::cos(a123);
    Eigen::Matrix3d j;
    j << -g.l1 * s1 - g.l2 * s12 - g.l3 * s123, -g.l2 * s12 - g.l3 * s123, -g.l3 * s123,
         g.l1 * c1 + g.l2 * c12 + g.l3 * c123, g.l2 * c12 + g.l3 * c123, g.l3 * c123,
         1.0, 1.0, 1.0;
    return j;
  };
  return {one(q.q_left), one(q.q_right)};
}

}  // namespace cartpush
