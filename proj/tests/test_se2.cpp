#include <random>

#include "cartpush/errors.hpp"
#include "cartpush/local_frame.hpp"
#include "doctest.h"

using namespace cartpush;

namespace {

// Independent oracle for the base->cart map: direct trigonometry in the
// world frame, no Transform2 involved.
Pose2 cart_pose_oracle(const Pose2& base, const LocalCoords& psi, double lc) {
  const double a1 = base.theta + psi.theta1;
  const double ad = base.theta + psi.theta_def();
  return {base.x + psi.R * std::cos(a1) + lc * std::cos(ad),
          base.y + psi.R * std::sin(a1) + lc * std::sin(ad), ad};
}

std::mt19937_64 rng(12345);

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

LocalCoords random_psi() {
  LocalCoords psi;
  psi.theta1 = uniform(-1.4, 1.4);
  psi.theta2 = uniform(-1.4, 1.4);
  psi.R = uniform(0.1, 0.8);
  psi.L = uniform(0.3, 0.7);
  return psi;
}

}  // namespace

TEST_CASE("angle wrapping stays in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2.0 * kPi) == doctest::Approx(0.0));
  for (int i = 0; i < 1000; ++i) {
    const double a = wrap_angle(uniform(-50.0, 50.0));
    CHECK(a > -kPi);
    CHECK(a <= kPi);
  }
}

TEST_CASE("compose: identity and inverse") {
  const Transform2 t = Transform2::from_parts(0.7, {1.2, -0.4});
  const Transform2 id = Transform2::identity();
  CHECK((compose(id, t).matrix() - t.matrix()).norm() == doctest::Approx(0.0));
  CHECK((compose(t, t.inverse()).matrix() - id.matrix()).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("compose: rot(pi/2) then trans(1,0) maps origin to (0,1)") {
  const Transform2 t = compose(Transform2::rotation(kPi / 2.0), Transform2::translation(1.0, 0.0));
  const Eigen::Vector2d p = t.apply({0.0, 0.0});
  CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(1.0));
}

TEST_CASE("cart_pose_from_base: centered pose collinearity") {
  const Pose2 sc = cart_pose_from_base({0, 0, 0}, {0, 0, 0.3, 0.5}, 0.4);
  CHECK(sc.x == doctest::Approx(0.7));
  CHECK(sc.y == doctest::Approx(0.0));
  CHECK(sc.theta == doctest::Approx(0.0));
}

TEST_CASE("cart_pose_from_base: R = 0 degenerate") {
  const Pose2 sc = cart_pose_from_base({0, 0, 0}, {0, 0, 0.0, 0.5}, 0.4);
  CHECK(sc.x == doctest::Approx(0.4));
  CHECK(sc.y == doctest::Approx(0.0));
}

TEST_CASE("cart_pose_from_base matches the trig oracle") {
  const Pose2 base{1.0, 2.0, kPi / 4.0};
  const LocalCoords psi{0.2, -0.1, 0.3, 0.5};
  const Pose2 got = cart_pose_from_base(base, psi, 0.4);
  const Pose2 want = cart_pose_oracle(base, psi, 0.4);
  CHECK(got.x == doctest::Approx(want.x).epsilon(1e-12));
  CHECK(got.y == doctest::Approx(want.y).epsilon(1e-12));
  CHECK(got.theta == doctest::Approx(want.theta).epsilon(1e-12));

  for (int i = 0; i < 200; ++i) {
    const Pose2 b{uniform(-5, 5), uniform(-5, 5), uniform(-kPi, kPi)};
    const LocalCoords p = random_psi();
    const Pose2 g = cart_pose_from_base(b, p, 0.4);
    const Pose2 w = cart_pose_oracle(b, p, 0.4);
    CHECK(g.x == doctest::Approx(w.x).epsilon(1e-10));
    CHECK(g.y == doctest::Approx(w.y).epsilon(1e-10));
    CHECK(std::abs(angle_diff(g.theta, w.theta)) < 1e-12);
  }
}

TEST_CASE("cart_pose_from_base is equivariant under world displacements") {
  for (int i = 0; i < 100; ++i) {
    const Pose2 base{uniform(-2, 2), uniform(-2, 2), uniform(-kPi, kPi)};
    const LocalCoords psi = random_psi();
    const Transform2 d = Transform2::from_parts(uniform(-kPi, kPi), {uniform(-3, 3), uniform(-3, 3)});

    const Pose2 moved_base = (d * Transform2::from_pose(base)).to_pose();
    const Pose2 lhs = cart_pose_from_base(moved_base, psi, 0.4);
    const Pose2 rhs =
        (d * Transform2::from_pose(cart_pose_from_base(base, psi, 0.4))).to_pose();
    CHECK(lhs.x == doctest::Approx(rhs.x).epsilon(1e-10));
    CHECK(lhs.y == doctest::Approx(rhs.y).epsilon(1e-10));
    CHECK(std::abs(angle_diff(lhs.theta, rhs.theta)) < 1e-10);
  }
}

TEST_CASE("base_pose_from_cart inverts cart_pose_from_base") {
  for (int i = 0; i < 100; ++i) {
    const Pose2 base{uniform(-2, 2), uniform(-2, 2), uniform(-kPi, kPi)};
    const LocalCoords psi = random_psi();
    const Pose2 cart = cart_pose_from_base(base, psi, 0.4);
    const Pose2 back = base_pose_from_cart(cart, psi, 0.4);
    CHECK(back.x == doctest::Approx(base.x).epsilon(1e-10));
    CHECK(back.y == doctest::Approx(base.y).epsilon(1e-10));
    CHECK(std::abs(angle_diff(back.theta, base.theta)) < 1e-10);
  }
}

TEST_CASE("arm_targets_from_local: symmetry about the forward axis") {
  const auto [tl, tr] = arm_targets_from_local({0, 0, 0.3, 0.5});
  CHECK(tl.translation_part().x() == doctest::Approx(0.3));
  CHECK(tl.translation_part().y() == doctest::Approx(0.25));
  CHECK(tr.translation_part().x() == doctest::Approx(0.3));
  CHECK(tr.translation_part().y() == doctest::Approx(-0.25));
  CHECK(tl.angle() == doctest::Approx(0.0));
}

TEST_CASE("arm_targets_from_local: handle rotated 90 degrees about the midpoint") {
  const auto [tl, tr] = arm_targets_from_local({0, kPi / 2.0, 0.3, 0.5});
  // handle axis swings from +-y to -+x around the midpoint (0.3, 0)
  CHECK(tl.translation_part().x() == doctest::Approx(0.05));
  CHECK(tl.translation_part().y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tr.translation_part().x() == doctest::Approx(0.55));
  CHECK(tr.translation_part().y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tl.angle() == doctest::Approx(kPi / 2.0));
}

TEST_CASE("arm targets: midpoint at distance R, separation exactly L") {
  for (int i = 0; i < 500; ++i) {
    const LocalCoords psi = random_psi();
    const auto [tl, tr] = arm_targets_from_local(psi);
    const Eigen::Vector2d mid = 0.5 * (tl.translation_part() + tr.translation_part());
    CHECK(mid.norm() == doctest::Approx(psi.R).epsilon(1e-12));
    CHECK((tl.translation_part() - tr.translation_part()).norm() ==
          doctest::Approx(psi.L).epsilon(1e-12));
  }
}

TEST_CASE("local_from_arm_targets: round trip over the valid box") {
  for (int i = 0; i < 10000; ++i) {
    const LocalCoords psi = random_psi();
    const auto [tl, tr] = arm_targets_from_local(psi);
    const LocalCoords back = local_from_arm_targets(tl, tr);
    CHECK(back.theta1 == doctest::Approx(psi.theta1).epsilon(1e-9));
    CHECK(back.theta2 == doctest::Approx(psi.theta2).epsilon(1e-9));
    CHECK(back.R == doctest::Approx(psi.R).epsilon(1e-9));
    CHECK(back.L == doctest::Approx(psi.L).epsilon(1e-9));
  }
}

TEST_CASE("local_from_arm_targets: straight-ahead and rotated-midpoint cases") {
  const auto [tl, tr] = arm_targets_from_local({0, 0, 0.4, 0.5});
  const LocalCoords straight = local_from_arm_targets(tl, tr);
  CHECK(straight.theta1 == doctest::Approx(0.0));
  CHECK(straight.theta2 == doctest::Approx(0.0));

  // rotate the whole rigid pair by 0.3 rad about the arm base
  const Transform2 rot = Transform2::rotation(0.3);
  const LocalCoords turned = local_from_arm_targets(rot * tl, rot * tr);
  CHECK(turned.theta1 == doctest::Approx(0.3));
  CHECK(turned.theta2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("local_from_arm_targets rejects inconsistent grasps") {
  const auto [tl, tr] = arm_targets_from_local({0.1, 0.2, 0.4, 0.5});
  CHECK_THROWS_AS(local_from_arm_targets(tl, tr, 0.6), InconsistentGrasp);
  const Transform2 twisted = tr * Transform2::rotation(0.01);
  CHECK_THROWS_AS(local_from_arm_targets(tl, twisted), InconsistentGrasp);
}

TEST_CASE("virtual_jacobians match central finite differences") {
  const double step = 1e-6;
  double max_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const LocalCoords psi = random_psi();
    const auto [jl, jr] = virtual_jacobians(psi);
    for (int col = 0; col < 3; ++col) {
      LocalCoords plus = psi, minus = psi;
      double* fields_p[3] = {&plus.theta1, &plus.theta2, &plus.R};
      double* fields_m[3] = {&minus.theta1, &minus.theta2, &minus.R};
      *fields_p[col] += step;
      *fields_m[col] -= step;
      const auto [pl, pr] = arm_targets_from_local(plus);
      const auto [ml, mr] = arm_targets_from_local(minus);
      for (int row = 0; row < 2; ++row) {
        const double fd_l =
            (pl.translation_part()[row] - ml.translation_part()[row]) / (2.0 * step);
        const double fd_r =
            (pr.translation_part()[row] - mr.translation_part()[row]) / (2.0 * step);
        max_err = std::max(max_err, std::abs(fd_l - jl(row, col)));
        max_err = std::max(max_err, std::abs(fd_r - jr(row, col)));
      }
      const double fd_phi_l = angle_diff(pl.angle(), ml.angle()) / (2.0 * step);
      max_err = std::max(max_err, std::abs(fd_phi_l - jl(2, col)));
    }
  }
  CHECK(max_err < 1e-5);
}

TEST_CASE("virtual_jacobians: R column and tangential theta1 column at center") {
  const LocalCoords psi{0, 0, 0.3, 0.5};
  const auto [jl, jr] = virtual_jacobians(psi);
  // d(left)/dR is the unit forward vector
  CHECK(jl(0, 2) == doctest::Approx(1.0));
  CHECK(jl(1, 2) == doctest::Approx(0.0));
  CHECK(jl(2, 2) == doctest::Approx(0.0));
  // midpoint theta1 column: pure tangential velocity of magnitude R
  const Eigen::Vector2d mid_col = 0.5 * (jl.block<2, 1>(0, 0) + jr.block<2, 1>(0, 0));
  CHECK(mid_col.norm() == doctest::Approx(psi.R));
  CHECK(mid_col.dot(Eigen::Vector2d{1.0, 0.0}) == doctest::Approx(0.0));
}
