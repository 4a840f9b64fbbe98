#include <random>

#include "cartpush/kinematics.hpp"
#include "doctest.h"

using namespace cartpush;

namespace {

std::mt19937_64 rng(4242);
double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::VectorXd lf_state_vec(const LFState& s) {
  Eigen::VectorXd v(5);
  v << s.x_c, s.y_c, s.theta_c, s.theta1, s.theta2;
  return v;
}

LFState lf_from_vec(const Eigen::VectorXd& v) {
  return {v[0], v[1], v[2], v[3], v[4]};
}

Eigen::VectorXd lf_rate(const Eigen::VectorXd& v, const UnicycleCmd& mu, const ModelParams& p) {
  const LFDerivative d = lf_derivative(lf_from_vec(v), mu, p);
  Eigen::VectorXd out(5);
  out << d.dx_c, d.dy_c, d.dtheta_c, d.dtheta1, d.dtheta2;
  return out;
}

}  // namespace

TEST_CASE("offset_point_velocity basic directions") {
  CHECK(offset_point_velocity({0, 0, 0}, {1.0, 0.0}, 1.0).isApprox(Eigen::Vector2d{1, 0}));
  CHECK(offset_point_velocity({0, 0, 0}, {0.0, 1.0}, 1.0).isApprox(Eigen::Vector2d{0, 1}));
}

TEST_CASE("offset_point_velocity: Lambda mu at theta = pi/2") {
  const Eigen::Vector2d v = offset_point_velocity({0, 0, kPi / 2.0}, {1.0, 0.5}, 2.0);
  CHECK(v.x() == doctest::Approx(-1.0));
  CHECK(v.y() == doctest::Approx(1.0));
}

TEST_CASE("unicycle_from_offset: frozen expected values and round trip") {
  const UnicycleCmd straight = unicycle_from_offset({0, 0, 0}, {0.0, 1.0}, 1.0);
  CHECK(straight.v == doctest::Approx(0.0));
  CHECK(straight.omega == doctest::Approx(1.0));

  const UnicycleCmd diag = unicycle_from_offset({0, 0, kPi / 4.0}, {1.0, 0.0}, 0.5);
  CHECK(diag.v == doctest::Approx(std::cos(kPi / 4.0)));
  CHECK(diag.omega == doctest::Approx(-2.0 * std::sin(kPi / 4.0)));

  for (int i = 0; i < 1000; ++i) {
    const Pose2 pose{uniform(-2, 2), uniform(-2, 2), uniform(-kPi, kPi)};
    const double r = uniform(0.05, 1.0);
    const Eigen::Vector2d pdot{uniform(-2, 2), uniform(-2, 2)};
    const UnicycleCmd mu = unicycle_from_offset(pose, pdot, r);
    const Eigen::Vector2d back = offset_point_velocity(pose, mu, r);
    CHECK((back - pdot).norm() < 1e-12);
  }
}

TEST_CASE("unicycle_from_offset rejects degenerate offsets") {
  CHECK_THROWS_AS(unicycle_from_offset({0, 0, 0}, {1.0, 0.0}, 0.0), DegenerateOffset);
  CHECK_THROWS_AS(unicycle_from_offset({0, 0, 0}, {1.0, 0.0}, 1e-9), DegenerateOffset);
}

TEST_CASE("tt_derivative: straight roll and zero input") {
  const ModelParams p;
  const TTState s{0, 0, 0.4, 0.0};
  const TTDerivative d = tt_derivative(s, 0.5, 0.0, p);
  CHECK(d.dx_c == doctest::Approx(0.5 * std::cos(0.4)));
  CHECK(d.dy_c == doctest::Approx(0.5 * std::sin(0.4)));
  CHECK(d.dtheta0 == doctest::Approx(0.0));
  CHECK(d.dtheta1 == doctest::Approx(0.0));

  const TTDerivative z = tt_derivative({0, 0, 0.3, 0.2}, 0.0, 0.1, p);
  CHECK(z.dx_c == doctest::Approx(0.0));
  CHECK(z.dy_c == doctest::Approx(0.0));
  CHECK(z.dtheta0 == doctest::Approx(0.0));
  CHECK(z.dtheta1 == doctest::Approx(0.0));
}

TEST_CASE("tt_derivative: term-by-term symbolic oracle") {
  ModelParams p;
  p.R = 0.3;
  p.L1 = 0.4;
  p.L2 = 0.6;
  const double v_c = 0.5, alpha = 0.1, theta0 = 0.0, theta1 = 0.2;
  const TTDerivative d = tt_derivative({0, 0, theta0, theta1}, v_c, alpha, p);

  const double ta = std::tan(alpha);
  const double v0 = v_c * std::cos(theta1) * (1.0 + (p.R / p.L1) * ta * std::tan(theta1));
  CHECK(d.v0 == doctest::Approx(v0).epsilon(1e-14));
  CHECK(d.dx_c == doctest::Approx(v0 * std::cos(theta0)).epsilon(1e-14));
  CHECK(d.dy_c == doctest::Approx(v0 * std::sin(theta0)).epsilon(1e-14));
  CHECK(d.dtheta0 ==
        doctest::Approx(v_c * (std::sin(theta1) / p.L2 -
                               (p.R / (p.L1 * p.L2)) * std::cos(theta1) * ta))
            .epsilon(1e-14));
  CHECK(d.dtheta1 ==
        doctest::Approx(v_c * (ta / p.L1 - std::sin(theta1) / p.L2 +
                               (p.R / (p.L1 * p.L2)) * std::cos(theta1) * ta))
            .epsilon(1e-14));
}

TEST_CASE("tt_derivative: hitch restores theta1 with zero steering") {
  const ModelParams p;
  for (double theta1 : {-0.3, -0.1, 0.1, 0.3}) {
    const TTDerivative d = tt_derivative({0, 0, 0, theta1}, 0.5, 0.0, p);
    CHECK(d.dtheta1 * theta1 < 0.0);
    CHECK(d.dtheta0 == doctest::Approx(0.5 * std::sin(theta1) / p.L2));
  }
}

TEST_CASE("tt_derivative rejects steering at the singularity") {
  const ModelParams p;
  CHECK_THROWS_AS(tt_derivative({0, 0, 0, 0}, 0.5, kPi / 2.0, p), SteerSingular);
}

TEST_CASE("lf_base_commands: centered straight push and pure cart spin") {
  const ModelParams p;
  const LFState centered{0, 0, 0, 0, 0};
  const LFBaseCommands straight = lf_base_commands(centered, {0.7, 0.0}, p);
  CHECK(straight.v0 == doctest::Approx(0.7));
  CHECK(straight.omega0 == doctest::Approx(0.0));
  CHECK(straight.omega2 == doctest::Approx(0.0));
  CHECK(straight.omega1_rate == doctest::Approx(0.0));

  // pure cart rotation: w-_L picks up -r_L * omega, so omega2 = r_L w / R
  const LFBaseCommands spin = lf_base_commands(centered, {0.0, 0.8}, p);
  CHECK(spin.v0 == doctest::Approx(0.0));
  CHECK(spin.omega0 == doctest::Approx(0.0));
  CHECK(spin.omega2 == doctest::Approx(p.r_L * 0.8 / p.R));
}

TEST_CASE("lf_base_commands: rigid hitch identity |p_F'| = |p_L_par'|") {
  const ModelParams p;
  for (int i = 0; i < 500; ++i) {
    const LFState s{uniform(-1, 1), uniform(-1, 1), uniform(-kPi, kPi), uniform(-1.2, 1.2),
                    uniform(-1.2, 1.2)};
    const UnicycleCmd mu{uniform(-1, 1), uniform(-1, 1)};
    const LFBaseCommands b = lf_base_commands(s, mu, p);
    // decomposition oracle: the leader back-point velocity component along
    // the hitch direction must equal the follower front-point speed
    const double along = std::cos(s.theta2) * mu.v + p.r_L * std::sin(s.theta2) * mu.omega;
    const double follower_speed = std::hypot(b.v0, p.r_F * b.omega0);
    CHECK(follower_speed == doctest::Approx(std::abs(along)).epsilon(1e-12));
  }
}

TEST_CASE("lf_base_commands rejects degenerate geometry") {
  ModelParams p;
  p.r_F = 0.0;
  CHECK_THROWS_AS(lf_base_commands({}, {0.5, 0.0}, p), DegenerateOffset);
}

TEST_CASE("lf_derivative: centered pose translates forward; chain identity") {
  const ModelParams p;
  const LFDerivative d = lf_derivative({0, 0, 0, 0, 0}, {0.5, 0.0}, p);
  CHECK(d.dx_c == doctest::Approx(0.5));
  CHECK(d.dy_c == doctest::Approx(0.0));
  CHECK(d.dtheta_c == doctest::Approx(0.0));
  CHECK(d.dtheta1 == doctest::Approx(0.0));
  CHECK(d.dtheta2 == doctest::Approx(0.0));

  for (int i = 0; i < 200; ++i) {
    const LFState s{0, 0, uniform(-kPi, kPi), uniform(-1, 1), uniform(-1, 1)};
    const UnicycleCmd mu{uniform(-1, 1), uniform(-1, 1)};
    const LFDerivative dd = lf_derivative(s, mu, p);
    const LFBaseCommands b = lf_base_commands(s, mu, p);
    // theta0 rate reconstructed from the chain identity equals omega0
    const double dtheta0 = dd.dtheta_c - dd.dtheta1 - dd.dtheta2;
    CHECK(dtheta0 == doctest::Approx(b.omega0).epsilon(1e-12));
  }
}

TEST_CASE("lf_derivative: straight push drives both angles to zero (Lemma 2)") {
  const ModelParams p;
  Eigen::VectorXd x = lf_state_vec({0, 0, 0, 0.4, -0.3});
  const UnicycleCmd mu{0.5, 0.0};
  double v2_prev = 1.0 - std::cos(x[4]);
  for (int k = 0; k < 3000; ++k) {
    x = integrate_rk4([&](const Eigen::VectorXd& v) { return lf_rate(v, mu, p); }, x, 0.02,
                      {2, 3, 4});
    const double v2 = 1.0 - std::cos(x[4]);
    if (std::abs(x[4]) > 1e-6) CHECK(v2 < v2_prev);
    v2_prev = v2;
  }
  CHECK(std::abs(x[3]) < 1e-6);
  CHECK(std::abs(x[4]) < 1e-6);
}

TEST_CASE("integrate_rk4: zero input freezes, pure rotation is exact") {
  const Eigen::VectorXd x0 = lf_state_vec({1, 2, 0.5, 0.1, -0.2});
  const Eigen::VectorXd frozen = integrate_rk4(
      [](const Eigen::VectorXd& v) { return Eigen::VectorXd::Zero(v.size()); }, x0, 0.1);
  CHECK((frozen - x0).norm() == 0.0);

  // theta' = w: RK4 integrates the linear ODE exactly
  Eigen::VectorXd th(1);
  th << 0.0;
  const double w = 0.7;
  for (int i = 0; i < 100; ++i) {
    th = integrate_rk4(
        [&](const Eigen::VectorXd&) {
          Eigen::VectorXd d(1);
          d << w;
          return d;
        },
        th, 0.01);
  }
  CHECK(th[0] == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("integrate_rk4: halving dt shrinks LF trajectory error ~16x") {
  const ModelParams p;
  const UnicycleCmd mu{0.5, 0.2};
  auto rollout = [&](double dt, int steps) {
    Eigen::VectorXd x = lf_state_vec({0, 0, 0, 0.6, -0.5});
    for (int i = 0; i < steps; ++i) {
      x = integrate_rk4([&](const Eigen::VectorXd& v) { return lf_rate(v, mu, p); }, x, dt);
    }
    return x;
  };
  const Eigen::VectorXd ref = rollout(0.0004, 10000);  // near-exact baseline
  const Eigen::VectorXd coarse = rollout(0.04, 100);
  const Eigen::VectorXd fine = rollout(0.02, 200);
  const double e_coarse = (coarse - ref).norm();
  const double e_fine = (fine - ref).norm();
  const double ratio = e_coarse / e_fine;
  CHECK(ratio > 10.0);
  CHECK(ratio < 24.0);
}

TEST_CASE("integrate_rk4 raises NonFinite on bad derivatives") {
  Eigen::VectorXd x(1);
  x << 1.0;
  CHECK_THROWS_AS(integrate_rk4(
                      [](const Eigen::VectorXd&) {
                        Eigen::VectorXd d(1);
                        d << std::numeric_limits<double>::quiet_NaN();
                        return d;
                      },
                      x, 0.01),
                  NonFinite);
}

TEST_CASE("offset-point closed loop tracks a smooth reference at O(dt^2)") {
  // Heun integration of the closed-loop system: the offset point of a
  // unicycle commanded through unicycle_from_offset follows the integral
  // of pdot_r with second-order global error.
  const double r = 0.3;
  auto track_error = [&](double dt) {
    Pose2 pose{0.0, -r, 0.0};  // offset point starts at the circle point (0,0)... adjusted below
    // reference: circle of radius 1 at angular rate 0.5
    auto ref = [](double t) {
      return Eigen::Vector2d{std::cos(0.5 * t), std::sin(0.5 * t)};
    };
    auto refdot = [](double t) {
      return Eigen::Vector2d{-0.5 * std::sin(0.5 * t), 0.5 * std::cos(0.5 * t)};
    };
    // place the unicycle so its offset point starts exactly on the reference
    pose = {1.0 - r, 0.0, 0.0};
    auto deriv = [&](const Pose2& s, double t) {
      const UnicycleCmd mu = unicycle_from_offset(s, refdot(t), r);
      return Eigen::Vector3d{mu.v * std::cos(s.theta), mu.v * std::sin(s.theta), mu.omega};
    };
    const double t_end = 4.0;
    double t = 0.0;
    while (t < t_end - 0.5 * dt) {
      const Eigen::Vector3d k1 = deriv(pose, t);
      const Pose2 mid{pose.x + dt * k1[0], pose.y + dt * k1[1], pose.theta + dt * k1[2]};
      const Eigen::Vector3d k2 = deriv(mid, t + dt);
      pose = {pose.x + 0.5 * dt * (k1[0] + k2[0]), pose.y + 0.5 * dt * (k1[1] + k2[1]),
              pose.theta + 0.5 * dt * (k1[2] + k2[2])};
      t += dt;
    }
    const Eigen::Vector2d offset_point =
        pose.position() + r * Eigen::Vector2d{std::cos(pose.theta), std::sin(pose.theta)};
    return (offset_point - ref(t)).norm();
  };
  const double e1 = track_error(0.02);
  const double e2 = track_error(0.01);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}
