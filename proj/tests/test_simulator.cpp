#include "cartpush/errors.hpp"
#include "cartpush/simulator.hpp"
#include "doctest.h"

using namespace cartpush;

TEST_CASE("dynamic plant: rest stays at rest, double integrator without friction") {
  DynamicPlantParams p;
  p.damping.setZero();
  p.coulomb.setZero();
  DynamicLocalPlant rest(p, {}, Eigen::Vector3d{0.1, -0.2, 0.4});
  rest.step(Eigen::Vector3d::Zero(), 0.001);
  CHECK(rest.zdot().norm() == 0.0);
  CHECK(rest.z()[0] == doctest::Approx(0.1));

  // constant torque: z quadratic in t, zddot = b * tau
  DynamicLocalPlant plant(p, {}, Eigen::Vector3d{0.0, 0.0, 0.4});
  const Eigen::Vector3d tau{0.5, 0.0, 0.0};
  const double dt = 1e-3;
  for (int i = 0; i < 1000; ++i) plant.step(tau, dt);
  const double expect = 0.5 * p.b_true[0] * 0.5 * 1.0;  // 1/2 a t^2
  CHECK(plant.z()[0] == doctest::Approx(expect).epsilon(0.01));
  CHECK(plant.zdot()[0] == doctest::Approx(p.b_true[0] * 0.5).epsilon(0.01));
}

TEST_CASE("impulse term: momentum jump matches force x lever x duration x inertia") {
  DynamicPlantParams p;
  p.damping.setZero();
  p.coulomb.setZero();
  DisturbanceSpec spec;
  DisturbanceTerm imp;
  imp.kind = DisturbanceTerm::Kind::kImpulse;
  imp.channel = 0;
  imp.force_n = 200.0;
  imp.lever_m = 0.4;
  imp.start_s = 0.1;
  imp.duration_s = 0.1;
  spec.terms.push_back(imp);

  DynamicLocalPlant plant(p, spec, Eigen::Vector3d{0.0, 0.0, 0.4});
  const double dt = 1e-3;
  for (int i = 0; i < 300; ++i) plant.step(Eigen::Vector3d::Zero(), dt);
  const double expect = p.b_true[0] * 200.0 * 0.4 * 0.1;
  CHECK(plant.zdot()[0] == doctest::Approx(expect).epsilon(0.01));

  // with damping the jump decays afterwards
  DynamicPlantParams pd_params;
  pd_params.damping = Eigen::Vector3d{2.0, 2.0, 2.0};
  pd_params.coulomb.setZero();
  DynamicLocalPlant damped(pd_params, spec, Eigen::Vector3d::Zero());
  double peak = 0.0;
  for (int i = 0; i < 3000; ++i) {
    damped.step(Eigen::Vector3d::Zero(), dt);
    peak = std::max(peak, damped.zdot()[0]);
  }
  CHECK(peak > 0.5 * expect);
  CHECK(damped.zdot()[0] < 0.1 * peak);
}

TEST_CASE("disturbance_eval: empty spec, payload ratio, constants sum") {
  const DynamicPlantParams p;
  const Eigen::Vector3d zdot{0.5, -0.2, 0.1};
  CHECK(DisturbanceModel::eval_deterministic({}, p, 0.0, zdot).norm() == 0.0);

  DisturbanceSpec light, heavy;
  DisturbanceTerm pl;
  pl.kind = DisturbanceTerm::Kind::kPayload;
  pl.mass_kg = 5.1;
  light.terms.push_back(pl);
  pl.mass_kg = 22.2;
  heavy.terms.push_back(pl);
  const Eigen::Vector3d xi_l = DisturbanceModel::eval_deterministic(light, p, 0.0, zdot);
  const Eigen::Vector3d xi_h = DisturbanceModel::eval_deterministic(heavy, p, 0.0, zdot);
  for (int i = 0; i < 3; ++i) {
    CHECK(xi_h[i] / xi_l[i] == doctest::Approx(22.2 / 5.1).epsilon(1e-9));
    CHECK(xi_l[i] * zdot[i] < 0.0);  // resists motion
  }

  DisturbanceSpec two;
  DisturbanceTerm c1, c2;
  c1.kind = DisturbanceTerm::Kind::kConstant;
  c1.channel = 1;
  c1.magnitude = 0.3;
  c2 = c1;
  c2.magnitude = -0.1;
  two.terms = {c1, c2};
  const Eigen::Vector3d xi2 = DisturbanceModel::eval_deterministic(two, p, 0.0, zdot);
  CHECK(xi2[1] == doctest::Approx(0.2));
}

TEST_CASE("payload scales the effective inertia") {
  DynamicPlantParams p;
  p.damping.setZero();
  p.coulomb.setZero();
  p.mu_roll = 0.0;  // isolate the inertia effect
  DisturbanceSpec spec;
  DisturbanceTerm pl;
  pl.kind = DisturbanceTerm::Kind::kPayload;
  pl.mass_kg = 30.0;  // doubles the inertia
  spec.terms.push_back(pl);

  DynamicLocalPlant loaded(p, spec, Eigen::Vector3d::Zero());
  DynamicLocalPlant empty(p, {}, Eigen::Vector3d::Zero());
  const Eigen::Vector3d tau{1.0, 0.0, 0.0};
  for (int i = 0; i < 500; ++i) {
    loaded.step(tau, 1e-3);
    empty.step(tau, 1e-3);
  }
  CHECK(empty.zdot()[0] / loaded.zdot()[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("friction terms never inject energy") {
  DynamicPlantParams p;
  DynamicLocalPlant plant(p, {}, Eigen::Vector3d::Zero());
  uint64_t s = 99;
  for (int i = 0; i < 5000; ++i) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(s >> 11) * 0x1.0p-53 * 4.0 - 2.0;
    plant.step(Eigen::Vector3d{u, -u, 0.5 * u}, 1e-3);
    for (int ch = 0; ch < 3; ++ch) {
      const double v = plant.zdot()[ch];
      const double friction_power =
          p.damping[ch] * v * v + p.coulomb[ch] * std::tanh(v / 0.01) * v;
      CHECK(friction_power >= 0.0);
    }
  }
}

TEST_CASE("noise terms are reproducible from the seed") {
  DynamicPlantParams p;
  DisturbanceSpec spec;
  DisturbanceTerm n;
  n.kind = DisturbanceTerm::Kind::kNoise;
  n.channel = 0;
  n.sigma = 0.5;
  n.seed = 42;
  spec.terms.push_back(n);

  DynamicLocalPlant a(p, spec, Eigen::Vector3d::Zero());
  DynamicLocalPlant b(p, spec, Eigen::Vector3d::Zero());
  for (int i = 0; i < 2000; ++i) {
    a.step(Eigen::Vector3d::Zero(), 1e-3);
    b.step(Eigen::Vector3d::Zero(), 1e-3);
  }
  CHECK(a.z()[0] == b.z()[0]);
  CHECK(a.z()[0] != 0.0);

  DisturbanceTerm n2 = n;
  n2.seed = 43;
  DisturbanceSpec spec2;
  spec2.terms.push_back(n2);
  DynamicLocalPlant c(p, spec2, Eigen::Vector3d::Zero());
  for (int i = 0; i < 2000; ++i) c.step(Eigen::Vector3d::Zero(), 1e-3);
  CHECK(c.z()[0] != a.z()[0]);
}

TEST_CASE("kinematic plant: frozen on zero commands, straight line on constant v") {
  KinematicPlantParams p;
  KinematicPlant plant(p, {0, 0, 0}, {0, 0, 0.4, 0.5});
  for (int i = 0; i < 100; ++i) plant.step(Eigen::Vector4d::Zero(), 1e-3);
  CHECK(plant.base().x == 0.0);
  CHECK(plant.cart().x == doctest::Approx(0.8));

  KinematicPlant mover(p, {0, 0, 0}, {0, 0, 0.4, 0.5});
  for (int i = 0; i < 2000; ++i) mover.step(Eigen::Vector4d{0.5, 0, 0, 0}, 1e-3);
  CHECK(mover.base().x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mover.base().y == doctest::Approx(0.0));
}

TEST_CASE("kinematic plant: first-order lag shapes the command response") {
  KinematicPlantParams p;
  p.lag_tau[0] = 0.2;
  KinematicPlant plant(p, {0, 0, 0}, {0, 0, 0.4, 0.5});
  for (int i = 0; i < 200; ++i) plant.step(Eigen::Vector4d{1.0, 0, 0, 0}, 1e-3);
  // after one time constant the lagged command reaches 1 - 1/e
  CHECK(plant.actual_commands()[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("kinematic plant matches the LF rate integration without lag") {
  // Cross-module oracle. The LF arm/base angle dynamics coincide with the
  // exact chain; the cart translation agrees on the straight-push centered
  // slice and to first order in the deflections elsewhere, so the angles
  // get an order check and the positions a model-gap bound.
  KinematicPlantParams kp;
  const ModelParams mp;
  const UnicycleCmd mu{0.4, 0.0};

  auto angle_gap = [&](double dt) {
    KinematicPlant plant(kp, {0, 0, 0}, {0.0, -0.2, mp.R, mp.L});
    Eigen::VectorXd s(5);
    s << plant.cart().x, plant.cart().y, plant.cart().theta, 0.0, -0.2;
    const int steps = static_cast<int>(1.0 / dt);
    double worst = 0.0;
    for (int i = 0; i < steps; ++i) {
      const LFState lf{s[0], s[1], s[2], s[3], s[4]};
      const LFBaseCommands b = lf_base_commands(lf, mu, mp);
      plant.step(Eigen::Vector4d{b.v0, b.omega0, b.omega1_rate, b.omega2}, dt);
      s = integrate_rk4(
          [&](const Eigen::VectorXd& v) {
            const LFDerivative d = lf_derivative({v[0], v[1], v[2], v[3], v[4]}, mu, mp);
            Eigen::VectorXd out(5);
            out << d.dx_c, d.dy_c, d.dtheta_c, d.dtheta1, d.dtheta2;
            return out;
          },
          s, dt);
      worst = std::max({worst, std::abs(plant.psi().theta1 - s[3]),
                        std::abs(plant.psi().theta2 - s[4])});
    }
    return std::pair{worst, std::abs(plant.cart().y - s[1])};
  };

  const auto [gap_coarse, y_gap_coarse] = angle_gap(2e-3);
  const auto [gap_fine, y_gap_fine] = angle_gap(1e-3);
  CHECK(gap_coarse < 5e-4);
  // zero-order-hold commands limit the closed-loop match to first order;
  // halving dt must shrink the angle discrepancy accordingly
  const double ratio = gap_coarse / std::max(gap_fine, 1e-300);
  CHECK(ratio > 1.7);
  CHECK(ratio < 4.5);
  // cart translation carries the LF abstraction gap, bounded and small
  CHECK(y_gap_fine < 0.02);
  CHECK(y_gap_coarse < 0.02);
}

TEST_CASE("kinematic plant chain identity holds at every step") {
  KinematicPlantParams p;
  KinematicPlant plant(p, {0.5, -0.3, 0.7}, {0.1, 0.2, 0.4, 0.5});
  for (int i = 0; i < 500; ++i) {
    plant.step(Eigen::Vector4d{0.3, 0.4, 0.2, -0.1}, 1e-3);
    const Pose2 cart = plant.cart();
    const double expect =
        wrap_angle(plant.base().theta + plant.psi().theta1 + plant.psi().theta2);
    CHECK(std::abs(angle_diff(cart.theta, expect)) < 1e-9);
  }
}

TEST_CASE("kinematic plant flags workspace violations and clamps") {
  KinematicPlantParams p;
  KinematicPlant plant(p, {0, 0, 0}, {1.5, 0, 0.4, 0.5});
  bool violated = false;
  for (int i = 0; i < 200 && !violated; ++i) {
    try {
      plant.step(Eigen::Vector4d{0, 0, 1.5, 0}, 1e-3);
    } catch (const WorkspaceViolation&) {
      violated = true;
    }
  }
  CHECK(violated);
  CHECK(std::abs(plant.psi().theta1) <= p.workspace.theta_max);
}

TEST_CASE("dt refinement: halving the step barely moves the end state") {
  KinematicPlantParams p;
  auto run = [&](double dt) {
    KinematicPlant plant(p, {0, 0, 0}, {0.1, -0.1, 0.4, 0.5});
    const int steps = static_cast<int>(2.0 / dt);
    for (int i = 0; i < steps; ++i) plant.step(Eigen::Vector4d{0.4, 0.3, 0.1, -0.2}, dt);
    return plant.cart();
  };
  const Pose2 coarse = run(1e-3);
  const Pose2 fine = run(5e-4);
  CHECK(std::abs(coarse.x - fine.x) < 1e-4);
  CHECK(std::abs(coarse.y - fine.y) < 1e-4);
  CHECK(std::abs(angle_diff(coarse.theta, fine.theta)) < 1e-4);
}
