#include <map>

#include "cartpush/controllers.hpp"
#include "cartpush/simulator.hpp"
#include "doctest.h"

using namespace cartpush;

namespace {

struct RunResult {
  double steady_err = 0.0;
  double rmse = 0.0;
};

// step-and-hold theta1 reference on the disturbed plant
RunResult run_payload(const std::string& variant, double mass, double duration = 12.0) {
  DynamicPlantParams pp;
  DisturbanceSpec spec;
  if (mass > 0.0) {
    DisturbanceTerm t;
    t.kind = DisturbanceTerm::Kind::kPayload;
    t.mass_kg = mass;
    spec.terms.push_back(t);
  }
  DynamicLocalPlant plant(pp, spec, Eigen::Vector3d{0.0, 0.0, 0.4});
  ControllerContext ctx;
  auto ctrl = make_controller(variant, ctx);
  ctrl->reset({plant.z(), plant.zdot()});
  const double h = 1e-3;
  const int steps = static_cast<int>(duration / h);
  double sum_sq = 0.0;
  int count = 0;
  double steady_sum = 0.0;
  int steady_count = 0;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Eigen::Vector3d z_ref{t >= 1.0 ? 0.4 : 0.0, 0.0, 0.4};
    const LocalState state{plant.z(), plant.zdot()};
    const ControllerOutput out = ctrl->update(z_ref, state, h);
    plant.step(out.tau_z, h);
    const double e = z_ref[0] - plant.z()[0];
    if (t >= 1.0) {
      sum_sq += e * e;
      ++count;
    }
    if (t >= 0.8 * duration) {
      steady_sum += std::abs(e);
      ++steady_count;
    }
  }
  return {steady_sum / steady_count, std::sqrt(sum_sq / count)};
}

}  // namespace

TEST_CASE("all controllers are quiet at the target with zero rates") {
  for (const char* v : {"gob", "pd", "pdf", "dpd", "mrac"}) {
    ControllerContext ctx;
    auto ctrl = make_controller(v, ctx);
    const LocalState at_target{Eigen::Vector3d{0.0, 0.0, 0.4}, Eigen::Vector3d::Zero()};
    ctrl->reset(at_target);
    const ControllerOutput out =
        ctrl->update(Eigen::Vector3d{0.0, 0.0, 0.4}, at_target, 1e-3);
    CHECK(out.joints.tau_left.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(out.joints.tau_right.cwiseAbs().maxCoeff() < 1e-9);
    CHECK_FALSE(out.saturated);
  }
}

TEST_CASE("unknown controller variant is rejected") {
  ControllerContext ctx;
  CHECK_THROWS_AS(make_controller("lqr", ctx), ConfigError);
}

TEST_CASE("mrac reference model has a double pole at -a_m") {
  const ControlGains g;
  Eigen::Matrix2d a_m;
  a_m << 0.0, 1.0, -g.a_m * g.a_m, -2.0 * g.a_m;
  const Eigen::EigenSolver<Eigen::Matrix2d> eig(a_m);
  for (int i = 0; i < 2; ++i) {
    CHECK(eig.eigenvalues()[i].real() == doctest::Approx(-g.a_m));
    CHECK(eig.eigenvalues()[i].imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("payload step: steady-state error ordering across controllers") {
  // gains tuned on the no-payload plant, frozen, then loaded with 22.2 kg
  std::map<std::string, RunResult> heavy;
  for (const char* v : {"gob", "mrac", "dpd", "pdf", "pd"}) {
    heavy[v] = run_payload(v, 22.2);
  }
  CHECK(heavy["gob"].steady_err < 0.05);
  CHECK(heavy["pd"].steady_err > 0.15);
  CHECK(heavy["gob"].steady_err < heavy["mrac"].steady_err);
  CHECK(heavy["gob"].steady_err < heavy["dpd"].steady_err);
  CHECK(heavy["mrac"].steady_err < heavy["pdf"].steady_err);
  CHECK(heavy["dpd"].steady_err < heavy["pdf"].steady_err);
  CHECK(heavy["pdf"].steady_err < heavy["pd"].steady_err);

  // compensation keeps helping at zero load too
  const RunResult pd0 = run_payload("pd", 0.0);
  const RunResult gob0 = run_payload("gob", 0.0);
  CHECK(gob0.rmse < pd0.rmse);
  CHECK(gob0.steady_err < 0.005);
}

TEST_CASE("single-arm operation still tracks with halved torque budget") {
  DynamicPlantParams pp;
  DynamicLocalPlant plant(pp, {}, Eigen::Vector3d{0.0, 0.0, 0.4});
  ControllerContext ctx;
  ctx.eta = 1.0;  // left arm only
  ctx.tau_limit = 20.0;
  auto ctrl = make_controller("gob", ctx);
  ctrl->reset({plant.z(), plant.zdot()});
  const double h = 1e-3;
  for (int k = 0; k < 8000; ++k) {
    const double t = k * h;
    const Eigen::Vector3d z_ref{t >= 1.0 ? 0.3 : 0.0, 0.0, 0.4};
    const LocalState state{plant.z(), plant.zdot()};
    const ControllerOutput out = ctrl->update(z_ref, state, h);
    CHECK(out.joints.tau_right.cwiseAbs().maxCoeff() == 0.0);
    plant.step(out.tau_z, h);
  }
  CHECK(std::abs(plant.z()[0] - 0.3) < 0.02);
}
