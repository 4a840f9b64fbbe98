#include "cartpush/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "cartpush/errors.hpp"

namespace cartpush {

namespace {

constexpr double kSimDt = 1e-3;

uint64_t mix_u64(uint64_t* state) {
  uint64_t z = (*state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit(uint64_t* state) {
  return static_cast<double>(mix_u64(state) >> 11) * 0x1.0p-53;
}

void append_row(TrajectoryLog* log, const TrajectoryLog::Row& row) {
  log->rows.push_back(row);
}

// Execution layer between the 10 Hz planner and the 1 kHz plant: tracks the
// latest plan with offset-point feedback on the chain-implied base path and
// angle feedback on the planned deflections. The planner models predict
// their own state fiction; as configuration-space paths the predictions are
// exactly realizable, so tracking them sidesteps the model-plant drift of
// raw velocity pass-through.
class PlanExecutive {
 public:
  void set_plan(const std::vector<Eigen::VectorXd>& predicted, PlannerVariant variant,
                const ModelParams& mp, double plan_dt, double cart_half_link) {
    plan_dt_ = plan_dt;
    variant_ = variant;
    mp_ = mp;
    const size_t n = predicted.size();
    base_.resize(n);
    cart_.resize(n);
    th1_.resize(n);
    th2_.resize(n);
    for (size_t k = 0; k < n; ++k) {
      const Eigen::VectorXd& x = predicted[k];
      Pose2 cart;
      LocalCoords psi;
      psi.R = mp.R;
      psi.L = mp.L;
      switch (variant) {
        case PlannerVariant::kNmpc:
          cart = {x[0], x[1], x[2]};
          break;
        case PlannerVariant::kTt:
          cart = {x[0], x[1], x[2] + x[3]};
          psi.theta1 = x[3];
          break;
        default:
          cart = {x[0], x[1], x[2]};
          psi.theta1 = x[3];
          psi.theta2 = x[4];
          break;
      }
      th1_[k] = psi.theta1;
      th2_[k] = psi.theta2;
      cart_[k] = cart;
      base_[k] = base_pose_from_cart(cart, psi, cart_half_link);
    }
    // unwrap the heading sequences for clean interpolation
    heading_.resize(n);
    cart_heading_.resize(n);
    if (n > 0) {
      heading_[0] = base_[0].theta;
      cart_heading_[0] = cart_[0].theta;
    }
    for (size_t k = 1; k < n; ++k) {
      heading_[k] = heading_[k - 1] + angle_diff(base_[k].theta, base_[k - 1].theta);
      cart_heading_[k] =
          cart_heading_[k - 1] + angle_diff(cart_[k].theta, cart_[k - 1].theta);
    }
    valid_ = n >= 2;
  }

  bool valid() const { return valid_; }

  Eigen::Vector4d commands(double t_since_plan, const Pose2& base,
                           const LocalCoords& psi) const {
    if (!valid_) return Eigen::Vector4d::Zero();
    const int last = static_cast<int>(base_.size()) - 1;
    const double s = std::clamp(t_since_plan / plan_dt_, 0.0, static_cast<double>(last));
    const int k0 = std::min(static_cast<int>(s), last - 1);
    const double frac = s - k0;

    if (variant_ == PlannerVariant::kWb || variant_ == PlannerVariant::kNmpc) {
      // chain-consistent plans: track the implied base path through the
      // offset point and the planned deflections directly
      auto offset_point = [&](int k) -> Eigen::Vector2d {
        return base_[k].position() +
               r_track_ * Eigen::Vector2d{std::cos(heading_[k]), std::sin(heading_[k])};
      };
      const Eigen::Vector2d p0 = offset_point(k0);
      const Eigen::Vector2d p1 = offset_point(k0 + 1);
      const Eigen::Vector2d p_ref = p0 + frac * (p1 - p0);
      const Eigen::Vector2d v_ref = (p1 - p0) / plan_dt_;
      const Eigen::Vector2d p_now = base.position() + r_track_ * base.heading();
      const Eigen::Vector2d v_cmd = v_ref + kp_pos_ * (p_ref - p_now);
      const UnicycleCmd mu = unicycle_from_offset(base, v_cmd, r_track_);

      const double th1_ref = th1_[k0] + frac * (th1_[k0 + 1] - th1_[k0]);
      const double th2_ref = th2_[k0] + frac * (th2_[k0 + 1] - th2_[k0]);
      const double w1 = (th1_[k0 + 1] - th1_[k0]) / plan_dt_ +
                        kp_arm_ * angle_diff(th1_ref, psi.theta1);
      const double w2 = (th2_[k0 + 1] - th2_[k0]) / plan_dt_ +
                        kp_arm_ * angle_diff(th2_ref, psi.theta2);
      return {mu.v, mu.omega, w1, w2};
    }

    // LF and TT evolve by point abstractions whose implied base motion is
    // not chain-consistent. Execute instead: arms servo the planned
    // deflections, the base solves a weighted least squares for the two
    // rates that best realize the planned cart twist through the chain.
    const Pose2& c0 = cart_[k0];
    const Pose2& c1 = cart_[k0 + 1];
    const Eigen::Vector2d p_ref = c0.position() + frac * (c1.position() - c0.position());
    const Eigen::Vector2d v_ref = (c1.position() - c0.position()) / plan_dt_;
    const double th_ref = cart_heading_[k0] +
                          frac * (cart_heading_[k0 + 1] - cart_heading_[k0]);
    const double wt_ref = (cart_heading_[k0 + 1] - cart_heading_[k0]) / plan_dt_;

    const double th1_ref = th1_[k0] + frac * (th1_[k0 + 1] - th1_[k0]);
    const double th2_ref = th2_[k0] + frac * (th2_[k0 + 1] - th2_[k0]);
    const double w1 = (th1_[k0 + 1] - th1_[k0]) / plan_dt_ +
                      kp_arm_ * angle_diff(th1_ref, psi.theta1);
    const double w2 = (th2_[k0 + 1] - th2_[k0]) / plan_dt_ +
                      kp_arm_ * angle_diff(th2_ref, psi.theta2);

    const double theta0 = base.theta;
    const double theta01 = theta0 + psi.theta1;
    const double thetac = theta01 + psi.theta2;
    const Pose2 cart_now = {base.x + mp_.R * std::cos(theta01) + mp_.L_c * std::cos(thetac),
                            base.y + mp_.R * std::sin(theta01) + mp_.L_c * std::sin(thetac),
                            thetac};
    const Eigen::Vector2d v_des = v_ref + kp_pos_ * (p_ref - cart_now.position());
    const double wt_des = wt_ref + kp_head_ * angle_diff(th_ref, cart_now.theta);

    // rows 1-2: cart translation; row 3 (down-weighted): cart heading
    // pdot_c = v0 h(theta0) + R (w0 + w1) hp(theta01) + L_c (w0+w1+w2) hp(thetac)
    // wt     = w0 + w1 + w2
    const Eigen::Vector2d h0{std::cos(theta0), std::sin(theta0)};
    const Eigen::Vector2d hp01{-std::sin(theta01), std::cos(theta01)};
    const Eigen::Vector2d hpc{-std::sin(thetac), std::cos(thetac)};
    const double wh = 0.55;  // heading row weight
    Eigen::Matrix<double, 3, 2> a;
    a << h0.x(), mp_.R * hp01.x() + mp_.L_c * hpc.x(),
         h0.y(), mp_.R * hp01.y() + mp_.L_c * hpc.y(),
         0.0, wh;
    Eigen::Vector3d b;
    const Eigen::Vector2d fixed_part =
        (mp_.R * hp01 + mp_.L_c * hpc) * w1 + mp_.L_c * hpc * w2;
    b << v_des.x() - fixed_part.x(), v_des.y() - fixed_part.y(),
        wh * (wt_des - w1 - w2);
    const Eigen::Vector2d sol =
        (a.transpose() * a + 1e-9 * Eigen::Matrix2d::Identity())
            .ldlt()
            .solve(a.transpose() * b);
    return {sol[0], sol[1], w1, w2};
  }

 private:
  std::vector<Pose2> base_;
  std::vector<Pose2> cart_;
  std::vector<double> heading_;
  std::vector<double> cart_heading_;
  std::vector<double> th1_, th2_;
  PlannerVariant variant_ = PlannerVariant::kLf;
  ModelParams mp_;
  double plan_dt_ = 0.1;
  double r_track_ = 0.2;
  double kp_pos_ = 2.5;
  double kp_arm_ = 4.0;
  double kp_head_ = 2.0;
  bool valid_ = false;
};

void record_solve(MetricsReport* report, const SolveStats& stats) {
  SolveAggregate& agg = report->solver;
  agg.solves += 1;
  agg.mean_iterations += stats.iterations;
  agg.max_iterations = std::max(agg.max_iterations, stats.iterations);
  agg.mean_cost += stats.cost;
  agg.max_kkt = std::max(agg.max_kkt, stats.kkt_residual);
  agg.total_wall_s += stats.wall_time_s;
  if (!stats.converged) {
    agg.non_converged += 1;
    report->flag_solver_nonconverged = true;
  }
}

void finalize_planning(const ScenarioSpec& spec, const Pose2& goal, const Pose2& end,
                       double rmse_acc, int steps, MetricsReport* report) {
  if (report->solver.solves > 0) {
    report->solver.mean_iterations /= report->solver.solves;
    report->solver.mean_cost /= report->solver.solves;
  }
  report->rmse_m = std::sqrt(rmse_acc / std::max(1, steps));
  report->e_x_mm = 1e3 * std::abs(goal.x - end.x);
  report->e_y_mm = 1e3 * std::abs(goal.y - end.y);
  report->e_theta_deg = rad_to_deg(std::abs(angle_diff(goal.theta, end.theta)));
  const bool pos_ok = std::hypot(goal.x - end.x, goal.y - end.y) < spec.success.position_m;
  const bool heading_ok = std::abs(angle_diff(goal.theta, end.theta)) <
                          deg_to_rad(spec.success.heading_deg);
  report->success = pos_ok && heading_ok && !report->flag_nonfinite &&
                    !report->flag_workspace_violation;
}

// Planner evaluation on the discrete-time system the OCP itself is posed
// over: one Euler model step per planner tick. This is the simulation-only
// protocol of the planning comparison; the chain plant is the alternative
// plant kind.
std::pair<TrajectoryLog, MetricsReport> run_planning_model(const ScenarioSpec& spec) {
  TrajectoryLog log;
  MetricsReport report;
  report.name = spec.name;

  const PlannerProblem prob = spec.planner_problem();
  Planner planner(prob);
  const Pose2 cart0{spec.model.R + spec.model.L_c, 0.0, 0.0};
  Eigen::VectorXd x = planner_state_from(prob.variant, cart0, 0.0, 0.0, 0.0);
  ReferenceProvider provider = spec.reference_provider(cart0);

  const int steps = static_cast<int>(spec.duration_s / spec.planner_dt);

  auto cart_of = [&](const Eigen::VectorXd& s) -> Pose2 {
    if (prob.variant == PlannerVariant::kTt) return {s[0], s[1], wrap_angle(s[2] + s[3])};
    return {s[0], s[1], wrap_angle(s[2])};
  };
  auto rate_of = [&](const Eigen::VectorXd& s, const Eigen::VectorXd& u) {
    Eigen::VectorXd rate(s.size());
    switch (prob.variant) {
      case PlannerVariant::kNmpc: {
        const double d = spec.model.R + spec.model.L_c;
        const double c = std::cos(s[2]), sn = std::sin(s[2]);
        rate << u[0] * c - d * u[1] * sn, u[0] * sn + d * u[1] * c, u[1];
        break;
      }
      case PlannerVariant::kTt: {
        const TTDerivative d = tt_derivative({s[0], s[1], s[2], s[3]}, u[0], u[1], spec.model);
        rate << d.dx_c, d.dy_c, d.dtheta0, d.dtheta1;
        break;
      }
      case PlannerVariant::kLf: {
        const LFDerivative d =
            lf_derivative({s[0], s[1], s[2], s[3], s[4]}, {u[0], u[1]}, spec.model);
        rate << d.dx_c, d.dy_c, d.dtheta_c, d.dtheta1, d.dtheta2;
        break;
      }
      case PlannerVariant::kWb: {
        rate = wb_transition(s, Eigen::Vector4d{u[0], u[1], u[2], u[3]}, spec.model);
        break;
      }
    }
    return rate;
  };

  Eigen::VectorXd u_hold = Eigen::VectorXd::Zero(prob.input_dim());
  Eigen::Vector4d whole_body = Eigen::Vector4d::Zero();
  UnicycleCmd cart_twist;
  double rmse_acc = 0.0;
  const double theta_box = spec.kinematic.workspace.theta_max;

  for (int k = 0; k < steps; ++k) {
    const double t = k * spec.planner_dt;
    const Pose2 cart = cart_of(x);

    const std::vector<ReferencePoint> refs =
        provider.window(t, spec.planner_dt, spec.horizon + 1, cart);
    try {
      const PlanOutput out = planner.plan_tick(x, refs);
      u_hold = out.model_command;
      whole_body = out.whole_body;
      cart_twist = out.cart_twist;
      record_solve(&report, out.stats);
    } catch (const NonFinite&) {
      report.flag_nonfinite = true;
      u_hold.setZero();
    } catch (const Error&) {
      report.flag_solver_nonconverged = true;
      u_hold.setZero();
    }

    Eigen::VectorXd rate;
    try {
      rate = rate_of(x, u_hold);
    } catch (const Error&) {
      report.flag_nonfinite = true;
      break;
    }
    if (!rate.allFinite()) {
      report.flag_nonfinite = true;
      break;
    }
    x += spec.planner_dt * rate;
    x[2] = wrap_angle(x[2]);
    // deflection box of the arm-bearing variants
    for (int i = 3; i < x.size(); ++i) {
      if (std::abs(x[i]) > theta_box) {
        report.flag_workspace_violation = true;
        x[i] = std::clamp(x[i], -theta_box, theta_box);
      }
    }

    const Pose2 now = cart_of(x);
    const Pose2 ref = provider.sample(t, now);
    const double ex = ref.x - now.x;
    const double ey = ref.y - now.y;
    const double pos_err = std::hypot(ex, ey);
    report.error_series.push_back(pos_err);
    report.max_error_m = std::max(report.max_error_m, pos_err);
    rmse_acc += pos_err * pos_err;
    if (!std::isfinite(pos_err)) report.flag_nonfinite = true;

    TrajectoryLog::Row row;
    row.t = t;
    row.x_c = now.x;
    row.y_c = now.y;
    row.theta_c = now.theta;
    row.theta1 = x.size() > 3 ? x[3] : 0.0;
    row.theta2 = x.size() > 4 ? x[4] : 0.0;
    row.v_c = cart_twist.v;
    row.omega_c = cart_twist.omega;
    row.v0 = whole_body[0];
    row.omega0 = whole_body[1];
    row.e_x = ex;
    row.e_y = ey;
    row.e_theta = angle_diff(ref.theta, now.theta);
    append_row(&log, row);
  }

  finalize_planning(spec, provider.goal(), cart_of(x), rmse_acc, steps, &report);
  return {std::move(log), report};
}

std::pair<TrajectoryLog, MetricsReport> run_planning(const ScenarioSpec& spec) {
  if (spec.plant_kind == "model") return run_planning_model(spec);
  TrajectoryLog log;
  MetricsReport report;
  report.name = spec.name;

  const LocalCoords psi0{0.0, 0.0, spec.model.R, spec.model.L};
  KinematicPlant plant(spec.kinematic, Pose2{0, 0, 0}, psi0);
  ReferenceProvider provider = spec.reference_provider(plant.cart());
  Planner planner(spec.planner_problem());
  const int plan_every =
      std::max(1, static_cast<int>(std::lround(spec.replan_interval_s / kSimDt)));
  const int steps = static_cast<int>(spec.duration_s / kSimDt);

  Eigen::Vector4d commands = Eigen::Vector4d::Zero();
  UnicycleCmd cart_twist;
  double rmse_acc = 0.0;
  PlanExecutive executive;
  double t_plan = 0.0;

  for (int k = 0; k < steps; ++k) {
    const double t = k * kSimDt;
    const Pose2 cart = plant.cart();

    if (k % plan_every == 0) {
      const Eigen::VectorXd x0 =
          planner_state_from(planner.problem().variant, cart, plant.base().theta,
                             plant.psi().theta1, plant.psi().theta2);
      const std::vector<ReferencePoint> refs =
          provider.window(t, spec.planner_dt, spec.horizon + 1, cart);
      try {
        const PlanOutput out = planner.plan_tick(x0, refs);
        commands = out.whole_body;
        cart_twist = out.cart_twist;
        executive.set_plan(out.predicted, planner.problem().variant, spec.model,
                           spec.planner_dt, spec.geom.cart_half_link);
        t_plan = t;
        record_solve(&report, out.stats);
      } catch (const NonFinite&) {
        report.flag_nonfinite = true;
        commands.setZero();
      } catch (const Error&) {
        report.flag_solver_nonconverged = true;
        commands.setZero();
      }
    }

    if (executive.valid()) {
      commands = executive.commands(t - t_plan, plant.base(), plant.psi());
    }
    try {
      plant.step(commands, kSimDt);
    } catch (const WorkspaceViolation&) {
      report.flag_workspace_violation = true;
    }

    const Pose2 now = plant.cart();
    const Pose2 ref = provider.sample(t, now);
    const double ex = ref.x - now.x;
    const double ey = ref.y - now.y;
    const double eth = angle_diff(ref.theta, now.theta);
    const double pos_err = std::hypot(ex, ey);
    report.error_series.push_back(pos_err);
    report.max_error_m = std::max(report.max_error_m, pos_err);
    rmse_acc += pos_err * pos_err;
    if (!std::isfinite(pos_err)) report.flag_nonfinite = true;

    TrajectoryLog::Row row;
    row.t = t;
    row.x_c = now.x;
    row.y_c = now.y;
    row.theta_c = now.theta;
    row.theta1 = plant.psi().theta1;
    row.theta2 = plant.psi().theta2;
    row.v_c = cart_twist.v;
    row.omega_c = cart_twist.omega;
    row.v0 = plant.actual_commands()[0];
    row.omega0 = plant.actual_commands()[1];
    row.e_x = ex;
    row.e_y = ey;
    row.e_theta = eth;
    append_row(&log, row);
  }

  finalize_planning(spec, provider.goal(), plant.cart(), rmse_acc, steps, &report);
  return {std::move(log), report};
}

std::pair<TrajectoryLog, MetricsReport> run_control(const ScenarioSpec& spec) {
  TrajectoryLog log;
  MetricsReport report;
  report.name = spec.name;

  DynamicLocalPlant plant(spec.plant, spec.disturbances, spec.z0);
  auto controller = make_controller(spec.controller_variant, spec.controller);
  controller->reset({plant.z(), plant.zdot()});

  const int steps = static_cast<int>(spec.duration_s / kSimDt);
  double rmse_acc = 0.0;
  int rmse_count = 0;
  double steady_acc = 0.0;
  int steady_count = 0;

  // impact bookkeeping: first impulse term, if any
  double impact_start = -1.0;
  for (const DisturbanceTerm& term : spec.disturbances.terms) {
    if (term.kind == DisturbanceTerm::Kind::kImpulse) {
      impact_start = term.start_s + term.duration_s;
      break;
    }
  }

  for (int k = 0; k < steps; ++k) {
    const double t = k * kSimDt;
    const Eigen::Vector3d z_ref = spec.z_reference(t);
    const LocalState state{plant.z(), plant.zdot()};
    ControllerOutput out;
    try {
      out = controller->update(z_ref, state, kSimDt);
      plant.step(out.tau_z, kSimDt);
    } catch (const NonFinite&) {
      report.flag_nonfinite = true;
      break;
    } catch (const Error&) {
      report.flag_nonfinite = true;
      break;
    }
    report.flag_saturation = report.flag_saturation || out.saturated;

    const double e = z_ref[0] - plant.z()[0];
    report.error_series.push_back(std::abs(e));
    if (t >= spec.z_ref_time) {
      rmse_acc += e * e;
      ++rmse_count;
    }
    if (t >= 0.8 * spec.duration_s) {
      steady_acc += std::abs(e);
      ++steady_count;
    }
    if (impact_start > 0.0 && t >= impact_start - kSimDt) {
      const double deflection = plant.z()[0] - z_ref[0];
      report.peak_deflection_rad = std::max(report.peak_deflection_rad, deflection);
      report.overshoot_rad = std::max(report.overshoot_rad, -deflection);
      if (report.recovery_time_s < 0.0 && std::abs(deflection) < 0.02) {
        report.recovery_time_s = t - impact_start;
      } else if (report.recovery_time_s >= 0.0 && std::abs(deflection) >= 0.02 &&
                 t < spec.duration_s - 1.0) {
        report.recovery_time_s = -1.0;  // left the band again
      }
    }

    TrajectoryLog::Row row;
    row.t = t;
    row.theta1 = plant.z()[0];
    row.theta2 = plant.z()[1];
    row.e_theta = e;
    row.xi_hat_theta1 = out.xi_hat[0];
    row.xi_hat_theta2 = out.xi_hat[1];
    row.xi_hat_r = out.xi_hat[2];
    row.tau_theta1 = out.tau_z[0];
    row.tau_theta2 = out.tau_z[1];
    row.tau_r = out.tau_z[2];
    append_row(&log, row);
  }

  report.rmse_theta1_rad = rmse_count > 0 ? std::sqrt(rmse_acc / rmse_count) : 0.0;
  report.steady_error_rad = steady_count > 0 ? steady_acc / steady_count : 0.0;
  report.success = !report.flag_nonfinite &&
                   report.steady_error_rad < spec.success.control_steady_rad;
  return {std::move(log), report};
}

}  // namespace

const char* TrajectoryLog::csv_header() {
  return "t,x_c,y_c,theta_c,theta1,theta2,v_c,omega_c,v0,omega0,e_x,e_y,e_theta,"
         "xi_hat_theta1,xi_hat_theta2,xi_hat_r,tau_theta1,tau_theta2,tau_r";
}

void TrajectoryLog::write_csv(std::ostream& out) const {
  out << csv_header() << '\n';
  char buf[512];
  for (const Row& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.6f,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                  "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  r.t, r.x_c, r.y_c, r.theta_c, r.theta1, r.theta2, r.v_c, r.omega_c, r.v0,
                  r.omega0, r.e_x, r.e_y, r.e_theta, r.xi_hat_theta1, r.xi_hat_theta2,
                  r.xi_hat_r, r.tau_theta1, r.tau_theta2, r.tau_r);
    out << buf;
  }
}

std::pair<TrajectoryLog, MetricsReport> run_scenario(const ScenarioSpec& spec) {
  if (spec.type == "control") return run_control(spec);
  return run_planning(spec);
}

std::vector<ScenarioSpec> generate_static_pose_suite(uint64_t seed, int n) {
  if (n < 1) throw ConfigError("static pose suite needs n >= 1");
  std::vector<ScenarioSpec> out;
  uint64_t rng = seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
  const double x_cart0 = 0.8;  // centered start: R + L_c ahead of the base
  for (int i = 0; i < n; ++i) {
    ScenarioSpec s;
    s.type = "planning";
    s.seed = seed + i;
    s.name = "static-pose-" + std::to_string(i);
    s.duration_s = 30.0;
    // composite park-and-turn maneuvers need the longer lookahead
    s.planner_dt = 0.25;
    s.horizon = 24;
    s.ref_kind = "static_pose";
    const double dx = -0.5 + 2.0 * unit(&rng);
    const double dy = (0.3 + 0.7 * unit(&rng)) * (unit(&rng) < 0.5 ? -1.0 : 1.0);
    const double dth = (kPi / 4.0 + (kPi - kPi / 4.0) * unit(&rng)) *
                       (unit(&rng) < 0.5 ? -1.0 : 1.0);
    s.ref_target = Pose2{x_cart0 + dx, dy, dth};
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScenarioSpec> generate_trajectory_suite(uint64_t seed) {
  std::vector<ScenarioSpec> out;
  for (const ReferenceKind kind :
       {ReferenceKind::kSharpSine, ReferenceKind::kTrapezoidalWave, ReferenceKind::kNoisyLine,
        ReferenceKind::kArcWithJump, ReferenceKind::kSCurve}) {
    ScenarioSpec s;
    s.type = "planning";
    s.seed = seed;
    s.name = "trajectory-" + to_string(kind);
    s.duration_s = 25.0;
    s.planner_dt = 0.25;
    s.horizon = 24;
    s.ref_kind = to_string(kind);
    s.ref_params.seed = seed;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScenarioSpec> generate_payload_suite(
    const std::vector<double>& masses_kg, const std::vector<std::string>& controllers) {
  std::vector<ScenarioSpec> out;
  for (const double mass : masses_kg) {
    for (const std::string& ctrl : controllers) {
      ScenarioSpec s;
      s.type = "control";
      s.duration_s = 12.0;
      std::ostringstream name;
      name << "payload-" << mass << "kg-" << ctrl;
      s.name = name.str();
      s.controller_variant = ctrl;
      if (mass > 0.0) {
        DisturbanceTerm t;
        t.kind = DisturbanceTerm::Kind::kPayload;
        t.mass_kg = mass;
        s.disturbances.terms.push_back(t);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<ScenarioSpec> generate_impact_suite(const std::vector<std::string>& controllers) {
  std::vector<ScenarioSpec> out;
  for (const std::string& ctrl : controllers) {
    ScenarioSpec s;
    s.type = "control";
    s.duration_s = 12.0;
    s.name = "impact-" + ctrl;
    s.controller_variant = ctrl;
    s.z_ref_kind = "theta1_hold";
    s.z_ref_amplitude = 0.2;
    s.z0 = Eigen::Vector3d{0.2, 0.0, 0.4};
    DisturbanceTerm imp;
    imp.kind = DisturbanceTerm::Kind::kImpulse;
    imp.channel = 0;
    imp.force_n = 200.0;
    imp.lever_m = 0.4;
    imp.start_s = 5.0;
    imp.duration_s = 0.1;
    s.disturbances.terms.push_back(imp);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScenarioSpec> generate_arm_failure_suite(
    const std::vector<std::string>& controllers) {
  std::vector<ScenarioSpec> out;
  for (const double mass : {0.0, 22.2}) {
    for (const double eta : {1.0, 0.0}) {
      for (const std::string& ctrl : controllers) {
        ScenarioSpec s;
        s.type = "control";
        s.duration_s = 12.0;
        std::ostringstream name;
        name << "arm-failure-" << (eta > 0.5 ? "left" : "right") << "-" << mass << "kg-"
             << ctrl;
        s.name = name.str();
        s.controller_variant = ctrl;
        s.controller.eta = eta;
        s.controller.tau_limit = 20.0;  // halved budget on the surviving arm
        if (mass > 0.0) {
          DisturbanceTerm t;
          t.kind = DisturbanceTerm::Kind::kPayload;
          t.mass_kg = mass;
          s.disturbances.terms.push_back(t);
        }
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

SummaryRow aggregate(const std::string& label, const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw ConfigError("aggregate needs at least one report");
  SummaryRow row;
  row.label = label;
  row.count = static_cast<int>(reports.size());
  double sx = 0, sy = 0, sth = 0;
  for (const MetricsReport& r : reports) {
    row.success_pct += r.success ? 1.0 : 0.0;
    sx += r.e_x_mm;
    sy += r.e_y_mm;
    sth += r.e_theta_deg;
  }
  row.success_pct *= 100.0 / row.count;
  row.e_x_mean_mm = sx / row.count;
  row.e_y_mean_mm = sy / row.count;
  row.e_theta_mean_deg = sth / row.count;
  double vx = 0, vy = 0, vth = 0;
  for (const MetricsReport& r : reports) {
    vx += (r.e_x_mm - row.e_x_mean_mm) * (r.e_x_mm - row.e_x_mean_mm);
    vy += (r.e_y_mm - row.e_y_mean_mm) * (r.e_y_mm - row.e_y_mean_mm);
    vth += (r.e_theta_deg - row.e_theta_mean_deg) * (r.e_theta_deg - row.e_theta_mean_deg);
  }
  row.e_x_std_mm = std::sqrt(vx / row.count);
  row.e_y_std_mm = std::sqrt(vy / row.count);
  row.e_theta_std_deg = std::sqrt(vth / row.count);
  return row;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "label,count,success_pct,e_x_mean_mm,e_x_std_mm,e_y_mean_mm,e_y_std_mm,"
         "e_theta_mean_deg,e_theta_std_deg\n";
  char buf[256];
  for (const SummaryRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.2f,%.3f,%.3f,%.3f,%.3f,%.4f,%.4f\n",
                  r.label.c_str(), r.count, r.success_pct, r.e_x_mean_mm, r.e_x_std_mm,
                  r.e_y_mean_mm, r.e_y_std_mm, r.e_theta_mean_deg, r.e_theta_std_deg);
    out << buf;
  }
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-14s %8s %10s %16s %16s %16s\n", "variant", "n",
                "success%", "e_x(mm) av/std", "e_y(mm) av/std", "e_th(deg) av/std");
  os << buf;
  for (const SummaryRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-14s %8d %10.1f %8.2f/%-7.2f %8.2f/%-7.2f %8.3f/%-7.3f\n",
                  r.label.c_str(), r.count, r.success_pct, r.e_x_mean_mm, r.e_x_std_mm,
                  r.e_y_mean_mm, r.e_y_std_mm, r.e_theta_mean_deg, r.e_theta_std_deg);
    os << buf;
  }
  return os.str();
}

}  // namespace cartpush
