#include "cartpush/controllers.hpp"

#include <cmath>

#include "cartpush/errors.hpp"

namespace cartpush {

namespace {

LocalCoords psi_from_z(const Eigen::Vector3d& z, double handle_width) {
  LocalCoords psi;
  psi.theta1 = z[0];
  psi.theta2 = z[1];
  psi.R = z[2];
  psi.L = handle_width;
  return psi;
}

}  // namespace

Eigen::Vector3d Controller::clamp_for_ik(const Eigen::Vector3d& z) const {
  Eigen::Vector3d out = z;
  out[0] = std::clamp(out[0], -1.45, 1.45);
  out[1] = std::clamp(out[1], -1.45, 1.45);
  out[2] = std::clamp(out[2], 0.08, 0.72);
  return out;
}

void Controller::joint_pd(const Eigen::Vector3d& z_d, const LocalState& state,
                          Eigen::Vector3d* tau_left, Eigen::Vector3d* tau_right) const {
  const LocalCoords psi = psi_from_z(clamp_for_ik(state.z), ctx_.handle_width);
  const LocalCoords psi_d = psi_from_z(clamp_for_ik(z_d), ctx_.handle_width);
  const auto [tl, tr] = arm_targets_from_local(psi);
  const auto [tdl, tdr] = arm_targets_from_local(psi_d);
  const IkResult q = scara_ik(tl, tr, ctx_.geom);
  const IkResult q_d = scara_ik(tdl, tdr, ctx_.geom);

  // joint rates from the chain: qdot = J^-1 Jv zdot
  const auto [jv_l, jv_r] = virtual_jacobians(psi);
  const auto [j_l, j_r] = real_jacobians(q.q, ctx_.geom);
  const Eigen::Vector3d qdot_l = j_l.fullPivLu().solve(jv_l * state.zdot);
  const Eigen::Vector3d qdot_r = j_r.fullPivLu().solve(jv_r * state.zdot);

  for (int i = 0; i < 3; ++i) {
    (*tau_left)[i] = ctx_.gains.kp_joint[i] * wrap_angle(q_d.q.q_left[i] - q.q.q_left[i]) -
                     ctx_.gains.kd_joint[i] * qdot_l[i];
    (*tau_right)[i] =
        ctx_.gains.kp_joint[i] * wrap_angle(q_d.q.q_right[i] - q.q.q_right[i]) -
        ctx_.gains.kd_joint[i] * qdot_r[i];
  }
}

ControllerOutput Controller::assemble(const Eigen::Vector3d& z_d, const LocalState& state,
                                      const Eigen::Vector3d& tau_z_desired) const {
  ControllerOutput out;
  out.z_target = z_d;

  Eigen::Vector3d pd_l = Eigen::Vector3d::Zero(), pd_r = Eigen::Vector3d::Zero();
  joint_pd(z_d, state, &pd_l, &pd_r);
  // a fully one-sided share means the other arm is out of service entirely
  if (ctx_.eta >= 1.0) pd_r.setZero();
  if (ctx_.eta <= 0.0) pd_l.setZero();

  const LocalCoords psi = psi_from_z(clamp_for_ik(state.z), ctx_.handle_width);
  const auto [tl, tr] = arm_targets_from_local(psi);
  const IkResult ik = scara_ik(tl, tr, ctx_.geom);
  const auto [com_l, com_r] =
      force_projection(tau_z_desired, psi, ik.q, ctx_.eta, ctx_.geom);

  out.joints = command_torque(pd_l, pd_r, com_l, com_r, ctx_.tau_limit);
  out.saturated = out.joints.saturated;

  // effective force the plant sees: saturated joint torques pushed back
  // through the chain
  const auto [jv_l, jv_r] = virtual_jacobians(psi);
  const auto [j_l, j_r] = real_jacobians(ik.q, ctx_.geom);
  out.tau_z = jv_l.transpose() * j_l.transpose().fullPivLu().solve(out.joints.tau_left) +
              jv_r.transpose() * j_r.transpose().fullPivLu().solve(out.joints.tau_right);
  return out;
}

namespace {

/// TD + GOB/ESO + nonlinear law: the disturbance rejection stack.
class AdrcController final : public Controller {
 public:
  explicit AdrcController(const ControllerContext& ctx) : Controller(ctx) {
    for (int i = 0; i < 3; ++i) {
      td_[i].r = ctx.td_r[i];
      td_[i].v_max = ctx.td_vmax[i];
    }
    gob1_.b = ctx.gains.b_z[0];
    gob2_.b = ctx.gains.b_z[1];
    eso_.b = ctx.gains.b_z[2];
    eso_.omega_o = ctx.gob_omega_bandwidth;
    for (GobState* g : {&gob1_, &gob2_}) {
      g->xi_min = -ctx.xi_clip;
      g->xi_max = ctx.xi_clip;
    }
  }

  void reset(const LocalState& state) override {
    for (int i = 0; i < 3; ++i) {
      td_[i].z1 = state.z[i];
      td_[i].z2 = 0.0;
    }
    gob1_ = fresh_gob(gob1_, state.z[0]);
    gob2_ = fresh_gob(gob2_, state.z[1]);
    eso_.z1 = state.z[2];
    eso_.z2 = 0.0;
    eso_.z3 = 0.0;
    last_tau_z_.setZero();
  }

  ControllerOutput update(const Eigen::Vector3d& z_ref, const LocalState& state,
                          double h) override {
    // observers first, driven by the measurement and the force actually
    // applied on the previous step
    gob1_ = gob_step(gob1_, state.z[0], last_tau_z_[0], h);
    gob2_ = gob_step(gob2_, state.z[1], last_tau_z_[1], h);
    eso_ = eso_step(eso_, state.z[2], last_tau_z_[2], h);

    Eigen::Vector3d z_d, zdot_d;
    for (int i = 0; i < 3; ++i) {
      td_[i] = td_step(td_[i], z_ref[i], h);
      z_d[i] = td_[i].z1;
      zdot_d[i] = td_[i].z2;
    }

    const Eigen::Vector3d xi{gob1_.xi_hat(), gob2_.xi_hat(),
                             std::clamp(eso_.z3, -ctx_.xi_clip, ctx_.xi_clip)};
    const Eigen::Vector3d tau = adrc_control(z_d, zdot_d, state, xi, ctx_.gains);

    ControllerOutput out = assemble(z_d, state, tau);
    out.xi_hat = xi;
    last_tau_z_ = out.tau_z;
    return out;
  }

 private:
  static GobState fresh_gob(const GobState& tmpl, double theta) {
    GobState g = tmpl;
    g.rot_hat << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    g.omega_hat = 0.0;
    g.d_hat = 0.0;
    return g;
  }

  TdState td_[3];
  GobState gob1_, gob2_;
  EsoState eso_;
  Eigen::Vector3d last_tau_z_ = Eigen::Vector3d::Zero();
};

/// Joint-space PD only.
class PdController final : public Controller {
 public:
  explicit PdController(const ControllerContext& ctx) : Controller(ctx) {}
  void reset(const LocalState&) override {}

  ControllerOutput update(const Eigen::Vector3d& z_ref, const LocalState& state,
                          double) override {
    return assemble(z_ref, state, Eigen::Vector3d::Zero());
  }
};

/// Joint PD plus a flat-output PD on the local coordinates.
class PdfController final : public Controller {
 public:
  explicit PdfController(const ControllerContext& ctx) : Controller(ctx) {}
  void reset(const LocalState&) override {}

  ControllerOutput update(const Eigen::Vector3d& z_ref, const LocalState& state,
                          double) override {
    Eigen::Vector3d e;
    e[0] = geometric_error(z_ref[0], state.z[0]);
    e[1] = geometric_error(z_ref[1], state.z[1]);
    e[2] = z_ref[2] - state.z[2];
    const Eigen::Vector3d tau = ctx_.gains.kp_flat.cwiseProduct(e) -
                                ctx_.gains.kd_flat.cwiseProduct(state.zdot);
    return assemble(z_ref, state, tau);
  }
};

/// Dual-loop PD: an integrating upper loop shifts the internal setpoint,
/// the lower loop tracks it with PD in local coordinates.
class DpdController final : public Controller {
 public:
  explicit DpdController(const ControllerContext& ctx) : Controller(ctx) {}

  void reset(const LocalState& state) override {
    z_d_ = state.z;
    zdot_d_.setZero();
  }

  ControllerOutput update(const Eigen::Vector3d& z_ref, const LocalState& state,
                          double h) override {
    zdot_d_ = ctx_.gains.ki_dpd.cwiseProduct(z_ref - state.z);
    z_d_ += h * zdot_d_;
    for (int i = 0; i < 2; ++i) z_d_[i] = wrap_angle(z_d_[i]);
    const Eigen::Vector3d tau = ctx_.gains.kp_flat.cwiseProduct(z_d_ - state.z) +
                                ctx_.gains.kd_flat.cwiseProduct(zdot_d_ - state.zdot);
    return assemble(z_d_, state, tau);
  }

 private:
  Eigen::Vector3d z_d_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d zdot_d_ = Eigen::Vector3d::Zero();
};

/// Model-reference adaptive control, one second-order reference model per
/// channel, Lyapunov update with the sign of the input gain.
class MracController final : public Controller {
 public:
  explicit MracController(const ControllerContext& ctx) : Controller(ctx) {
    const double a = ctx.gains.a_m;
    // P solves Am' P + P Am = -I for Am = [[0, 1], [-a^2, -2a]]
    p12_ = 1.0 / (2.0 * a * a);
    p22_ = (1.0 + 2.0 * p12_) / (4.0 * a);
    p11_ = a * a * p22_ + 2.0 * a * p12_;
  }

  void reset(const LocalState& state) override {
    const ControlGains& g = ctx_.gains;
    for (int i = 0; i < 3; ++i) {
      xm_[i] = Eigen::Vector2d{state.z[i], state.zdot[i]};
      // start from the gains matched to the nominal no-payload plant; the
      // update law then absorbs payload and friction mismatch online
      kz_[i] = Eigen::Vector2d{-g.a_m * g.a_m / g.b_z[i], -2.0 * g.a_m / g.b_z[i]};
      kr_[i] = g.b_m / g.b_z[i];
      zd_f_[i] = state.z[i];
    }
    capped_ = false;
  }

  ControllerOutput update(const Eigen::Vector3d& z_ref, const LocalState& state,
                          double h) override {
    const ControlGains& g = ctx_.gains;
    Eigen::Vector3d tau;
    for (int i = 0; i < 3; ++i) {
      zd_f_[i] += h / g.zd_filter_tau * (z_ref[i] - zd_f_[i]);

      // reference model integration
      const Eigen::Vector2d xm = xm_[i];
      xm_[i][0] += h * xm[1];
      xm_[i][1] += h * (-g.a_m * g.a_m * xm[0] - 2.0 * g.a_m * xm[1] + g.b_m * zd_f_[i]);

      const Eigen::Vector2d x{state.z[i], state.zdot[i]};
      const Eigen::Vector2d e = x - xm_[i];
      // e' P B with B picking the rate row
      const double epb = e[0] * p12_ + e[1] * p22_;
      kz_[i] += h * (-g.gamma_z * x * epb);  // sign(b) = +1 on every channel
      kr_[i] += h * (-g.gamma_r * zd_f_[i] * epb);
      const double norm = std::sqrt(kz_[i].squaredNorm() + kr_[i] * kr_[i]);
      if (norm > g.mrac_gain_cap) {
        const double s = g.mrac_gain_cap / norm;
        kz_[i] *= s;
        kr_[i] *= s;
        capped_ = true;
      }
      tau[i] = kz_[i].dot(x) + kr_[i] * zd_f_[i];
    }
    ControllerOutput out = assemble(zd_f_, state, tau);
    out.saturated = out.saturated || capped_;
    return out;
  }

 private:
  double p11_ = 0.0, p12_ = 0.0, p22_ = 0.0;
  Eigen::Vector2d xm_[3];
  Eigen::Vector2d kz_[3];
  double kr_[3] = {0.0, 0.0, 0.0};
  Eigen::Vector3d zd_f_ = Eigen::Vector3d::Zero();
  bool capped_ = false;
};

}  // namespace

std::unique_ptr<Controller> make_controller(const std::string& variant,
                                            const ControllerContext& ctx) {
  if (variant == "gob") return std::make_unique<AdrcController>(ctx);
  if (variant == "pd") return std::make_unique<PdController>(ctx);
  if (variant == "pdf") return std::make_unique<PdfController>(ctx);
  if (variant == "dpd") return std::make_unique<DpdController>(ctx);
  if (variant == "mrac") return std::make_unique<MracController>(ctx);
  throw ConfigError("unknown controller variant '" + variant + "'");
}

}  // namespace cartpush
