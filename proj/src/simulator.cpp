#include "cartpush/simulator.hpp"

#include <cmath>

#include "cartpush/errors.hpp"

namespace cartpush {

namespace {

// splitmix64: tiny deterministic generator, identical on every platform
uint64_t next_u64(uint64_t* state) {
  uint64_t z = (*state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double next_unit(uint64_t* state) {
  return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

double next_gaussian(uint64_t* state) {
  // Box-Muller; u1 kept away from 0
  const double u1 = std::max(next_unit(state), 1e-300);
  const double u2 = next_unit(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double smooth_sign(double v) { return std::tanh(v / 0.01); }

}  // namespace

double DisturbanceSpec::total_payload_kg() const {
  double m = 0.0;
  for (const DisturbanceTerm& t : terms) {
    if (t.kind == DisturbanceTerm::Kind::kPayload) m += t.mass_kg;
  }
  return m;
}

DisturbanceModel::DisturbanceModel(const DisturbanceSpec& spec,
                                   const DynamicPlantParams& params)
    : spec_(spec), params_(params), payload_kg_(spec.total_payload_kg()) {
  for (const DisturbanceTerm& t : spec.terms) {
    if (t.kind == DisturbanceTerm::Kind::kNoise) {
      NoiseState n;
      n.channel = t.channel;
      n.sigma = t.sigma;
      n.tau = t.tau_s;
      n.rng_state = t.seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
      noise_.push_back(n);
    }
  }
}

Eigen::Vector3d DisturbanceModel::eval_deterministic(const DisturbanceSpec& spec,
                                                     const DynamicPlantParams& params,
                                                     double t,
                                                     const Eigen::Vector3d& zdot) {
  Eigen::Vector3d xi = Eigen::Vector3d::Zero();
  for (const DisturbanceTerm& term : spec.terms) {
    switch (term.kind) {
      case DisturbanceTerm::Kind::kConstant:
        xi[term.channel] += term.magnitude;
        break;
      case DisturbanceTerm::Kind::kPayload: {
        // rolling resistance opposing motion on every channel; torque on the
        // angle channels through the lever, force on R. Physical units are
        // mapped to acceleration level through the channel inertia.
        const double base = params.mu_roll * term.mass_kg * params.gravity;
        for (int ch = 0; ch < 3; ++ch) {
          const double arm = ch < 2 ? params.lever : 1.0;
          xi[ch] -= params.b_true[ch] * base * arm *
                    std::tanh(zdot[ch] / params.payload_smoothing);
        }
        break;
      }
      case DisturbanceTerm::Kind::kImpulse:
        if (t >= term.start_s && t < term.start_s + term.duration_s) {
          xi[term.channel] += params.b_true[term.channel] * term.force_n * term.lever_m;
        }
        break;
      case DisturbanceTerm::Kind::kNoise:
        break;  // handled by the stateful path
    }
  }
  return xi;
}

Eigen::Vector3d DisturbanceModel::eval(double t, const Eigen::Vector3d& zdot, double dt) {
  Eigen::Vector3d xi = eval_deterministic(spec_, params_, t, zdot);
  for (NoiseState& n : noise_) {
    // Ornstein-Uhlenbeck process at the plant rate
    const double a = dt / n.tau;
    n.value += -a * n.value + n.sigma * std::sqrt(2.0 * a) * next_gaussian(&n.rng_state);
    xi[n.channel] += n.value;
  }
  return xi;
}

DynamicLocalPlant::DynamicLocalPlant(const DynamicPlantParams& params,
                                     const DisturbanceSpec& disturbances,
                                     const Eigen::Vector3d& z0)
    : params_(params), disturbance_(disturbances, params), z_(z0) {}

void DynamicLocalPlant::step(const Eigen::Vector3d& tau_theta, double dt) {
  last_xi_ = disturbance_.eval(t_, zdot_, dt);
  const double inertia_scale = 1.0 + disturbance_.payload_kg() / params_.m_cart_nominal;
  Eigen::Vector3d zddot;
  for (int i = 0; i < 3; ++i) {
    zddot[i] = (params_.b_true[i] * tau_theta[i] - params_.damping[i] * zdot_[i] -
                params_.coulomb[i] * smooth_sign(zdot_[i]) + last_xi_[i]) /
               inertia_scale;
  }
  if (!zddot.allFinite()) throw NonFinite("dynamic plant acceleration not finite");
  zdot_ += dt * zddot;  // semi-implicit: velocity first, then position
  z_ += dt * zdot_;
  z_[0] = wrap_angle(z_[0]);
  z_[1] = wrap_angle(z_[1]);
  t_ += dt;
}

KinematicPlant::KinematicPlant(const KinematicPlantParams& params, const Pose2& base0,
                               const LocalCoords& psi0)
    : params_(params), base_(base0), psi_(psi0) {}

Pose2 KinematicPlant::cart() const {
  return cart_pose_from_base(base_, psi_, params_.cart_half_link);
}

void KinematicPlant::step(const Eigen::Vector4d& commands, double dt) {
  // first-order lag (exact exponential step), then saturation
  for (int i = 0; i < 4; ++i) {
    if (params_.lag_tau[i] > 0.0) {
      const double alpha = 1.0 - std::exp(-dt / params_.lag_tau[i]);
      lagged_[i] += alpha * (commands[i] - lagged_[i]);
    } else {
      lagged_[i] = commands[i];
    }
    lagged_[i] = std::clamp(lagged_[i], -params_.saturation[i], params_.saturation[i]);
  }

  Eigen::VectorXd x(5);
  x << base_.x, base_.y, base_.theta, psi_.theta1, psi_.theta2;
  const double v0 = lagged_[0], w0 = lagged_[1], w1 = lagged_[2], w2 = lagged_[3];
  x = integrate_rk4(
      [&](const Eigen::VectorXd& s) {
        Eigen::VectorXd d(5);
        d << v0 * std::cos(s[2]), v0 * std::sin(s[2]), w0, w1, w2;
        return d;
      },
      x, dt, {2, 3, 4});

  base_ = {x[0], x[1], x[2]};
  psi_.theta1 = x[3];
  psi_.theta2 = x[4];
  t_ += dt;

  if (!params_.workspace.contains(psi_)) {
    const double lim = params_.workspace.theta_max - 1e-9;
    psi_.theta1 = std::clamp(psi_.theta1, -lim, lim);
    psi_.theta2 = std::clamp(psi_.theta2, -lim, lim);
    psi_.R = std::clamp(psi_.R, params_.workspace.r_min, params_.workspace.r_max);
    throw WorkspaceViolation("local coordinates left the workspace box");
  }
}

}  // namespace cartpush
