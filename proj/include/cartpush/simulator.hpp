#ifndef CARTPUSH_SIMULATOR_HPP_
#define CARTPUSH_SIMULATOR_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cartpush/kinematics.hpp"
#include "cartpush/local_frame.hpp"

namespace cartpush {

/// One disturbance source acting on the local-coordinate channels
/// (0 = theta1, 1 = theta2, 2 = R).
struct DisturbanceTerm {
  enum class Kind { kConstant, kPayload, kImpulse, kNoise };
  Kind kind = Kind::kConstant;
  int channel = 0;

  double magnitude = 0.0;  // constant: acceleration-level bias

  double mass_kg = 0.0;  // payload: rolling resistance + inertia scaling

  double force_n = 0.0;  // impulse: rectangular force pulse
  double lever_m = 0.4;
  double start_s = 0.0;
  double duration_s = 0.1;

  double sigma = 0.0;  // noise: band-limited, acceleration-level
  double tau_s = 0.05;
  uint64_t seed = 0;
};

struct DisturbanceSpec {
  std::vector<DisturbanceTerm> terms;

  double total_payload_kg() const;
};

/// Physical parameters of the disturbed local-coordinate plant.
struct DynamicPlantParams {
  Eigen::Vector3d b_true{2.0, 3.0, 5.0};       // inertia parameters
  Eigen::Vector3d damping{0.5, 0.5, 2.0};      // viscous, acceleration-level
  Eigen::Vector3d coulomb{0.1, 0.1, 0.2};      // smoothed Coulomb level
  double m_cart_nominal = 30.0;
  double mu_roll = 0.05;
  double gravity = 9.81;
  double lever = 0.4;  // moment arm of payload resistance on the angle channels
  double payload_smoothing = 0.002;  // velocity width of the resist sign smoothing
};

/// Stateful disturbance evaluator; owns the band-limited noise processes so
/// a fixed seed reproduces the same sequence bit for bit.
class DisturbanceModel {
 public:
  DisturbanceModel() = default;
  DisturbanceModel(const DisturbanceSpec& spec, const DynamicPlantParams& params);

  /// Sum of active terms at time t, acceleration level. Advances the noise
  /// processes by dt (call exactly once per plant step).
  Eigen::Vector3d eval(double t, const Eigen::Vector3d& zdot, double dt);

  /// Stateless evaluation of the deterministic terms only.
  static Eigen::Vector3d eval_deterministic(const DisturbanceSpec& spec,
                                            const DynamicPlantParams& params, double t,
                                            const Eigen::Vector3d& zdot);

  double payload_kg() const { return payload_kg_; }

 private:
  struct NoiseState {
    int channel = 0;
    double sigma = 0.0;
    double tau = 0.05;
    double value = 0.0;
    uint64_t rng_state = 0;
  };

  DisturbanceSpec spec_;
  DynamicPlantParams params_;
  double payload_kg_ = 0.0;
  std::vector<NoiseState> noise_;
};

/// Second-order disturbed plant in local coordinates, semi-implicit Euler.
class DynamicLocalPlant {
 public:
  DynamicLocalPlant() = default;
  DynamicLocalPlant(const DynamicPlantParams& params, const DisturbanceSpec& disturbances,
                    const Eigen::Vector3d& z0);

  /// Applies a generalized force for one step of length dt.
  void step(const Eigen::Vector3d& tau_theta, double dt);

  const Eigen::Vector3d& z() const { return z_; }
  const Eigen::Vector3d& zdot() const { return zdot_; }
  double time() const { return t_; }
  const DynamicPlantParams& params() const { return params_; }
  double payload_kg() const { return disturbance_.payload_kg(); }

  /// Last evaluated disturbance (for logging).
  const Eigen::Vector3d& last_xi() const { return last_xi_; }

 private:
  DynamicPlantParams params_;
  DisturbanceModel disturbance_;
  Eigen::Vector3d z_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d zdot_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d last_xi_ = Eigen::Vector3d::Zero();
  double t_ = 0.0;
};

/// First-order command lag and saturation settings of the kinematic plant,
/// per whole-body channel (v0, w0, w1, w2).
struct KinematicPlantParams {
  Eigen::Vector4d lag_tau = Eigen::Vector4d::Zero();  // seconds, 0 = no lag
  Eigen::Vector4d saturation{1.0, 2.0, 1.5, 1.5};     // symmetric command limits
  WorkspaceLimits workspace;
  double cart_half_link = 0.4;
};

/// Kinematic whole-body plant: base unicycle plus integrated local
/// coordinates; the cart pose is recomputed from the chain every step.
class KinematicPlant {
 public:
  KinematicPlant() = default;
  KinematicPlant(const KinematicPlantParams& params, const Pose2& base0,
                 const LocalCoords& psi0);

  /// One step with the commanded (v0, w0, w1, w2). Commands pass through
  /// the first-order lag, then saturation, then RK4 integration. Throws
  /// WorkspaceViolation after clamping when psi leaves its box.
  void step(const Eigen::Vector4d& commands, double dt);

  const Pose2& base() const { return base_; }
  const LocalCoords& psi() const { return psi_; }
  Pose2 cart() const;
  const Eigen::Vector4d& actual_commands() const { return lagged_; }
  double time() const { return t_; }
  const KinematicPlantParams& params() const { return params_; }

 private:
  KinematicPlantParams params_;
  Pose2 base_;
  LocalCoords psi_;
  Eigen::Vector4d lagged_ = Eigen::Vector4d::Zero();
  double t_ = 0.0;
};

}  // namespace cartpush

#endif  // CARTPUSH_SIMULATOR_HPP_
