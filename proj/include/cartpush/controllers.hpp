#ifndef CARTPUSH_CONTROLLERS_HPP_
#define CARTPUSH_CONTROLLERS_HPP_

#include <memory>
#include <string>

#include "cartpush/control_laws.hpp"
#include "cartpush/observers.hpp"

namespace cartpush {

/// Shared configuration of the arm controller stack.
struct ControllerContext {
  ArmGeometry geom;
  double handle_width = 0.5;  // L, fixed per scenario
  double eta = 0.5;           // left/right force share
  double tau_limit = 40.0;    // per-joint torque limit, N m
  ControlGains gains;
  Eigen::Vector3d td_r{400.0, 400.0, 400.0};
  Eigen::Vector3d td_vmax{4.0, 4.0, 0.8};
  double xi_clip = 10.0;
  double gob_omega_bandwidth = 20.0;  // ESO bandwidth for the R channel
};

struct ControllerOutput {
  TorqueCommand joints;
  Eigen::Vector3d tau_z = Eigen::Vector3d::Zero();  // effective z-space force
  Eigen::Vector3d xi_hat = Eigen::Vector3d::Zero();
  Eigen::Vector3d z_target = Eigen::Vector3d::Zero();  // shaped setpoint
  bool saturated = false;
};

/// One arm controller driving the local-coordinate plant. Implementations
/// are deterministic state machines stepped at the control rate.
class Controller {
 public:
  explicit Controller(const ControllerContext& ctx) : ctx_(ctx) {}
  virtual ~Controller() = default;

  virtual void reset(const LocalState& state) = 0;
  virtual ControllerOutput update(const Eigen::Vector3d& z_ref, const LocalState& state,
                                  double h) = 0;
  const ControllerContext& context() const { return ctx_; }

 protected:
  // joint-space PD on the IK solution of the shaped target
  Eigen::Vector3d clamp_for_ik(const Eigen::Vector3d& z) const;
  void joint_pd(const Eigen::Vector3d& z_d, const LocalState& state,
                Eigen::Vector3d* tau_left, Eigen::Vector3d* tau_right) const;
  // projected compensation + PD, saturation, and the effective z force
  ControllerOutput assemble(const Eigen::Vector3d& z_d, const LocalState& state,
                            const Eigen::Vector3d& tau_z_desired) const;

  ControllerContext ctx_;
};

/// Controller variants of the benchmark.
std::unique_ptr<Controller> make_controller(const std::string& variant,
                                            const ControllerContext& ctx);

}  // namespace cartpush

#endif  // CARTPUSH_CONTROLLERS_HPP_
