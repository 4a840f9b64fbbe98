#ifndef CARTPUSH_PLANNER_HPP_
#define CARTPUSH_PLANNER_HPP_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cartpush/kinematics.hpp"

namespace cartpush {

enum class PlannerVariant { kNmpc, kWb, kTt, kLf };

PlannerVariant planner_variant_from_string(const std::string& s);
std::string to_string(PlannerVariant v);

/// One stage of the reference window: desired cart pose plus an optional
/// cart-twist feedforward.
struct ReferencePoint {
  Pose2 pose;
  std::optional<UnicycleCmd> feedforward;
};

struct SolveStats {
  int iterations = 0;
  double cost = 0.0;
  double kkt_residual = 0.0;
  double wall_time_s = 0.0;
  bool converged = false;
  std::vector<double> merit_history;  // accepted-iterate costs of the kept solve
};

/// Receding-horizon problem description for one variant.
struct PlannerProblem {
  PlannerVariant variant = PlannerVariant::kLf;
  int horizon = 20;
  double dt = 0.1;
  ModelParams model;

  Eigen::VectorXd q;           // stage weights on the cost state
  Eigen::VectorXd q_terminal;  // terminal weights
  Eigen::VectorXd r_w;         // input weights
  Eigen::VectorXd u_min;
  Eigen::VectorXd u_max;

  // soft bounds on the substituted base channels of the LF variant
  double lf_v0_bound = 1.0;
  double lf_omega0_bound = 2.0;
  double lf_penalty_weight = 50.0;

  // soft workspace box on the deflection angles of the arm-bearing variants
  double theta_soft_limit = 0.45;
  double theta_penalty_weight = 400.0;

  int max_iters = 60;       // per warm-started solve
  int cold_max_iters = 400;  // initialization solves get a bigger budget
  double tol = 1e-8;

  // clamps applied to the emitted whole-body command (v0, w0, w1, w2)
  Eigen::Vector4d wb_min{-1.0, -2.0, -1.5, -1.5};
  Eigen::Vector4d wb_max{1.0, 2.0, 1.5, 1.5};

  int state_dim() const;
  int input_dim() const;
  int cost_dim() const;

  static PlannerProblem defaults_for(PlannerVariant v, const ModelParams& m = {});
};

struct PlanOutput {
  Eigen::Vector4d whole_body = Eigen::Vector4d::Zero();  // v0, w0, w1, w2
  Eigen::VectorXd model_command;                         // first model-space control
  UnicycleCmd cart_twist;                                // logged (v_c, w_c)
  std::vector<Eigen::VectorXd> predicted;                // N + 1 model states
  Eigen::VectorXd control_sequence;                      // stacked solution, m * N
  SolveStats stats;
};

/// Exact differential kinematics of the whole chain for the WB variant:
/// state (x_c, y_c, theta_c, theta1, theta2), input (v0, w0, w1, w2).
Eigen::VectorXd wb_transition(const Eigen::VectorXd& x, const Eigen::Vector4d& u,
                              const ModelParams& p);

/// Solves the variant's discrete OCP by SQP over a single-shooting
/// parameterization with analytic gradients and a box-projected Newton step.
/// A null warm start triggers the deterministic cold-start profile set.
PlanOutput solve_nlp(const PlannerProblem& prob, const Eigen::VectorXd& x0,
                     const std::vector<ReferencePoint>& refs,
                     const Eigen::VectorXd* warm_start);

/// Builds the variant's model state from plant measurements.
Eigen::VectorXd planner_state_from(PlannerVariant v, const Pose2& cart, double theta0,
                                   double theta1, double theta2);

/// Objective value of the shooting OCP at a stacked control sequence
/// (excluding the constant stage-0 state term); exposed for gradient checks.
double ocp_cost(const PlannerProblem& prob, const Eigen::VectorXd& x0,
                const std::vector<ReferencePoint>& refs, const Eigen::VectorXd& u_stacked);

/// Analytic gradient of ocp_cost with respect to the stacked controls.
Eigen::VectorXd ocp_gradient(const PlannerProblem& prob, const Eigen::VectorXd& x0,
                             const std::vector<ReferencePoint>& refs,
                             const Eigen::VectorXd& u_stacked);

/// Receding-horizon wrapper owning the warm start.
class Planner {
 public:
  explicit Planner(PlannerProblem prob) : prob_(std::move(prob)) {}

  PlanOutput plan_tick(const Eigen::VectorXd& x0, const std::vector<ReferencePoint>& refs);
  void reset() { warm_.reset(); }
  const PlannerProblem& problem() const { return prob_; }
  bool has_warm_start() const { return warm_.has_value(); }

 private:
  PlannerProblem prob_;
  std::optional<Eigen::VectorXd> warm_;
};

}  // namespace cartpush

#endif  // CARTPUSH_PLANNER_HPP_
