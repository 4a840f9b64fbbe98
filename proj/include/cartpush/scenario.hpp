#ifndef CARTPUSH_SCENARIO_HPP_
#define CARTPUSH_SCENARIO_HPP_

#include <string>
#include <vector>

#include "cartpush/controllers.hpp"
#include "cartpush/planner.hpp"
#include "cartpush/reference.hpp"
#include "cartpush/simulator.hpp"

namespace cartpush {

struct SuccessThresholds {
  double position_m = 0.1;
  double heading_deg = 10.0;
  double control_steady_rad = 0.05;
};

/// Self-contained description of one experiment run.
struct ScenarioSpec {
  std::string name = "scenario";
  uint64_t seed = 1;
  std::string type = "planning";  // planning | control
  double duration_s = 30.0;

  ArmGeometry geom;
  ModelParams model;

  // planning block
  std::string planner_variant = "lf";
  int horizon = 20;
  double planner_dt = 0.1;
  double qn_scale = 5.0;
  std::vector<double> q_weights;  // empty = variant default
  std::vector<double> r_weights;
  std::vector<double> u_min;
  std::vector<double> u_max;
  int max_iters = 60;
  double replan_interval_s = 0.1;
  std::string plant_kind = "model";  // model | chain (planning scenarios)
  KinematicPlantParams kinematic;

  // reference block
  std::string ref_kind = "static_pose";
  Pose2 ref_target{1.6, 0.0, 0.0};
  std::vector<Pose2> waypoints;
  ReferenceParams ref_params;

  // control block
  std::string controller_variant = "gob";
  ControllerContext controller;
  DynamicPlantParams plant;
  DisturbanceSpec disturbances;
  std::string z_ref_kind = "theta1_step";  // theta1_step | theta1_hold
  double z_ref_amplitude = 0.4;
  double z_ref_time = 1.0;
  Eigen::Vector3d z0{0.0, 0.0, 0.4};

  SuccessThresholds success;

  PlannerProblem planner_problem() const;
  ReferenceProvider reference_provider(const Pose2& initial_cart) const;
  Eigen::Vector3d z_reference(double t) const;
};

/// Parses a scenario from JSON text. Unknown or ill-typed keys raise
/// ConfigError naming the offending key; syntax errors carry the line.
ScenarioSpec parse_scenario(const std::string& json_text);
ScenarioSpec load_scenario_file(const std::string& path);
std::string scenario_to_json(const ScenarioSpec& spec);

}  // namespace cartpush

#endif  // CARTPUSH_SCENARIO_HPP_
