#ifndef CARTPUSH_BENCH_HPP_
#define CARTPUSH_BENCH_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "cartpush/scenario.hpp"

namespace cartpush {

/// Per-step trajectory log with the documented CSV column set.
struct TrajectoryLog {
  static const char* csv_header();

  struct Row {
    double t = 0.0;
    double x_c = 0.0, y_c = 0.0, theta_c = 0.0;
    double theta1 = 0.0, theta2 = 0.0;
    double v_c = 0.0, omega_c = 0.0;
    double v0 = 0.0, omega0 = 0.0;
    double e_x = 0.0, e_y = 0.0, e_theta = 0.0;
    double xi_hat_theta1 = 0.0, xi_hat_theta2 = 0.0, xi_hat_r = 0.0;
    double tau_theta1 = 0.0, tau_theta2 = 0.0, tau_r = 0.0;
  };

  std::vector<Row> rows;

  void write_csv(std::ostream& out) const;
};

struct SolveAggregate {
  int solves = 0;
  double mean_iterations = 0.0;
  int max_iterations = 0;
  double mean_cost = 0.0;
  double max_kkt = 0.0;
  double total_wall_s = 0.0;
  int non_converged = 0;
};

/// Outcome of one scenario run.
struct MetricsReport {
  std::string name;
  bool success = false;

  // convergence errors versus the goal pose (planning) in Table-style units
  double e_x_mm = 0.0;
  double e_y_mm = 0.0;
  double e_theta_deg = 0.0;

  double rmse_m = 0.0;       // position tracking RMSE (planning)
  double max_error_m = 0.0;  // worst instantaneous position error

  // control scenarios
  double steady_error_rad = 0.0;
  double rmse_theta1_rad = 0.0;
  double peak_deflection_rad = 0.0;
  double overshoot_rad = 0.0;
  double recovery_time_s = -1.0;  // impact protocol, -1 when not applicable

  std::vector<double> error_series;  // per logged step
  SolveAggregate solver;

  bool flag_saturation = false;
  bool flag_workspace_violation = false;
  bool flag_solver_nonconverged = false;
  bool flag_nonfinite = false;
};

/// Runs one scenario closed loop (planner at its own rate, controller and
/// simulator at 1 kHz). Module errors become flags, never aborts.
std::pair<TrajectoryLog, MetricsReport> run_scenario(const ScenarioSpec& spec);

/// The regenerated static-pose suite: n targets with lateral offset
/// 0.3..1.0 m, heading change pi/4..pi and forward offset -0.5..1.5 m,
/// deterministic in the seed.
std::vector<ScenarioSpec> generate_static_pose_suite(uint64_t seed, int n);

/// One tracking scenario per analytic reference kind.
std::vector<ScenarioSpec> generate_trajectory_suite(uint64_t seed);

/// Controller evaluation scenarios of the payload protocol.
std::vector<ScenarioSpec> generate_payload_suite(const std::vector<double>& masses_kg,
                                                 const std::vector<std::string>& controllers);

/// Impact protocol: 200 N lateral pulse on the theta1 channel.
std::vector<ScenarioSpec> generate_impact_suite(const std::vector<std::string>& controllers);

/// Single-arm-failure protocol: eta 0/1 with halved torque limits.
std::vector<ScenarioSpec> generate_arm_failure_suite(
    const std::vector<std::string>& controllers);

/// Aggregated row of a comparison table, Table-style units (mm, degree).
struct SummaryRow {
  std::string label;
  int count = 0;
  double success_pct = 0.0;
  double e_x_mean_mm = 0.0, e_x_std_mm = 0.0;
  double e_y_mean_mm = 0.0, e_y_std_mm = 0.0;
  double e_theta_mean_deg = 0.0, e_theta_std_deg = 0.0;
};

SummaryRow aggregate(const std::string& label, const std::vector<MetricsReport>& reports);

/// Emits the comparison table as CSV (header + one row per entry).
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Human-readable fixed-width table of the same rows.
std::string format_summary_table(const std::vector<SummaryRow>& rows);

}  // namespace cartpush

#endif  // CARTPUSH_BENCH_HPP_
