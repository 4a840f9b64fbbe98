#ifndef CARTPUSH_REFERENCE_HPP_
#define CARTPUSH_REFERENCE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cartpush/planner.hpp"

namespace cartpush {

/// A time-stamped cart pose sample of a reference trajectory.
struct ReferenceSample {
  double t = 0.0;
  Pose2 pose;
  UnicycleCmd feedforward;
};

/// Analytic reference kinds of the tracking benchmark. All start at the
/// given initial cart pose and head along its x axis.
enum class ReferenceKind {
  kSharpSine,
  kTrapezoidalWave,
  kNoisyLine,
  kArcWithJump,
  kSCurve,
};

ReferenceKind reference_kind_from_string(const std::string& s);
std::string to_string(ReferenceKind k);

struct ReferenceParams {
  double speed = 0.4;       // nominal forward speed, m/s
  double amplitude = 0.6;   // lateral scale, m
  double wavelength = 4.0;  // spatial period, m
  double jump = 0.6;        // discontinuity size, m
  double noise_sigma = 0.08;
  uint64_t seed = 7;
};

/// Samples an analytic reference at fixed dt over the duration.
/// Throws UnknownKind for unrecognized kinds (string front-end).
std::vector<ReferenceSample> generate_reference_trajectory(ReferenceKind kind,
                                                           const Pose2& start,
                                                           const ReferenceParams& params,
                                                           double duration_s, double dt);

/// Reference provider for the planner: serves N-stage windows from either a
/// static pose, a waypoint list (linear position interpolation, shortest-arc
/// heading blend, advance within 0.15 m) or a sampled trajectory.
class ReferenceProvider {
 public:
  static ReferenceProvider static_pose(const Pose2& target);
  static ReferenceProvider waypoints(std::vector<Pose2> points, double advance_radius = 0.15);
  static ReferenceProvider trajectory(std::vector<ReferenceSample> samples);

  /// Window of n stage references starting at time t; waypoint mode also
  /// needs the current cart pose to advance the active waypoint.
  std::vector<ReferencePoint> window(double t, double dt, int n, const Pose2& cart);

  /// Reference pose at time t (for error logging).
  Pose2 sample(double t, const Pose2& cart) const;

  /// Final target (for convergence metrics).
  Pose2 goal() const;

 private:
  enum class Mode { kStatic, kWaypoints, kTrajectory };
  Mode mode_ = Mode::kStatic;
  Pose2 target_;
  std::vector<Pose2> points_;
  double advance_radius_ = 0.15;
  size_t active_ = 0;
  std::vector<ReferenceSample> samples_;
};

}  // namespace cartpush

#endif  // CARTPUSH_REFERENCE_HPP_
