#include "cartpush/reference.hpp"

#include <cmath>

#include "cartpush/errors.hpp"

namespace cartpush {

namespace {

uint64_t mix_u64(uint64_t* state) {
  uint64_t z = (*state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit(uint64_t* state) {
  return static_cast<double>(mix_u64(state) >> 11) * 0x1.0p-53;
}

double gaussian(uint64_t* state) {
  const double u1 = std::max(unit(state), 1e-300);
  const double u2 = unit(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// lateral profile y(s) in the start frame for each kind
struct Profile {
  std::vector<double> xs;
  std::vector<double> ys;
};

Profile build_profile(ReferenceKind kind, const ReferenceParams& p, double duration_s,
                      double dt) {
  Profile prof;
  const int n = static_cast<int>(duration_s / dt) + 1;
  prof.xs.resize(n);
  prof.ys.resize(n);
  uint64_t rng = p.seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
  double ou = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = p.speed * i * dt;
    prof.xs[i] = s;
    switch (kind) {
      case ReferenceKind::kSharpSine:
        prof.ys[i] = p.amplitude * std::sin(2.0 * kPi * s / p.wavelength);
        break;
      case ReferenceKind::kTrapezoidalWave: {
        // flat top, ramp down, flat bottom, vertical jump back up
        const double phase = std::fmod(s, p.wavelength) / p.wavelength;
        if (phase < 0.4) {
          prof.ys[i] = p.amplitude;
        } else if (phase < 0.6) {
          prof.ys[i] = p.amplitude * (1.0 - 2.0 * (phase - 0.4) / 0.2);
        } else {
          prof.ys[i] = -p.amplitude;
        }
        break;
      }
      case ReferenceKind::kNoisyLine: {
        const double a = dt / 0.5;  // slow wander plus the sample noise below
        ou += -a * ou + p.noise_sigma * std::sqrt(2.0 * a) * gaussian(&rng);
        prof.ys[i] = ou;
        break;
      }
      case ReferenceKind::kArcWithJump: {
        const double radius = 2.0;
        const double ang = s / radius;
        prof.xs[i] = radius * std::sin(ang);
        prof.ys[i] = radius * (1.0 - std::cos(ang));
        if (i * dt >= 0.5 * duration_s) prof.ys[i] += p.jump;
        break;
      }
      case ReferenceKind::kSCurve: {
        const double span = p.wavelength;
        const double f = std::clamp(s / span, 0.0, 1.0);
        prof.ys[i] = p.amplitude * 0.5 * (1.0 - std::cos(kPi * f));
        break;
      }
    }
  }
  return prof;
}

}  // namespace

ReferenceKind reference_kind_from_string(const std::string& s) {
  if (s == "sharp-sine") return ReferenceKind::kSharpSine;
  if (s == "trapezoidal-wave") return ReferenceKind::kTrapezoidalWave;
  if (s == "noisy-line") return ReferenceKind::kNoisyLine;
  if (s == "arc-with-jump") return ReferenceKind::kArcWithJump;
  if (s == "s-curve") return ReferenceKind::kSCurve;
  throw UnknownKind("unknown reference kind '" + s + "'");
}

std::string to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::kSharpSine: return "sharp-sine";
    case ReferenceKind::kTrapezoidalWave: return "trapezoidal-wave";
    case ReferenceKind::kNoisyLine: return "noisy-line";
    case ReferenceKind::kArcWithJump: return "arc-with-jump";
    case ReferenceKind::kSCurve: return "s-curve";
  }
  return "?";
}

std::vector<ReferenceSample> generate_reference_trajectory(ReferenceKind kind,
                                                           const Pose2& start,
                                                           const ReferenceParams& params,
                                                           double duration_s, double dt) {
  const Profile prof = build_profile(kind, params, duration_s, dt);
  const int n = static_cast<int>(prof.xs.size());
  const Transform2 to_world = Transform2::from_pose(start);

  std::vector<ReferenceSample> out(n);
  double heading = 0.0;
  for (int i = 0; i < n; ++i) {
    double dx = 0.0, dy = 0.0;
    if (i + 1 < n) {
      dx = prof.xs[i + 1] - prof.xs[i];
      dy = prof.ys[i + 1] - prof.ys[i];
    } else if (i > 0) {
      dx = prof.xs[i] - prof.xs[i - 1];
      dy = prof.ys[i] - prof.ys[i - 1];
    }
    const double step_len = std::hypot(dx, dy);
    const bool jump = step_len > 5.0 * params.speed * dt + 1e-12;
    if (step_len > 1e-9 && !jump) heading = std::atan2(dy, dx);

    const Eigen::Vector2d pw = to_world.apply({prof.xs[i], prof.ys[i]});
    out[i].t = i * dt;
    out[i].pose = Pose2{pw.x(), pw.y(), wrap_angle(start.theta + heading)};
    out[i].feedforward.v = jump ? params.speed : step_len / dt;
  }
  for (int i = 0; i + 1 < n; ++i) {
    out[i].feedforward.omega =
        std::clamp(angle_diff(out[i + 1].pose.theta, out[i].pose.theta) / dt, -2.0, 2.0);
  }
  return out;
}

ReferenceProvider ReferenceProvider::static_pose(const Pose2& target) {
  ReferenceProvider p;
  p.mode_ = Mode::kStatic;
  p.target_ = target;
  return p;
}

ReferenceProvider ReferenceProvider::waypoints(std::vector<Pose2> points,
                                               double advance_radius) {
  ReferenceProvider p;
  p.mode_ = Mode::kWaypoints;
  p.points_ = std::move(points);
  p.advance_radius_ = advance_radius;
  if (p.points_.empty()) throw ConfigError("waypoint reference needs at least one point");
  return p;
}

ReferenceProvider ReferenceProvider::trajectory(std::vector<ReferenceSample> samples) {
  ReferenceProvider p;
  p.mode_ = Mode::kTrajectory;
  p.samples_ = std::move(samples);
  if (p.samples_.empty()) throw ConfigError("trajectory reference needs samples");
  return p;
}

std::vector<ReferencePoint> ReferenceProvider::window(double t, double dt, int n,
                                                      const Pose2& cart) {
  std::vector<ReferencePoint> out;
  out.reserve(n);
  switch (mode_) {
    case Mode::kStatic:
      out.assign(n, ReferencePoint{target_, {}});
      break;
    case Mode::kWaypoints: {
      while (active_ + 1 < points_.size() &&
             (cart.position() - points_[active_].position()).norm() < advance_radius_) {
        ++active_;
      }
      // march along the remaining waypoint polyline at the nominal speed,
      // blending headings by shortest arc within each segment
      const double v_ref = 0.4;
      Eigen::Vector2d pos = cart.position();
      size_t seg = active_;
      for (int k = 0; k < n; ++k) {
        double remaining = v_ref * dt * (k > 0 ? 1.0 : 0.0);
        while (remaining > 0.0 && seg < points_.size()) {
          const Eigen::Vector2d goal = points_[seg].position();
          const double d = (goal - pos).norm();
          if (d > remaining) {
            pos += (goal - pos) * (remaining / d);
            remaining = 0.0;
          } else {
            pos = goal;
            remaining -= d;
            ++seg;
          }
        }
        double theta;
        if (seg >= points_.size()) {
          theta = points_.back().theta;
        } else {
          const Eigen::Vector2d to_goal = points_[seg].position() - pos;
          const double d_next = to_goal.norm();
          const double blend = std::clamp(1.0 - d_next / (v_ref * dt * n), 0.0, 1.0);
          const double seg_heading =
              d_next > 1e-6 ? std::atan2(to_goal.y(), to_goal.x()) : points_[seg].theta;
          theta = seg_heading + blend * angle_diff(points_[seg].theta, seg_heading);
        }
        out.push_back(ReferencePoint{Pose2{pos.x(), pos.y(), theta}, {}});
      }
      break;
    }
    case Mode::kTrajectory: {
      const double sample_dt =
          samples_.size() > 1 ? samples_[1].t - samples_[0].t : dt;
      for (int k = 0; k < n; ++k) {
        const double tk = t + k * dt;
        const size_t i = std::min<size_t>(
            samples_.size() - 1, static_cast<size_t>(std::max(0.0, tk / sample_dt)));
        out.push_back(ReferencePoint{samples_[i].pose, samples_[i].feedforward});
      }
      break;
    }
  }
  return out;
}

Pose2 ReferenceProvider::sample(double t, const Pose2& cart) const {
  switch (mode_) {
    case Mode::kStatic:
      return target_;
    case Mode::kWaypoints: {
      const size_t i = std::min(active_, points_.size() - 1);
      (void)cart;
      return points_[i];
    }
    case Mode::kTrajectory: {
      const double sample_dt = samples_.size() > 1 ? samples_[1].t - samples_[0].t : 1.0;
      const size_t i = std::min<size_t>(samples_.size() - 1,
                                        static_cast<size_t>(std::max(0.0, t / sample_dt)));
      return samples_[i].pose;
    }
  }
  return target_;
}

Pose2 ReferenceProvider::goal() const {
  switch (mode_) {
    case Mode::kStatic: return target_;
    case Mode::kWaypoints: return points_.back();
    case Mode::kTrajectory: return samples_.back().pose;
  }
  return target_;
}

}  // namespace cartpush
