#ifndef CARTPUSH_ANGLES_HPP_
#define CARTPUSH_ANGLES_HPP_

#include <cmath>
#include <numbers>

namespace cartpush {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a = kPi;
  return a;
}

/// Signed shortest angular distance from `from` to `to`.
inline double angle_diff(double to, double from) { return wrap_angle(to - from); }

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace cartpush

#endif  // CARTPUSH_ANGLES_HPP_
