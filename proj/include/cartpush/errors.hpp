#ifndef CARTPUSH_ERRORS_HPP_
#define CARTPUSH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cartpush {

/// Base class for all recoverable errors raised by the toolkit. The
/// benchmark loop converts these into per-scenario flags instead of
/// aborting a batch.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Gripper targets do not describe a rigid symmetric grasp.
class InconsistentGrasp : public Error {
 public:
  explicit InconsistentGrasp(const std::string& what) : Error(what) {}
};

/// IK target outside the reachable annulus.
class Unreachable : public Error {
 public:
  explicit Unreachable(const std::string& what) : Error(what) {}
};

/// Offset distance too small to invert the unicycle map.
class DegenerateOffset : public Error {
 public:
  explicit DegenerateOffset(const std::string& what) : Error(what) {}
};

/// Virtual steering angle at or beyond +-pi/2.
class SteerSingular : public Error {
 public:
  explicit SteerSingular(const std::string& what) : Error(what) {}
};

/// A numeric evaluation produced NaN or Inf.
class NonFinite : public Error {
 public:
  explicit NonFinite(const std::string& what) : Error(what) {}
};

/// Jacobian condition number too large for force projection.
class SingularJacobian : public Error {
 public:
  explicit SingularJacobian(const std::string& what) : Error(what) {}
};

/// Local coordinates left the configured workspace box.
class WorkspaceViolation : public Error {
 public:
  explicit WorkspaceViolation(const std::string& what) : Error(what) {}
};

/// Reference trajectory kind not recognized.
class UnknownKind : public Error {
 public:
  explicit UnknownKind(const std::string& what) : Error(what) {}
};

/// Planner bounds are inconsistent (empty feasible box).
class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& what) : Error(what) {}
};

/// Scenario or suite configuration error; carries a key path for messages.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace cartpush

#endif  // CARTPUSH_ERRORS_HPP_
