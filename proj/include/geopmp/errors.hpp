#pragma once

#include <stdexcept>
#include <string>

namespace geopmp {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point is off its manifold by more than the manifold tolerance.
class MembershipError : public Error {
 public:
  using Error::Error;
};

/// A Jacobian is unavailable (no analytic form and finite differences
/// disabled) or failed validation against finite differences.
class JacobianError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Dynamics pushed a state off the manifold beyond the rollout tolerance.
class DynamicsLeftManifold : public Error {
 public:
  using Error::Error;
};

/// Control is outside the control set a tent was requested for.
class NotInSetError : public Error {
 public:
  using Error::Error;
};

/// Some constraint component is strictly positive at the point.
class InfeasiblePointError : public Error {
 public:
  using Error::Error;
};

/// No local tent can be built for the set at the point.
class TentUnavailable : public Error {
 public:
  using Error::Error;
};

/// The direct solver found no feasible control sequence.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double final_residual)
      : Error(what), final_residual_(final_residual) {}
  double final_residual() const { return final_residual_; }

 private:
  double final_residual_;
};

/// The inner stationarity solve of the shooting method hit a singular system.
class SingularStationarity : public Error {
 public:
  using Error::Error;
};

/// Problem file rejected; the message starts with a JSON pointer.
class ParseError : public Error {
 public:
  ParseError(const std::string& pointer, const std::string& message)
      : Error(pointer + ": " + message), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace geopmp
