#pragma once

#include <stdexcept>
#include <string>

namespace nozzle {

// Base class for all solver failures. Every error carries a one-line
// human-readable message suitable for stderr diagnostics.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// |q|^2 >= 2*B0: the density closure is undefined (flow over-accelerated).
class VacuumError : public Error {
 public:
  using Error::Error;
};

// q . e_r <= 0 inside the downstream region: iterate left the admissible set.
class StagnationError : public Error {
 public:
  using Error::Error;
};

// The mass-flux relation m = r^2 rho(u) u has no root on the requested branch.
class ChokedError : public Error {
 public:
  using Error::Error;
};

// An upstream state handed to the jump relations is not supersonic.
class NotSupersonicError : public Error {
 public:
  using Error::Error;
};

// Requested exit pressure lies outside (p_min, p_max).
class PressureOutOfRangeError : public Error {
 public:
  PressureOutOfRangeError(const std::string& what, double p_min, double p_max)
      : Error(what), p_min(p_min), p_max(p_max) {}
  double p_min;
  double p_max;
};

// A nodal coefficient matrix lost positive definiteness (flow not subsonic).
class EllipticityLost : public Error {
 public:
  using Error::Error;
};

// Pure-Neumann solve without an anchor, or a structurally singular system.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

// The linear solver failed to reach its residual tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// Front projection clipped more than the allowed fraction of nodes.
class FrontOutOfRangeError : public Error {
 public:
  using Error::Error;
};

// The downstream density implied by the jump data is not admissible.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

// A point handed to a mapping lies outside its domain of definition.
class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

// The radial mass-flux coefficient of the transport system lost positivity.
class ReversedFlowError : public Error {
 public:
  using Error::Error;
};

// An outer iteration cap was reached; the best iterate is in the report.
class MaxIterations : public Error {
 public:
  using Error::Error;
};

}  // namespace nozzle
