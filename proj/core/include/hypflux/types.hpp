#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hypflux {

// Conserved state. At most four components; storage stays on the stack.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using Vec2 = Eigen::Vector2d;

inline constexpr int kMaxComponents = 4;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (config, mesh JSON).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input that parsed but violates a documented constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A state left the admissible set.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// Reference solution queried beyond its validity horizon.
class HorizonError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Sizes or ids do not match between mesh, field and records.
class StructuralError : public Error {
 public:
  using Error::Error;
};

}  // namespace hypflux
