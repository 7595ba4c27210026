#pragma once

#include <stdexcept>
#include <string>

namespace covertsim {

/// An iterative numerical routine (continued fraction, quadrature,
/// root search) failed to converge within its budget. The message
/// carries the routine name and the diagnostics available at the point
/// of failure.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A request is valid in general but not supported for the given
/// configuration (e.g. moment formulas only derived for the complex
/// field).
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  explicit UnsupportedConfiguration(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace covertsim
