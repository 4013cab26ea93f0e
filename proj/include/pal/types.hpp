#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pal {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Cartesian point in metres.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Base for every error raised by the solver; `kind()` names the failure class.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + " error: " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error("parameter", w) {}
};
struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error("shape", w) {}
};
struct PaddingError : Error {
  explicit PaddingError(const std::string& w) : Error("padding", w) {}
};
struct CoverageError : Error {
  explicit CoverageError(const std::string& w) : Error("coverage", w) {}
};
struct OverlapError : Error {
  explicit OverlapError(const std::string& w) : Error("overlap", w) {}
};
struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error("range", w) {}
};
struct SingularityError : Error {
  explicit SingularityError(const std::string& w) : Error("singular-evaluation", w) {}
};
struct BudgetError : Error {
  explicit BudgetError(const std::string& w) : Error("memory-budget", w) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error("format", w) {}
};

}  // namespace pal
