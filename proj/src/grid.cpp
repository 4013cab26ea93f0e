#include "pal/grid.hpp"

#include <cmath>
#include <string>

namespace pal {

long Axis::nearest(double x) const { return std::lround((x - min) / spacing); }

bool Axis::contains(double x, double tol) const { return x >= min - tol && x <= max() + tol; }

Axis Axis::from_extents(double lo, double hi, double spacing) {
  if (!(spacing > 0.0)) throw ParameterError("grid spacing must be positive");
  if (!(hi > lo)) throw ParameterError("grid extent max must exceed min");
  const double cells = (hi - lo) / spacing;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded))
    throw ParameterError("grid extent " + std::to_string(hi - lo) + " m is not a multiple of spacing " +
                         std::to_string(spacing) + " m");
  return {lo, spacing, static_cast<std::size_t>(rounded) + 1};
}

Axis Axis::centered(double center, double half_width, double spacing) {
  if (!(spacing > 0.0)) throw ParameterError("grid spacing must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(half_width / spacing - 1e-9));
  return {center - spacing * static_cast<double>(n), spacing, 2 * n + 1};
}

namespace {
void validate_axis(const Axis& a, const char* name) {
  if (!(a.spacing > 0.0)) throw ParameterError(std::string("axis ") + name + ": spacing must be positive");
  if (a.count < 2) throw ParameterError(std::string("axis ") + name + ": need at least 2 nodes");
}
}  // namespace

void GridSpec2D::validate() const {
  validate_axis(x, "x");
  validate_axis(y, "y");
}

void GridSpec3D::validate() const {
  validate_axis(x, "x");
  validate_axis(y, "y");
  validate_axis(z, "z");
}

bool same_grid(const GridSpec3D& a, const GridSpec3D& b, double tol) {
  auto eq = [tol](const Axis& p, const Axis& q) {
    return p.count == q.count && std::abs(p.min - q.min) <= tol * std::max(1.0, std::abs(p.min)) &&
           std::abs(p.spacing - q.spacing) <= tol * p.spacing;
  };
  return eq(a.x, b.x) && eq(a.y, b.y) && eq(a.z, b.z);
}

}  // namespace pal
