#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pal/types.hpp"

namespace pal {

/// Regular node lattice along one axis: nodes at min + i*spacing, i in [0, count).
struct Axis {
  double min = 0.0;
  double spacing = 1.0;
  std::size_t count = 2;

  double max() const { return min + spacing * static_cast<double>(count - 1); }
  double node(std::size_t i) const { return min + spacing * static_cast<double>(i); }
  /// Index of the node nearest to `x` (may be out of range).
  long nearest(double x) const;
  bool contains(double x, double tol = 1e-9) const;

  /// Builds an axis from inclusive extents; throws unless (max-min) is a multiple of spacing.
  static Axis from_extents(double min, double max, double spacing);
  /// Axis symmetric about `center` with the smallest node count covering [center-half, center+half].
  static Axis centered(double center, double half_width, double spacing);
};

struct GridSpec2D {
  Axis x;
  Axis y;

  std::size_t size() const { return x.count * y.count; }
  void validate() const;
};

struct GridSpec3D {
  Axis x;
  Axis y;
  Axis z;

  std::size_t size() const { return x.count * y.count * z.count; }
  GridSpec2D plane() const { return {x, y}; }
  double cell_volume() const { return x.spacing * y.spacing * z.spacing; }
  void validate() const;
};

bool same_grid(const GridSpec3D& a, const GridSpec3D& b, double tol = 1e-12);

/// Complex samples on a 2D lattice at height z, x-fastest.
struct ComplexField2D {
  GridSpec2D grid;
  double z = 0.0;
  std::vector<Complex> data;

  ComplexField2D() = default;
  ComplexField2D(const GridSpec2D& g, double z_plane)
      : grid(g), z(z_plane), data(g.size(), Complex{}) {}

  std::size_t index(std::size_t i, std::size_t j) const { return i + grid.x.count * j; }
  Complex& at(std::size_t i, std::size_t j) { return data[index(i, j)]; }
  const Complex& at(std::size_t i, std::size_t j) const { return data[index(i, j)]; }
};

/// Complex samples on a 3D lattice, x-fastest then y then z.
struct ComplexField3D {
  GridSpec3D grid;
  std::vector<Complex> data;

  ComplexField3D() = default;
  explicit ComplexField3D(const GridSpec3D& g) : grid(g), data(g.size(), Complex{}) {}

  std::size_t plane_size() const { return grid.x.count * grid.y.count; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + grid.x.count * (j + grid.y.count * k);
  }
  Complex& at(std::size_t i, std::size_t j, std::size_t k) { return data[index(i, j, k)]; }
  const Complex& at(std::size_t i, std::size_t j, std::size_t k) const { return data[index(i, j, k)]; }

  std::span<Complex> plane(std::size_t k) { return {data.data() + k * plane_size(), plane_size()}; }
  std::span<const Complex> plane(std::size_t k) const {
    return {data.data() + k * plane_size(), plane_size()};
  }
};

}  // namespace pal
