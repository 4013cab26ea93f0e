#pragma once

#include <span>
#include <vector>

#include "pal/grid.hpp"
#include "pal/medium.hpp"

namespace pal {

/// One circular radiating element of a baffled planar source.
struct Element {
  double x = 0.0;  // centre [m]
  double y = 0.0;
  double radius = 0.0;
  Complex weight_f1{1.0, 0.0};
  Complex weight_f2{1.0, 0.0};
};

enum class Primary { f1, f2 };

struct SourceSpec {
  std::vector<Element> elements;
  double v0 = 0.1;  // base velocity amplitude [m/s]
  double f1 = 39500.0;
  double f2 = 40500.0;

  double audio_frequency() const { return f2 - f1; }
  double frequency(Primary which) const { return which == Primary::f1 ? f1 : f2; }
  /// Throws ParameterError/OverlapError when the invariants do not hold.
  void validate() const;
};

struct BoundingBox {
  double xmin, xmax, ymin, ymax;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

/// Bounding box of the union of element disks.
BoundingBox bounding_box(std::span<const Element> elements);

/// Rectangular lattice centred on the origin; unit weights.
std::vector<Element> layout_uniform(int rows, int cols, double pitch, double radius);

/// Hexagonal lattice of tangent disks: pitch 2r along x, sqrt(3) r between rows, odd rows shifted by r.
std::vector<Element> layout_closely_packed(int rows, int cols, double radius);

/// Unit-modulus steering weights exp(+i Re(k) (x sin(theta) cos(phi) + y sin(theta) sin(phi))).
/// The sign matches the exp(-i omega t) time convention, so the beam points along
/// (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)).
std::vector<Complex> steering_weights(std::span<const Element> elements, const Wavenumber& k,
                                      double theta_d, double phi_d);

/// Sets weight_f1 / weight_f2 of every element to the steering weights for each primary.
void apply_steering(SourceSpec& source, const MediumParams& medium, double theta_d, double phi_d);

enum class Rasterization {
  center,  // v0*w where the cell centre lies strictly inside a disk
  area,    // v0*w scaled by the exact cell/disk overlap fraction
};

/// Area of the intersection of the disk (cx, cy, r) with the rectangle [x0,x1] x [y0,y1].
double disk_rect_overlap(double cx, double cy, double r, double x0, double x1, double y0, double y1);

/// Surface velocity amplitude of one primary sampled on `grid` (cell centres at the grid nodes).
ComplexField2D rasterize_velocity(const SourceSpec& source, const GridSpec2D& grid, Primary which,
                                  Rasterization mode = Rasterization::center);

}  // namespace pal
