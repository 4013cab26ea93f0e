#include "pal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pal {

void SourceSpec::validate() const {
  if (elements.empty()) throw ParameterError("source has no elements");
  if (!(f1 > 0.0) || !(f2 > f1)) throw ParameterError("primary frequencies must satisfy 0 < f1 < f2");
  if (!(v0 >= 0.0) || !std::isfinite(v0)) throw ParameterError("v0 must be finite and non-negative");
  for (const auto& e : elements) {
    if (!(e.radius > 0.0)) throw ParameterError("element radius must be positive");
    if (!std::isfinite(std::abs(e.weight_f1)) || !std::isfinite(std::abs(e.weight_f2)))
      throw ParameterError("element weights must be finite");
  }
  // Sorting by x lets the overlap scan stop early; 10^3 elements stay cheap.
  std::vector<const Element*> sorted;
  sorted.reserve(elements.size());
  for (const auto& e : elements) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->x < b->x; });
  double rmax = 0.0;
  for (const auto& e : elements) rmax = std::max(rmax, e.radius);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const auto& a = *sorted[i];
      const auto& b = *sorted[j];
      if (b.x - a.x > a.radius + rmax) break;
      const double d = std::hypot(a.x - b.x, a.y - b.y);
      if (d < a.radius + b.radius - 1e-9)
        throw OverlapError("elements at (" + std::to_string(a.x) + ", " + std::to_string(a.y) + ") and (" +
                           std::to_string(b.x) + ", " + std::to_string(b.y) + ") overlap");
    }
  }
}

BoundingBox bounding_box(std::span<const Element> elements) {
  BoundingBox b{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
                std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  for (const auto& e : elements) {
    b.xmin = std::min(b.xmin, e.x - e.radius);
    b.xmax = std::max(b.xmax, e.x + e.radius);
    b.ymin = std::min(b.ymin, e.y - e.radius);
    b.ymax = std::max(b.ymax, e.y + e.radius);
  }
  return b;
}

namespace {

void recenter(std::vector<Element>& elements) {
  const auto b = bounding_box(elements);
  const double cx = 0.5 * (b.xmin + b.xmax);
  const double cy = 0.5 * (b.ymin + b.ymax);
  for (auto& e : elements) {
    e.x -= cx;
    e.y -= cy;
  }
}

}  // namespace

std::vector<Element> layout_uniform(int rows, int cols, double pitch, double radius) {
  if (rows < 1 || cols < 1) throw ParameterError("layout needs at least one row and one column");
  if (!(radius > 0.0)) throw ParameterError("element radius must be positive");
  if (pitch < 2.0 * radius - 1e-12) throw OverlapError("pitch smaller than element diameter");
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Element e;
      e.x = (c - 0.5 * (cols - 1)) * pitch;
      e.y = (r - 0.5 * (rows - 1)) * pitch;
      e.radius = radius;
      out.push_back(e);
    }
  }
  return out;
}

std::vector<Element> layout_closely_packed(int rows, int cols, double radius) {
  if (rows < 1 || cols < 1) throw ParameterError("layout needs at least one row and one column");
  if (!(radius > 0.0)) throw ParameterError("element radius must be positive");
  const double row_pitch = std::sqrt(3.0) * radius;
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    const double shift = (r % 2 == 1) ? radius : 0.0;
    for (int c = 0; c < cols; ++c) {
      Element e;
      e.x = 2.0 * radius * c + shift;
      e.y = row_pitch * r;
      e.radius = radius;
      out.push_back(e);
    }
  }
  recenter(out);
  return out;
}

std::vector<Complex> steering_weights(std::span<const Element> elements, const Wavenumber& k,
                                      double theta_d, double phi_d) {
  if (!(theta_d >= 0.0 && theta_d < kPi / 2.0)) throw ParameterError("steering angle must lie in [0, pi/2)");
  const double ux = std::sin(theta_d) * std::cos(phi_d);
  const double uy = std::sin(theta_d) * std::sin(phi_d);
  std::vector<Complex> w;
  w.reserve(elements.size());
  // With outgoing exp(ikR), element n reaches the far field along r_d with phase -k r_n.r_d;
  // the weight cancels it, so the main lobe points along +r_d.
  for (const auto& e : elements) w.push_back(std::polar(1.0, k.real_part * (e.x * ux + e.y * uy)));
  return w;
}

void apply_steering(SourceSpec& source, const MediumParams& medium, double theta_d, double phi_d) {
  const auto w1 = steering_weights(source.elements, wavenumber(source.f1, medium), theta_d, phi_d);
  const auto w2 = steering_weights(source.elements, wavenumber(source.f2, medium), theta_d, phi_d);
  for (std::size_t n = 0; n < source.elements.size(); ++n) {
    source.elements[n].weight_f1 = w1[n];
    source.elements[n].weight_f2 = w2[n];
  }
}

namespace {

// Antiderivative of sqrt(r^2 - x^2).
double chord_integral(double x, double r) {
  const double t = std::clamp(x / r, -1.0, 1.0);
  return 0.5 * (x * std::sqrt(std::max(0.0, r * r - x * x)) + r * r * std::asin(t));
}

}  // namespace

double disk_rect_overlap(double cx, double cy, double r, double x0, double x1, double y0, double y1) {
  // Work in disk-centred coordinates.
  x0 -= cx;
  x1 -= cx;
  y0 -= cy;
  y1 -= cy;
  const double a = std::max(x0, -r);
  const double b = std::min(x1, r);
  if (!(b > a) || !(y1 > y0)) return 0.0;

  double cuts[6];
  int ncut = 0;
  cuts[ncut++] = a;
  cuts[ncut++] = b;
  for (double yb : {y0, y1}) {
    if (std::abs(yb) < r) {
      const double xc = std::sqrt(r * r - yb * yb);
      for (double c : {-xc, xc})
        if (c > a && c < b) cuts[ncut++] = c;
    }
  }
  std::sort(cuts, cuts + ncut);

  double area = 0.0;
  for (int i = 0; i + 1 < ncut; ++i) {
    const double u = cuts[i];
    const double v = cuts[i + 1];
    if (!(v > u)) continue;
    const double m = 0.5 * (u + v);
    const double s = std::sqrt(std::max(0.0, r * r - m * m));
    const bool top_is_chord = s < y1;
    const bool bottom_is_chord = -s > y0;
    if ((top_is_chord ? s : y1) - (bottom_is_chord ? -s : y0) <= 0.0) continue;
    const double chord = chord_integral(v, r) - chord_integral(u, r);
    const double top = top_is_chord ? chord : y1 * (v - u);
    const double bottom = bottom_is_chord ? -chord : y0 * (v - u);
    area += top - bottom;
  }
  return area;
}

ComplexField2D rasterize_velocity(const SourceSpec& source, const GridSpec2D& grid, Primary which,
                                  Rasterization mode) {
  grid.validate();
  const auto& gx = grid.x;
  const auto& gy = grid.y;
  const double hx = gx.spacing;
  const double hy = gy.spacing;
  const double cell_area = hx * hy;
  const double tol = 1e-12;

  for (const auto& e : source.elements) {
    if (e.x - e.radius < gx.min - 0.5 * hx - tol || e.x + e.radius > gx.max() + 0.5 * hx + tol ||
        e.y - e.radius < gy.min - 0.5 * hy - tol || e.y + e.radius > gy.max() + 0.5 * hy + tol)
      throw CoverageError("element at (" + std::to_string(e.x) + ", " + std::to_string(e.y) +
                          ") is not covered by the source-plane grid");
  }

  ComplexField2D v(grid, 0.0);
  for (const auto& e : source.elements) {
    const Complex amp = source.v0 * (which == Primary::f1 ? e.weight_f1 : e.weight_f2);
    const long i0 = std::max(0L, static_cast<long>(std::floor((e.x - e.radius - gx.min) / hx)) - 1);
    const long i1 = std::min(static_cast<long>(gx.count) - 1,
                             static_cast<long>(std::ceil((e.x + e.radius - gx.min) / hx)) + 1);
    const long j0 = std::max(0L, static_cast<long>(std::floor((e.y - e.radius - gy.min) / hy)) - 1);
    const long j1 = std::min(static_cast<long>(gy.count) - 1,
                             static_cast<long>(std::ceil((e.y + e.radius - gy.min) / hy)) + 1);
    for (long j = j0; j <= j1; ++j) {
      const double y = gy.node(static_cast<std::size_t>(j));
      for (long i = i0; i <= i1; ++i) {
        const double x = gx.node(static_cast<std::size_t>(i));
        if (mode == Rasterization::center) {
          if (std::hypot(x - e.x, y - e.y) < e.radius) v.at(i, j) = amp;
        } else {
          const double frac =
              disk_rect_overlap(e.x, e.y, e.radius, x - 0.5 * hx, x + 0.5 * hx, y - 0.5 * hy, y + 0.5 * hy) /
              cell_area;
          if (frac > 0.0) v.at(i, j) += amp * frac;
        }
      }
    }
  }
  return v;
}

}  // namespace pal
