#include "pal/oracle.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <string>

#include "pal/parallel.hpp"

// Everything here is a plain loop over cells. Nothing in this file may call the transform code.

namespace pal {

namespace {

struct SourceCells {
  std::vector<double> x, y;
  std::vector<Complex> v;
};

SourceCells nonzero_cells(const ComplexField2D& vel) {
  SourceCells c;
  for (std::size_t j = 0; j < vel.grid.y.count; ++j)
    for (std::size_t i = 0; i < vel.grid.x.count; ++i)
      if (vel.at(i, j) != Complex{}) {
        c.x.push_back(vel.grid.x.node(i));
        c.y.push_back(vel.grid.y.node(j));
        c.v.push_back(vel.at(i, j));
      }
  return c;
}

// Integral of exp(ikr)/(4 pi r) over a disk of the cell's area centred on the singular point.
Complex disk_average_area_integral(const Complex& k, double cell_area) {
  const double r = std::sqrt(cell_area / kPi);
  return (std::exp(kI * k * r) - 1.0) / (2.0 * kI * k);
}

Complex rayleigh_sum(const SourceCells& cells, double cell_area, const Point3& p, const Complex& k, double omega,
                     double rho0) {
  Complex acc{};
  const double z2 = p.z * p.z;
  const double touch = 1e-6 * std::sqrt(cell_area);
  for (std::size_t n = 0; n < cells.v.size(); ++n) {
    const double dx = p.x - cells.x[n];
    const double dy = p.y - cells.y[n];
    const double r = std::sqrt(dx * dx + dy * dy + z2);
    if (r < touch)
      acc += cells.v[n] * disk_average_area_integral(k, cell_area);
    else
      acc += cells.v[n] * (std::exp(kI * k * r) / (4.0 * kPi * r) * cell_area);
  }
  return -2.0 * kI * rho0 * omega * acc;
}

double edge_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

double voxel_weight(const GridSpec3D& g, std::size_t i, std::size_t j, std::size_t k) {
  return edge_weight(i, g.x.count) * edge_weight(j, g.y.count) * edge_weight(k, g.z.count);
}

// Integral of 1/r over [0,a] x [0,b] x [0,c] with the singular point at the origin corner.
double corner_box(double a, double b, double c) {
  if (a <= 0.0 || b <= 0.0 || c <= 0.0) return 0.0;
  const double r = std::sqrt(a * a + b * b + c * c);
  return a * b * std::log((c + r) / std::hypot(a, b)) + b * c * std::log((a + r) / std::hypot(b, c)) +
         c * a * std::log((b + r) / std::hypot(c, a)) - 0.5 * a * a * std::atan(b * c / (a * r)) -
         0.5 * b * b * std::atan(c * a / (b * r)) - 0.5 * c * c * std::atan(a * b / (c * r));
}

double box_inverse_distance(double x0, double x1, double y0, double y1, double z0, double z1) {
  // Each axis interval is written as +/-[0, |end|] pieces; the 3D integral is the signed sum over pieces.
  auto pieces = [](double lo, double hi) {
    std::vector<std::pair<double, double>> out;  // (extent, sign)
    if (lo >= 0.0) {
      out.push_back({hi, 1.0});
      out.push_back({lo, -1.0});
    } else if (hi <= 0.0) {
      out.push_back({-lo, 1.0});
      out.push_back({-hi, -1.0});
    } else {
      out.push_back({hi, 1.0});
      out.push_back({-lo, 1.0});
    }
    return out;
  };
  double s = 0.0;
  for (const auto& [a, sa] : pieces(x0, x1))
    for (const auto& [b, sb] : pieces(y0, y1))
      for (const auto& [c, sc] : pieces(z0, z1)) s += sa * sb * sc * corner_box(a, b, c);
  return s;
}

// Audio kernel between two voxel centres: point value far away, cell average within two
// of the largest spacings per axis (exact for 1/r; 4-point Gauss-Legendre per half-cell for the bounded rest).
Complex audio_kernel(const Complex& ka, double dx, double dy, double dz, const GridSpec3D& g) {
  const double hx = g.x.spacing, hy = g.y.spacing, hz = g.z.spacing;
  const double reach = 2.0 * std::max({hx, hy, hz}) * (1.0 + 1e-9);
  if (std::abs(dx) > reach || std::abs(dy) > reach || std::abs(dz) > reach)
    return std::exp(kI * ka * std::sqrt(dx * dx + dy * dy + dz * dz)) / (4.0 * kPi * std::sqrt(dx * dx + dy * dy + dz * dz));
  // Nodes and weights of the 4-point rule on [0, 1] for each half of [-1, 1].
  const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double wa = (18.0 + std::sqrt(30.0)) / 36.0, wb = (18.0 - std::sqrt(30.0)) / 36.0;
  double xg[8], wg[8];
  int n = 0;
  for (double half : {-0.5, 0.5})
    for (auto [t, w] : {std::pair{-b, wb}, std::pair{-a, wa}, std::pair{a, wa}, std::pair{b, wb}}) {
      xg[n] = half + 0.5 * t;
      wg[n++] = 0.5 * w;
    }
  Complex rest{};
  for (int c = 0; c < 8; ++c)
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i) {
        const double x = dx + 0.5 * hx * xg[i], y = dy + 0.5 * hy * xg[j], z = dz + 0.5 * hz * xg[c];
        const double r = std::sqrt(x * x + y * y + z * z);
        rest += wg[i] * wg[j] * wg[c] * (r > 0.0 ? (std::exp(kI * ka * r) - 1.0) / r : kI * ka);
      }
  rest /= 8.0 * 4.0 * kPi;
  const double vol = hx * hy * hz;
  return box_inverse_distance(dx - 0.5 * hx, dx + 0.5 * hx, dy - 0.5 * hy, dy + 0.5 * hy, dz - 0.5 * hz,
                              dz + 0.5 * hz) / (4.0 * kPi * vol) + rest;
}

long lattice_steps(double from, double to, double h) {
  const double s = (to - from) / h;
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-6) throw ShapeError("volume nodes are not on the source-mesh lattice");
  return static_cast<long>(r);
}

}  // namespace

void QuadratureSpec::validate() const {
  source_mesh.validate();
  volume.validate();
  if (volume.z.min < 0.0) throw ParameterError("the truncated volume must lie in z >= 0");
}

Complex rayleigh_quadrature(const SourceSpec& source, const Point3& point, Primary which, const QuadratureSpec& quad,
                            const MediumParams& medium) {
  if (!(point.z > 0.0)) throw SingularityError("field point lies on the source plane");
  source.validate();
  const auto vel = rasterize_velocity(source, quad.source_mesh, which, quad.raster);
  const auto cells = nonzero_cells(vel);
  const double f = source.frequency(which);
  return rayleigh_sum(cells, quad.source_mesh.x.spacing * quad.source_mesh.y.spacing, point,
                      wavenumber(f, medium).value(), kTwoPi * f, medium.rho0);
}

Complex dim_audio(const SourceSpec& source, const Point3& point, const QuadratureSpec& quad,
                  const MediumParams& medium, std::size_t voxel_limit) {
  quad.validate();
  source.validate();
  const double area = quad.source_mesh.x.spacing * quad.source_mesh.y.spacing;
  const auto c1 = nonzero_cells(rasterize_velocity(source, quad.source_mesh, Primary::f1, quad.raster));
  const auto c2 = nonzero_cells(rasterize_velocity(source, quad.source_mesh, Primary::f2, quad.raster));
  const Complex k1 = wavenumber(source.f1, medium).value();
  const Complex k2 = wavenumber(source.f2, medium).value();
  const double w1 = kTwoPi * source.f1, w2 = kTwoPi * source.f2;
  const double fa = source.audio_frequency();
  const Complex ka = audio_wavenumber(fa, medium).value();
  const double c2v = medium.c0 * medium.c0;
  const Complex coeff = -kI * medium.beta * kTwoPi * fa / (medium.rho0 * medium.rho0 * c2v * c2v);

  const auto& g = quad.volume;
  const double dv = g.cell_volume();
  Complex acc{};
  std::size_t done = 0;
  for (std::size_t k = 0; k < g.z.count; ++k)
    for (std::size_t j = 0; j < g.y.count; ++j)
      for (std::size_t i = 0; i < g.x.count; ++i) {
        if (voxel_limit && done == voxel_limit) return -kI * medium.rho0 * kTwoPi * fa * acc;
        const Point3 rv{g.x.node(i), g.y.node(j), g.z.node(k)};
        const Complex p1 = rayleigh_sum(c1, area, rv, k1, w1, medium.rho0);
        const Complex p2 = rayleigh_sum(c2, area, rv, k2, w2, medium.rho0);
        const Complex q = coeff * std::conj(p1) * p2;
        const double dx = point.x - rv.x, dy = point.y - rv.y, dz = point.z - rv.z;
        acc += q * (voxel_weight(g, i, j, k) * dv) * audio_kernel(ka, dx, dy, dz, g);
        ++done;
      }
  return -kI * medium.rho0 * kTwoPi * fa * acc;
}

ComplexField3D rayleigh_volume(const SourceSpec& source, Primary which, const QuadratureSpec& quad,
                               const MediumParams& medium, std::size_t workers) {
  quad.validate();
  source.validate();
  const auto& sm = quad.source_mesh;
  const auto& vol = quad.volume;
  const double hx = sm.x.spacing, hy = sm.y.spacing;
  const long off_x = lattice_steps(sm.x.min, vol.x.min, hx);
  const long off_y = lattice_steps(sm.y.min, vol.y.min, hy);
  const long stride_x = lattice_steps(0.0, vol.x.spacing, hx);
  const long stride_y = lattice_steps(0.0, vol.y.spacing, hy);

  const auto vel = rasterize_velocity(source, sm, which, quad.raster);
  long sx0 = static_cast<long>(sm.x.count), sx1 = -1, sy0 = static_cast<long>(sm.y.count), sy1 = -1;
  for (std::size_t j = 0; j < sm.y.count; ++j)
    for (std::size_t i = 0; i < sm.x.count; ++i)
      if (vel.at(i, j) != Complex{}) {
        sx0 = std::min(sx0, static_cast<long>(i));
        sx1 = std::max(sx1, static_cast<long>(i));
        sy0 = std::min(sy0, static_cast<long>(j));
        sy1 = std::max(sy1, static_cast<long>(j));
      }
  ComplexField3D out(vol);
  if (sx1 < 0) return out;

  // Source rows stored reversed in x so the inner sum walks both arrays forward.
  const long ncx = sx1 - sx0 + 1, ncy = sy1 - sy0 + 1;
  std::vector<double> vre(static_cast<std::size_t>(ncx * ncy)), vim(vre.size());
  for (long b = 0; b < ncy; ++b)
    for (long u = 0; u < ncx; ++u) {
      const Complex v = vel.at(static_cast<std::size_t>(sx1 - u), static_cast<std::size_t>(sy0 + b));
      vre[static_cast<std::size_t>(u + ncx * b)] = v.real();
      vim[static_cast<std::size_t>(u + ncx * b)] = v.imag();
    }

  // Lattice offsets between any output node and any source cell.
  const long dlo_x = off_x - sx1, dhi_x = off_x + stride_x * static_cast<long>(vol.x.count - 1) - sx0;
  const long dlo_y = off_y - sy1, dhi_y = off_y + stride_y * static_cast<long>(vol.y.count - 1) - sy0;
  const long tx = dhi_x - dlo_x + 1, ty = dhi_y - dlo_y + 1;

  const double f = source.frequency(which);
  const Complex k = wavenumber(f, medium).value();
  const Complex scale = -2.0 * kI * medium.rho0 * kTwoPi * f;
  const double area = hx * hy;
  const std::size_t nw = std::max<std::size_t>(1, std::min(workers, vol.z.count));
  std::vector<std::vector<double>> tre(nw), tim(nw);

  parallel_for(vol.z.count, nw, [&](std::size_t kz, std::size_t w) {
    const double z = vol.z.node(kz);
    auto& Tr = tre[w];
    auto& Ti = tim[w];
    Tr.resize(static_cast<std::size_t>(tx * ty));
    Ti.resize(Tr.size());
    for (long b = 0; b < ty; ++b) {
      const double dy = hy * static_cast<double>(dlo_y + b);
      for (long a = 0; a < tx; ++a) {
        const double dx = hx * static_cast<double>(dlo_x + a);
        const double r = std::sqrt(dx * dx + dy * dy + z * z);
        const Complex gval = r == 0.0 ? disk_average_area_integral(k, area)
                                      : std::exp(kI * k * r) / (4.0 * kPi * r) * area;
        Tr[static_cast<std::size_t>(a + tx * b)] = gval.real();
        Ti[static_cast<std::size_t>(a + tx * b)] = gval.imag();
      }
    }
    auto plane = out.plane(kz);
    for (std::size_t j = 0; j < vol.y.count; ++j) {
      const long Y = off_y + stride_y * static_cast<long>(j);
      for (std::size_t i = 0; i < vol.x.count; ++i) {
        const long X = off_x + stride_x * static_cast<long>(i);
        double re = 0.0, im = 0.0;
        for (long b = 0; b < ncy; ++b) {
          // Table column for source cell (sx1 - u) is X - sx1 + u - dlo_x.
          const std::size_t t0 = static_cast<std::size_t>((X - sx1 - dlo_x) + tx * (Y - (sy0 + b) - dlo_y));
          const double* cr = Tr.data() + t0;
          const double* ci = Ti.data() + t0;
          const double* ar = vre.data() + ncx * b;
          const double* ai = vim.data() + ncx * b;
          for (long u = 0; u < ncx; ++u) {
            re += ar[u] * cr[u] - ai[u] * ci[u];
            im += ar[u] * ci[u] + ai[u] * cr[u];
          }
        }
        plane[i + vol.x.count * j] = scale * Complex(re, im);
      }
    }
  });
  return out;
}

DimAudioOracle DimAudioOracle::from_q(const ComplexField3D& q, double f_a, const MediumParams& medium) {
  q.grid.validate();
  if (q.data.size() != q.grid.size()) throw ShapeError("q sample count does not match its grid");
  if (!(f_a > 0.0)) throw ParameterError("audio frequency must be positive");
  DimAudioOracle o;
  o.q_ = q;
  o.f_a_ = f_a;
  o.rho0_ = medium.rho0;
  o.ka_ = audio_wavenumber(f_a, medium);
  return o;
}

DimAudioOracle DimAudioOracle::from_ultrasound(const ComplexField3D& p1, const ComplexField3D& p2, double f_a,
                                               const MediumParams& medium) {
  if (!same_grid(p1.grid, p2.grid) || p1.data.size() != p2.data.size())
    throw ShapeError("primary fields are on different grids");
  const double c2 = medium.c0 * medium.c0;
  const Complex coeff = -kI * medium.beta * kTwoPi * f_a / (medium.rho0 * medium.rho0 * c2 * c2);
  ComplexField3D q(p1.grid);
  for (std::size_t n = 0; n < q.data.size(); ++n) q.data[n] = coeff * std::conj(p1.data[n]) * p2.data[n];
  return from_q(q, f_a, medium);
}

DimAudioOracle DimAudioOracle::from_rayleigh(const SourceSpec& source, const QuadratureSpec& quad,
                                             const MediumParams& medium, std::size_t workers) {
  const auto p1 = rayleigh_volume(source, Primary::f1, quad, medium, workers);
  const auto p2 = rayleigh_volume(source, Primary::f2, quad, medium, workers);
  return from_ultrasound(p1, p2, source.audio_frequency(), medium);
}

Complex DimAudioOracle::pressure(const Point3& r) const {
  const auto& g = q_.grid;
  const double dv = g.cell_volume();
  const Complex ka = ka_.value();
  Complex acc{};
  for (std::size_t k = 0; k < g.z.count; ++k) {
    const double dz = r.z - g.z.node(k);
    const double wz = edge_weight(k, g.z.count);
    for (std::size_t j = 0; j < g.y.count; ++j) {
      const double dy = r.y - g.y.node(j);
      const double wyz = wz * edge_weight(j, g.y.count);
      Complex row{};
      for (std::size_t i = 0; i < g.x.count; ++i) {
        const double dx = r.x - g.x.node(i);
        row += q_.at(i, j, k) * (edge_weight(i, g.x.count) * audio_kernel(ka, dx, dy, dz, g));
      }
      acc += row * wyz;
    }
  }
  return -kI * rho0_ * kTwoPi * f_a_ * acc * dv;
}

PointCost benchmark_point_cost(const SourceSpec& source, const QuadratureSpec& quad, const MediumParams& medium,
                               const Point3& point, std::size_t five_fold_voxels) {
  using clock = std::chrono::steady_clock;
  quad.validate();
  PointCost cost;
  cost.voxels = quad.volume.size();
  cost.source_cells = nonzero_cells(rasterize_velocity(source, quad.source_mesh, Primary::f1, quad.raster)).v.size();

  ComplexField3D ones(quad.volume);
  std::fill(ones.data.begin(), ones.data.end(), Complex{1.0, 0.0});
  const auto oracle = DimAudioOracle::from_q(ones, source.audio_frequency(), medium);
  auto t0 = clock::now();
  volatile double sink = std::abs(oracle.pressure(point));
  cost.volume_sum_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  const std::size_t limit = std::min(std::max<std::size_t>(1, five_fold_voxels), cost.voxels);
  t0 = clock::now();
  sink = sink + std::abs(dim_audio(source, point, quad, medium, limit));
  const double t = std::chrono::duration<double>(clock::now() - t0).count();
  (void)sink;
  cost.five_fold_fraction = static_cast<double>(limit) / static_cast<double>(cost.voxels);
  cost.five_fold_seconds = t / cost.five_fold_fraction;
  return cost;
}

}  // namespace pal
