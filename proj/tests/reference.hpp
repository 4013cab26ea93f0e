#pragma once
// Test-side reference formulas, written independently of the library code paths.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace ref {

using C = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

inline double spl(double p) { return 20.0 * std::log10(p / 20e-6); }

/// ISO 9613-1 pure-tone absorption, Np/m.
inline double iso9613(double f, double t_celsius, double rh_fraction, double pa = 101325.0) {
  const double T = t_celsius + 273.15, T0 = 293.15, T01 = 273.16, pr = 101325.0;
  const double psat = std::pow(10.0, -6.8346 * std::pow(T01 / T, 1.261) + 4.6151);
  const double h = rh_fraction * 100.0 * psat / (pa / pr);
  const double fro = (pa / pr) * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
  const double frn = (pa / pr) * std::pow(T / T0, -0.5) * (9.0 + 280.0 * h * std::exp(-4.170 * (std::pow(T / T0, -1.0 / 3.0) - 1.0)));
  const double db = 8.686 * f * f *
                    (1.84e-11 / (pa / pr) * std::sqrt(T / T0) +
                     std::pow(T / T0, -2.5) * (0.01275 * std::exp(-2239.1 / T) / (fro + f * f / fro) +
                                               0.1068 * std::exp(-3352.0 / T) / (frn + f * f / frn)));
  return db / 8.686;  // the standard's own dB-per-neper factor
}

/// |p| on the axis of a lossless baffled piston.
inline double piston_axis(double rho0, double c0, double v0, double a, double k, double z) {
  const C i{0.0, 1.0};
  return rho0 * c0 * v0 * std::abs(std::exp(i * k * z) - std::exp(i * k * std::sqrt(z * z + a * a)));
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

/// Tensor Gauss-Legendre integral of f over [x0,x1] x [y0,y1], split into `parts` panels per axis.
inline double integrate2(const std::function<double(double, double)>& f, double x0, double x1, double y0, double y1,
                         int n = 24, int parts = 8) {
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  double sum = 0.0;
  const double hx = (x1 - x0) / parts, hy = (y1 - y0) / parts;
  for (int px = 0; px < parts; ++px)
    for (int py = 0; py < parts; ++py)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double x = x0 + hx * (px + 0.5 + 0.5 * gx[a]);
          const double y = y0 + hy * (py + 0.5 + 0.5 * gx[b]);
          sum += gw[a] * gw[b] * f(x, y) * 0.25 * hx * hy;
        }
  return sum;
}

/// Integral of 1/|r| over a box via the divergence theorem: div(r/|r|) = 2/|r|,
/// so the volume integral is half the flux of r/|r| through the six faces.
inline double box_inverse_distance(double x0, double x1, double y0, double y1, double z0, double z1) {
  auto face = [](double c, double u0, double u1, double v0, double v1) {
    return integrate2([c](double u, double v) {
      const double r = std::sqrt(c * c + u * u + v * v);
      return r > 0.0 ? c / r : 0.0;
    }, u0, u1, v0, v1);
  };
  const double flux = face(x1, y0, y1, z0, z1) - face(x0, y0, y1, z0, z1) + face(y1, x0, x1, z0, z1) -
                      face(y0, x0, x1, z0, z1) + face(z1, x0, x1, y0, y1) - face(z0, x0, x1, y0, y1);
  return 0.5 * flux;
}

/// Direct midpoint Rayleigh sum over a list of source cells (centre, area, velocity).
struct Cell {
  double x, y, area;
  C v;
};

inline C rayleigh(const std::vector<Cell>& cells, C k, double rho0, double omega, double x, double y, double z) {
  const C i{0.0, 1.0};
  C sum = 0.0;
  for (const auto& c : cells) {
    const double r = std::sqrt((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y) + z * z);
    sum += c.v * c.area * std::exp(i * k * r) / (4.0 * pi * r);
  }
  return -2.0 * i * rho0 * omega * sum;
}

/// Cells of a disk on a square mesh: cell-centre-inside-disk indicator.
inline std::vector<Cell> disk_cells(double cx, double cy, double a, double h, C v) {
  std::vector<Cell> out;
  const int n = static_cast<int>(std::ceil(a / h)) + 1;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      const double x = cx + i * h, y = cy + j * h;
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < a * a) out.push_back({x, y, h * h, v});
    }
  return out;
}

}  // namespace ref
