#include "pal/kspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pal/parallel.hpp"

namespace pal {

namespace {

long signed_index(std::size_t i, std::size_t n) {
  return (i <= n / 2) ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

std::size_t fold(std::size_t i, std::size_t n) { return std::min(i, n - i); }

void check_dims(const GridSpec3D& grid, const FftDims& dims) {
  if (dims.nx < grid.x.count || dims.ny < grid.y.count || dims.nz < grid.z.count)
    throw PaddingError("transform grid is smaller than the volume");
}

}  // namespace

Complex virtual_source_coefficient(const MediumParams& medium, double f_a) {
  const double c2 = medium.c0 * medium.c0;
  return -kI * medium.beta * kTwoPi * f_a / (medium.rho0 * medium.rho0 * c2 * c2);
}

VirtualSourceVolume virtual_source_density(const ComplexField3D& p1, const ComplexField3D& p2,
                                           const MediumParams& medium, double f_a) {
  if (!same_grid(p1.grid, p2.grid) || p1.data.size() != p2.data.size())
    throw ShapeError("primary fields are on different grids");
  if (!(f_a > 0.0)) throw ParameterError("audio frequency must be positive");
  VirtualSourceVolume out{ComplexField3D(p1.grid), f_a};
  const Complex c = virtual_source_coefficient(medium, f_a);
  for (std::size_t n = 0; n < p1.data.size(); ++n) out.q.data[n] = c * std::conj(p1.data[n]) * p2.data[n];
  return out;
}

double box_cell_fraction(const GridSpec3D& grid, std::size_t i, std::size_t j, std::size_t k) {
  double w = 1.0;
  if (i == 0 || i + 1 == grid.x.count) w *= 0.5;
  if (j == 0 || j + 1 == grid.y.count) w *= 0.5;
  if (k == 0 || k + 1 == grid.z.count) w *= 0.5;
  return w;
}

FftDims padded_dims(const GridSpec3D& grid, std::array<double, 3> factor) {
  auto one = [](std::size_t n, double f) {
    if (!(f >= 1.0)) throw ParameterError("padding factor must be at least 1");
    return next_fast_size(std::max(n, static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9))));
  };
  return {one(grid.x.count, factor[0]), one(grid.y.count, factor[1]), one(grid.z.count, factor[2])};
}

bool is_linear_convolution(const GridSpec3D& grid, const FftDims& dims) {
  return dims.nx >= 2 * grid.x.count - 1 && dims.ny >= 2 * grid.y.count - 1 && dims.nz >= 2 * grid.z.count - 1;
}

namespace {

// log(a + r) for r = |(a, b, c)|, written to avoid cancellation when a < 0.
double log_plus(double a, double r) { return a >= 0.0 ? std::log(a + r) : std::log((r * r - a * a) / (r - a)); }

// Antiderivative of 1/r over x, y and z (potential of a uniform rectangular prism).
double prism_term(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r == 0.0) return 0.0;
  double v = 0.0;
  if (x != 0.0 && y != 0.0) v += x * y * log_plus(z, r);
  if (y != 0.0 && z != 0.0) v += y * z * log_plus(x, r);
  if (z != 0.0 && x != 0.0) v += z * x * log_plus(y, r);
  if (x != 0.0) v -= 0.5 * x * x * std::atan(y * z / (x * r));
  if (y != 0.0) v -= 0.5 * y * y * std::atan(z * x / (y * r));
  if (z != 0.0) v -= 0.5 * z * z * std::atan(x * y / (z * r));
  return v;
}

// 4-point Gauss-Legendre on [-1, 1].
constexpr double kGauss4[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double kGauss4w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

}  // namespace

double inverse_distance_box_integral(double x0, double x1, double y0, double y1, double z0, double z1) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const double sign = ((i + j + k) % 2 == 1) ? 1.0 : -1.0;
        s += sign * prism_term(i ? x1 : x0, j ? y1 : y0, k ? z1 : z0);
      }
  return s;
}

bool in_near_zone(double dx, double dy, double dz, const std::array<double, 3>& h) {
  const double reach = kNearZoneCells * std::max({h[0], h[1], h[2]}) * (1.0 + 1e-9);
  return std::abs(dx) <= reach && std::abs(dy) <= reach && std::abs(dz) <= reach;
}

Complex sampled_green(const Wavenumber& ka, double dx, double dy, double dz, const std::array<double, 3>& h) {
  if (!in_near_zone(dx, dy, dz, h)) {
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    return std::exp(kI * ka.value() * r) / (4.0 * kPi * r);
  }
  // Cell average: exact for the 1/(4 pi r) part, Gauss rule per octant for the bounded remainder
  // (the octant split puts the kink of r at a subcell corner for the self cell).
  const double vol = h[0] * h[1] * h[2];
  const double singular = inverse_distance_box_integral(dx - 0.5 * h[0], dx + 0.5 * h[0], dy - 0.5 * h[1],
                                                        dy + 0.5 * h[1], dz - 0.5 * h[2], dz + 0.5 * h[2]) /
                          (4.0 * kPi * vol);
  const Complex k = ka.value();
  Complex smooth{};
  for (int oct = 0; oct < 8; ++oct) {
    const double cx = dx + 0.25 * h[0] * ((oct & 1) ? 1.0 : -1.0);
    const double cy = dy + 0.25 * h[1] * ((oct & 2) ? 1.0 : -1.0);
    const double cz = dz + 0.25 * h[2] * ((oct & 4) ? 1.0 : -1.0);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          const double x = cx + 0.25 * h[0] * kGauss4[a];
          const double y = cy + 0.25 * h[1] * kGauss4[b];
          const double z = cz + 0.25 * h[2] * kGauss4[c];
          const double r = std::sqrt(x * x + y * y + z * z);
          const Complex rem = r == 0.0 ? kI * k / (4.0 * kPi) : (std::exp(kI * k * r) - 1.0) / (4.0 * kPi * r);
          smooth += (kGauss4w[a] * kGauss4w[b] * kGauss4w[c] / 64.0) * rem;
        }
  }
  return singular + smooth;
}

Complex GreenSpectrum3D::transfer(std::size_t i, std::size_t j, std::size_t l) const {
  const std::size_t a = fold(i, dims_.nx), b = fold(j, dims_.ny), c = fold(l, dims_.nz);
  return octant_[a + ox_ * (b + oy_ * c)];
}

GreenSpectrum3D green_spectrum(const Wavenumber& ka, const GridSpec3D& grid, const FftDims& dims, GreenMode mode,
                               AlignedBuffer* scratch, std::size_t threads) {
  grid.validate();
  check_dims(grid, dims);
  GreenSpectrum3D g;
  g.mode_ = mode;
  g.ka_ = ka;
  g.dims_ = dims;
  g.spacing_ = {grid.x.spacing, grid.y.spacing, grid.z.spacing};
  g.ox_ = dims.nx / 2 + 1;
  g.oy_ = dims.ny / 2 + 1;
  g.oz_ = dims.nz / 2 + 1;
  const Complex kreg{ka.real_part, std::max(ka.alpha, 1e-4 * ka.real_part)};
  g.ka_reg_sq_ = kreg * kreg;
  g.octant_.assign(g.ox_ * g.oy_ * g.oz_, Complex{});
  const double dv = grid.cell_volume();

  if (mode == GreenMode::analytic) {
    auto wn = [](std::size_t m, std::size_t n, double h) {
      const double k = kTwoPi * static_cast<double>(m) / (static_cast<double>(n) * h);
      return k * k;
    };
    for (std::size_t c = 0; c < g.oz_; ++c) {
      const double kz2 = wn(c, dims.nz, grid.z.spacing);
      for (std::size_t b = 0; b < g.oy_; ++b) {
        const double ky2 = wn(b, dims.ny, grid.y.spacing);
        for (std::size_t a = 0; a < g.ox_; ++a) {
          const double k2 = wn(a, dims.nx, grid.x.spacing) + ky2 + kz2;
          g.octant_[a + g.ox_ * (b + g.oy_ * c)] = 1.0 / ((k2 - g.ka_reg_sq_) * dv);
        }
      }
    }
    return g;
  }

  AlignedBuffer local;
  AlignedBuffer& work = scratch ? *scratch : local;
  work.resize(dims.size());
  const std::size_t plane = dims.nx * dims.ny;
  parallel_for(dims.nz, threads, [&](std::size_t l, std::size_t) {
    const double z = grid.z.spacing * static_cast<double>(signed_index(l, dims.nz));
    for (std::size_t j = 0; j < dims.ny; ++j) {
      const double y = grid.y.spacing * static_cast<double>(signed_index(j, dims.ny));
      Complex* row = work.data() + l * plane + j * dims.nx;
      for (std::size_t i = 0; i < dims.nx; ++i) {
        const double x = grid.x.spacing * static_cast<double>(signed_index(i, dims.nx));
        row[i] = sampled_green(ka, x, y, z, g.spacing_);
      }
    }
  });
  const auto plan = FftPlan::volume(dims.nx, dims.ny, dims.nz, FftDirection::forward, threads);
  plan.execute(work.data(), work.data());
  for (std::size_t c = 0; c < g.oz_; ++c)
    for (std::size_t b = 0; b < g.oy_; ++b)
      for (std::size_t a = 0; a < g.ox_; ++a) g.octant_[a + g.ox_ * (b + g.oy_ * c)] = work[a + dims.nx * (b + dims.ny * c)];
  return g;
}

AudioConvolver::AudioConvolver(const GridSpec3D& volume, const FftDims& dims, std::size_t threads)
    : volume_(volume), dims_(dims), threads_(std::max<std::size_t>(1, threads)) {
  volume_.validate();
  check_dims(volume_, dims_);
  work_.assign(dims_.size(), Complex{});
}

void AudioConvolver::clear() {
  std::fill(work_.begin(), work_.end(), Complex{});
  solved_ = false;
}

void AudioConvolver::load_plane(std::size_t k, std::span<const Complex> q_plane) {
  if (k >= volume_.z.count) throw RangeError("plane index outside the volume");
  if (q_plane.size() != volume_.x.count * volume_.y.count) throw ShapeError("q plane size does not match the volume");
  if (work_.size() != dims_.size()) work_.assign(dims_.size(), Complex{});
  const double dv = volume_.cell_volume();
  Complex* base = work_.data() + k * dims_.nx * dims_.ny;
  for (std::size_t j = 0; j < volume_.y.count; ++j)
    for (std::size_t i = 0; i < volume_.x.count; ++i)
      base[i + dims_.nx * j] = q_plane[i + volume_.x.count * j] * (box_cell_fraction(volume_, i, j, k) * dv);
  solved_ = false;
}

void AudioConvolver::load(const ComplexField3D& q) {
  if (!same_grid(q.grid, volume_)) throw ShapeError("q is not on the convolver volume");
  for (std::size_t k = 0; k < volume_.z.count; ++k) load_plane(k, q.plane(k));
}

AudioDiagnostics AudioConvolver::convolve(const GreenSpectrum3D& green, double rho0, double f_a,
                                          double support_threshold) {
  if (!(green.dims() == dims_)) throw ShapeError("Green's spectrum is on a different transform grid");
  if (solved_) throw ParameterError("convolver already holds a solution; reload q first");
  AudioDiagnostics diag;

  // Energy support of the loaded source.
  double peak = 0.0;
  for (std::size_t k = 0; k < volume_.z.count; ++k)
    for (std::size_t j = 0; j < volume_.y.count; ++j)
      for (std::size_t i = 0; i < volume_.x.count; ++i)
        peak = std::max(peak, std::abs(work_[i + dims_.nx * (j + dims_.ny * k)]));
  if (peak > 0.0) {
    const double cut = support_threshold * peak;
    std::array<std::size_t, 3> lo{volume_.x.count, volume_.y.count, volume_.z.count}, hi{0, 0, 0};
    for (std::size_t k = 0; k < volume_.z.count; ++k)
      for (std::size_t j = 0; j < volume_.y.count; ++j)
        for (std::size_t i = 0; i < volume_.x.count; ++i)
          if (std::abs(work_[i + dims_.nx * (j + dims_.ny * k)]) >= cut) {
            lo = {std::min(lo[0], i), std::min(lo[1], j), std::min(lo[2], k)};
            hi = {std::max(hi[0], i), std::max(hi[1], j), std::max(hi[2], k)};
          }
    const std::array<std::size_t, 3> m{dims_.nx, dims_.ny, dims_.nz};
    const char* names = "xyz";
    for (int a = 0; a < 3; ++a) {
      diag.energy_support[a] = hi[a] - lo[a] + 1;
      if (m[a] < 2 * diag.energy_support[a])
        throw PaddingError(std::string("transform length ") + std::to_string(m[a]) + " along " + names[a] +
                           " is below twice the source support " + std::to_string(diag.energy_support[a]));
    }
  }
  diag.linear_convolution = is_linear_convolution(volume_, dims_);

  const auto forward = FftPlan::volume(dims_.nx, dims_.ny, dims_.nz, FftDirection::forward, threads_);
  const auto inverse = FftPlan::volume(dims_.nx, dims_.ny, dims_.nz, FftDirection::inverse, threads_);
  forward.execute(work_.data(), work_.data());
  const Complex scale = -kI * rho0 * kTwoPi * f_a / static_cast<double>(dims_.size());
  const std::size_t plane = dims_.nx * dims_.ny;
  parallel_for(dims_.nz, threads_, [&](std::size_t l, std::size_t) {
    Complex* p = work_.data() + l * plane;
    for (std::size_t j = 0; j < dims_.ny; ++j)
      for (std::size_t i = 0; i < dims_.nx; ++i) p[i + dims_.nx * j] *= green.transfer(i, j, l) * scale;
  });
  inverse.execute(work_.data(), work_.data());
  solved_ = true;
  return diag;
}

Complex AudioConvolver::at(std::size_t i, std::size_t j, std::size_t k) const {
  if (!solved_) throw ParameterError("convolve has not run");
  if (i >= volume_.x.count || j >= volume_.y.count || k >= volume_.z.count) throw RangeError("node outside the volume");
  return work_[i + dims_.nx * (j + dims_.ny * k)];
}

void AudioConvolver::extract_plane(std::size_t k, std::span<Complex> out) const {
  if (out.size() != volume_.x.count * volume_.y.count) throw ShapeError("output plane size does not match the volume");
  for (std::size_t j = 0; j < volume_.y.count; ++j)
    for (std::size_t i = 0; i < volume_.x.count; ++i) out[i + volume_.x.count * j] = at(i, j, k);
}

ComplexField3D AudioConvolver::extract() const {
  ComplexField3D out(volume_);
  for (std::size_t k = 0; k < volume_.z.count; ++k) extract_plane(k, out.plane(k));
  return out;
}

ComplexField3D solve_audio(const VirtualSourceVolume& q, const GreenSpectrum3D& green, double rho0,
                           std::size_t threads, AudioDiagnostics* diagnostics) {
  AudioConvolver conv(q.q.grid, green.dims(), threads);
  conv.load(q.q);
  const auto diag = conv.convolve(green, rho0, q.f_a);
  if (diagnostics) *diagnostics = diag;
  return conv.extract();
}

double spl(double magnitude) {
  if (magnitude <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(magnitude / 20e-6);
}

double spl(Complex p) { return spl(std::abs(p)); }

}  // namespace pal
