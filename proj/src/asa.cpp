#include "pal/asa.hpp"

#include <cmath>
#include <string>

namespace pal {

namespace {

// Root of Re(k)^2 - kt^2: positive real in the propagating disc, +i|.| outside, floored near the circle.
Complex axial_wavenumber(double kr, double kt2) {
  const double eps = (1e-6 * kr) * (1e-6 * kr);
  const double d = kr * kr - kt2;
  if (d >= 0.0) return {std::sqrt(std::max(d, eps)), 0.0};
  return {0.0, std::sqrt(std::max(-d, eps))};
}

long positive_mod(long a, long n) {
  const long r = a % n;
  return r < 0 ? r + n : r;
}

double signed_wavenumber(std::size_t p, std::size_t n, double spacing) {
  const long m = (p <= n / 2) ? static_cast<long>(p) : static_cast<long>(p) - static_cast<long>(n);
  return kTwoPi * static_cast<double>(m) / (static_cast<double>(n) * spacing);
}

long lattice_offset(double from, double to, double h, const char* what) {
  const double cells = (to - from) / h;
  const double r = std::round(cells);
  if (std::abs(cells - r) > 1e-6) throw ShapeError(std::string(what) + " is not aligned with the source-plane lattice");
  return static_cast<long>(r);
}

}  // namespace

Complex spectral_propagator(const Wavenumber& k, double kx, double ky, double z) {
  const Complex kz = axial_wavenumber(k.real_part, kx * kx + ky * ky);
  return kI * std::exp(kI * kz * std::abs(z)) / (2.0 * kz);
}

double attenuation_factor(const Wavenumber& k, double kx, double ky, double z) {
  const double kr = k.real_part;
  const double d = kr * kr - kx * kx - ky * ky;
  if (d <= 0.0 || k.alpha == 0.0) return 1.0;
  const double kz = std::sqrt(std::max(d, (1e-6 * kr) * (1e-6 * kr)));
  return std::exp(-k.alpha * kr * std::abs(z) / kz);
}

AsaPropagator::AsaPropagator(const ComplexField2D& velocity, const Wavenumber& k, double frequency, double rho0,
                             const GridSpec2D& window, PropagatorMode mode)
    : source_grid_(velocity.grid),
      window_(window),
      k_(k),
      omega_(kTwoPi * frequency),
      rho0_(rho0),
      mode_(mode),
      nx_(velocity.grid.x.count),
      ny_(velocity.grid.y.count),
      forward_(FftPlan::plane(velocity.grid.x.count, velocity.grid.y.count, FftDirection::forward)),
      inverse_(FftPlan::plane(velocity.grid.x.count, velocity.grid.y.count, FftDirection::inverse)) {
  source_grid_.validate();
  if (velocity.data.size() != source_grid_.size()) throw ShapeError("velocity sample count does not match its grid");
  if (!(frequency > 0.0)) throw ParameterError("frequency must be positive");
  const double hx = source_grid_.x.spacing;
  const double hy = source_grid_.y.spacing;

  off_x_ = lattice_offset(source_grid_.x.min, window_.x.min, hx, "output window origin");
  off_y_ = lattice_offset(source_grid_.y.min, window_.y.min, hy, "output window origin");
  stride_x_ = lattice_offset(0.0, window_.x.spacing, hx, "output window spacing");
  stride_y_ = lattice_offset(0.0, window_.y.spacing, hy, "output window spacing");
  if (stride_x_ < 1 || stride_y_ < 1) throw ShapeError("output window spacing must be a positive multiple of the source mesh");

  // Source support in lattice indices.
  long sx0 = static_cast<long>(nx_), sx1 = -1, sy0 = static_cast<long>(ny_), sy1 = -1;
  for (std::size_t j = 0; j < ny_; ++j)
    for (std::size_t i = 0; i < nx_; ++i)
      if (velocity.at(i, j) != Complex{}) {
        sx0 = std::min(sx0, static_cast<long>(i));
        sx1 = std::max(sx1, static_cast<long>(i));
        sy0 = std::min(sy0, static_cast<long>(j));
        sy1 = std::max(sy1, static_cast<long>(j));
      }
  if (sx1 < 0) {  // silent source
    sx0 = sx1 = sy0 = sy1 = 0;
  } else {
    const long support_x = sx1 - sx0 + 1;
    const long support_y = sy1 - sy0 + 1;
    const long span_x = stride_x_ * static_cast<long>(window_.x.count - 1) + 1;
    const long span_y = stride_y_ * static_cast<long>(window_.y.count - 1) + 1;
    const long need_x = std::max(2 * support_x, support_x + span_x - 1);
    const long need_y = std::max(2 * support_y, support_y + span_y - 1);
    if (static_cast<long>(nx_) < need_x || static_cast<long>(ny_) < need_y)
      throw PaddingError("source plane " + std::to_string(nx_) + "x" + std::to_string(ny_) +
                         " is too small; need at least " + std::to_string(need_x) + "x" + std::to_string(need_y) +
                         " to avoid wrap-around");
  }
  dmin_x_ = off_x_ - sx1;
  dmin_y_ = off_y_ - sy1;

  source_spectrum_.assign(velocity.data.begin(), velocity.data.end());
  forward_.execute(source_spectrum_.data(), source_spectrum_.data());
}

AsaPropagator::Workspace AsaPropagator::make_workspace() const {
  return {AlignedBuffer(nx_ * ny_)};
}

void AsaPropagator::fill_spatial_kernel(double z, AlignedBuffer& kernel) const {
  const double hx = source_grid_.x.spacing;
  const double hy = source_grid_.y.spacing;
  const Complex k = k_.value();
  const double cell = hx * hy;
  const long nx = static_cast<long>(nx_);
  const long ny = static_cast<long>(ny_);
  for (long q = 0; q < ny; ++q) {
    const double dy = hy * static_cast<double>(dmin_y_ + positive_mod(q - dmin_y_, ny));
    for (long p = 0; p < nx; ++p) {
      const double dx = hx * static_cast<double>(dmin_x_ + positive_mod(p - dmin_x_, nx));
      const double r = std::sqrt(dx * dx + dy * dy + z * z);
      Complex val;
      if (r == 0.0) {
        // Integral of the Green's function over the equal-area disk around the singular node.
        const double req = std::sqrt(cell / kPi);
        val = (std::exp(kI * k * req) - 1.0) / (2.0 * kI * k);
      } else {
        val = std::exp(kI * k * r) / (4.0 * kPi * r) * cell;
      }
      kernel[static_cast<std::size_t>(p + nx * q)] = val;
    }
  }
}

void AsaPropagator::fill_spectral_kernel(double z, AlignedBuffer& kernel) const {
  const double hx = source_grid_.x.spacing;
  const double hy = source_grid_.y.spacing;
  for (std::size_t q = 0; q < ny_; ++q) {
    const double ky = signed_wavenumber(q, ny_, hy);
    for (std::size_t p = 0; p < nx_; ++p) {
      const double kx = signed_wavenumber(p, nx_, hx);
      kernel[p + nx_ * q] = spectral_propagator(k_, kx, ky, z) * attenuation_factor(k_, kx, ky, z);
    }
  }
}

void AsaPropagator::plane(double z, std::span<Complex> out, Workspace& ws) const {
  if (!(z >= 0.0) || !std::isfinite(z)) throw ParameterError("z-planes must be finite and non-negative");
  if (out.size() != window_.size()) throw ShapeError("output span does not match the window");
  auto& kernel = ws.kernel;
  if (kernel.size() != nx_ * ny_) kernel.resize(nx_ * ny_);
  if (mode_ == PropagatorMode::spatial) {
    fill_spatial_kernel(z, kernel);
    forward_.execute(kernel.data(), kernel.data());
  } else {
    fill_spectral_kernel(z, kernel);
  }
  const Complex scale = -2.0 * kI * rho0_ * omega_ / static_cast<double>(nx_ * ny_);
  for (std::size_t n = 0; n < kernel.size(); ++n) kernel[n] *= source_spectrum_[n] * scale;
  inverse_.execute(kernel.data(), kernel.data());

  const long nx = static_cast<long>(nx_);
  const long ny = static_cast<long>(ny_);
  for (std::size_t j = 0; j < window_.y.count; ++j) {
    const long q = positive_mod(off_y_ + stride_y_ * static_cast<long>(j), ny);
    for (std::size_t i = 0; i < window_.x.count; ++i) {
      const long p = positive_mod(off_x_ + stride_x_ * static_cast<long>(i), nx);
      out[i + window_.x.count * j] = kernel[static_cast<std::size_t>(p + nx * q)];
    }
  }
}

ComplexField2D AsaPropagator::plane(double z) const {
  ComplexField2D out(window_, z);
  auto ws = make_workspace();
  plane(z, out.data, ws);
  return out;
}

ComplexField3D propagate_ultrasound(const ComplexField2D& velocity, const Wavenumber& k, double frequency,
                                    double rho0, const GridSpec3D& window, PropagatorMode mode,
                                    std::size_t workers) {
  if (window.z.min < 0.0) throw ParameterError("ultrasound is only evaluated for z >= 0");
  AsaPropagator prop(velocity, k, frequency, rho0, window.plane(), mode);
  ComplexField3D out(window);
  const std::size_t nw = std::max<std::size_t>(1, workers);
  std::vector<AsaPropagator::Workspace> spaces;
  for (std::size_t w = 0; w < std::min(nw, window.z.count); ++w) spaces.push_back(prop.make_workspace());
  parallel_for(window.z.count, nw, [&](std::size_t kz, std::size_t w) {
    prop.plane(window.z.node(kz), out.plane(kz), spaces[w]);
  });
  return out;
}

}  // namespace pal
