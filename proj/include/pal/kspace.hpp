#pragma once

#include <array>
#include <span>

#include "pal/fft.hpp"
#include "pal/grid.hpp"
#include "pal/medium.hpp"

namespace pal {

/// Quasilinear difference-frequency source density q on the truncated volume (z >= 0).
struct VirtualSourceVolume {
  ComplexField3D q;
  double f_a = 0.0;
};

/// -i beta omega_a / (rho0^2 c0^4): q = coefficient * conj(p1) * p2.
Complex virtual_source_coefficient(const MediumParams& medium, double f_a);

VirtualSourceVolume virtual_source_density(const ComplexField3D& p1, const ComplexField3D& p2,
                                           const MediumParams& medium, double f_a);

/// Midpoint weight of node (i, j, k) inside the truncated box: cells straddling a face count half.
double box_cell_fraction(const GridSpec3D& grid, std::size_t i, std::size_t j, std::size_t k);

struct FftDims {
  std::size_t nx = 0, ny = 0, nz = 0;
  std::size_t size() const { return nx * ny * nz; }
  bool operator==(const FftDims&) const = default;
};

/// Transform length per axis: next fast size >= factor * count, never below the grid itself.
FftDims padded_dims(const GridSpec3D& grid, std::array<double, 3> factor);

/// True when the padded grid holds a full aperiodic convolution of the volume with itself.
bool is_linear_convolution(const GridSpec3D& grid, const FftDims& dims);

enum class GreenMode { analytic, sampled };

/// Transfer function of the audio Green's function on the padded wavenumber grid.
///
/// Both modes depend only on |offset| per axis, so only one octant is stored.
/// `transfer(i, j, l)` is the factor applied to the transform of q * cell volume.
class GreenSpectrum3D {
 public:
  GreenMode mode() const { return mode_; }
  const Wavenumber& ka() const { return ka_; }
  const FftDims& dims() const { return dims_; }
  Complex transfer(std::size_t i, std::size_t j, std::size_t l) const;
  std::size_t stored_bytes() const { return octant_.size() * sizeof(Complex); }

 private:
  friend GreenSpectrum3D green_spectrum(const Wavenumber&, const GridSpec3D&, const FftDims&, GreenMode,
                                        AlignedBuffer*, std::size_t);
  GreenMode mode_ = GreenMode::sampled;
  Wavenumber ka_;
  FftDims dims_;
  std::array<double, 3> spacing_{};
  Complex ka_reg_sq_;
  std::size_t ox_ = 0, oy_ = 0, oz_ = 0;  // octant extents
  std::vector<Complex> octant_;
};

/// Offsets within this many of the largest cell spacings (per axis) use cell-averaged kernel values.
inline constexpr double kNearZoneCells = 2.0;

/// Integral of 1/|r| over the box [x0,x1] x [y0,y1] x [z0,z1].
double inverse_distance_box_integral(double x0, double x1, double y0, double y1, double z0, double z1);

bool in_near_zone(double dx, double dy, double dz, const std::array<double, 3>& spacing);

/// Discrete audio Green's kernel at lattice offset (dx, dy, dz): the point value exp(ik r)/(4 pi r)
/// outside the near zone, the average over the cell centred on the offset inside it.
Complex sampled_green(const Wavenumber& ka, double dx, double dy, double dz, const std::array<double, 3>& spacing);

/// Builds the Green's spectrum. The sampled mode needs a full padded scratch array; when `scratch`
/// is given (size dims.size()) it is used instead of allocating one.
GreenSpectrum3D green_spectrum(const Wavenumber& ka, const GridSpec3D& grid, const FftDims& dims, GreenMode mode,
                               AlignedBuffer* scratch = nullptr, std::size_t threads = 1);

struct AudioDiagnostics {
  std::array<std::size_t, 3> energy_support{};  // voxels per axis above the support threshold
  bool linear_convolution = false;
};

/// Padded 3D convolution of the virtual-source volume with the audio Green's function.
///
/// q is loaded plane by plane (so the ultrasound volumes never need to be resident); after
/// `convolve` the audio pressure on the volume nodes is read back with `at` or `extract`.
class AudioConvolver {
 public:
  AudioConvolver(const GridSpec3D& volume, const FftDims& dims, std::size_t threads = 1);

  const GridSpec3D& volume() const { return volume_; }
  const FftDims& dims() const { return dims_; }
  AlignedBuffer& scratch() { return work_; }

  void clear();
  /// Stores q(plane k) weighted by the box quadrature and cell volume.
  void load_plane(std::size_t k, std::span<const Complex> q_plane);
  void load(const ComplexField3D& q);

  /// Forward transform, multiply by -i rho0 omega_a G, inverse transform.
  /// Throws PaddingError unless dims >= 2x the virtual-source energy support per axis.
  AudioDiagnostics convolve(const GreenSpectrum3D& green, double rho0, double f_a,
                            double support_threshold = 1e-3);

  Complex at(std::size_t i, std::size_t j, std::size_t k) const;
  ComplexField3D extract() const;
  void extract_plane(std::size_t k, std::span<Complex> out) const;

 private:
  GridSpec3D volume_;
  FftDims dims_;
  std::size_t threads_;
  AlignedBuffer work_;
  bool solved_ = false;
};

/// Audio pressure on the q grid: inverse transform of -i rho0 omega_a Q(k) G_a(k).
/// `dims` must match the spectrum; the padded grid is allocated internally.
ComplexField3D solve_audio(const VirtualSourceVolume& q, const GreenSpectrum3D& green, double rho0,
                           std::size_t threads = 1, AudioDiagnostics* diagnostics = nullptr);

/// Sound pressure level re 20 uPa; -infinity for a zero pressure.
double spl(Complex p);
double spl(double magnitude);

}  // namespace pal
