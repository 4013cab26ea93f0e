#pragma once

#include <span>

#include "pal/fft.hpp"
#include "pal/grid.hpp"
#include "pal/medium.hpp"
#include "pal/parallel.hpp"

namespace pal {

/// Closed-form 2D spectrum of exp(ik|r|)/(4 pi |r|) at height z, built from Re(k).
/// Evanescent components use the decaying root; the |k_t| = Re(k) circle is regularized.
Complex spectral_propagator(const Wavenumber& k, double kx, double ky, double z);

/// Plane-wave absorption exp(-alpha Re(k) |z| / kz); 1 outside the propagating disc.
double attenuation_factor(const Wavenumber& k, double kx, double ky, double z);

enum class PropagatorMode {
  /// Transform of the Green's function sampled on the padded plane (complex k, exact discrete Rayleigh sum).
  spatial,
  /// Closed-form spectral propagator times the attenuation factor.
  spectral,
};

/// Angular-spectrum propagator for one primary frequency.
///
/// `velocity` is the surface velocity on a zero-padded source plane; `window` selects the output
/// nodes, which must sit on the source-plane lattice (same origin lattice, integer stride).
/// Each z-plane is computed independently from the shared source spectrum.
class AsaPropagator {
 public:
  AsaPropagator(const ComplexField2D& velocity, const Wavenumber& k, double frequency, double rho0,
                const GridSpec2D& window, PropagatorMode mode = PropagatorMode::spatial);

  /// Per-thread scratch; one per concurrent caller of `plane`.
  struct Workspace {
    AlignedBuffer kernel;
  };
  Workspace make_workspace() const;

  /// Pressure at the window nodes of plane z (>= 0), written x-fastest into `out`.
  void plane(double z, std::span<Complex> out, Workspace& ws) const;
  ComplexField2D plane(double z) const;

  const GridSpec2D& window() const { return window_; }
  std::size_t padded_nx() const { return nx_; }
  std::size_t padded_ny() const { return ny_; }

 private:
  void fill_spatial_kernel(double z, AlignedBuffer& kernel) const;
  void fill_spectral_kernel(double z, AlignedBuffer& kernel) const;

  GridSpec2D source_grid_;
  GridSpec2D window_;
  Wavenumber k_;
  double omega_;
  double rho0_;
  PropagatorMode mode_;
  std::size_t nx_, ny_;
  long off_x_, off_y_;        // window origin in source-lattice index units
  long stride_x_, stride_y_;  // window spacing in source-lattice units
  long dmin_x_, dmin_y_;      // first lattice offset held by the spatial kernel
  AlignedBuffer source_spectrum_;
  FftPlan forward_;
  FftPlan inverse_;
};

/// Pressure of one primary on every node of `window` (x, y from the window, z planes from window.z).
ComplexField3D propagate_ultrasound(const ComplexField2D& velocity, const Wavenumber& k, double frequency,
                                    double rho0, const GridSpec3D& window,
                                    PropagatorMode mode = PropagatorMode::spatial, std::size_t workers = 1);

}  // namespace pal
