#pragma once

#include <functional>
#include <vector>

#include "pal/geometry.hpp"
#include "pal/grid.hpp"
#include "pal/kspace.hpp"
#include "pal/medium.hpp"

namespace pal {

/// Meshes for the brute-force midpoint sums: source cells and the truncated audio volume.
struct QuadratureSpec {
  GridSpec2D source_mesh;
  GridSpec3D volume;
  Rasterization raster = Rasterization::area;

  void validate() const;
};

/// Direct midpoint Rayleigh sum for one primary at a point with z > 0.
Complex rayleigh_quadrature(const SourceSpec& source, const Point3& point, Primary which,
                            const QuadratureSpec& quad, const MediumParams& medium);

/// Direct five-fold sum: q at every voxel from two Rayleigh sums, then the volume sum to `point`.
/// Cost is voxels x source cells x 2; `voxel_limit` (if nonzero) stops after that many voxels,
/// which the benchmark uses to time a fraction of the work.
Complex dim_audio(const SourceSpec& source, const Point3& point, const QuadratureSpec& quad,
                  const MediumParams& medium, std::size_t voxel_limit = 0);

/// Primary pressure on every node of quad.volume by direct Rayleigh sums.
/// Volume x/y nodes must lie on the source-mesh lattice; z = 0 nodes use the in-plane disk average.
ComplexField3D rayleigh_volume(const SourceSpec& source, Primary which, const QuadratureSpec& quad,
                               const MediumParams& medium, std::size_t workers = 1);

/// Volume-sum audio oracle over a fixed q volume (direct sums, no transforms).
class DimAudioOracle {
 public:
  static DimAudioOracle from_q(const ComplexField3D& q, double f_a, const MediumParams& medium);
  static DimAudioOracle from_ultrasound(const ComplexField3D& p1, const ComplexField3D& p2, double f_a,
                                        const MediumParams& medium);
  static DimAudioOracle from_rayleigh(const SourceSpec& source, const QuadratureSpec& quad,
                                      const MediumParams& medium, std::size_t workers = 1);

  /// -i rho0 omega_a sum_v q_v w_v dV g_a(|r - r_v|); a coincident voxel uses the cell-averaged value.
  Complex pressure(const Point3& r) const;
  const ComplexField3D& q() const { return q_; }
  double audio_frequency() const { return f_a_; }

 private:
  ComplexField3D q_;
  double f_a_ = 0.0;
  double rho0_ = 0.0;
  Wavenumber ka_;
};

struct PointCost {
  double volume_sum_seconds = 0.0;  // one audio point from a stored q volume
  double five_fold_seconds = 0.0;   // one audio point including the Rayleigh sums, extrapolated
  double five_fold_fraction = 0.0;  // fraction of voxels actually timed for the five-fold figure
  std::size_t voxels = 0;
  std::size_t source_cells = 0;
};

/// Wall-clock cost of single-point direct evaluation on the quadrature grid.
/// The five-fold figure times `five_fold_voxels` voxels and scales linearly to the full volume.
PointCost benchmark_point_cost(const SourceSpec& source, const QuadratureSpec& quad, const MediumParams& medium,
                               const Point3& point, std::size_t five_fold_voxels = 20000);

}  // namespace pal
