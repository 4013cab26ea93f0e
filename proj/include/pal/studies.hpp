#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pal/config.hpp"
#include "pal/oracle.hpp"
#include "pal/pipeline.hpp"

namespace pal {

/// Solver value against a reference value at one point.
struct ProbeComparison {
  Point3 point;
  Complex value;
  Complex reference;
  double relative_error = 0.0;  // |value - reference| / |reference|
  double delta_db = 0.0;        // SPL(value) - SPL(reference)
};

ProbeComparison compare(const Point3& point, Complex value, Complex reference);

/// Area-rasterized source mesh of spacing h on the volume's lattice, over the setup's volume.
QuadratureSpec oracle_quadrature(const SimulationSetup& setup, double h);

/// Audio field against the volume-sum oracle at each probe (trilinear lookup, exact at nodes).
std::vector<ProbeComparison> compare_audio(const ComplexField3D& audio, const DimAudioOracle& oracle,
                                           const std::vector<Point3>& probes);

/// Lossless on-axis pressure of a baffled circular piston: rho0 c0 v0 |e^{ikz} - e^{ik sqrt(z^2 + a^2)}|.
double piston_on_axis_pressure(double rho0, double c0, double v0, double radius, double k, double z);

struct AxisComparison {
  double z = 0.0;
  double asa_db = 0.0;
  double closed_form_db = 0.0;
};

/// On-axis ASA pressure of primary f1 for a single centred piston, lossless, against the closed form.
/// Samples z on the volume's z lattice inside [z_min, z_max].
std::vector<AxisComparison> ultrasound_axis_check(const SimulationSetup& setup, double z_min, double z_max);

/// ASA pressure of primary f1 against direct Rayleigh quadrature on `oracle_mesh`.
std::vector<ProbeComparison> ultrasound_rayleigh_check(const SimulationSetup& setup, const std::vector<Point3>& probes,
                                                       double oracle_mesh);

struct ConvergenceRow {
  double mesh = 0.0;
  FftDims dims;
  double seconds = 0.0;
  std::vector<double> spl;       // per probe
  std::vector<double> delta_db;  // per probe, against the last (finest) mesh
};

struct ConvergenceTable {
  SweepAxis axis = SweepAxis::xy;
  std::vector<Point3> probes;
  std::vector<ConvergenceRow> rows;
};

/// Volume of `base` with the swept spacing replaced by `mesh`; extents are kept.
GridSpec3D sweep_volume(const GridSpec3D& base, SweepAxis axis, double mesh);

/// Re-solves the audio field per mesh; progress receives each row before the deltas are known.
ConvergenceTable convergence_sweep(const SimulationSetup& base, const ConvergenceSpec& spec,
                                   const std::function<void(const ConvergenceRow&)>& progress = {});

struct BenchReport {
  GridSpec3D volume;
  FftDims dims;
  double kspace_seconds = 0.0;         // full-volume solve
  double kspace_per_point = 0.0;       // amortized over the volume nodes
  PointCost dim;                       // single-point direct evaluation
  double dim_volume_seconds = 0.0;     // five-fold point time x node count
  double speedup_volume_sum = 0.0;     // dim.volume_sum_seconds / kspace_per_point
  double speedup_five_fold = 0.0;      // dim.five_fold_seconds / kspace_per_point
};

BenchReport run_bench(const SimulationSetup& setup, const BenchSpec& spec);

/// Two-row table: k-space full grid and extrapolated direct integration.
std::string format_bench_table(const BenchReport& report);

}  // namespace pal
