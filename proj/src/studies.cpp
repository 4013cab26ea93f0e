#include "pal/studies.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "pal/postprocess.hpp"

namespace pal {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Lattice of spacing h through the volume's first node, covering [lo, hi] with one spare cell each side.
Axis covering_axis(const Axis& volume_axis, double h, double lo, double hi) {
  const double min = volume_axis.min + h * (std::floor((lo - volume_axis.min) / h + 1e-9) - 1.0);
  const auto count = static_cast<std::size_t>(std::ceil((hi - min) / h - 1e-9)) + 2;
  return {min, h, count};
}

MediumParams lossless(const SimulationSetup& setup) {
  MediumParams m = setup.medium;
  m.attenuation_override = std::map<double, double>{{setup.source.f1, 0.0}, {setup.source.f2, 0.0}};
  return m;
}

}  // namespace

QuadratureSpec oracle_quadrature(const SimulationSetup& setup, double h) {
  const auto box = bounding_box(setup.source.elements);
  QuadratureSpec q;
  q.source_mesh = {covering_axis(setup.volume.x, h, box.xmin, box.xmax),
                   covering_axis(setup.volume.y, h, box.ymin, box.ymax)};
  q.volume = setup.volume;
  q.raster = Rasterization::area;
  return q;
}

ProbeComparison compare(const Point3& point, Complex value, Complex reference) {
  ProbeComparison c{point, value, reference};
  c.relative_error = std::abs(value - reference) / std::abs(reference);
  c.delta_db = spl(value) - spl(reference);
  return c;
}

std::vector<ProbeComparison> compare_audio(const ComplexField3D& audio, const DimAudioOracle& oracle,
                                           const std::vector<Point3>& probes) {
  std::vector<ProbeComparison> out;
  for (const auto& p : probes) out.push_back(compare(p, interpolate(audio, p), oracle.pressure(p)));
  return out;
}

double piston_on_axis_pressure(double rho0, double c0, double v0, double radius, double k, double z) {
  const Complex i{0.0, 1.0};
  return rho0 * c0 * v0 * std::abs(std::exp(i * k * z) - std::exp(i * k * std::sqrt(z * z + radius * radius)));
}

std::vector<AxisComparison> ultrasound_axis_check(const SimulationSetup& setup, double z_min, double z_max) {
  if (setup.source.elements.size() != 1 || setup.source.elements[0].x != 0.0 || setup.source.elements[0].y != 0.0)
    throw ParameterError("the on-axis check needs a single piston at the origin");
  const auto& vol = setup.volume;
  if (!vol.x.contains(0.0) || !vol.y.contains(0.0)) throw RangeError("the volume does not contain the axis");
  const auto medium = lossless(setup);
  const auto& el = setup.source.elements[0];
  const double f = setup.source.f1;
  const auto k = wavenumber(f, medium);
  // Source plane padded for a single-node window on the axis.
  SimulationSetup line = setup;
  line.volume.x = {0.0, setup.source_mesh, 1};
  line.volume.y = {0.0, setup.source_mesh, 1};
  const auto sp = source_plane(line);
  const AsaPropagator prop(rasterize_velocity(setup.source, sp, Primary::f1, setup.raster), k, f, medium.rho0,
                           line.volume.plane(), setup.propagator);
  auto ws = prop.make_workspace();
  std::vector<Complex> out(1);
  std::vector<AxisComparison> rows;
  for (std::size_t n = 0; n < vol.z.count; ++n) {
    const double z = vol.z.node(n);
    if (z < z_min - 1e-12 || z > z_max + 1e-12) continue;
    prop.plane(z, out, ws);
    const double ref = piston_on_axis_pressure(medium.rho0, medium.c0, setup.source.v0 * std::abs(el.weight_f1),
                                               el.radius, k.real_part, z);
    rows.push_back({z, spl(out[0]), spl(ref)});
  }
  return rows;
}

std::vector<ProbeComparison> ultrasound_rayleigh_check(const SimulationSetup& setup, const std::vector<Point3>& probes,
                                                       double oracle_mesh) {
  const auto sp = source_plane(setup);
  const double f = setup.source.f1;
  const auto k = wavenumber(f, setup.medium);
  const auto quad = oracle_quadrature(setup, oracle_mesh);
  const AsaPropagator prop(rasterize_velocity(setup.source, sp, Primary::f1, setup.raster), k, f, setup.medium.rho0,
                           setup.volume.plane(), setup.propagator);
  std::vector<ProbeComparison> out;
  for (const auto& p : probes) {
    if (!setup.volume.x.contains(p.x) || !setup.volume.y.contains(p.y))
      throw RangeError("probe is not a node of the volume");
    const auto plane = prop.plane(p.z);
    const Complex asa = plane.at(static_cast<std::size_t>(setup.volume.x.nearest(p.x)),
                                 static_cast<std::size_t>(setup.volume.y.nearest(p.y)));
    out.push_back(compare(p, asa, rayleigh_quadrature(setup.source, p, Primary::f1, quad, setup.medium)));
  }
  return out;
}

GridSpec3D sweep_volume(const GridSpec3D& base, SweepAxis axis, double mesh) {
  GridSpec3D v = base;
  if (axis == SweepAxis::xy) {
    v.x = Axis::from_extents(base.x.min, base.x.max(), mesh);
    v.y = Axis::from_extents(base.y.min, base.y.max(), mesh);
  } else {
    v.z = Axis::from_extents(base.z.min, base.z.max(), mesh);
  }
  return v;
}

ConvergenceTable convergence_sweep(const SimulationSetup& base, const ConvergenceSpec& spec,
                                   const std::function<void(const ConvergenceRow&)>& progress) {
  if (spec.meshes.empty()) throw ParameterError("the mesh list is empty");
  for (std::size_t i = 1; i < spec.meshes.size(); ++i)
    if (!(spec.meshes[i] < spec.meshes[i - 1])) throw ParameterError("the mesh list must be decreasing");
  ConvergenceTable table{spec.axis, spec.probes, {}};
  for (double mesh : spec.meshes) {
    SimulationSetup s = base;
    s.volume = sweep_volume(base.volume, spec.axis, mesh);
    s.source_mesh = spec.source_mesh;
    const auto t0 = Clock::now();
    const auto res = run_audio(s);
    ConvergenceRow row{mesh, res.plan.dims, seconds_since(t0), {}, {}};
    for (const auto& p : spec.probes) row.spl.push_back(spl(interpolate(res.audio, p)));
    if (progress) progress(row);
    table.rows.push_back(std::move(row));
  }
  const auto& ref = table.rows.back().spl;
  for (auto& row : table.rows)
    for (std::size_t n = 0; n < ref.size(); ++n) row.delta_db.push_back(row.spl[n] - ref[n]);
  return table;
}

BenchReport run_bench(const SimulationSetup& setup, const BenchSpec& spec) {
  BenchReport r;
  r.volume = setup.volume;
  const auto t0 = Clock::now();
  const auto res = run_audio(setup);
  r.kspace_seconds = seconds_since(t0);
  r.dims = res.plan.dims;
  const double nodes = static_cast<double>(setup.volume.size());
  r.kspace_per_point = r.kspace_seconds / nodes;
  auto quad = oracle_quadrature(setup, setup.source_mesh);
  quad.raster = setup.raster;
  r.dim = benchmark_point_cost(setup.source, quad, setup.medium, spec.point, spec.five_fold_voxels);
  r.dim_volume_seconds = r.dim.five_fold_seconds * nodes;
  r.speedup_volume_sum = r.dim.volume_sum_seconds / r.kspace_per_point;
  r.speedup_five_fold = r.dim.five_fold_seconds / r.kspace_per_point;
  return r;
}

std::string format_bench_table(const BenchReport& r) {
  const auto& v = r.volume;
  char buf[1024];
  std::snprintf(buf, sizeof(buf),
                "grid %zux%zux%zu nodes (spacing %.4g x %.4g x %.4g m), transform %zux%zux%zu\n"
                "%-28s %16s %16s\n"
                "%-28s %16.4g %16.4g\n"
                "%-28s %16.4g %16.4g\n"
                "single-point volume sum: %.4g s; speedup per point: %.3g (volume sum), %.3g (five-fold)\n",
                v.x.count, v.y.count, v.z.count, v.x.spacing, v.y.spacing, v.z.spacing, r.dims.nx, r.dims.ny,
                r.dims.nz, "method", "full grid [s]", "per point [s]", "k-space", r.kspace_seconds,
                r.kspace_per_point, "direct (extrapolated)", r.dim_volume_seconds, r.dim.five_fold_seconds,
                r.dim.volume_sum_seconds, r.speedup_volume_sum, r.speedup_five_fold);
  return buf;
}

}  // namespace pal
