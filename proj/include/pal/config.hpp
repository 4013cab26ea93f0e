#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pal/field_dump.hpp"
#include "pal/pipeline.hpp"
#include "pal/postprocess.hpp"

namespace pal {

inline constexpr int kConfigSchemaVersion = 1;

/// Schema violation; the message carries "<file>:<line>:<column>:".
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("config", w) {}
};

struct AngularOutput {
  double radius = 0.5;
  ArcPlane plane = ArcPlane::xz;
  double step_deg = 0.5;
  bool normalize = true;
  double exclusion_deg = 0.0;  // 0 selects the automatic main-lobe window
};

struct SliceOutput {
  SlicePlane plane = SlicePlane::xz;
  double at = 0.0;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<FieldComponent> dumps;
  bool axial = true;
  std::optional<AngularOutput> angular;
  std::vector<SliceOutput> slices;
  std::vector<Point3> probes;
};

struct VerifySpec {
  double oracle_source_mesh = 0.001;  // Rayleigh quadrature mesh of the independent oracle
  std::vector<Point3> probes{{0, 0, 0.3}, {0, 0, 1.0}, {0.3, 0, 0.3}};
  double equivalence_tolerance = 1e-6;
  double spl_tolerance_db = 0.1;
  std::vector<double> ultrasound_axis{0.1, 2.0};  // closed-form comparison range [m]
  double ultrasound_axis_mesh = 0.001;           // ASA source mesh for the closed-form comparison
  std::vector<Point3> ultrasound_probes{{0, 0, 0.3}, {0, 0, 1.0}, {0.3, 0, 0.3}};  // main-beam points
};

enum class SweepAxis { xy, z };

struct ConvergenceSpec {
  SweepAxis axis = SweepAxis::xy;
  std::vector<double> meshes;  // decreasing; the last is the reference
  double source_mesh = 0.00125;
  std::vector<Point3> probes{{0, 0, 0.3}, {0, 0, 1.0}, {0.3, 0, 0.3}};
  double threshold_db = 0.1;
  double threshold_mesh = 0.0086;
};

struct BenchSpec {
  Point3 point{0.0, 0.0, 1.0};
  std::size_t five_fold_voxels = 20000;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  SimulationSetup setup;
  double steer_theta_deg = 0.0;
  double steer_phi_deg = 0.0;
  OutputSpec output;
  VerifySpec verify;
  ConvergenceSpec convergence;
  BenchSpec bench;
  std::string source_name;
  std::string text;
  std::uint64_t hash = 0;
};

RunConfig parse_config(const std::string& text, const std::string& name = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace pal
