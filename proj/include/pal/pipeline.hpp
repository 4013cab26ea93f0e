#pragma once

#include <array>
#include <functional>
#include <optional>

#include "pal/asa.hpp"
#include "pal/geometry.hpp"
#include "pal/kspace.hpp"
#include "pal/medium.hpp"

namespace pal {

/// Everything needed for one ultrasound + audio solve.
struct SimulationSetup {
  MediumParams medium = make_medium();
  SourceSpec source;
  GridSpec3D volume;                     // q grid and audio output window (z >= 0)
  double source_mesh = 0.002;            // ASA source-plane spacing; divides the volume x/y spacing
  Rasterization raster = Rasterization::center;
  std::array<double, 3> padding_factor{2.0, 2.0, 2.0};
  std::optional<FftDims> fft_dims;       // explicit transform grid; overrides padding_factor
  GreenMode green_mode = GreenMode::sampled;
  PropagatorMode propagator = PropagatorMode::spatial;
  std::size_t workers = 1;
  double memory_budget_bytes = 4.0e9;

  void validate() const;
};

/// Zero-padded source plane on the volume's lattice, large enough for wrap-free ASA output.
GridSpec2D source_plane(const SimulationSetup& setup);

struct MemoryPlan {
  FftDims dims;
  double work_bytes = 0;        // padded complex work array
  double green_bytes = 0;       // stored Green's spectrum octant
  double output_bytes = 0;      // audio volume
  double ultrasound_bytes = 0;  // retained primary fields / q
  double plane_bytes = 0;       // ASA buffers
  double total() const { return work_bytes + green_bytes + output_bytes + ultrasound_bytes + plane_bytes; }
};

/// Sizes every allocation of `run_audio`; throws BudgetError when the total exceeds the budget.
MemoryPlan plan_memory(const SimulationSetup& setup, bool keep_fields = false);

FftDims transform_dims(const SimulationSetup& setup);

struct UltrasoundResult {
  ComplexField3D p1, p2;
  double seconds = 0.0;
};

UltrasoundResult run_ultrasound(const SimulationSetup& setup);

struct AudioTimings {
  double ultrasound = 0.0;  // both primaries, plane by plane, plus q
  double green = 0.0;
  double convolution = 0.0;
  double total = 0.0;
};

struct AudioRunOptions {
  bool keep_fields = false;  // also return p1, p2 and q volumes
  /// Called once per z-plane (in order) with p1, p2 and q when set; used for streaming dumps.
  std::function<void(std::size_t, std::span<const Complex>, std::span<const Complex>, std::span<const Complex>)>
      plane_sink;
};

struct AudioResult {
  ComplexField3D audio;
  std::optional<ComplexField3D> p1, p2, q;
  MemoryPlan plan;
  AudioDiagnostics diagnostics;
  AudioTimings timings;
};

/// Ultrasound by ASA, q per plane straight into the padded work array, then the k-space product.
AudioResult run_audio(const SimulationSetup& setup, const AudioRunOptions& options = {});

}  // namespace pal
