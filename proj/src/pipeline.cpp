#include "pal/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "pal/parallel.hpp"

namespace pal {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

long integer_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-6) throw ParameterError(std::string(what));
  return static_cast<long>(n);
}

Axis padded_source_axis(const Axis& window, double h, double lo, double hi) {
  const long stride = integer_ratio(window.spacing, h, "volume spacing must be an integer multiple of the source mesh");
  // Lattice shift (in cells) so the plane starts at or before the source.
  const long shift = std::max(0L, static_cast<long>(std::ceil((window.min - lo) / h - 1e-9)));
  const double min = window.min - h * static_cast<double>(shift);
  const long support = static_cast<long>(std::ceil((hi - lo) / h - 1e-9)) + 2;
  const long span = stride * static_cast<long>(window.count - 1) + 1;
  const long cover = static_cast<long>(std::ceil((hi - min) / h - 1e-9)) + 2;
  const long need = std::max({2 * support, support + span - 1, cover});
  return {min, h, next_fast_size(static_cast<std::size_t>(need))};
}

}  // namespace

void SimulationSetup::validate() const {
  medium.validate();
  source.validate();
  volume.validate();
  if (volume.z.min < 0.0) throw ParameterError("the volume must lie in z >= 0");
  if (!(source_mesh > 0.0)) throw ParameterError("source mesh must be positive");
  for (double f : padding_factor)
    if (!(f >= 1.5)) throw ParameterError("padding factor must be at least 1.5");
  if (fft_dims && (fft_dims->nx < volume.x.count || fft_dims->ny < volume.y.count || fft_dims->nz < volume.z.count))
    throw ParameterError("explicit transform dimensions must not be smaller than the volume");
  if (!(memory_budget_bytes > 0.0)) throw ParameterError("memory budget must be positive");
}

GridSpec2D source_plane(const SimulationSetup& setup) {
  const auto box = bounding_box(setup.source.elements);
  return {padded_source_axis(setup.volume.x, setup.source_mesh, box.xmin, box.xmax),
          padded_source_axis(setup.volume.y, setup.source_mesh, box.ymin, box.ymax)};
}

FftDims transform_dims(const SimulationSetup& setup) {
  return setup.fft_dims ? *setup.fft_dims : padded_dims(setup.volume, setup.padding_factor);
}

MemoryPlan plan_memory(const SimulationSetup& setup, bool keep_fields) {
  setup.validate();
  MemoryPlan plan;
  plan.dims = transform_dims(setup);
  const double c = sizeof(Complex);
  const double n = static_cast<double>(setup.volume.size());
  plan.work_bytes = c * static_cast<double>(plan.dims.size());
  plan.green_bytes = c * static_cast<double>((plan.dims.nx / 2 + 1) * (plan.dims.ny / 2 + 1) * (plan.dims.nz / 2 + 1));
  plan.output_bytes = c * n;
  plan.ultrasound_bytes = keep_fields ? 3.0 * c * n : 0.0;
  const auto sp = source_plane(setup);
  const double window = static_cast<double>(setup.volume.x.count * setup.volume.y.count);
  const double workers = static_cast<double>(std::max<std::size_t>(1, setup.workers));
  // Velocity + spectrum per primary, one kernel and three window planes per worker.
  plan.plane_bytes = c * (4.0 * static_cast<double>(sp.size()) + workers * (static_cast<double>(sp.size()) + 3.0 * window));
  if (plan.total() > setup.memory_budget_bytes) {
    char msg[256];
    std::snprintf(msg, sizeof(msg), "planned %.3g GB (transform grid %zux%zux%zu) exceeds the budget of %.3g GB",
                  plan.total() / 1e9, plan.dims.nx, plan.dims.ny, plan.dims.nz, setup.memory_budget_bytes / 1e9);
    throw BudgetError(msg);
  }
  return plan;
}

UltrasoundResult run_ultrasound(const SimulationSetup& setup) {
  setup.validate();
  const auto t0 = Clock::now();
  const auto sp = source_plane(setup);
  UltrasoundResult r;
  for (Primary which : {Primary::f1, Primary::f2}) {
    const double f = setup.source.frequency(which);
    const auto vel = rasterize_velocity(setup.source, sp, which, setup.raster);
    auto field = propagate_ultrasound(vel, wavenumber(f, setup.medium), f, setup.medium.rho0, setup.volume,
                                      setup.propagator, setup.workers);
    (which == Primary::f1 ? r.p1 : r.p2) = std::move(field);
  }
  r.seconds = seconds_since(t0);
  return r;
}

AudioResult run_audio(const SimulationSetup& setup, const AudioRunOptions& options) {
  const auto t_start = Clock::now();
  AudioResult res;
  res.plan = plan_memory(setup, options.keep_fields);
  const auto& vol = setup.volume;
  const double fa = setup.source.audio_frequency();
  const std::size_t workers = std::max<std::size_t>(1, setup.workers);

  AudioConvolver conv(vol, res.plan.dims, workers);

  auto t0 = Clock::now();
  const auto green = green_spectrum(audio_wavenumber(fa, setup.medium), vol, res.plan.dims, setup.green_mode,
                                    &conv.scratch(), workers);
  conv.clear();
  res.timings.green = seconds_since(t0);

  t0 = Clock::now();
  const auto sp = source_plane(setup);
  const double f1 = setup.source.f1, f2 = setup.source.f2;
  const AsaPropagator prop1(rasterize_velocity(setup.source, sp, Primary::f1, setup.raster),
                            wavenumber(f1, setup.medium), f1, setup.medium.rho0, vol.plane(), setup.propagator);
  const AsaPropagator prop2(rasterize_velocity(setup.source, sp, Primary::f2, setup.raster),
                            wavenumber(f2, setup.medium), f2, setup.medium.rho0, vol.plane(), setup.propagator);
  if (options.keep_fields) {
    res.p1.emplace(vol);
    res.p2.emplace(vol);
    res.q.emplace(vol);
  }
  const Complex coeff = virtual_source_coefficient(setup.medium, fa);
  const std::size_t np = vol.x.count * vol.y.count;
  struct Slot {
    AsaPropagator::Workspace ws1, ws2;
    std::vector<Complex> p1, p2, q;
  };
  std::vector<Slot> slots;
  for (std::size_t w = 0; w < std::min(workers, vol.z.count); ++w)
    slots.push_back({prop1.make_workspace(), prop2.make_workspace(), std::vector<Complex>(np),
                     std::vector<Complex>(np), std::vector<Complex>(np)});

  // Planes are solved in batches of one per worker, then consumed in z order.
  for (std::size_t k0 = 0; k0 < vol.z.count; k0 += slots.size()) {
    const std::size_t batch = std::min(slots.size(), vol.z.count - k0);
    parallel_for(batch, batch, [&](std::size_t b, std::size_t) {
      auto& s = slots[b];
      const double z = vol.z.node(k0 + b);
      prop1.plane(z, s.p1, s.ws1);
      prop2.plane(z, s.p2, s.ws2);
      for (std::size_t n = 0; n < np; ++n) s.q[n] = coeff * std::conj(s.p1[n]) * s.p2[n];
    });
    for (std::size_t b = 0; b < batch; ++b) {
      const auto& s = slots[b];
      const std::size_t k = k0 + b;
      conv.load_plane(k, s.q);
      if (options.plane_sink) options.plane_sink(k, s.p1, s.p2, s.q);
      if (options.keep_fields) {
        std::copy(s.p1.begin(), s.p1.end(), res.p1->plane(k).begin());
        std::copy(s.p2.begin(), s.p2.end(), res.p2->plane(k).begin());
        std::copy(s.q.begin(), s.q.end(), res.q->plane(k).begin());
      }
    }
  }
  slots.clear();
  res.timings.ultrasound = seconds_since(t0);

  t0 = Clock::now();
  res.diagnostics = conv.convolve(green, setup.medium.rho0, fa);
  res.audio = conv.extract();
  res.timings.convolution = seconds_since(t0);
  res.timings.total = seconds_since(t_start);
  return res;
}

}  // namespace pal
