// palsim: config-driven driver for the ultrasound and audio field solvers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "artifacts.hpp"
#include "pal/field_dump.hpp"
#include "pal/studies.hpp"

namespace palsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Options {
  std::string config_path;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<long long> seed;
  std::string input;  // extract only
};

pal::RunConfig load(const Options& opt) {
  auto cfg = pal::load_config(opt.config_path);
  if (opt.workers) {
    if (*opt.workers < 1) throw pal::ParameterError("--workers must be at least 1");
    cfg.setup.workers = *opt.workers;
  }
  if (opt.out) cfg.output.directory = *opt.out;
  return cfg;
}

bool wants(const pal::RunConfig& cfg, pal::FieldComponent c) {
  return std::find(cfg.output.dumps.begin(), cfg.output.dumps.end(), c) != cfg.output.dumps.end();
}

std::string dump_name(pal::FieldComponent c) { return std::string(pal::component_name(c)) + ".palf"; }

double component_frequency(const pal::RunConfig& cfg, pal::FieldComponent c) {
  const auto& s = cfg.setup.source;
  switch (c) {
    case pal::FieldComponent::primary_f1: return s.f1;
    case pal::FieldComponent::primary_f2: return s.f2;
    default: return s.audio_frequency();
  }
}

void write_dump(const pal::RunConfig& cfg, RunRecorder& rec, const pal::ComplexField3D& field,
                pal::FieldComponent c) {
  const auto file = rec.path(dump_name(c));
  pal::write_field_dump(file.string(), field, c, component_frequency(cfg, c), dump_metadata(cfg, c));
  rec.add_artifact(file);
}

bool contains_axis(const pal::GridSpec3D& g) { return g.x.contains(0.0) && g.y.contains(0.0); }

// Axial, angular, slice and probe outputs for one field; file names are prefixed by `tag`.
void postprocess(const pal::RunConfig& cfg, RunRecorder& rec, const pal::ComplexField3D& field, const std::string& tag) {
  const auto& o = cfg.output;
  if (o.axial && contains_axis(field.grid)) {
    const auto f = rec.path(tag + "_axial.csv");
    write_axial_csv(f, field);
    rec.add_artifact(f);
  }
  if (o.angular) {
    const auto& a = *o.angular;
    auto profile = pal::extract_angular(field, a.radius, a.plane, a.step_deg);
    const auto peak = std::max_element(profile.spl.begin(), profile.spl.end()) - profile.spl.begin();
    auto& r = rec.results()[tag + "_angular"];
    r["peak_angle_deg"] = profile.angles_deg[static_cast<std::size_t>(peak)];
    r["peak_spl_db"] = profile.spl[static_cast<std::size_t>(peak)];
    const auto normalized = pal::normalize_peak(profile);
    if (const auto lobe = pal::sidelobe_stats(normalized, a.exclusion_deg)) {
      r["side_lobe_angle_deg"] = lobe->angle_deg;
      r["side_lobe_level_db"] = lobe->level_db;
    } else {
      r["side_lobe_angle_deg"] = nullptr;
      r["side_lobe_level_db"] = nullptr;
    }
    const auto f = rec.path(tag + "_angular.csv");
    write_angular_csv(f, a.normalize ? normalized : profile);
    rec.add_artifact(f);
  }
  for (const auto& s : o.slices) {
    static const char* names[] = {"xy", "xz", "yz"};
    char name[96];
    std::snprintf(name, sizeof(name), "%s_slice_%s_%g.csv", tag.c_str(), names[static_cast<int>(s.plane)], s.at);
    const auto f = rec.path(name);
    write_slice_csv(f, pal::extract_slice(field, s.plane, s.at));
    rec.add_artifact(f);
  }
  if (!o.probes.empty()) {
    const auto f = rec.path(tag + "_probes.csv");
    write_probes_csv(f, field, o.probes);
    rec.add_artifact(f);
    auto& r = rec.results()[tag + "_probes"];
    for (const auto& p : o.probes) r.push_back({{"point", {p.x, p.y, p.z}}, {"spl_db", pal::spl(pal::interpolate(field, p))}});
  }
}

int cmd_ultrasound(const Options& opt) {
  const auto cfg = load(opt);
  RunRecorder rec(cfg, "ultrasound", cfg.output.directory, opt.seed);
  const auto& s = cfg.setup;
  const double need = 2.0 * sizeof(pal::Complex) * static_cast<double>(s.volume.size());
  if (need > s.memory_budget_bytes)
    throw pal::BudgetError("two primary fields need " + std::to_string(need / 1e9) + " GB, above the budget");
  const auto res = pal::run_ultrasound(s);
  rec.set_timing("ultrasound", res.seconds);
  for (auto [c, field, tag] : {std::tuple{pal::FieldComponent::primary_f1, &res.p1, "primary_f1"},
                               std::tuple{pal::FieldComponent::primary_f2, &res.p2, "primary_f2"}}) {
    if (wants(cfg, c)) write_dump(cfg, rec, *field, c);
    postprocess(cfg, rec, *field, tag);
  }
  rec.write_manifest();
  std::printf("ultrasound: %zu nodes per primary in %.2f s, outputs in %s\n", s.volume.size(), res.seconds,
              cfg.output.directory.c_str());
  return 0;
}

int cmd_audio(const Options& opt) {
  const auto cfg = load(opt);
  RunRecorder rec(cfg, "audio", cfg.output.directory, opt.seed);
  const auto& s = cfg.setup;
  const auto plan = pal::plan_memory(s, false);
  rec.set_plan(plan);

  // Primary and source-density volumes are streamed plane by plane instead of being kept.
  std::vector<std::pair<pal::FieldComponent, std::unique_ptr<pal::FieldDumpWriter>>> streams;
  for (auto c : {pal::FieldComponent::primary_f1, pal::FieldComponent::primary_f2, pal::FieldComponent::source_density})
    if (wants(cfg, c))
      streams.emplace_back(c, std::make_unique<pal::FieldDumpWriter>(
                                  rec.path(dump_name(c)).string(),
                                  pal::FieldDumpHeader{s.volume, component_frequency(cfg, c), c, dump_metadata(cfg, c)}));
  pal::AudioRunOptions run_opt;
  if (!streams.empty())
    run_opt.plane_sink = [&](std::size_t, std::span<const pal::Complex> p1, std::span<const pal::Complex> p2,
                             std::span<const pal::Complex> q) {
      for (auto& [c, w] : streams)
        w->write_plane(c == pal::FieldComponent::primary_f1 ? p1 : c == pal::FieldComponent::primary_f2 ? p2 : q);
    };
  const auto res = pal::run_audio(s, run_opt);
  for (auto& [c, w] : streams) {
    w->finish();
    rec.add_artifact(rec.path(dump_name(c)));
  }
  if (wants(cfg, pal::FieldComponent::audio)) write_dump(cfg, rec, res.audio, pal::FieldComponent::audio);
  postprocess(cfg, rec, res.audio, "audio");

  rec.set_timing("ultrasound", res.timings.ultrasound);
  rec.set_timing("green_spectrum", res.timings.green);
  rec.set_timing("convolution", res.timings.convolution);
  rec.set_timing("total", res.timings.total);
  rec.results()["linear_convolution"] = res.diagnostics.linear_convolution;
  rec.results()["energy_support"] = {res.diagnostics.energy_support[0], res.diagnostics.energy_support[1],
                                     res.diagnostics.energy_support[2]};
  rec.write_manifest();
  std::printf("audio: %zux%zux%zu nodes, transform %zux%zux%zu, %.2f s, outputs in %s\n", s.volume.x.count,
              s.volume.y.count, s.volume.z.count, plan.dims.nx, plan.dims.ny, plan.dims.nz, res.timings.total,
              cfg.output.directory.c_str());
  return 0;
}

struct CheckLine {
  std::string name;
  double value;
  double tolerance;
  bool passed;
};

int cmd_verify(const Options& opt) {
  const auto cfg = load(opt);
  RunRecorder rec(cfg, "verify", cfg.output.directory, opt.seed);
  const auto& s = cfg.setup;
  const auto& v = cfg.verify;
  std::vector<CheckLine> checks;
  auto report = [&](const std::string& name, double value, double tol) {
    checks.push_back({name, value, tol, value <= tol});
    std::printf("%-4s %-44s %.3e (limit %.3e)\n", value <= tol ? "PASS" : "FAIL", name.c_str(), value, tol);
    std::fflush(stdout);
  };
  char name[128];

  auto t0 = Clock::now();
  pal::AudioRunOptions run_opt;
  run_opt.keep_fields = true;
  const auto res = pal::run_audio(s, run_opt);
  rec.set_timing("kspace", seconds_since(t0));
  rec.set_plan(res.plan);

  const auto same_q = pal::DimAudioOracle::from_q(*res.q, s.source.audio_frequency(), s.medium);
  for (const auto& c : pal::compare_audio(res.audio, same_q, v.probes)) {
    std::snprintf(name, sizeof(name), "audio vs volume sum (%g,%g,%g) rel", c.point.x, c.point.y, c.point.z);
    report(name, c.relative_error, v.equivalence_tolerance);
  }

  t0 = Clock::now();
  const auto indep = pal::DimAudioOracle::from_rayleigh(s.source, pal::oracle_quadrature(s, v.oracle_source_mesh),
                                                        s.medium, s.workers);
  for (const auto& c : pal::compare_audio(res.audio, indep, v.probes)) {
    std::snprintf(name, sizeof(name), "audio vs direct integral (%g,%g,%g) dB", c.point.x, c.point.y, c.point.z);
    report(name, std::abs(c.delta_db), v.spl_tolerance_db);
  }
  rec.set_timing("direct_integral", seconds_since(t0));

  const auto& el = s.source.elements;
  if (el.size() == 1 && el[0].x == 0.0 && el[0].y == 0.0 && contains_axis(s.volume)) {
    auto fine = s;
    fine.source_mesh = v.ultrasound_axis_mesh;
    double worst = 0.0;
    for (const auto& row : pal::ultrasound_axis_check(fine, v.ultrasound_axis[0], v.ultrasound_axis[1]))
      worst = std::max(worst, std::abs(row.asa_db - row.closed_form_db));
    report("primary on axis vs closed form max dB", worst, v.spl_tolerance_db);
  }
  for (const auto& c : pal::ultrasound_rayleigh_check(s, v.ultrasound_probes, v.oracle_source_mesh)) {
    std::snprintf(name, sizeof(name), "primary vs Rayleigh sum (%g,%g,%g) dB", c.point.x, c.point.y, c.point.z);
    report(name, std::abs(c.delta_db), v.spl_tolerance_db);
  }

  const auto file = rec.path("verify.csv");
  {
    std::ofstream out(file);
    out.precision(10);
    out << "check,value,tolerance,passed\n";
    for (const auto& c : checks) out << '"' << c.name << "\"," << c.value << ',' << c.tolerance << ',' << c.passed << '\n';
  }
  rec.add_artifact(file);
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    rec.results()["checks"].push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
  }
  rec.results()["passed"] = ok;
  rec.write_manifest();
  std::printf("verify: %s\n", ok ? "all checks passed" : "FAILED");
  return ok ? 0 : 1;
}

int cmd_convergence(const Options& opt) {
  const auto cfg = load(opt);
  RunRecorder rec(cfg, "convergence", cfg.output.directory, opt.seed);
  const auto& spec = cfg.convergence;
  if (spec.meshes.empty()) throw pal::ConfigError(cfg.source_name + ": convergence needs a 'meshes' list");
  // Probes must lie inside the coarsest grid before any solve starts.
  const auto coarse = pal::sweep_volume(cfg.setup.volume, spec.axis, spec.meshes.front());
  auto inside = [](const pal::Axis& a, double x) { return x >= a.min - 1e-9 && x <= a.max() + 1e-9; };
  for (const auto& p : spec.probes)
    if (!inside(coarse.x, p.x) || !inside(coarse.y, p.y) || !inside(coarse.z, p.z))
      throw pal::RangeError("probe outside the coarsest grid");

  const auto t0 = Clock::now();
  const auto table = pal::convergence_sweep(cfg.setup, spec, [](const pal::ConvergenceRow& r) {
    std::printf("mesh %.5g m: transform %zux%zux%zu, %.1f s, SPL", r.mesh, r.dims.nx, r.dims.ny, r.dims.nz, r.seconds);
    for (double x : r.spl) std::printf(" %.4f", x);
    std::printf("\n");
    std::fflush(stdout);
  });
  rec.set_timing("total", seconds_since(t0));

  const auto file = rec.path(std::string("convergence_") + (spec.axis == pal::SweepAxis::xy ? "xy" : "z") + ".csv");
  {
    std::ofstream out(file);
    out.precision(10);
    out << "mesh_m,nx,ny,nz,seconds";
    for (std::size_t n = 0; n < table.probes.size(); ++n) out << ",spl_db_" << n;
    for (std::size_t n = 0; n < table.probes.size(); ++n) out << ",delta_db_" << n;
    out << '\n';
    for (const auto& r : table.rows) {
      out << r.mesh << ',' << r.dims.nx << ',' << r.dims.ny << ',' << r.dims.nz << ',' << r.seconds;
      for (double x : r.spl) out << ',' << x;
      for (double x : r.delta_db) out << ',' << x;
      out << '\n';
    }
  }
  rec.add_artifact(file);
  auto& res = rec.results();
  for (const auto& p : table.probes) res["probes"].push_back({p.x, p.y, p.z});
  for (const auto& r : table.rows) res["rows"].push_back({{"mesh", r.mesh}, {"spl_db", r.spl}, {"delta_db", r.delta_db}});
  rec.write_manifest();
  std::printf("convergence: %zu meshes, table in %s\n", table.rows.size(), file.string().c_str());
  return 0;
}

int cmd_bench(const Options& opt) {
  const auto cfg = load(opt);
  RunRecorder rec(cfg, "bench", cfg.output.directory, opt.seed);
  rec.set_plan(pal::plan_memory(cfg.setup));
  const auto r = pal::run_bench(cfg.setup, cfg.bench);
  const auto table = pal::format_bench_table(r);
  std::fputs(table.c_str(), stdout);
  const auto file = rec.path("bench.csv");
  {
    std::ofstream out(file);
    out.precision(10);
    out << "method,grid_nodes,full_grid_seconds,per_point_seconds\n";
    out << "kspace," << r.volume.size() << ',' << r.kspace_seconds << ',' << r.kspace_per_point << '\n';
    out << "direct_extrapolated," << r.volume.size() << ',' << r.dim_volume_seconds << ',' << r.dim.five_fold_seconds
        << '\n';
  }
  rec.add_artifact(file);
  rec.set_timing("kspace", r.kspace_seconds);
  rec.set_timing("direct_volume_sum_point", r.dim.volume_sum_seconds);
  rec.set_timing("direct_five_fold_point", r.dim.five_fold_seconds);
  auto& res = rec.results();
  res["grid"] = {r.volume.x.count, r.volume.y.count, r.volume.z.count};
  res["fft_dims"] = {r.dims.nx, r.dims.ny, r.dims.nz};
  res["speedup_volume_sum"] = r.speedup_volume_sum;
  res["speedup_five_fold"] = r.speedup_five_fold;
  res["five_fold_fraction_timed"] = r.dim.five_fold_fraction;
  rec.write_manifest();
  return 0;
}

int cmd_extract(const Options& opt) {
  pal::RunConfig cfg;
  if (!opt.config_path.empty()) cfg = load(opt);
  else if (opt.out) cfg.output.directory = *opt.out;
  cfg.source_name = opt.config_path;
  RunRecorder rec(cfg, "extract", cfg.output.directory, opt.seed);
  const auto dump = pal::read_field_dump(opt.input);
  rec.results()["input"] = opt.input;
  rec.results()["input_fnv1a64"] = pal::hex64(pal::file_checksum(opt.input));
  postprocess(cfg, rec, dump.field, pal::component_name(dump.header.component));
  rec.write_manifest();
  return 0;
}

}  // namespace

}  // namespace palsim

int main(int argc, char** argv) {
  using namespace palsim;
  CLI::App app{"Ultrasound and difference-frequency audio field solver"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--workers", opt.workers, "Worker threads (overrides the config)");
  app.add_option("--out", opt.out, "Output directory (overrides the config)");
  app.add_option("--seed", opt.seed, "Reserved; the solvers are deterministic");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"ultrasound", "Solve both primary fields on the volume", cmd_ultrasound},
      {"audio", "Full pipeline: primaries, source density and audio field", cmd_audio},
      {"verify", "Compare against the direct-integration and closed-form oracles", cmd_verify},
      {"convergence", "Mesh sweep with SPL differences against the finest mesh", cmd_convergence},
      {"bench", "Cost of the full-grid solve against direct point evaluation", cmd_bench},
      {"extract", "Postprocess a stored field dump", cmd_extract},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    auto* cfg_opt = sub->add_option("--config", opt.config_path, "Run configuration (YAML)");
    if (std::string(c.name) == "extract") {
      sub->add_option("--input", opt.input, "Field dump to postprocess")->required()->check(CLI::ExistingFile);
    } else {
      cfg_opt->required();
    }
    subs.emplace_back(sub, &c);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [sub, cmd] : subs)
      if (sub->parsed()) return cmd->run(opt);
  } catch (const pal::Error& e) {
    std::fprintf(stderr, "palsim: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "palsim: error: %s\n", e.what());
    return 2;
  }
  return 1;
}
