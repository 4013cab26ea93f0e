#include "artifacts.hpp"

#include <sys/resource.h>

#include <fstream>

#include "pal/fft.hpp"
#include "pal/field_dump.hpp"
#include "pal/kspace.hpp"

namespace palsim {

namespace {

constexpr const char* kVersion = "1.0.0";

std::ofstream open_csv(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw pal::Error("io", "cannot write " + file.string());
  out.precision(10);
  return out;
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw pal::Error("io", "cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".palsim-write-test";
  {
    std::ofstream out(probe);
    if (!out) throw pal::Error("io", "output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace

RunRecorder::RunRecorder(const pal::RunConfig& config, const std::string& subcommand, const fs::path& directory,
                         std::optional<long long> seed)
    : dir_(directory) {
  ensure_writable(dir_);
  manifest_["subcommand"] = subcommand;
  manifest_["config"] = {{"path", config.source_name},
                         {"hash", pal::hex64(config.hash)},
                         {"schema_version", config.schema_version}};
  manifest_["versions"] = {{"palsim", kVersion},
                           {"fftw", pal::fft_library_version()},
                           {"compiler", __VERSION__},
                           {"field_dump", pal::kFieldDumpVersion}};
  manifest_["workers"] = config.setup.workers;
  manifest_["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  manifest_["timings"] = nlohmann::json::object();
  manifest_["results"] = nlohmann::json::object();
  manifest_["artifacts"] = nlohmann::json::array();
}

void RunRecorder::add_artifact(const fs::path& file) {
  manifest_["artifacts"].push_back({{"path", file.filename().string()},
                                    {"bytes", fs::file_size(file)},
                                    {"fnv1a64", pal::hex64(pal::file_checksum(file.string()))}});
}

void RunRecorder::set_plan(const pal::MemoryPlan& plan) {
  manifest_["memory_plan"] = {{"fft_dims", {plan.dims.nx, plan.dims.ny, plan.dims.nz}},
                              {"work_bytes", plan.work_bytes},
                              {"green_bytes", plan.green_bytes},
                              {"output_bytes", plan.output_bytes},
                              {"ultrasound_bytes", plan.ultrasound_bytes},
                              {"plane_bytes", plan.plane_bytes},
                              {"total_bytes", plan.total()}};
}

void RunRecorder::write_manifest() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  manifest_["peak_memory_bytes"] = static_cast<long long>(usage.ru_maxrss) * 1024;
  std::ofstream out(path("manifest.json"));
  if (!out) throw pal::Error("io", "cannot write manifest");
  out << manifest_.dump(2) << '\n';
}

std::string dump_metadata(const pal::RunConfig& config, pal::FieldComponent component) {
  const nlohmann::json meta = {{"generator", std::string("palsim ") + kVersion},
                               {"config_hash", pal::hex64(config.hash)},
                               {"component", pal::component_name(component)}};
  return meta.dump();
}

void write_axial_csv(const fs::path& file, const pal::ComplexField3D& field) {
  auto out = open_csv(file);
  out << "z_m,spl_db\n";
  for (const auto& s : pal::extract_axial(field)) out << s.z << ',' << s.spl << '\n';
}

void write_angular_csv(const fs::path& file, const pal::AngularProfile& profile) {
  auto out = open_csv(file);
  out << "theta_deg,spl_db\n";
  for (std::size_t n = 0; n < profile.angles_deg.size(); ++n)
    out << profile.angles_deg[n] << ',' << profile.spl[n] << '\n';
}

void write_slice_csv(const fs::path& file, const pal::Slice& slice) {
  auto out = open_csv(file);
  out << "u_m,v_m,spl_db\n";
  for (std::size_t j = 0; j < slice.v.count; ++j)
    for (std::size_t i = 0; i < slice.u.count; ++i)
      out << slice.u.node(i) << ',' << slice.v.node(j) << ',' << slice.spl[i + slice.u.count * j] << '\n';
}

void write_probes_csv(const fs::path& file, const pal::ComplexField3D& field, const std::vector<pal::Point3>& probes) {
  auto out = open_csv(file);
  out << "x_m,y_m,z_m,re_pa,im_pa,spl_db\n";
  for (const auto& p : probes) {
    const auto v = pal::interpolate(field, p);
    out << p.x << ',' << p.y << ',' << p.z << ',' << v.real() << ',' << v.imag() << ',' << pal::spl(v) << '\n';
  }
}

}  // namespace palsim
