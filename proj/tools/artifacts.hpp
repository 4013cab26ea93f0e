#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "pal/config.hpp"
#include "pal/postprocess.hpp"

namespace palsim {

namespace fs = std::filesystem;

/// Output directory plus the manifest describing one run.
class RunRecorder {
 public:
  RunRecorder(const pal::RunConfig& config, const std::string& subcommand, const fs::path& directory,
              std::optional<long long> seed);

  fs::path path(const std::string& name) const { return dir_ / name; }
  /// Records size and FNV-1a checksum of a file already written.
  void add_artifact(const fs::path& file);
  void set_timing(const std::string& name, double seconds) { manifest_["timings"][name] = seconds; }
  nlohmann::json& results() { return manifest_["results"]; }
  void set_plan(const pal::MemoryPlan& plan);
  /// Adds peak resident memory and writes manifest.json.
  void write_manifest();

 private:
  fs::path dir_;
  nlohmann::json manifest_;
};

std::string dump_metadata(const pal::RunConfig& config, pal::FieldComponent component);

void write_axial_csv(const fs::path& file, const pal::ComplexField3D& field);
void write_angular_csv(const fs::path& file, const pal::AngularProfile& profile);
void write_slice_csv(const fs::path& file, const pal::Slice& slice);
void write_probes_csv(const fs::path& file, const pal::ComplexField3D& field, const std::vector<pal::Point3>& probes);

}  // namespace palsim
