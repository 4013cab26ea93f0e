#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>

#include "pal/grid.hpp"

namespace pal {

enum class FieldComponent : std::uint32_t { unknown = 0, primary_f1 = 1, primary_f2 = 2, source_density = 3, audio = 4 };

const char* component_name(FieldComponent c);

/// Header of a PALF1 field dump. `metadata` is a JSON object serialized with sorted keys.
struct FieldDumpHeader {
  GridSpec3D grid;
  double frequency = 0.0;
  FieldComponent component = FieldComponent::unknown;
  std::string metadata = "{}";
};

struct FieldDump {
  FieldDumpHeader header;
  ComplexField3D field;
};

/// Layout (all little-endian):
///   "PALF1\0\0\0" | u32 0x01020304 | u32 version | u32 component | u32 rank (3)
///   | u64 nx ny nz | f64 x0 y0 z0 | f64 dx dy dz | f64 frequency | u64 n + n bytes metadata
///   | nx*ny*nz * (f64 re, f64 im), x fastest.
inline constexpr std::uint32_t kFieldDumpVersion = 1;

/// Writes planes in z order as they are produced; the file is complete after `finish`.
class FieldDumpWriter {
 public:
  FieldDumpWriter(const std::string& path, const FieldDumpHeader& header);
  void write_plane(std::span<const Complex> plane);
  void finish();
  ~FieldDumpWriter();

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t plane_size_;
  std::size_t planes_left_;
};

void write_field_dump(const std::string& path, const ComplexField3D& field, FieldComponent component,
                      double frequency, const std::string& metadata = "{}");
FieldDump read_field_dump(const std::string& path);

/// 64-bit FNV-1a over raw bytes and over a whole file.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t file_checksum(const std::string& path);
std::string hex64(std::uint64_t v);

}  // namespace pal
