#include "pal/field_dump.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <cstdio>
#include <vector>

namespace pal {

namespace {

constexpr char kMagic[8] = {'P', 'A', 'L', 'F', '1', '\0', '\0', '\0'};
constexpr std::uint32_t kEndianMarker = 0x01020304u;

template <class T>
void put(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw FormatError("truncated header");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

void write_header(std::ostream& os, const FieldDumpHeader& h) {
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kEndianMarker);
  put<std::uint32_t>(os, kFieldDumpVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(h.component));
  put<std::uint32_t>(os, 3);
  for (const Axis* a : {&h.grid.x, &h.grid.y, &h.grid.z}) put<std::uint64_t>(os, a->count);
  for (const Axis* a : {&h.grid.x, &h.grid.y, &h.grid.z}) put<double>(os, a->min);
  for (const Axis* a : {&h.grid.x, &h.grid.y, &h.grid.z}) put<double>(os, a->spacing);
  put<double>(os, h.frequency);
  put<std::uint64_t>(os, h.metadata.size());
  os.write(h.metadata.data(), static_cast<std::streamsize>(h.metadata.size()));
}

void write_samples(std::ostream& os, std::span<const Complex> data) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(Complex)));
  } else {
    for (const auto& c : data) {
      put<double>(os, c.real());
      put<double>(os, c.imag());
    }
  }
}

}  // namespace

const char* component_name(FieldComponent c) {
  switch (c) {
    case FieldComponent::primary_f1: return "primary_f1";
    case FieldComponent::primary_f2: return "primary_f2";
    case FieldComponent::source_density: return "source_density";
    case FieldComponent::audio: return "audio";
    default: return "unknown";
  }
}

FieldDumpWriter::FieldDumpWriter(const std::string& path, const FieldDumpHeader& header)
    : out_(path, std::ios::binary | std::ios::trunc),
      path_(path),
      plane_size_(header.grid.x.count * header.grid.y.count),
      planes_left_(header.grid.z.count) {
  header.grid.validate();
  if (!out_) throw FormatError("cannot open " + path + " for writing");
  write_header(out_, header);
}

void FieldDumpWriter::write_plane(std::span<const Complex> plane) {
  if (planes_left_ == 0) throw FormatError("all planes of " + path_ + " have been written");
  if (plane.size() != plane_size_) throw ShapeError("plane size does not match the dump header");
  write_samples(out_, plane);
  --planes_left_;
}

void FieldDumpWriter::finish() {
  if (!out_.is_open()) return;
  if (planes_left_ != 0) throw FormatError(path_ + " closed with " + std::to_string(planes_left_) + " planes missing");
  out_.close();
  if (out_.fail()) throw FormatError("write to " + path_ + " failed");
}

FieldDumpWriter::~FieldDumpWriter() {
  if (out_.is_open()) out_.close();
}

void write_field_dump(const std::string& path, const ComplexField3D& field, FieldComponent component,
                      double frequency, const std::string& metadata) {
  if (field.data.size() != field.grid.size()) throw ShapeError("field sample count does not match its grid");
  FieldDumpWriter w(path, {field.grid, frequency, component, metadata});
  for (std::size_t k = 0; k < field.grid.z.count; ++k) w.write_plane(field.plane(k));
  w.finish();
}

FieldDump read_field_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw FormatError(path + " is not a PALF1 field dump");
  if (get<std::uint32_t>(in) != kEndianMarker) throw FormatError("unexpected byte order marker");
  const auto version = get<std::uint32_t>(in);
  if (version != kFieldDumpVersion) throw FormatError("unsupported dump version " + std::to_string(version));
  FieldDump d;
  d.header.component = static_cast<FieldComponent>(get<std::uint32_t>(in));
  if (get<std::uint32_t>(in) != 3) throw FormatError("only rank-3 dumps are supported");
  auto& g = d.header.grid;
  for (Axis* a : {&g.x, &g.y, &g.z}) a->count = get<std::uint64_t>(in);
  for (Axis* a : {&g.x, &g.y, &g.z}) a->min = get<double>(in);
  for (Axis* a : {&g.x, &g.y, &g.z}) a->spacing = get<double>(in);
  d.header.frequency = get<double>(in);
  const auto meta_len = get<std::uint64_t>(in);
  if (meta_len > (1u << 26)) throw FormatError("metadata block too large");
  d.header.metadata.resize(meta_len);
  if (!in.read(d.header.metadata.data(), static_cast<std::streamsize>(meta_len))) throw FormatError("truncated metadata");
  try {
    g.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("invalid grid in header: ") + e.what());
  }

  const auto header_end = in.tellg();
  in.seekg(0, std::ios::end);
  const auto payload = static_cast<std::uint64_t>(in.tellg() - header_end);
  if (payload != static_cast<std::uint64_t>(g.size()) * 2 * sizeof(double))
    throw FormatError("payload size " + std::to_string(payload) + " does not match header grid");
  in.seekg(header_end);
  d.field = ComplexField3D(g);
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(d.field.data.data()), static_cast<std::streamsize>(payload));
  } else {
    for (auto& c : d.field.data) {
      const double re = get<double>(in);
      c = {re, get<double>(in)};
    }
  }
  if (!in) throw FormatError("truncated payload");
  return d;
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<unsigned char> buf(1 << 20);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  while (in) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    h = fnv1a64({buf.data(), static_cast<std::size_t>(in.gcount())}, h);
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char s[17];
  std::snprintf(s, sizeof(s), "%016llx", static_cast<unsigned long long>(v));
  return s;
}

}  // namespace pal
