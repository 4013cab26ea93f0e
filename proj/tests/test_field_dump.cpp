#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pal/field_dump.hpp"

using namespace pal;

namespace {

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::vector<unsigned char> bytes_of(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ComplexField3D sample_field() {
  const GridSpec3D g{{-0.03, 0.01, 7}, {0.02, 0.005, 3}, {0.0, 0.02, 4}};
  ComplexField3D f(g);
  for (std::size_t n = 0; n < f.data.size(); ++n) f.data[n] = {std::sin(0.37 * n) * 1e3, -1.0 / (n + 0.5)};
  return f;
}

}  // namespace

TEST_CASE("field dump round trip is bit identical") {
  const auto f = sample_field();
  const auto path = temp_path("pal_roundtrip.palf");
  write_field_dump(path, f, FieldComponent::audio, 1000.0, R"({"a":1})");
  const auto d = read_field_dump(path);
  CHECK(d.header.component == FieldComponent::audio);
  CHECK(d.header.frequency == 1000.0);
  CHECK(d.header.metadata == R"({"a":1})");
  CHECK(same_grid(d.header.grid, f.grid, 0.0));
  REQUIRE(d.field.data.size() == f.data.size());
  CHECK(std::memcmp(d.field.data.data(), f.data.data(), f.data.size() * sizeof(Complex)) == 0);

  const auto again = temp_path("pal_roundtrip2.palf");
  write_field_dump(again, d.field, d.header.component, d.header.frequency, d.header.metadata);
  CHECK(bytes_of(path) == bytes_of(again));
  CHECK(file_checksum(path) == file_checksum(again));
}

TEST_CASE("field dump layout") {
  const auto f = sample_field();
  const auto path = temp_path("pal_layout.palf");
  write_field_dump(path, f, FieldComponent::primary_f2, 40500.0, "{}");
  const auto b = bytes_of(path);
  CHECK(std::memcmp(b.data(), "PALF1\0\0\0", 8) == 0);
  std::uint32_t marker;
  std::memcpy(&marker, b.data() + 8, 4);
  CHECK(marker == 0x01020304u);
  CHECK(b[8] == 0x04);  // little-endian
  std::uint32_t component;
  std::memcpy(&component, b.data() + 16, 4);
  CHECK(component == 2u);
  std::uint64_t nx;
  std::memcpy(&nx, b.data() + 24, 8);
  CHECK(nx == 7u);
  const std::size_t header = 8 + 4 * 4 + 3 * 8 + 7 * 8 + 8 + 2;
  CHECK(b.size() == header + f.data.size() * 16);
  double re0;
  std::memcpy(&re0, b.data() + header, 8);
  CHECK(re0 == f.data[0].real());
}

TEST_CASE("streamed planes equal a whole-volume write") {
  const auto f = sample_field();
  const auto whole = temp_path("pal_whole.palf"), streamed = temp_path("pal_streamed.palf");
  write_field_dump(whole, f, FieldComponent::source_density, 1000.0);
  {
    FieldDumpWriter w(streamed, {f.grid, 1000.0, FieldComponent::source_density, "{}"});
    for (std::size_t k = 0; k < f.grid.z.count; ++k) w.write_plane(f.plane(k));
    CHECK_THROWS_AS(w.write_plane(f.plane(0)), FormatError);
    w.finish();
  }
  CHECK(bytes_of(whole) == bytes_of(streamed));
  FieldDumpWriter partial(temp_path("pal_partial.palf"), {f.grid, 1000.0, FieldComponent::audio, "{}"});
  partial.write_plane(f.plane(0));
  CHECK_THROWS_AS(partial.finish(), FormatError);
}

TEST_CASE("corrupt dumps are rejected") {
  const auto f = sample_field();
  const auto path = temp_path("pal_corrupt.palf");
  write_field_dump(path, f, FieldComponent::audio, 1000.0);
  auto b = bytes_of(path);
  const auto write = [&](const std::vector<unsigned char>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  };
  auto truncated = b;
  truncated.resize(b.size() - 16);
  write(truncated);
  CHECK_THROWS_AS(read_field_dump(path), FormatError);
  auto bad_magic = b;
  bad_magic[0] = 'X';
  write(bad_magic);
  CHECK_THROWS_AS(read_field_dump(path), FormatError);
  auto extra = b;
  extra.push_back(0);
  write(extra);
  CHECK_THROWS_AS(read_field_dump(path), FormatError);
}

TEST_CASE("FNV-1a checksum") {
  const unsigned char a[] = {'a'};
  CHECK(fnv1a64({a, 1}) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64({}) == 0xcbf29ce484222325ULL);
  CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
}
