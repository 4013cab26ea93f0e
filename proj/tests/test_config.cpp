#include <filesystem>
#include <string>

#include "doctest.h"
#include "pal/config.hpp"

using namespace pal;

namespace {

const char* kMinimal = R"(schema_version: 1
source:
  f1: 39000
  f2: 41000
  layout: {type: piston, radius: 0.02}
grid:
  source_mesh: 0.002
  volume: {x: [-0.1, 0.1], y: [-0.1, 0.1], z: [0, 0.2], spacing: [0.01, 0.01, 0.01]}
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.yaml");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    const std::string prefix = "config error: ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const auto c = parse_config(kMinimal, "t.yaml");
  const auto& s = c.setup;
  CHECK(s.source.elements.size() == 1);
  CHECK(s.source.elements[0].radius == 0.02);
  CHECK(s.source.audio_frequency() == doctest::Approx(2000.0));
  CHECK(s.volume.x.count == 21);
  CHECK(s.volume.z.count == 21);
  CHECK(s.padding_factor == std::array<double, 3>{2.0, 2.0, 2.0});
  CHECK(s.green_mode == GreenMode::sampled);
  CHECK(s.propagator == PropagatorMode::spatial);
  CHECK(c.hash == parse_config(kMinimal, "other.yaml").hash);
  CHECK(c.hash != parse_config(std::string(kMinimal) + "# edit\n", "t.yaml").hash);
}

TEST_CASE("padding factor accepts a scalar or a triple") {
  const auto triple = parse_config(std::string(kMinimal) + "  padding_factor: [2, 3, 1.5]\n", "t.yaml");
  CHECK(triple.setup.padding_factor == std::array<double, 3>{2.0, 3.0, 1.5});
  const auto scalar = parse_config(std::string(kMinimal) + "  padding_factor: 2.5\n", "t.yaml");
  CHECK(scalar.setup.padding_factor == std::array<double, 3>{2.5, 2.5, 2.5});
  CHECK(error_of(std::string(kMinimal) + "  padding_factor: 1.2\n").find("t.yaml:") == 0);
}

TEST_CASE("errors carry file, line and column") {
  CHECK(error_of("schema_version: 2\n").find("t.yaml:1:") == 0);
  const auto unknown = error_of(std::string(kMinimal) + "sourc: {}\n");
  CHECK(unknown.find("t.yaml:9:1:") == 0);
  CHECK(unknown.find("unknown key 'sourc'") != std::string::npos);

  std::string text = kMinimal;
  text.replace(text.find("f1: 39000"), 9, "f1: 42000");
  CHECK(error_of(text).find("t.yaml:") == 0);

  const auto empty = error_of(R"(schema_version: 1
source:
  layout: {type: elements, elements: []}
grid:
  volume: {x: [-0.1, 0.1], y: [-0.1, 0.1], z: [0, 0.2], spacing: [0.01, 0.01, 0.01]}
)");
  CHECK(empty.find("t.yaml:3:") == 0);
  CHECK(empty.find("no elements") != std::string::npos);

  CHECK_FALSE(error_of("schema_version: 1\nsource: [1, 2\n").empty());
  CHECK(error_of(std::string(kMinimal) + "solver: {green_mode: exact}\n").find("t.yaml:9:") == 0);
}

TEST_CASE("overlapping elements are rejected") {
  const auto msg = error_of(R"(schema_version: 1
source:
  layout:
    type: elements
    elements: [{x: 0, y: 0, radius: 0.01}, {x: 0.015, y: 0, radius: 0.01}]
grid:
  volume: {x: [-0.1, 0.1], y: [-0.1, 0.1], z: [0, 0.2], spacing: [0.01, 0.01, 0.01]}
)");
  CHECK(msg.find("t.yaml:") == 0);
}

TEST_CASE("steering sets per-element weights") {
  const auto c = parse_config(R"(schema_version: 1
source:
  layout: {type: uniform, rows: 2, cols: 4, pitch: 0.01, radius: 0.004}
  steering: {theta_deg: 20, phi_deg: 0}
grid:
  volume: {x: [-0.1, 0.1], y: [-0.1, 0.1], z: [0, 0.2], spacing: [0.01, 0.01, 0.01]}
)", "t.yaml");
  const auto& el = c.setup.source.elements;
  REQUIRE(el.size() == 8);
  CHECK(std::abs(el[0].weight_f1) == doctest::Approx(1.0));
  bool varied = false;
  for (const auto& e : el) varied |= std::abs(std::arg(e.weight_f1) - std::arg(el[0].weight_f1)) > 1e-3;
  CHECK(varied);
  CHECK(c.steer_theta_deg == 20.0);
}

TEST_CASE("shipped configs parse") {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(PAL_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
    ++count;
  }
  CHECK(count >= 6);
}
