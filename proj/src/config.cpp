#include "pal/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <cmath>
#include <sstream>

namespace pal {

namespace {

class Reader {
 public:
  explicit Reader(std::string name) : name_(std::move(name)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const auto m = at.Mark();
    std::ostringstream os;
    os << name_ << ':' << (m.line >= 0 ? m.line + 1 : 0) << ':' << (m.column >= 0 ? m.column + 1 : 0) << ": " << msg;
    throw ConfigError(os.str());
  }

  void expect_map(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(n, what + " must be a mapping");
  }

  void allow_keys(const YAML::Node& n, const std::string& what, std::initializer_list<const char*> keys) const {
    expect_map(n, what);
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  template <class T>
  T scalar(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, what + " has an invalid value '" + n.Scalar() + "'");
    }
  }

  template <class T>
  T get(const YAML::Node& parent, const char* key, T fallback) const {
    const auto n = parent[key];
    if (!n) return fallback;
    return scalar<T>(n, key);
  }

  template <class T>
  T require(const YAML::Node& parent, const char* key, const std::string& what) const {
    const auto n = parent[key];
    if (!n) fail(parent, what + " needs '" + key + "'");
    return scalar<T>(n, key);
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& what, std::size_t count = 0) const {
    if (!n.IsSequence()) fail(n, what + " must be a list");
    if (count && n.size() != count) fail(n, what + " needs " + std::to_string(count) + " entries");
    std::vector<double> out;
    for (const auto& v : n) out.push_back(scalar<double>(v, what));
    return out;
  }

  Point3 point(const YAML::Node& n, const std::string& what) const {
    const auto v = numbers(n, what, 3);
    return {v[0], v[1], v[2]};
  }

  std::vector<Point3> points(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail(n, what + " must be a list of [x, y, z]");
    std::vector<Point3> out;
    for (const auto& p : n) out.push_back(point(p, what));
    return out;
  }

  template <class E>
  E choice(const YAML::Node& n, const std::string& what, std::initializer_list<std::pair<const char*, E>> opts) const {
    const auto s = scalar<std::string>(n, what);
    std::string names;
    for (const auto& [k, v] : opts) {
      if (s == k) return v;
      names += names.empty() ? k : std::string(", ") + k;
    }
    fail(n, what + " must be one of: " + names);
  }

  template <class Fn>
  auto guarded(const YAML::Node& at, Fn&& fn) const {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(at, e.what());
    }
  }

 private:
  std::string name_;
};

void read_medium(const Reader& r, const YAML::Node& n, MediumParams& m) {
  r.allow_keys(n, "medium",
               {"temperature_celsius", "relative_humidity", "ambient_pressure", "rho0", "c0", "beta",
                "attenuation_override", "audio_attenuation"});
  const double t = r.get<double>(n, "temperature_celsius", 20.0);
  const double rh = r.get<double>(n, "relative_humidity", 0.6);
  m = r.guarded(n, [&] { return make_medium(t, rh); });
  m.ambient_pressure = r.get<double>(n, "ambient_pressure", m.ambient_pressure);
  m.rho0 = r.get<double>(n, "rho0", m.rho0);
  m.c0 = r.get<double>(n, "c0", m.c0);
  m.beta = r.get<double>(n, "beta", m.beta);
  m.audio_attenuation = r.get<bool>(n, "audio_attenuation", false);
  if (const auto ov = n["attenuation_override"]) {
    r.expect_map(ov, "attenuation_override");
    std::map<double, double> table;
    for (const auto& kv : ov) table[r.scalar<double>(kv.first, "override frequency")] = r.scalar<double>(kv.second, "override alpha");
    m.attenuation_override = table;
  }
  r.guarded(n, [&] { m.validate(); });
}

void read_source(const Reader& r, const YAML::Node& n, RunConfig& cfg) {
  r.allow_keys(n, "source", {"v0", "f1", "f2", "layout", "steering"});
  auto& s = cfg.setup.source;
  s.v0 = r.get<double>(n, "v0", s.v0);
  s.f1 = r.get<double>(n, "f1", s.f1);
  s.f2 = r.get<double>(n, "f2", s.f2);
  const auto lay = n["layout"];
  if (!lay) r.fail(n, "source needs 'layout'");
  r.expect_map(lay, "layout");
  const auto type = r.choice<int>(lay["type"] ? lay["type"] : lay, "layout type",
                                  {{"piston", 0}, {"uniform", 1}, {"closely_packed", 2}, {"elements", 3}});
  s.elements = r.guarded(lay, [&]() -> std::vector<Element> {
    switch (type) {
      case 0: {
        r.allow_keys(lay, "piston layout", {"type", "radius", "x", "y"});
        return {Element{r.get<double>(lay, "x", 0.0), r.get<double>(lay, "y", 0.0),
                        r.require<double>(lay, "radius", "piston layout")}};
      }
      case 1:
        r.allow_keys(lay, "uniform layout", {"type", "rows", "cols", "pitch", "radius"});
        return layout_uniform(r.require<int>(lay, "rows", "uniform layout"), r.require<int>(lay, "cols", "uniform layout"),
                              r.require<double>(lay, "pitch", "uniform layout"),
                              r.require<double>(lay, "radius", "uniform layout"));
      case 2:
        r.allow_keys(lay, "closely packed layout", {"type", "rows", "cols", "radius"});
        return layout_closely_packed(r.require<int>(lay, "rows", "closely packed layout"),
                                     r.require<int>(lay, "cols", "closely packed layout"),
                                     r.require<double>(lay, "radius", "closely packed layout"));
      default: {
        r.allow_keys(lay, "element list", {"type", "elements"});
        const auto list = lay["elements"];
        if (!list || !list.IsSequence()) r.fail(lay, "element layout needs an 'elements' list");
        std::vector<Element> out;
        for (const auto& e : list) {
          r.allow_keys(e, "element", {"x", "y", "radius"});
          out.push_back({r.require<double>(e, "x", "element"), r.require<double>(e, "y", "element"),
                         r.require<double>(e, "radius", "element")});
        }
        return out;
      }
    }
  });
  if (s.elements.empty()) r.fail(lay, "the source has no elements");
  if (const auto st = n["steering"]) {
    r.allow_keys(st, "steering", {"theta_deg", "phi_deg"});
    cfg.steer_theta_deg = r.get<double>(st, "theta_deg", 0.0);
    cfg.steer_phi_deg = r.get<double>(st, "phi_deg", 0.0);
  }
  r.guarded(n, [&] { s.validate(); });
}

Axis read_axis(const Reader& r, const YAML::Node& vol, const char* key, double spacing) {
  const auto n = vol[key];
  if (!n) r.fail(vol, std::string("volume needs '") + key + "'");
  const auto e = r.numbers(n, key, 2);
  return r.guarded(n, [&] { return Axis::from_extents(e[0], e[1], spacing); });
}

void read_grid(const Reader& r, const YAML::Node& n, SimulationSetup& s) {
  r.allow_keys(n, "grid", {"source_mesh", "rasterization", "volume", "padding_factor", "fft_dims"});
  s.source_mesh = r.get<double>(n, "source_mesh", s.source_mesh);
  if (const auto ra = n["rasterization"])
    s.raster = r.choice<Rasterization>(ra, "rasterization", {{"center", Rasterization::center}, {"area", Rasterization::area}});
  const auto vol = n["volume"];
  if (!vol) r.fail(n, "grid needs 'volume'");
  r.allow_keys(vol, "volume", {"x", "y", "z", "spacing"});
  if (!vol["spacing"]) r.fail(vol, "volume needs 'spacing'");
  const auto h = r.numbers(vol["spacing"], "spacing", 3);
  s.volume = {read_axis(r, vol, "x", h[0]), read_axis(r, vol, "y", h[1]), read_axis(r, vol, "z", h[2])};
  if (const auto pf = n["padding_factor"]) {
    if (pf.IsSequence()) {
      const auto v = r.numbers(pf, "padding_factor", 3);
      s.padding_factor = {v[0], v[1], v[2]};
    } else {
      const double f = r.scalar<double>(pf, "padding_factor");
      s.padding_factor = {f, f, f};
    }
    for (double f : s.padding_factor)
      if (!(f >= 1.5)) r.fail(pf, "padding_factor must be at least 1.5");
  }
  if (const auto fd = n["fft_dims"]) {
    const auto v = r.numbers(fd, "fft_dims", 3);
    for (double d : v)
      if (!(d >= 2.0) || d != std::floor(d)) r.fail(fd, "fft_dims must be integers >= 2");
    s.fft_dims = FftDims{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]), static_cast<std::size_t>(v[2])};
  }
}

void read_solver(const Reader& r, const YAML::Node& n, SimulationSetup& s) {
  r.allow_keys(n, "solver", {"green_mode", "propagator", "memory_budget_gb", "workers"});
  if (const auto g = n["green_mode"])
    s.green_mode = r.choice<GreenMode>(g, "green_mode", {{"sampled", GreenMode::sampled}, {"analytic", GreenMode::analytic}});
  if (const auto p = n["propagator"])
    s.propagator = r.choice<PropagatorMode>(p, "propagator",
                                            {{"spatial", PropagatorMode::spatial}, {"spectral", PropagatorMode::spectral}});
  s.memory_budget_bytes = 1e9 * r.get<double>(n, "memory_budget_gb", s.memory_budget_bytes / 1e9);
  const int w = r.get<int>(n, "workers", static_cast<int>(s.workers));
  if (w < 1) r.fail(n["workers"], "workers must be at least 1");
  s.workers = static_cast<std::size_t>(w);
}

void read_output(const Reader& r, const YAML::Node& n, OutputSpec& o) {
  r.allow_keys(n, "output", {"directory", "dumps", "axial", "angular", "slices", "probes"});
  o.directory = r.get<std::string>(n, "directory", o.directory);
  if (const auto d = n["dumps"]) {
    if (!d.IsSequence()) r.fail(d, "dumps must be a list");
    for (const auto& c : d)
      o.dumps.push_back(r.choice<FieldComponent>(c, "dump component",
                                                 {{"primary_f1", FieldComponent::primary_f1},
                                                  {"primary_f2", FieldComponent::primary_f2},
                                                  {"source_density", FieldComponent::source_density},
                                                  {"audio", FieldComponent::audio}}));
  }
  o.axial = r.get<bool>(n, "axial", o.axial);
  if (const auto a = n["angular"]) {
    r.allow_keys(a, "angular", {"radius", "plane", "step_deg", "normalize", "exclusion_deg"});
    AngularOutput ao;
    ao.radius = r.get<double>(a, "radius", ao.radius);
    if (a["plane"]) ao.plane = r.choice<ArcPlane>(a["plane"], "plane", {{"xz", ArcPlane::xz}, {"yz", ArcPlane::yz}});
    ao.step_deg = r.get<double>(a, "step_deg", ao.step_deg);
    ao.normalize = r.get<bool>(a, "normalize", ao.normalize);
    ao.exclusion_deg = r.get<double>(a, "exclusion_deg", ao.exclusion_deg);
    o.angular = ao;
  }
  if (const auto sl = n["slices"]) {
    if (!sl.IsSequence()) r.fail(sl, "slices must be a list");
    for (const auto& e : sl) {
      r.allow_keys(e, "slice", {"plane", "at"});
      SliceOutput so;
      if (e["plane"])
        so.plane = r.choice<SlicePlane>(e["plane"], "plane",
                                        {{"xy", SlicePlane::xy}, {"xz", SlicePlane::xz}, {"yz", SlicePlane::yz}});
      so.at = r.get<double>(e, "at", 0.0);
      o.slices.push_back(so);
    }
  }
  if (const auto p = n["probes"]) o.probes = r.points(p, "probes");
}

void read_verify(const Reader& r, const YAML::Node& n, VerifySpec& v) {
  r.allow_keys(n, "verify",
               {"oracle_source_mesh", "probes", "equivalence_tolerance", "spl_tolerance_db", "ultrasound_axis",
                "ultrasound_axis_mesh", "ultrasound_probes"});
  v.oracle_source_mesh = r.get<double>(n, "oracle_source_mesh", v.oracle_source_mesh);
  if (const auto p = n["probes"]) v.probes = r.points(p, "probes");
  v.equivalence_tolerance = r.get<double>(n, "equivalence_tolerance", v.equivalence_tolerance);
  v.spl_tolerance_db = r.get<double>(n, "spl_tolerance_db", v.spl_tolerance_db);
  if (const auto a = n["ultrasound_axis"]) v.ultrasound_axis = r.numbers(a, "ultrasound_axis", 2);
  v.ultrasound_axis_mesh = r.get<double>(n, "ultrasound_axis_mesh", v.ultrasound_axis_mesh);
  if (const auto p = n["ultrasound_probes"]) v.ultrasound_probes = r.points(p, "ultrasound_probes");
}

void read_convergence(const Reader& r, const YAML::Node& n, ConvergenceSpec& c) {
  r.allow_keys(n, "convergence", {"axis", "meshes", "source_mesh", "probes", "threshold_db", "threshold_mesh"});
  if (n["axis"]) c.axis = r.choice<SweepAxis>(n["axis"], "axis", {{"xy", SweepAxis::xy}, {"z", SweepAxis::z}});
  if (const auto m = n["meshes"]) {
    c.meshes = r.numbers(m, "meshes");
    if (c.meshes.empty()) r.fail(m, "meshes must not be empty");
    for (std::size_t i = 0; i < c.meshes.size(); ++i)
      if (!(c.meshes[i] > 0.0) || (i && !(c.meshes[i] < c.meshes[i - 1]))) r.fail(m, "meshes must be positive and decreasing");
  }
  c.source_mesh = r.get<double>(n, "source_mesh", c.source_mesh);
  if (const auto p = n["probes"]) c.probes = r.points(p, "probes");
  c.threshold_db = r.get<double>(n, "threshold_db", c.threshold_db);
  c.threshold_mesh = r.get<double>(n, "threshold_mesh", c.threshold_mesh);
}

void read_bench(const Reader& r, const YAML::Node& n, BenchSpec& b) {
  r.allow_keys(n, "bench", {"point", "five_fold_voxels"});
  if (const auto p = n["point"]) b.point = r.point(p, "point");
  const int v = r.get<int>(n, "five_fold_voxels", static_cast<int>(b.five_fold_voxels));
  if (v < 1) r.fail(n["five_fold_voxels"], "five_fold_voxels must be positive");
  b.five_fold_voxels = static_cast<std::size_t>(v);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& name) {
  const Reader r(name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << name << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  if (!root || !root.IsMap()) throw ConfigError(name + ":1:1: the config must be a mapping");
  r.allow_keys(root, "config",
               {"schema_version", "medium", "source", "grid", "solver", "output", "verify", "convergence", "bench"});

  RunConfig cfg;
  cfg.source_name = name;
  cfg.text = text;
  cfg.hash = fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()});
  if (!root["schema_version"]) r.fail(root, "missing 'schema_version'");
  cfg.schema_version = r.scalar<int>(root["schema_version"], "schema_version");
  if (cfg.schema_version != kConfigSchemaVersion)
    r.fail(root["schema_version"], "unsupported schema_version " + std::to_string(cfg.schema_version));

  if (const auto m = root["medium"]) read_medium(r, m, cfg.setup.medium);
  if (!root["source"]) r.fail(root, "missing 'source'");
  read_source(r, root["source"], cfg);
  if (!root["grid"]) r.fail(root, "missing 'grid'");
  read_grid(r, root["grid"], cfg.setup);
  if (const auto s = root["solver"]) read_solver(r, s, cfg.setup);
  if (const auto o = root["output"]) read_output(r, o, cfg.output);
  if (const auto v = root["verify"]) read_verify(r, v, cfg.verify);
  if (const auto c = root["convergence"]) read_convergence(r, c, cfg.convergence);
  if (const auto b = root["bench"]) read_bench(r, b, cfg.bench);

  if (cfg.steer_theta_deg != 0.0 || cfg.steer_phi_deg != 0.0)
    r.guarded(root["source"], [&] {
      apply_steering(cfg.setup.source, cfg.setup.medium, cfg.steer_theta_deg * kPi / 180.0,
                     cfg.steer_phi_deg * kPi / 180.0);
    });
  r.guarded(root["grid"], [&] { cfg.setup.validate(); });
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ":0:0: cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace pal
