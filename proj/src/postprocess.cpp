#include "pal/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pal/kspace.hpp"

namespace pal {

namespace {

std::size_t nearest_index(const Axis& a, double x, const char* name) {
  if (!a.contains(x, 0.5 * a.spacing + 1e-12))
    throw RangeError(std::string(name) + " = " + std::to_string(x) + " is outside the grid");
  const long i = a.nearest(x);
  return static_cast<std::size_t>(std::clamp(i, 0L, static_cast<long>(a.count) - 1));
}

// Cell index and fraction for linear interpolation along one axis.
std::pair<std::size_t, double> locate(const Axis& a, double x, const char* name) {
  const double tol = 1e-9 * a.spacing;
  if (x < a.min - tol || x > a.max() + tol)
    throw RangeError(std::string(name) + " = " + std::to_string(x) + " is outside the grid");
  const double t = (x - a.min) / a.spacing;
  const double r = std::round(t);
  if (std::abs(t - r) < 1e-9) {
    const auto n = static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(a.count - 1)));
    if (n + 1 < a.count) return {n, 0.0};
    return {n - 1, 1.0};
  }
  auto i = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(a.count - 2)));
  return {i, std::clamp(t - static_cast<double>(i), 0.0, 1.0)};
}

}  // namespace

std::vector<AxialSample> extract_axial(const ComplexField3D& field) {
  const auto& g = field.grid;
  const std::size_t i = nearest_index(g.x, 0.0, "x");
  const std::size_t j = nearest_index(g.y, 0.0, "y");
  std::vector<AxialSample> out;
  out.reserve(g.z.count);
  for (std::size_t k = 0; k < g.z.count; ++k) out.push_back({g.z.node(k), spl(field.at(i, j, k))});
  return out;
}

Complex interpolate(const ComplexField3D& field, const Point3& p) {
  const auto& g = field.grid;
  const auto [i, fx] = locate(g.x, p.x, "x");
  const auto [j, fy] = locate(g.y, p.y, "y");
  const auto [k, fz] = locate(g.z, p.z, "z");
  Complex acc{};
  for (int c = 0; c < 2; ++c) {
    const double wz = c ? fz : 1.0 - fz;
    if (wz == 0.0) continue;
    for (int b = 0; b < 2; ++b) {
      const double wy = b ? fy : 1.0 - fy;
      if (wy == 0.0) continue;
      for (int a = 0; a < 2; ++a) {
        const double wx = a ? fx : 1.0 - fx;
        if (wx == 0.0) continue;
        acc += field.at(i + a, j + b, k + c) * (wx * wy * wz);
      }
    }
  }
  return acc;
}

AngularProfile extract_angular(const ComplexField3D& field, double radius, ArcPlane plane, double step_deg,
                               Normalization norm, double theta_min_deg, double theta_max_deg) {
  if (!(radius > 0.0)) throw ParameterError("arc radius must be positive");
  if (!(step_deg > 0.0)) throw ParameterError("angular step must be positive");
  if (!(theta_min_deg < theta_max_deg) || theta_min_deg < -90.0 || theta_max_deg > 90.0)
    throw ParameterError("angle range must be increasing within [-90, 90] degrees");
  AngularProfile prof;
  prof.radius = radius;
  const auto n = static_cast<std::size_t>(std::floor((theta_max_deg - theta_min_deg) / step_deg + 1e-9)) + 1;
  for (std::size_t m = 0; m < n; ++m) {
    const double deg = theta_min_deg + step_deg * static_cast<double>(m);
    const double th = deg * kPi / 180.0;
    const double lateral = radius * std::sin(th);
    const double z = radius * std::cos(th);
    const Point3 p = plane == ArcPlane::xz ? Point3{lateral, 0.0, z} : Point3{0.0, lateral, z};
    prof.angles_deg.push_back(deg);
    prof.spl.push_back(spl(interpolate(field, p)));
  }
  return norm == Normalization::peak ? normalize_peak(std::move(prof)) : prof;
}

AngularProfile normalize_peak(AngularProfile profile) {
  if (profile.spl.empty()) return profile;
  const double peak = *std::max_element(profile.spl.begin(), profile.spl.end());
  if (std::isfinite(peak))
    for (auto& s : profile.spl) s -= peak;
  profile.normalization = Normalization::peak;
  return profile;
}

double main_lobe_half_width(const AngularProfile& p) {
  if (p.spl.empty()) throw ParameterError("empty angular profile");
  const auto ip = static_cast<std::size_t>(std::max_element(p.spl.begin(), p.spl.end()) - p.spl.begin());
  const double cut = p.spl[ip] - 6.0;
  std::size_t lo = ip, hi = ip;
  while (lo > 0 && p.spl[lo] >= cut) --lo;
  while (hi + 1 < p.spl.size() && p.spl[hi] >= cut) ++hi;
  return std::max(p.angles_deg[ip] - p.angles_deg[lo], p.angles_deg[hi] - p.angles_deg[ip]);
}

std::optional<SideLobe> sidelobe_stats(const AngularProfile& p, double exclusion_deg) {
  if (p.normalization != Normalization::peak) throw ParameterError("side-lobe statistics need a peak-normalized profile");
  if (p.spl.size() < 3) return std::nullopt;
  const auto ip = static_cast<std::size_t>(std::max_element(p.spl.begin(), p.spl.end()) - p.spl.begin());
  const double peak_angle = p.angles_deg[ip];
  const double excl = exclusion_deg > 0.0 ? exclusion_deg : 1.5 * main_lobe_half_width(p);
  std::optional<SideLobe> best;
  for (std::size_t m = 1; m + 1 < p.spl.size(); ++m) {
    if (std::abs(p.angles_deg[m] - peak_angle) <= excl) continue;
    if (p.spl[m] > p.spl[m - 1] && p.spl[m] >= p.spl[m + 1] && (!best || p.spl[m] > best->level_db))
      best = SideLobe{p.angles_deg[m], p.spl[m]};
  }
  return best;
}

Slice extract_slice(const ComplexField3D& field, SlicePlane plane, double coordinate) {
  const auto& g = field.grid;
  Slice s;
  s.coordinate = coordinate;
  switch (plane) {
    case SlicePlane::xy: {
      const std::size_t k = nearest_index(g.z, coordinate, "z");
      s.u = g.x;
      s.v = g.y;
      for (std::size_t j = 0; j < g.y.count; ++j)
        for (std::size_t i = 0; i < g.x.count; ++i) s.spl.push_back(spl(field.at(i, j, k)));
      break;
    }
    case SlicePlane::xz: {
      const std::size_t j = nearest_index(g.y, coordinate, "y");
      s.u = g.x;
      s.v = g.z;
      for (std::size_t k = 0; k < g.z.count; ++k)
        for (std::size_t i = 0; i < g.x.count; ++i) s.spl.push_back(spl(field.at(i, j, k)));
      break;
    }
    case SlicePlane::yz: {
      const std::size_t i = nearest_index(g.x, coordinate, "x");
      s.u = g.y;
      s.v = g.z;
      for (std::size_t k = 0; k < g.z.count; ++k)
        for (std::size_t j = 0; j < g.y.count; ++j) s.spl.push_back(spl(field.at(i, j, k)));
      break;
    }
  }
  return s;
}

}  // namespace pal
