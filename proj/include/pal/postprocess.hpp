#pragma once

#include <optional>
#include <vector>

#include "pal/grid.hpp"

namespace pal {

struct AxialSample {
  double z;
  double spl;
};

/// SPL along the grid line nearest to x = y = 0.
std::vector<AxialSample> extract_axial(const ComplexField3D& field);

enum class ArcPlane { xz, yz };
enum class Normalization { absolute, peak };

struct AngularProfile {
  std::vector<double> angles_deg;  // zenith angle, strictly increasing
  std::vector<double> spl;         // dB
  double radius = 0.0;
  Normalization normalization = Normalization::absolute;
};

/// Trilinear interpolation of the complex field; throws RangeError outside the grid.
Complex interpolate(const ComplexField3D& field, const Point3& p);

/// SPL on an arc of the given radius about the origin in the chosen plane, theta measured from +z.
AngularProfile extract_angular(const ComplexField3D& field, double radius, ArcPlane plane, double step_deg = 0.5,
                               Normalization norm = Normalization::absolute, double theta_min_deg = -90.0,
                               double theta_max_deg = 90.0);

/// Shifts a profile so its maximum is 0 dB.
AngularProfile normalize_peak(AngularProfile profile);

struct SideLobe {
  double angle_deg;
  double level_db;
};

/// Half-width of the main lobe at -6 dB below the peak, taking the wider side.
double main_lobe_half_width(const AngularProfile& profile);

/// Highest interior local maximum outside main-peak +/- exclusion; a non-positive exclusion
/// selects 1.5x the -6 dB half-width on each side.
std::optional<SideLobe> sidelobe_stats(const AngularProfile& profile, double main_lobe_exclusion_deg = 0.0);

enum class SlicePlane { xy, xz, yz };

struct Slice {
  Axis u, v;  // in-plane axes (first varies fastest)
  double coordinate = 0.0;
  std::vector<double> spl;
};

/// SPL on the grid plane nearest to `coordinate` along the normal axis.
Slice extract_slice(const ComplexField3D& field, SlicePlane plane, double coordinate);

}  // namespace pal
