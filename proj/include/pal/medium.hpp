#pragma once

#include <map>
#include <optional>

#include "pal/types.hpp"

namespace pal {

/// Ambient air and nonlinearity parameters shared by every solver stage.
struct MediumParams {
  double temperature_celsius = 20.0;
  double relative_humidity = 0.6;    // fraction in [0, 1]
  double ambient_pressure = 101325.0;  // Pa
  double rho0 = 1.204;                 // kg/m^3
  double c0 = 0.0;                     // m/s; filled from temperature by make_medium
  double beta = 1.2;
  /// Exact-frequency table [Hz] -> alpha [Np/m]; takes precedence over the ISO model.
  std::optional<std::map<double, double>> attenuation_override;
  /// When false, audio-frequency wavenumbers are lossless.
  bool audio_attenuation = false;

  void validate() const;
};

/// Default medium at the given temperature with c0 derived from `sound_speed`.
MediumParams make_medium(double temperature_celsius = 20.0, double relative_humidity = 0.6);

/// Complex wavenumber k = real_part + i*alpha.
struct Wavenumber {
  double real_part = 0.0;  // rad/m
  double alpha = 0.0;      // Np/m

  Complex value() const { return {real_part, alpha}; }
  double wavelength() const { return kTwoPi / real_part; }
};

double sound_speed(double temperature_celsius);

/// Pure-tone atmospheric absorption (ISO 9613-1) converted to Np/m.
double iso9613_absorption(double frequency, double temperature_celsius, double relative_humidity,
                          double ambient_pressure);

double attenuation_coeff(double frequency, const MediumParams& medium);

Wavenumber wavenumber(double frequency, const MediumParams& medium);

/// Audio wavenumber; lossless unless `medium.audio_attenuation` is set.
Wavenumber audio_wavenumber(double frequency, const MediumParams& medium);

}  // namespace pal
