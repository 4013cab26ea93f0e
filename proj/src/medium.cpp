#include "pal/medium.hpp"

#include <cmath>
#include <string>

namespace pal {

void MediumParams::validate() const {
  if (!(c0 > 0.0)) throw ParameterError("sound speed must be positive");
  if (!(rho0 > 0.0)) throw ParameterError("density must be positive");
  if (!(beta > 0.0)) throw ParameterError("nonlinearity coefficient must be positive");
  if (!(relative_humidity >= 0.0 && relative_humidity <= 1.0))
    throw ParameterError("relative humidity must lie in [0, 1]");
  if (!(ambient_pressure > 0.0)) throw ParameterError("ambient pressure must be positive");
  if (attenuation_override) {
    for (const auto& [f, a] : *attenuation_override) {
      if (!(a >= 0.0)) throw ParameterError("attenuation override at " + std::to_string(f) + " Hz is negative");
    }
  }
}

MediumParams make_medium(double temperature_celsius, double relative_humidity) {
  MediumParams m;
  m.temperature_celsius = temperature_celsius;
  m.relative_humidity = relative_humidity;
  m.c0 = sound_speed(temperature_celsius);
  return m;
}

double sound_speed(double temperature_celsius) {
  if (!(temperature_celsius >= -30.0 && temperature_celsius <= 50.0))
    throw ParameterError("temperature " + std::to_string(temperature_celsius) + " C outside [-30, 50]");
  return 331.3 * std::sqrt(1.0 + temperature_celsius / 273.15);
}

double iso9613_absorption(double frequency, double temperature_celsius, double relative_humidity,
                          double ambient_pressure) {
  if (!(frequency > 0.0)) throw ParameterError("frequency must be positive");
  constexpr double kRefPressure = 101.325;  // kPa
  constexpr double kRefTemp = 293.15;
  constexpr double kTriplePoint = 273.16;

  const double t = temperature_celsius + 273.15;
  const double pa = ambient_pressure / 1000.0 / kRefPressure;
  const double c_sat = -6.8346 * std::pow(kTriplePoint / t, 1.261) + 4.6151;
  const double h = relative_humidity * 100.0 * std::pow(10.0, c_sat) / pa;  // molar concentration, %
  const double tr = t / kRefTemp;

  const double fr_o = pa * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
  const double fr_n = pa * std::pow(tr, -0.5) * (9.0 + 280.0 * h * std::exp(-4.170 * (std::pow(tr, -1.0 / 3.0) - 1.0)));

  const double f2 = frequency * frequency;
  // Bracketed term of the ISO expression; alpha[dB/m] = 8.686 f^2 * term, alpha[Np/m] = f^2 * term.
  const double term = 1.84e-11 / pa * std::sqrt(tr) +
                      std::pow(tr, -2.5) * (0.01275 * std::exp(-2239.1 / t) / (fr_o + f2 / fr_o) +
                                            0.1068 * std::exp(-3352.0 / t) / (fr_n + f2 / fr_n));
  return f2 * term;
}

double attenuation_coeff(double frequency, const MediumParams& medium) {
  if (!(frequency > 0.0)) throw ParameterError("frequency must be positive");
  if (medium.attenuation_override) {
    auto it = medium.attenuation_override->find(frequency);
    if (it != medium.attenuation_override->end()) return it->second;
  }
  return iso9613_absorption(frequency, medium.temperature_celsius, medium.relative_humidity,
                            medium.ambient_pressure);
}

Wavenumber wavenumber(double frequency, const MediumParams& medium) {
  if (!(frequency > 0.0)) throw ParameterError("frequency must be positive");
  return {kTwoPi * frequency / medium.c0, attenuation_coeff(frequency, medium)};
}

Wavenumber audio_wavenumber(double frequency, const MediumParams& medium) {
  if (!medium.audio_attenuation) {
    if (!(frequency > 0.0)) throw ParameterError("frequency must be positive");
    return {kTwoPi * frequency / medium.c0, 0.0};
  }
  return wavenumber(frequency, medium);
}

}  // namespace pal
