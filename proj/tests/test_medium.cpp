#include "doctest.h"
#include "pal/medium.hpp"
#include "reference.hpp"

using namespace pal;

TEST_CASE("sound speed follows the temperature law") {
  CHECK(sound_speed(0.0) == doctest::Approx(331.3).epsilon(1e-12));
  CHECK(sound_speed(20.0) == doctest::Approx(331.3 * std::sqrt(1.0 + 20.0 / 273.15)).epsilon(1e-12));
  CHECK(sound_speed(20.0) == doctest::Approx(343.2).epsilon(1e-3));
  CHECK(sound_speed(25.0) > sound_speed(20.0));
  CHECK_THROWS_AS(sound_speed(-31.0), ParameterError);
  CHECK_THROWS_AS(sound_speed(51.0), ParameterError);
}

TEST_CASE("attenuation override and atmospheric absorption") {
  auto m = make_medium(20.0, 0.6);
  m.attenuation_override = std::map<double, double>{{40000.0, 0.15}};
  CHECK(attenuation_coeff(40000.0, m) == 0.15);

  const auto air = make_medium(20.0, 0.6);
  const double iso = attenuation_coeff(40000.0, air);
  CHECK(iso == doctest::Approx(ref::iso9613(40000.0, 20.0, 0.6)).epsilon(1e-6));
  CHECK(iso > 0.15 * 0.7);
  CHECK(iso < 0.15 * 1.3);
  CHECK(attenuation_coeff(1e-3, air) < 1e-12);
  double prev = 0.0;
  for (double f = 1000.0; f <= 100000.0; f += 1000.0) {
    const double a = attenuation_coeff(f, air);
    CHECK(a > prev);
    prev = a;
  }
  CHECK_THROWS_AS(attenuation_coeff(0.0, air), ParameterError);
  CHECK(attenuation_coeff(40000.0, air) == attenuation_coeff(40000.0, air));
}

TEST_CASE("wavenumber") {
  auto m = make_medium();
  m.c0 = 343.2;
  const auto k = wavenumber(40000.0, m);
  CHECK(k.real_part == doctest::Approx(732.3).epsilon(1e-4));
  CHECK(k.wavelength() == doctest::Approx(0.00858).epsilon(1e-3));
  CHECK(wavenumber(80000.0, m).real_part == doctest::Approx(2.0 * k.real_part).epsilon(1e-14));

  m.attenuation_override = std::map<double, double>{{40000.0, 0.0}};
  CHECK(wavenumber(40000.0, m).alpha == 0.0);

  for (double f = 100.0; f <= 200000.0; f *= 1.37)
    CHECK(std::abs(wavenumber(f, m).real_part * m.c0 / (2.0 * ref::pi) - f) <= 1e-12 * f);
}

TEST_CASE("audio wavenumber is lossless unless enabled") {
  auto m = make_medium();
  CHECK(audio_wavenumber(1000.0, m).alpha == 0.0);
  m.audio_attenuation = true;
  CHECK(audio_wavenumber(1000.0, m).alpha > 0.0);
}

TEST_CASE("medium validation") {
  auto m = make_medium();
  CHECK(m.rho0 == doctest::Approx(1.204));
  CHECK(m.beta == doctest::Approx(1.2));
  CHECK_NOTHROW(m.validate());
  m.relative_humidity = 1.5;
  CHECK_THROWS_AS(m.validate(), ParameterError);
  m = make_medium();
  m.attenuation_override = std::map<double, double>{{40000.0, -0.1}};
  CHECK_THROWS_AS(m.validate(), ParameterError);
  m = make_medium();
  m.rho0 = 0.0;
  CHECK_THROWS_AS(m.validate(), ParameterError);
}
