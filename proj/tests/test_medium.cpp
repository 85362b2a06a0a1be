#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fus/medium.hpp"

TEST_SUITE("medium") {

TEST_CASE("presets carry the standard constants") {
  const fus::Medium w = fus::medium_preset("water");
  CHECK(w.rho0 == 1000.0);
  CHECK(w.c0 == 1480.0);
  CHECK(w.beta == 3.5);
  CHECK(w.alpha0 == 0.2);
  CHECK(w.eta == 2.0);

  const fus::Medium liver = fus::medium_preset("liver");
  CHECK(liver.c0 == 1590.0);
  CHECK(liver.alpha0 == 90.0);
  CHECK(liver.eta == 1.1);

  const fus::Medium kidney = fus::medium_preset("kidney");
  CHECK(kidney.rho0 == 1050.0);
  CHECK(kidney.beta == 4.7);

  CHECK(fus::is_medium_preset("water"));
  CHECK_FALSE(fus::is_medium_preset("granite"));
  CHECK_THROWS_AS(fus::medium_preset("granite"), std::invalid_argument);
}

TEST_CASE("attenuation follows the power law with dB->Np conversion") {
  const fus::Medium w = fus::medium_preset("water");
  // 0.2 dB/m at 1 MHz; at 1.1 MHz: 0.2 * 1.1^2 dB/m.
  const double expected = 0.2 * 1.1 * 1.1 / fus::kDbPerNeper;
  CHECK(fus::attenuation_np_per_m(w, 1.1e6) == doctest::Approx(expected).epsilon(1e-14));
  // Spot value quoted for water at 1.1 MHz: ~0.0279 Np/m.
  CHECK(fus::attenuation_np_per_m(w, 1.1e6) == doctest::Approx(0.02786).epsilon(1e-3));
}

TEST_CASE("complex wavenumber: real part linear in n, imaginary part power-law") {
  const fus::Medium liver = fus::medium_preset("liver");
  const double f0 = 1.1e6;
  const fus::Wavenumber k1 = fus::complex_wavenumber(liver, f0, 1);
  const fus::Wavenumber k4 = fus::complex_wavenumber(liver, f0, 4);
  CHECK(k1.k.real() == doctest::Approx(2 * M_PI * f0 / liver.c0).epsilon(1e-14));
  CHECK(k4.k.real() == doctest::Approx(4 * k1.k.real()).epsilon(1e-14));
  CHECK(k4.k.imag() / k1.k.imag() == doctest::Approx(std::pow(4.0, liver.eta)).epsilon(1e-12));
  CHECK(k4.harmonic == 4);
  CHECK(k4.omega == doctest::Approx(2 * M_PI * f0).epsilon(1e-15));

  CHECK_THROWS(fus::complex_wavenumber(liver, -1.0, 1));
  CHECK_THROWS(fus::complex_wavenumber(liver, f0, 0));
}

TEST_CASE("validation rejects nonphysical constants") {
  fus::Medium m = fus::medium_preset("water");
  m.c0 = -1;
  CHECK_THROWS(m.validate());
  m = fus::medium_preset("water");
  m.rho0 = 0;
  CHECK_THROWS(m.validate());
  m = fus::medium_preset("water");
  m.eta = 3.0;  // unusual but allowed: warning, not a throw
  CHECK_FALSE(m.validate().empty());
}

TEST_CASE("medium round-trips through a config file") {
  const std::string path = "test_medium_cfg.txt";
  {
    std::ofstream out(path);
    out << "# custom phantom\nname = gel\nrho0 = 1030\nc0 = 1540\nbeta = 4.0\n"
           "alpha0 = 0.5\neta = 1.5\n";
  }
  const fus::Medium m = fus::load_medium(path);
  CHECK(m.name == "gel");
  CHECK(m.rho0 == 1030.0);
  CHECK(m.c0 == 1540.0);
  CHECK(m.beta == 4.0);
  CHECK(m.alpha0 == 0.5);
  CHECK(m.eta == 1.5);
  std::remove(path.c_str());
}

}  // TEST_SUITE
