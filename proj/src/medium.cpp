#include "fus/medium.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "fus/io.hpp"

namespace fus {

std::vector<std::string> Medium::validate() const {
  if (rho0 <= 0.0) throw std::invalid_argument("medium '" + name + "': rho0 must be positive");
  if (c0 <= 0.0) throw std::invalid_argument("medium '" + name + "': c0 must be positive");
  if (beta < 0.0) throw std::invalid_argument("medium '" + name + "': beta must be non-negative");
  if (alpha0 < 0.0) throw std::invalid_argument("medium '" + name + "': alpha0 must be non-negative");

  std::vector<std::string> warnings;
  if (eta < 1.0 || eta > 2.0) {
    warnings.push_back("medium '" + name + "': power-law exponent eta=" + std::to_string(eta) +
                       " is outside the typical range [1, 2]");
  }
  return warnings;
}

double attenuation_np_per_m(const Medium& medium, double f_hz) {
  const double f_mhz = f_hz / 1.0e6;
  const double alpha_db = medium.alpha0 * std::pow(f_mhz, medium.eta);
  return alpha_db / kDbPerNeper;
}

Wavenumber complex_wavenumber(const Medium& medium, double f0, int n) {
  if (f0 <= 0.0) throw std::invalid_argument("complex_wavenumber: f0 must be positive");
  if (n < 1) throw std::invalid_argument("complex_wavenumber: harmonic index must be >= 1");

  const double omega = 2.0 * M_PI * f0;
  const double alpha = attenuation_np_per_m(medium, n * f0);

  // Validity bound for the power law: attenuation per radian must be small.
  if (alpha * medium.c0 / (n * omega) >= 0.1) {
    std::cerr << "warning: power-law attenuation bound alpha*c0/omega < 0.1 violated for medium '"
              << medium.name << "' at harmonic " << n << "\n";
  }

  return Wavenumber{{n * omega / medium.c0, alpha}, n, omega};
}

Medium medium_preset(const std::string& name) {
  if (name == "water") return Medium{"water", 1000.0, 1480.0, 3.5, 0.2, 2.0};
  if (name == "liver") return Medium{"liver", 1060.0, 1590.0, 4.4, 90.0, 1.1};
  if (name == "kidney") return Medium{"kidney", 1050.0, 1570.0, 4.7, 10.0, 1.0};
  throw std::invalid_argument("unknown medium preset '" + name + "'");
}

bool is_medium_preset(const std::string& name) {
  return name == "water" || name == "liver" || name == "kidney";
}

Medium load_medium(const std::string& path) {
  const auto kv = parse_key_value_file(path);
  Medium m;
  m.name = require_string(kv, "name", path);
  m.rho0 = require_double(kv, "rho0", path);
  m.c0 = require_double(kv, "c0", path);
  m.beta = require_double(kv, "beta", path);
  m.alpha0 = require_double(kv, "alpha0", path);
  m.eta = require_double(kv, "eta", path);
  for (const auto& w : m.validate()) std::cerr << "warning: " << w << "\n";
  return m;
}

}  // namespace fus
