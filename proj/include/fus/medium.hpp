#pragma once

#include <complex>
#include <string>
#include <vector>

namespace fus {

/// Acoustic material constants with power-law attenuation.
/// alpha0 is in dB/m at 1 MHz; the attenuation at frequency f is
/// alpha0 * (f/MHz)^eta dB/m, converted to Np/m when building wavenumbers.
struct Medium {
  std::string name;
  double rho0;    // density, kg/m^3
  double c0;      // sound speed, m/s
  double beta;    // nonlinearity coefficient
  double alpha0;  // attenuation coefficient, dB m^-1 MHz^-eta
  double eta;     // power-law exponent

  // Returns human-readable warnings for parameter ranges that are unusual
  // but not fatal (e.g. eta outside [1, 2]). Hard violations throw.
  std::vector<std::string> validate() const;
};

/// Complex wavenumber of one harmonic: k = n*omega/c0 + i*alpha(n*omega).
struct Wavenumber {
  std::complex<double> k;  // rad/m, Im(k) >= 0
  int harmonic;            // n >= 1
  double omega;            // fundamental angular frequency, rad/s
};

// dB -> Np conversion factor for amplitudes: Np = dB / (20/ln 10).
inline constexpr double kDbPerNeper = 8.685889638065035;

// Power-law attenuation at frequency f_hz, in Np/m.
double attenuation_np_per_m(const Medium& medium, double f_hz);

// k_n = n*omega/c0 + i*alpha(n*f0). Throws on f0 <= 0 or n < 1.
// Emits a warning on stderr when the power-law validity bound
// alpha*c0/omega < 0.1 is violated.
Wavenumber complex_wavenumber(const Medium& medium, double f0, int n);

// Built-in presets matching the usual tissue tables: "water", "liver",
// "kidney". Throws std::invalid_argument for unknown names.
Medium medium_preset(const std::string& name);
bool is_medium_preset(const std::string& name);

// Load a medium from a key=value config file with keys
// name, rho0, c0, beta, alpha0, eta.
Medium load_medium(const std::string& path);

}  // namespace fus
