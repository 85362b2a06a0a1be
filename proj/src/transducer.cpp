#include "fus/transducer.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "fus/io.hpp"
#include "fus/potential.hpp"

namespace fus {

double BowlTransducer::cap_area() const {
  const double l = focal_length, R = outer_radius;
  return 2.0 * M_PI * l * (l - std::sqrt(l * l - R * R));
}

double BowlTransducer::rim_plane_x() const {
  const double l = focal_length, R = outer_radius;
  return l - std::sqrt(l * l - R * R);
}

std::vector<Eigen::Vector3d> distribute_points(double focal_length, double outer_radius,
                                               int n_points) {
  const double l = focal_length, R = outer_radius;
  if (n_points < 1) throw std::invalid_argument("distribute_points: n_points must be >= 1");
  if (!(R > 0.0 && R < l))
    throw std::invalid_argument("distribute_points: need 0 < R < l (non-degenerate cap)");

  const Eigen::Vector3d focus(l, 0.0, 0.0);
  auto cap_point = [&](double theta, double phi) -> Eigen::Vector3d {
    // theta is the polar angle measured from the cap pole as seen from
    // the focus; the pole is the bowl apex at the origin.
    return focus + l * Eigen::Vector3d(-std::cos(theta), std::sin(theta) * std::cos(phi),
                                       std::sin(theta) * std::sin(phi));
  };

  if (n_points == 1) return {cap_point(0.0, 0.0)};

  const double theta_max = std::asin(R / l);
  const double area = 2.0 * M_PI * l * (l - std::sqrt(l * l - R * R));
  const double spacing = std::sqrt(area / n_points);
  const int n_rings = std::max(1, int(std::lround(theta_max * l / spacing)));

  std::vector<double> theta(n_rings), weight(n_rings);
  double total_weight = 0.0;
  for (int m = 0; m < n_rings; ++m) {
    theta[m] = theta_max * (m + 0.5) / n_rings;
    weight[m] = std::sin(theta[m]);  // points per ring ~ circumference
    total_weight += weight[m];
  }

  std::vector<Eigen::Vector3d> points;
  points.reserve(n_points);
  double cum = 0.0;
  long assigned = 0;
  for (int m = 0; m < n_rings; ++m) {
    cum += weight[m];
    const long upto = std::lround(n_points * cum / total_weight);
    const long in_ring = upto - assigned;
    assigned = upto;
    if (in_ring <= 0) continue;
    // Stagger rings so points do not align azimuthally.
    const double offset = 2.0 * M_PI * std::fmod(m * 0.618033988749895, 1.0);
    for (long j = 0; j < in_ring; ++j) {
      const double phi = 2.0 * M_PI * (j + 0.5) / double(in_ring) + offset;
      points.push_back(cap_point(theta[m], phi));
    }
  }
  return points;
}

BowlTransducer make_bowl(const std::string& name, double f0, double focal_length,
                         double outer_radius, double power, int n_points) {
  if (f0 <= 0.0) throw std::invalid_argument("make_bowl: f0 must be positive");
  if (power < 0.0) throw std::invalid_argument("make_bowl: power must be >= 0");
  BowlTransducer t;
  t.name = name;
  t.f0 = f0;
  t.focal_length = focal_length;
  t.outer_radius = outer_radius;
  t.power = power;
  t.source_points = distribute_points(focal_length, outer_radius, n_points);
  return t;
}

BowlTransducer transducer_preset(const std::string& name, double power, int n_points) {
  if (name == "H101") return make_bowl("H101", 1.1e6, 63.2e-3, 32.0e-3, power, n_points);
  if (name == "H131") return make_bowl("H131", 1.1e6, 35.0e-3, 16.5e-3, power, n_points);
  throw std::invalid_argument("unknown transducer preset '" + name + "'");
}

bool is_transducer_preset(const std::string& name) { return name == "H101" || name == "H131"; }

BowlTransducer load_transducer(const std::string& path, double power) {
  const auto kv = parse_key_value_file(path);
  const std::string name = require_string(kv, "name", path);
  const double f0 = require_double(kv, "f0", path);
  const double l = require_double(kv, "focal_length", path);
  const double R = require_double(kv, "outer_radius", path);
  const int n_points = int(require_double(kv, "n_points", path));
  return make_bowl(name, f0, l, R, power, n_points);
}

namespace {

// Monopole sum at a single point; throws on coincidence with a source.
std::complex<double> monopole_sum(const BowlTransducer& t, const Eigen::Vector3d& x,
                                  const std::complex<double>& k) {
  std::complex<double> acc = 0.0;
  for (const auto& r : t.source_points) {
    const double dist = (x - r).norm();
    if (dist < 1e-12)
      throw std::invalid_argument("evaluation point coincides with a monopole source");
    // exp(ikr)/(4 pi r) with complex k.
    const double mag = std::exp(-k.imag() * dist) / (4.0 * M_PI * dist);
    acc += std::polar(mag, k.real() * dist);
  }
  return acc;
}

}  // namespace

Eigen::VectorXcd unnormalized_field(const BowlTransducer& transducer,
                                    const std::vector<Eigen::Vector3d>& eval_points,
                                    const Wavenumber& k) {
  const double amp = transducer.cap_area() / double(transducer.source_points.size());
  Eigen::VectorXcd out(eval_points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < std::int64_t(eval_points.size()); ++i)
    out[i] = amp * monopole_sum(transducer, eval_points[i], k.k);
  return out;
}

double radiated_power(const BowlTransducer& transducer, const Medium& medium,
                      const Wavenumber& k, double amplitude_scale, int n_r, int n_theta) {
  const double R = transducer.outer_radius;
  const double x_disc = transducer.rim_plane_x();
  const double amp = amplitude_scale * transducer.cap_area() / double(transducer.source_points.size());
  const double dr = R / n_r;
  const double dth = 2.0 * M_PI / n_theta;

  double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (int j = 0; j < n_r; ++j) {
    const double r = (j + 0.5) * dr;
    double ring = 0.0;
    for (int m = 0; m < n_theta; ++m) {
      const double th = (m + 0.5) * dth;
      const Eigen::Vector3d x(x_disc, r * std::cos(th), r * std::sin(th));
      ring += std::norm(amp * monopole_sum(transducer, x, k.k));
    }
    total += ring * r;  // polar area element
  }
  return total * dr * dth / (2.0 * medium.rho0 * medium.c0);
}

double power_scale_factor(const BowlTransducer& transducer, const Medium& medium,
                          const Wavenumber& k) {
  if (transducer.power == 0.0) return 0.0;
  const double pw = radiated_power(transducer, medium, k, 1.0);
  if (pw <= 0.0) throw std::runtime_error("power normalization: degenerate field, Pi(p) = 0");
  return std::sqrt(transducer.power / pw);
}

SourceField normalize_to_power(const SourceField& field, const BowlTransducer& transducer,
                               const Medium& medium) {
  if (field.normalization <= 0.0)
    throw std::invalid_argument("normalize_to_power: normalization factor must be positive");
  const double factor = power_scale_factor(transducer, medium, field.field.wavenumber);
  SourceField out;
  out.field.grid = field.field.grid;
  out.field.wavenumber = field.field.wavenumber;
  out.field.values = field.field.values * (factor / field.normalization);
  out.normalization = factor > 0.0 ? factor : 1.0;
  if (factor == 0.0) out.field.values.setZero();
  return out;
}

HarmonicField evaluate_first_harmonic(const BowlTransducer& transducer, const Medium& medium,
                                      const VoxelGrid& grid, double amplitude_scale) {
  const Wavenumber k1 = complex_wavenumber(medium, transducer.f0, 1);
  const double amp =
      amplitude_scale * transducer.cap_area() / double(transducer.source_points.size());

  HarmonicField f;
  f.grid = grid;
  f.wavenumber = k1;
  f.values.resize(grid.count());
#pragma omp parallel for collapse(2) schedule(static)
  for (int iz = 0; iz < grid.dims.z(); ++iz)
    for (int iy = 0; iy < grid.dims.y(); ++iy)
      for (int ix = 0; ix < grid.dims.x(); ++ix)
        f.values[grid.index(ix, iy, iz)] =
            amp * monopole_sum(transducer, grid.center(ix, iy, iz), k1.k);
  return f;
}

SourceField evaluate_source_field(const BowlTransducer& transducer, const Medium& medium,
                                  const VoxelGrid& grid) {
  const Wavenumber k1 = complex_wavenumber(medium, transducer.f0, 1);
  const double scale = power_scale_factor(transducer, medium, k1);
  SourceField s;
  s.field = evaluate_first_harmonic(transducer, medium, grid, scale);
  s.normalization = scale > 0.0 ? scale : 1.0;
  return s;
}

}  // namespace fus
