#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fus/grid.hpp"
#include "fus/medium.hpp"

namespace fus {

/// Bowl-shaped transducer: a spherical cap with radius of curvature l
/// (the geometric focal length) and aperture radius R < l. The apex sits
/// at the origin and the axis points along +x, so the focus is (l, 0, 0).
struct BowlTransducer {
  std::string name;
  double f0;             // operating frequency, Hz
  double focal_length;   // l, m
  double outer_radius;   // R, m
  double power;          // prescribed total radiated power Pi_0, W
  std::vector<Eigen::Vector3d> source_points;  // monopoles on the cap

  Eigen::Vector3d focus() const { return {focal_length, 0.0, 0.0}; }
  // Cap surface area A = 2*pi*l*(l - sqrt(l^2 - R^2)).
  double cap_area() const;
  // x-coordinate of the bowl rim plane, l - sqrt(l^2 - R^2).
  double rim_plane_x() const;
};

// Deterministic equal-area layout of n_p points on the spherical cap:
// rings of latitude with points per ring proportional to the ring
// circumference. n_p == 1 places the single point at the cap pole.
std::vector<Eigen::Vector3d> distribute_points(double focal_length, double outer_radius,
                                               int n_points);

BowlTransducer make_bowl(const std::string& name, double f0, double focal_length,
                         double outer_radius, double power, int n_points);

// Presets H101 (l=63.2 mm, R=32 mm) and H131 (l=35 mm, R=16.5 mm), both
// at f0 = 1.1 MHz.
BowlTransducer transducer_preset(const std::string& name, double power = 100.0,
                                 int n_points = 4096);
bool is_transducer_preset(const std::string& name);

// Key=value config with keys name, f0, focal_length, outer_radius,
// n_points (power comes from the run configuration).
BowlTransducer load_transducer(const std::string& path, double power);

// Unnormalised monopole-sum field (A/n_p) * sum_i G_k(x, r_i) at the
// given evaluation points. Throws if any evaluation point coincides with
// a source point.
Eigen::VectorXcd unnormalized_field(const BowlTransducer& transducer,
                                    const std::vector<Eigen::Vector3d>& eval_points,
                                    const Wavenumber& k);

/// First-harmonic field on a grid together with the amplitude factor that
/// was applied to the raw monopole sum.
struct SourceField {
  HarmonicField field;
  double normalization = 1.0;
};

// Radiated power of `amplitude_scale` times the monopole sum, integrated
// as intensity |p|^2/(2 rho0 c0) over the aperture disc in the bowl rim
// plane (polar midpoint rule, n_r x n_theta nodes).
double radiated_power(const BowlTransducer& transducer, const Medium& medium,
                      const Wavenumber& k, double amplitude_scale,
                      int n_r = 384, int n_theta = 256);

// Rescales the field so its radiated power equals transducer.power
// (Pi(p1) = Pi_0). Idempotent; Pi_0 = 0 yields the zero field.
SourceField normalize_to_power(const SourceField& field, const BowlTransducer& transducer,
                               const Medium& medium);

// Amplitude factor sqrt(Pi_0 / Pi(p_tilde)) applied to the raw monopole sum.
double power_scale_factor(const BowlTransducer& transducer, const Medium& medium,
                          const Wavenumber& k);

// Normalised first harmonic evaluated directly at the voxel centres of `grid`.
SourceField evaluate_source_field(const BowlTransducer& transducer, const Medium& medium,
                                  const VoxelGrid& grid);

// As above but with a caller-supplied amplitude factor (avoids
// recomputing the power integral when evaluating on several grids).
HarmonicField evaluate_first_harmonic(const BowlTransducer& transducer, const Medium& medium,
                                      const VoxelGrid& grid, double amplitude_scale);

}  // namespace fus
