#include <doctest.h>

#include <cmath>

#include "fus/cascade.hpp"
#include "fus/medium.hpp"
#include "fus/transducer.hpp"

namespace {

const fus::Medium kWater = fus::medium_preset("water");

fus::HarmonicField constant_field(const fus::VoxelGrid& g, std::complex<double> v,
                                  const fus::Wavenumber& k) {
  return {g, Eigen::VectorXcd::Constant(g.count(), v), k};
}

// Small, fast configuration used by several cases.
fus::CascadeConfig tiny_config(int n_harmonics, double power, int n_w = 3) {
  fus::CascadeConfig cfg;
  cfg.medium = kWater;
  cfg.transducer = fus::transducer_preset("H131", power, 128);
  cfg.transducer.f0 = 0.25e6;
  cfg.plan = fus::plan_nested_meshes(cfg.transducer, cfg.medium, 6e-3, n_w, n_harmonics, 0.35);
  cfg.n_harmonics = n_harmonics;
  return cfg;
}

}  // namespace

TEST_SUITE("cascade") {

TEST_CASE("rhs coefficients follow beta omega^2 n^2 / (2 rho0 c0^4) times the pair sum") {
  fus::DomainBox box{{0, 0, 0}, {2e-3, 2e-3, 2e-3}};
  const fus::VoxelGrid g = fus::make_grid(box, 1e-3, 1);
  const double f0 = 1.1e6;
  const double omega = 2 * M_PI * f0;
  const std::complex<double> a(2.0, 1.0), b(0.5, -3.0), c(1.0, 1.0);

  std::vector<fus::HarmonicField> lower;
  lower.push_back(constant_field(g, a, fus::complex_wavenumber(kWater, f0, 1)));
  lower.push_back(constant_field(g, b, fus::complex_wavenumber(kWater, f0, 2)));
  lower.push_back(constant_field(g, c, fus::complex_wavenumber(kWater, f0, 3)));

  const double base = kWater.beta * omega * omega / (2 * kWater.rho0 * std::pow(kWater.c0, 4));

  // n=2: coeff * 4 * p1^2  (the 2^2 harmonic factor)
  Eigen::VectorXcd f2 = fus::rhs_source(2, {lower[0]}, kWater, omega);
  CHECK(std::abs(f2[0] - base * 4.0 * a * a) < 1e-10 * std::abs(f2[0]));

  // n=3: coeff * 9 * (2 p1 p2)
  Eigen::VectorXcd f3 = fus::rhs_source(3, {lower[0], lower[1]}, kWater, omega);
  CHECK(std::abs(f3[0] - base * 9.0 * 2.0 * a * b) < 1e-10 * std::abs(f3[0]));

  // n=4: coeff * 16 * (p2^2 + 2 p1 p3)
  Eigen::VectorXcd f4 = fus::rhs_source(4, lower, kWater, omega);
  CHECK(std::abs(f4[0] - base * 16.0 * (b * b + 2.0 * a * c)) < 1e-10 * std::abs(f4[0]));

  // beta = 0 kills the source
  fus::Medium linear = kWater;
  linear.beta = 0.0;
  CHECK(fus::rhs_source(4, lower, linear, omega).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cascade produces all harmonics on their planned grids") {
  const fus::CascadeConfig cfg = tiny_config(3, 20.0);
  const fus::CascadeResult r = fus::run_cascade(cfg);
  REQUIRE(int(r.harmonics.size()) == 3);
  CHECK(r.p(1).wavenumber.harmonic == 1);
  CHECK(r.p(2).grid.dims == cfg.plan.for_harmonic(2).grid.dims);
  CHECK(r.p(3).grid.dims == cfg.plan.for_harmonic(3).grid.dims);
  CHECK(r.p(2).values.cwiseAbs().maxCoeff() > 0.0);
  CHECK(r.p(3).values.cwiseAbs().maxCoeff() > 0.0);
  // weakly nonlinear: each harmonic well below the previous
  CHECK(r.p(2).values.cwiseAbs().maxCoeff() < r.p(1).values.cwiseAbs().maxCoeff());
  CHECK(r.p(3).values.cwiseAbs().maxCoeff() < r.p(2).values.cwiseAbs().maxCoeff());
  // timing rows for harmonics 2..n with nonzero voxel counts
  REQUIRE(r.timings.size() == 2);
  CHECK(r.timings[0].harmonic == 2);
  CHECK(r.timings[1].harmonic == 3);
  CHECK(r.timings[0].voxels == cfg.plan.for_harmonic(2).grid.count());
}

TEST_CASE("amplitude scaling: p_n scales as s^n") {
  const fus::CascadeConfig c1 = tiny_config(3, 10.0);
  fus::CascadeConfig c4 = c1;
  c4.transducer.power = 40.0;  // amplitude x2

  const fus::CascadeResult r1 = fus::run_cascade(c1);
  const fus::CascadeResult r4 = fus::run_cascade(c4);

  const double s1 = (r4.p(1).values - 2.0 * r1.p(1).values).norm() / r1.p(1).values.norm();
  const double s2 = (r4.p(2).values - 4.0 * r1.p(2).values).norm() / r1.p(2).values.norm();
  const double s3 = (r4.p(3).values - 8.0 * r1.p(3).values).norm() / r1.p(3).values.norm();
  CHECK(s1 < 1e-12);
  CHECK(s2 < 1e-12);
  CHECK(s3 < 1e-12);
}

TEST_CASE("cascade is deterministic") {
  const fus::CascadeConfig cfg = tiny_config(2, 15.0);
  const fus::CascadeResult a = fus::run_cascade(cfg);
  const fus::CascadeResult b = fus::run_cascade(cfg);
  CHECK(a.p(1).values == b.p(1).values);
  CHECK(a.p(2).values == b.p(2).values);
}

TEST_CASE("single-mesh plan keeps every harmonic on the reference grid") {
  const fus::CascadeConfig cfg = tiny_config(3, 10.0);
  const fus::MeshPlan single = fus::plan_single_mesh(cfg.transducer, cfg.medium, 6e-3, 3, 3, 0.35);
  CHECK(single.for_harmonic(2).grid.dims == single.reference.dims);
  CHECK(single.for_harmonic(3).grid.dims == single.reference.dims);
  CHECK(single.reduction_factor(2) == doctest::Approx(1.0));
}

}  // TEST_SUITE
