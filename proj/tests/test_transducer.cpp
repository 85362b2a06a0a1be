#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fus/medium.hpp"
#include "fus/transducer.hpp"
#include "oracles.hpp"

namespace {

const fus::Medium kWater = fus::medium_preset("water");

double nearest_neighbour_ratio(const std::vector<Eigen::Vector3d>& pts) {
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) nn = std::min(nn, (pts[i] - pts[j]).norm());
    dmin = std::min(dmin, nn);
    dmax = std::max(dmax, nn);
  }
  return dmax / dmin;
}

}  // namespace

TEST_SUITE("transducer") {

TEST_CASE("geometry: cap area, rim plane, focus") {
  const fus::BowlTransducer t = fus::transducer_preset("H131", 100.0, 64);
  const double l = 35e-3, R = 16.5e-3;
  CHECK(t.focal_length == l);
  CHECK(t.outer_radius == R);
  CHECK(t.f0 == 1.1e6);
  CHECK(t.focus() == Eigen::Vector3d(l, 0, 0));
  CHECK(t.cap_area() ==
        doctest::Approx(2 * M_PI * l * (l - std::sqrt(l * l - R * R))).epsilon(1e-14));
  CHECK(t.rim_plane_x() == doctest::Approx(l - std::sqrt(l * l - R * R)).epsilon(1e-14));

  const fus::BowlTransducer h101 = fus::transducer_preset("H101");
  CHECK(h101.focal_length == 63.2e-3);
  CHECK(h101.outer_radius == 32e-3);
  CHECK(int(h101.source_points.size()) == 4096);
}

TEST_CASE("point layout: exact count, on-sphere, within the cap, near-uniform") {
  const double l = 35e-3, R = 16.5e-3;
  for (int np : {1, 7, 128, 4096}) {
    const auto pts = fus::distribute_points(l, R, np);
    REQUIRE(int(pts.size()) == np);
    const Eigen::Vector3d centre(l, 0, 0);
    const double cos_tm = std::sqrt(l * l - R * R) / l;
    for (const auto& p : pts) {
      CHECK((p - centre).norm() == doctest::Approx(l).epsilon(1e-13));
      // within the cap: angle from the -x direction at most theta_max
      const double cos_t = (centre - p).x() / l;
      CHECK(cos_t >= cos_tm - 1e-12);
    }
  }
  CHECK(fus::distribute_points(l, R, 1)[0].norm() == doctest::Approx(0.0));

  // Equal-area layout keeps nearest-neighbour spacing within a factor 2.
  const auto pts = fus::distribute_points(l, R, 1024);
  CHECK(nearest_neighbour_ratio(pts) < 2.0);
}

TEST_CASE("monopole sum converges to the closed-form on-axis cap integral") {
  const fus::BowlTransducer t = fus::transducer_preset("H131", 100.0, 4096);
  const fus::Wavenumber k = fus::complex_wavenumber(kWater, t.f0, 1);

  std::vector<Eigen::Vector3d> axis;
  std::vector<double> xs;
  for (int i = 0; i < 400; ++i) {
    const double x = 10e-3 + i * (35e-3 / 400.0);
    xs.push_back(x);
    axis.push_back({x, 0, 0});
  }
  const Eigen::VectorXcd p = fus::unnormalized_field(t, axis, k);

  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // The continuum limit of (A/n_p) * sum G is the cap surface integral.
    const std::complex<double> exact =
        oracles::cap_on_axis(t.focal_length, t.outer_radius, k.k, xs[i]);
    num += std::norm(p[i] - exact);
    den += std::norm(exact);
  }
  CHECK(std::sqrt(num / den) < 0.005);
}

TEST_CASE("radiated power scales quadratically with amplitude") {
  const fus::BowlTransducer t = fus::transducer_preset("H131", 100.0, 512);
  const fus::Wavenumber k = fus::complex_wavenumber(kWater, t.f0, 1);
  const double p1 = fus::radiated_power(t, kWater, k, 1.0, 96, 64);
  const double p3 = fus::radiated_power(t, kWater, k, 3.0, 96, 64);
  CHECK(p3 == doctest::Approx(9.0 * p1).epsilon(1e-12));
  CHECK(p1 > 0.0);
}

TEST_CASE("power scale factor hits the target and is idempotent") {
  fus::BowlTransducer t = fus::transducer_preset("H131", 40.0, 512);
  const fus::Wavenumber k = fus::complex_wavenumber(kWater, t.f0, 1);
  const double s = fus::power_scale_factor(t, kWater, k);
  CHECK(fus::radiated_power(t, kWater, k, s) == doctest::Approx(40.0).epsilon(1e-12));

  t.power = 0.0;
  CHECK(fus::power_scale_factor(t, kWater, k) == 0.0);
}

TEST_CASE("power integral is converged at the default disc resolution") {
  const fus::BowlTransducer t = fus::transducer_preset("H131", 100.0, 1024);
  const fus::Wavenumber k = fus::complex_wavenumber(kWater, t.f0, 1);
  const double coarse = fus::radiated_power(t, kWater, k, 1.0, 384, 256);
  const double fine = fus::radiated_power(t, kWater, k, 1.0, 768, 512);
  CHECK(std::abs(fine - coarse) / fine < 1e-3);
}

TEST_CASE("transducer config file loading") {
  const std::string path = "test_bowl_cfg.txt";
  {
    std::ofstream out(path);
    out << "name = custom\nf0 = 0.5e6\nfocal_length = 0.05\nouter_radius = 0.02\n"
           "n_points = 33\n";
  }
  const fus::BowlTransducer t = fus::load_transducer(path, 75.0);
  CHECK(t.name == "custom");
  CHECK(t.f0 == 0.5e6);
  CHECK(t.power == 75.0);
  CHECK(int(t.source_points.size()) == 33);
  std::remove(path.c_str());
}

}  // TEST_SUITE
