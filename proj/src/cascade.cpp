#include "fus/cascade.hpp"

#include <chrono>
#include <iostream>
#include <stdexcept>

namespace fus {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_grid(const VoxelGrid& a, const VoxelGrid& b) {
  return a.dims == b.dims && a.dx == b.dx && a.box.lo == b.box.lo;
}

}  // namespace

Eigen::VectorXcd rhs_source(int n, const std::vector<HarmonicField>& lower,
                            const Medium& medium, double omega) {
  if (n < 2) throw std::invalid_argument("rhs_source: harmonic index must be >= 2");
  if (int(lower.size()) < n - 1)
    throw std::invalid_argument("rhs_source: missing lower harmonics for n = " + std::to_string(n));

  const Eigen::Index count = lower[0].values.size();
  for (int m = 1; m < n; ++m)
    if (lower[m - 1].values.size() != count)
      throw std::invalid_argument("rhs_source: lower harmonics live on different grids");

  const double coeff =
      medium.beta * omega * omega * double(n) * double(n) /
      (2.0 * medium.rho0 * std::pow(medium.c0, 4));

  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(count);
  for (int m = 1; m <= n - 1; ++m)
    f.array() += lower[m - 1].values.array() * lower[n - m - 1].values.array();
  return coeff * f;
}

CascadeResult run_cascade(const CascadeConfig& config) {
  const auto& plan = config.plan;
  const int n = config.n_harmonics;
  if (n < 2) throw std::invalid_argument("run_cascade: n_harmonics must be >= 2");

  CascadeResult result;
  result.harmonics.reserve(n);

  // p1 on the D_2 grid by direct source evaluation.
  SourceField src = evaluate_source_field(config.transducer, config.medium,
                                          plan.for_harmonic(2).grid);
  result.source_normalization = src.normalization;
  result.harmonics.push_back(std::move(src.field));

  const double peak_p1 = result.harmonics[0].values.cwiseAbs().maxCoeff();
  if (peak_p1 > 15e6)
    std::cerr << "warning: peak pressure " << peak_p1 / 1e6
              << " MPa exceeds the 15 MPa weakly-nonlinear bound; the truncated cascade"
                 " may be inaccurate\n";

  for (int i = 2; i <= n; ++i) {
    StageTiming st;
    st.harmonic = i;

    auto t0 = std::chrono::steady_clock::now();
    const VoxelGrid& grid = plan.for_harmonic(i).grid;
    st.voxels = grid.count();
    st.meshing_s = seconds_since(t0);

    // Bring p1 ... p_{i-1} onto this grid.
    t0 = std::chrono::steady_clock::now();
    std::vector<HarmonicField> lower;
    lower.reserve(i - 1);
    for (int m = 1; m <= i - 1; ++m) {
      const HarmonicField& pm = result.harmonics[m - 1];
      if (same_grid(pm.grid, grid)) {
        lower.push_back(pm);
      } else if (m == 1 && config.recompute_p1_each_grid) {
        lower.push_back(evaluate_first_harmonic(config.transducer, config.medium, grid,
                                                result.source_normalization));
      } else {
        lower.push_back(interpolate(pm, grid));
      }
    }
    st.interpolation_s = seconds_since(t0);

    const Wavenumber ki = complex_wavenumber(config.medium, config.transducer.f0, i);
    Eigen::VectorXcd f = rhs_source(i, lower, config.medium, ki.omega);
    lower.clear();

    t0 = std::chrono::steady_clock::now();
    GreenKernel kernel(grid, ki, config.pad_small_primes);
    st.kernel_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    HarmonicField pi;
    pi.grid = grid;
    pi.wavenumber = ki;
    pi.values = -kernel.apply(f);  // leading minus of the volume potential
    st.potential_s = seconds_since(t0);

    result.harmonics.push_back(std::move(pi));
    result.timings.push_back(st);
  }
  return result;
}

MeshPlan plan_single_mesh(const BowlTransducer& transducer, const Medium& medium,
                          double d, int n_w, int n_harmonics, double width_scale) {
  MeshPlan plan = plan_nested_meshes(transducer, medium, d, n_w, n_harmonics, width_scale);
  for (auto& pg : plan.grids) {
    pg.domain = plan.grids.front().domain;
    pg.grid = plan.reference;
    pg.grid.harmonic = pg.harmonic;
  }
  return plan;
}

}  // namespace fus
