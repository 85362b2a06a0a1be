#pragma once

#include <vector>

#include "fus/grid.hpp"
#include "fus/medium.hpp"
#include "fus/potential.hpp"
#include "fus/transducer.hpp"

namespace fus {

struct CascadeConfig {
  Medium medium;
  BowlTransducer transducer;
  MeshPlan plan;
  int n_harmonics = 5;
  // Re-evaluate the monopole sum on every grid instead of interpolating
  // p1 from the D_2 grid for harmonics above the second.
  bool recompute_p1_each_grid = false;
  bool pad_small_primes = false;
};

/// Wall-clock breakdown for one harmonic, mirroring the usual
/// performance-table columns.
struct StageTiming {
  int harmonic = 0;
  std::size_t voxels = 0;
  double meshing_s = 0.0;
  double interpolation_s = 0.0;  // includes the p1 evaluation for p2
  double kernel_s = 0.0;
  double potential_s = 0.0;
};

struct CascadeResult {
  std::vector<HarmonicField> harmonics;  // p1 ... p_n, each on its own grid
  std::vector<StageTiming> timings;      // rows for harmonics 2 ... n
  double source_normalization = 1.0;

  const HarmonicField& p(int n) const { return harmonics.at(n - 1); }
};

// Quadratic right-hand side of the harmonic-n Helmholtz equation:
// f_n(x) = (beta omega^2 n^2 / (2 rho0 c0^4)) * sum_{m=1}^{n-1} p_m p_{n-m}.
// `lower` holds p_1 ... p_{n-1}, all on the target grid.
Eigen::VectorXcd rhs_source(int n, const std::vector<HarmonicField>& lower,
                            const Medium& medium, double omega);

// Sequentially computes p_2 ... p_n on the planned grids:
// p_n = -apply_potential(kernel(k_n), f_n), with lower harmonics brought
// onto each grid by trilinear interpolation (p1 by direct evaluation on
// the D_2 grid). Emits a warning when the peak pressure exceeds the
// 15 MPa weakly-nonlinear bound.
CascadeResult run_cascade(const CascadeConfig& config);

// Degenerate plan that keeps every harmonic on the single fine reference
// mesh; the baseline the nested plan is measured against.
MeshPlan plan_single_mesh(const BowlTransducer& transducer, const Medium& medium,
                          double d, int n_w, int n_harmonics, double width_scale = 1.0);

}  // namespace fus
