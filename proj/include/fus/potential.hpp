#pragma once

#include <Eigen/Dense>
#include <complex>

#include "fus/grid.hpp"
#include "fus/medium.hpp"

namespace fus {

// Helmholtz free-space kernel e^{ik|x-y|} / (4 pi |x-y|). Throws when
// x == y (singular).
std::complex<double> green_function(const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                                    const Wavenumber& k);

// Self-interaction weight of the singular voxel: the kernel integrated
// over a sphere of equal volume, (1/k^2)(e^{ika}(1 - ika) - 1) with
// a = dx * (3/(4 pi))^{1/3}. Small |ka| switches to the series expansion;
// the k -> 0 limit is a^2/2.
std::complex<double> self_weight(const Wavenumber& k, double delta_x);

// Equal-volume sphere radius for a voxel of edge dx.
double equivalent_sphere_radius(double delta_x);

/// Circulant-embedded quadrature kernel for one (grid, wavenumber) pair.
/// Stores the forward DFT of the kernel tensor on the zero-padded
/// (2Nx, 2Ny, 2Nz) box, reusable across every apply() with that grid.
class GreenKernel {
 public:
  // pad_small_primes extends the padded box to sizes with prime factors
  // {2,3,5,7}, which is faster for awkward grid dimensions.
  GreenKernel(const VoxelGrid& grid, const Wavenumber& k, bool pad_small_primes = false);

  // u(x_i) = sum_j w(x_i, x_j) f(x_j): zero-padded FFT convolution with
  // the embedded kernel. f must live on the kernel's grid.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& f) const;

  HarmonicField apply(const HarmonicField& f) const;

  const VoxelGrid& grid() const { return grid_; }
  const Wavenumber& wavenumber() const { return k_; }

 private:
  VoxelGrid grid_;
  Wavenumber k_;
  Eigen::Vector3i padded_;
  Eigen::VectorXcd kernel_hat_;  // forward DFT of the embedded kernel
};

// Off-grid evaluation of the same quadrature: u(x) = sum_j w(x, x_j) f(x_j)
// with w = dx^3 G_k(x, x_j) for distinct points and the self weight when x
// coincides with a voxel centre. At grid nodes this reproduces apply()
// exactly; elsewhere it extends the potential representation to arbitrary
// targets (e.g. the reference mesh's axis nodes in convergence studies).
Eigen::VectorXcd evaluate_potential_at(const Wavenumber& k, const VoxelGrid& grid,
                                       const Eigen::VectorXcd& f,
                                       const std::vector<Eigen::Vector3d>& points);

// O(N^2) double-loop reference for the same quadrature; guarded to
// grids of at most 1e5 voxels.
Eigen::VectorXcd direct_potential_oracle(const Wavenumber& k, const VoxelGrid& grid,
                                         const Eigen::VectorXcd& f);

}  // namespace fus
