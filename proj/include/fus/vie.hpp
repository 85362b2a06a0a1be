#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "fus/cascade.hpp"
#include "fus/grid.hpp"
#include "fus/medium.hpp"
#include "fus/potential.hpp"

namespace fus {

/// Spatially varying sound speed and nonlinearity over a voxel grid,
/// against a homogeneous background. Density is assumed constant
/// (rho(x) ~ rho0); attenuation follows the background power law.
struct MediumMap {
  VoxelGrid grid;
  Eigen::VectorXd c;     // per-voxel sound speed, m/s
  Eigen::VectorXd beta;  // per-voxel nonlinearity
  Medium background;

  // k_n(x)^2 - kbar_n^2 at every voxel; zero where the map equals the
  // background.
  Eigen::VectorXcd wavenumber_contrast(double f0, int n) const;
  // Indices of voxels whose wavenumber differs from the background.
  std::vector<std::size_t> contrast_support(double tol = 0.0) const;
  bool is_homogeneous() const;

  // Resample (trilinear) onto another grid.
  MediumMap resample(const VoxelGrid& target) const;
};

// Uniform background map.
MediumMap homogeneous_map(const VoxelGrid& grid, const Medium& background);

// Axis-normal slab of `inclusion` material centred at x = x_center with
// the given thickness; background elsewhere.
MediumMap slab_map(const VoxelGrid& grid, const Medium& background, const Medium& inclusion,
                   double x_center, double thickness);

// Raster ingestion: little-endian (c, beta) double pairs in x-fastest
// order, described by a key=value sidecar header (dims, spacing, origin).
MediumMap load_medium_map(const std::string& header_path, const Medium& background);
void write_medium_map(const std::string& header_path, const std::string& raster_path,
                      const MediumMap& map);

// Left-hand side of the VIEs: p - V_kbar[(k^2(x) - kbar^2) p].
Eigen::VectorXcd vie_operator_apply(const Eigen::VectorXcd& field,
                                    const Eigen::VectorXcd& contrast,
                                    const GreenKernel& kernel);

struct VieSolution {
  Eigen::VectorXcd field;
  std::vector<double> residual_history;  // relative residual per iteration
  int iterations = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

// Restarted GMRES on a matrix-free operator; relative residual tolerance.
VieSolution gmres(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
                  const Eigen::VectorXcd& rhs, double tol, int max_iter, int restart = 30);

// Solves (I - V_kbar[(k^2 - kbar^2) . ]) p = rhs. Throws ConvergenceError
// (carrying the residual history) on non-convergence.
VieSolution solve_vie(const Eigen::VectorXcd& rhs, const Eigen::VectorXcd& contrast,
                      const GreenKernel& kernel, double tol = 1e-6, int max_iter = 200,
                      int restart = 30);

struct VieConfig {
  double tol = 1e-6;
  int max_iter = 200;
  int restart = 30;
};

// Inhomogeneous-medium cascade: p1 solves the scattering VIE with the
// transducer field as right-hand side; higher harmonics solve VIEs whose
// right-hand sides are -beta(x) omega^2 n^2/(2 rho0 c(x)^4) times the
// convolved quadratic products (the spatially varying prefactor
// multiplies pointwise outside the integral).
CascadeResult run_cascade_inhomogeneous(const CascadeConfig& config, const MediumMap& master_map,
                                        const VieConfig& vie = {});

}  // namespace fus
