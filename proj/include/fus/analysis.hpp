#pragma once

#include <string>
#include <vector>

#include "fus/cascade.hpp"
#include "fus/grid.hpp"

namespace fus {

/// Field sampled along the transducer axis (y = z = 0).
struct OnAxisProfile {
  Eigen::VectorXd x;   // strictly increasing, m
  Eigen::VectorXcd p;  // Pa
  int harmonic = 1;
};

struct ConvergenceRecord {
  int harmonic;
  std::string control;  // "n_w", "Q0" or "fraction"
  double value;
  double error_percent;
};

// Samples the axis at the voxel centres nearest to y = z = 0; for grids
// that straddle the axis the two nearest columns enter with linear
// weights (an even symmetric grid averages them).
OnAxisProfile extract_on_axis(const HarmonicField& field);

// 100 * ||p - p_ref|| / ||normalizer||, midpoint-rule L2 norms with the
// reference nodes as quadrature points; p is resampled onto p_ref.x by
// linear interpolation.
double on_axis_error(const OnAxisProfile& p, const OnAxisProfile& p_ref,
                     const OnAxisProfile& normalizer);

// Q(x) = log10(|f(x)| / max|f|); zero voxels map to -infinity.
Eigen::VectorXd localisedness_map(const HarmonicField& f);

struct QuadratureStudy {
  std::vector<ConvergenceRecord> records;  // error per n_w
  double slope = 0.0;                      // log-log least-squares slope
};

// Second-harmonic quadrature convergence over a fixed domain: p2 is
// computed at each n_w, evaluated at the reference solution's axis nodes
// through the potential representation, and compared against the n_w_ref
// solution evaluated the same way at the same on-axis points
// (normalised by the reference p2). Grids are laid out from
// domain.lo without focus anchoring; pass a domain whose extents are
// multiples of all spacings in the sweep so every n_w integrates over
// the identical box.
QuadratureStudy quadrature_convergence_study(const BowlTransducer& transducer,
                                             const Medium& medium, const DomainBox& domain,
                                             const std::vector<int>& n_w_values, int n_w_ref);

// Full-domain plan: every harmonic keeps the D_2 domain but is meshed at
// its own resolution lambda_1/(i*n_w). Reference configuration for the
// domain-shrinking study.
MeshPlan plan_full_domain(const BowlTransducer& transducer, const Medium& medium, double d,
                          int n_w, int n_harmonics, double width_scale = 1.0);

// Domain-shrinking study per harmonic. For each level, each harmonic
// i >= 2 is recomputed on a reduced domain (lower harmonics interpolated
// from the reference run) and compared on-axis against the reference,
// normalised by ||p1_ref||. In fraction mode a level scales the
// pre-focal length and the width together; in Q0 mode the domain is the
// tightest box holding the harmonic's integrand above the threshold.
std::vector<ConvergenceRecord> domain_shrink_study(const CascadeConfig& reference_config,
                                                   const CascadeResult& reference,
                                                   const std::vector<double>& levels,
                                                   bool q0_mode);

// Diagnostic overlay of the empirical trend 10*(||p_i||/||p_1||)*sqrt(Q0);
// reported, never used for planning.
double error_trend_diagnostic(const OnAxisProfile& p_i, const OnAxisProfile& p1, double q0);

}  // namespace fus
