// Independent reference implementations used only by the tests. Each is
// derived separately from the production code paths it checks.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "fus/grid.hpp"
#include "fus/medium.hpp"
#include "fus/potential.hpp"
#include "fus/transducer.hpp"

namespace oracles {

// Closed-form on-axis field of a focused spherical cap (O'Neil-type):
// the continuum limit of the equal-area monopole layer,
//   I(x) = integral over the cap of e^{ikr}/(4 pi r) dS.
// With z = x - l, r_pole = |z + l| and r_rim = sqrt(z^2 + l^2 + 2 z l cos(theta_max)),
//   I = (l / 2z) * (e^{ik r_pole} - e^{ik r_rim}) / (ik),
// obtained by the substitution r dr = -z l sin(theta) d(theta).
inline std::complex<double> cap_on_axis(double focal_length, double outer_radius,
                                        std::complex<double> k, double x) {
  const double l = focal_length;
  const double cos_tm = std::sqrt(l * l - outer_radius * outer_radius) / l;
  const double z = x - l;
  const std::complex<double> I(0.0, 1.0);
  if (std::abs(z) < 1e-9 * l)  // removable singularity at the focus
    return 0.5 * l * (1.0 - cos_tm) * std::exp(I * k * l);
  const double r_pole = std::abs(z + l);
  const double r_rim = std::sqrt(z * z + l * l + 2.0 * z * l * cos_tm);
  return (l / (2.0 * z)) * (std::exp(I * k * r_pole) - std::exp(I * k * r_rim)) / (I * k);
}

// integral_0^a e^{ikr} r dr by composite Simpson; equals the kernel
// integrated over the equal-volume sphere (the self-voxel weight).
inline std::complex<double> self_weight_quadrature(std::complex<double> k, double a,
                                                   int n = 4000) {
  const std::complex<double> I(0.0, 1.0);
  auto f = [&](double r) { return std::exp(I * k * r) * r; };
  const double h = a / n;
  std::complex<double> s = f(0.0) + f(a);
  for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * f(j * h);
  return s * h / 3.0;
}

// Dense assembly of the quadrature matrix W (w_ij of the volume
// potential) for small grids.
inline Eigen::MatrixXcd dense_potential_matrix(const fus::Wavenumber& k,
                                               const fus::VoxelGrid& g) {
  const Eigen::Index n = Eigen::Index(g.count());
  Eigen::MatrixXcd W(n, n);
  const double vol = g.dx * g.dx * g.dx;
  const std::complex<double> diag = fus::self_weight(k, g.dx);
  std::vector<Eigen::Vector3d> x;
  for (int iz = 0; iz < g.dims.z(); ++iz)
    for (int iy = 0; iy < g.dims.y(); ++iy)
      for (int ix = 0; ix < g.dims.x(); ++ix) x.push_back(g.center(ix, iy, iz));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      W(i, j) = i == j ? diag : vol * fus::green_function(x[i], x[j], k);
  return W;
}

// Dense VIE operator I - W * diag(contrast).
inline Eigen::MatrixXcd dense_vie_matrix(const fus::Wavenumber& k, const fus::VoxelGrid& g,
                                         const Eigen::VectorXcd& contrast) {
  const Eigen::MatrixXcd W = dense_potential_matrix(k, g);
  return Eigen::MatrixXcd::Identity(W.rows(), W.cols()) - W * contrast.asDiagonal();
}

// First-order Born approximation for (I - W diag(chi)) p = rhs:
// p ~ rhs + W (chi .* rhs).
inline Eigen::VectorXcd born_first_order(const fus::GreenKernel& kernel,
                                         const Eigen::VectorXcd& contrast,
                                         const Eigen::VectorXcd& rhs) {
  return rhs + kernel.apply(Eigen::VectorXcd(contrast.cwiseProduct(rhs)));
}

}  // namespace oracles
