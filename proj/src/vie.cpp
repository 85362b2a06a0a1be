#include "fus/vie.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fus/io.hpp"

namespace fus {

Eigen::VectorXcd MediumMap::wavenumber_contrast(double f0, int n) const {
  const Wavenumber kbar = complex_wavenumber(background, f0, n);
  Eigen::VectorXcd out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c[i] == background.c0) {
      out[i] = 0.0;
    } else {
      const std::complex<double> k(n * kbar.omega / c[i], kbar.k.imag());
      out[i] = k * k - kbar.k * kbar.k;
    }
  }
  return out;
}

std::vector<std::size_t> MediumMap::contrast_support(double tol) const {
  std::vector<std::size_t> support;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (std::abs(c[i] - background.c0) > tol || std::abs(beta[i] - background.beta) > tol)
      support.push_back(std::size_t(i));
  return support;
}

bool MediumMap::is_homogeneous() const { return contrast_support().empty(); }

MediumMap MediumMap::resample(const VoxelGrid& target) const {
  // Pack (c, beta) as one complex field so a single trilinear pass
  // resamples both.
  HarmonicField packed;
  packed.grid = grid;
  packed.values.resize(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) packed.values[i] = {c[i], beta[i]};
  const HarmonicField res = interpolate(packed, target);

  MediumMap out;
  out.grid = target;
  out.background = background;
  out.c.resize(res.values.size());
  out.beta.resize(res.values.size());
  for (Eigen::Index i = 0; i < res.values.size(); ++i) {
    out.c[i] = res.values[i].real();
    out.beta[i] = res.values[i].imag();
  }
  return out;
}

MediumMap homogeneous_map(const VoxelGrid& grid, const Medium& background) {
  MediumMap m;
  m.grid = grid;
  m.background = background;
  m.c = Eigen::VectorXd::Constant(grid.count(), background.c0);
  m.beta = Eigen::VectorXd::Constant(grid.count(), background.beta);
  return m;
}

MediumMap slab_map(const VoxelGrid& grid, const Medium& background, const Medium& inclusion,
                   double x_center, double thickness) {
  MediumMap m = homogeneous_map(grid, background);
  const double x0 = x_center - thickness / 2.0, x1 = x_center + thickness / 2.0;
  for (int iz = 0; iz < grid.dims.z(); ++iz)
    for (int iy = 0; iy < grid.dims.y(); ++iy)
      for (int ix = 0; ix < grid.dims.x(); ++ix) {
        const double x = grid.center(ix, iy, iz).x();
        if (x >= x0 && x <= x1) {
          const std::size_t idx = grid.index(ix, iy, iz);
          m.c[idx] = inclusion.c0;
          m.beta[idx] = inclusion.beta;
        }
      }
  return m;
}

MediumMap load_medium_map(const std::string& header_path, const Medium& background) {
  const auto kv = parse_key_value_file(header_path);
  VoxelGrid g;
  g.dims = {int(require_double(kv, "nx", header_path)), int(require_double(kv, "ny", header_path)),
            int(require_double(kv, "nz", header_path))};
  g.dx = require_double(kv, "dx", header_path);
  g.box.lo = {require_double(kv, "origin_x", header_path),
              require_double(kv, "origin_y", header_path),
              require_double(kv, "origin_z", header_path)};
  g.box.hi = g.box.lo + g.dims.cast<double>() * g.dx;

  const std::string raster =
      (std::filesystem::path(header_path).parent_path() / require_string(kv, "raster", header_path))
          .string();
  std::ifstream in(raster, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open medium-map raster '" + raster + "'");

  MediumMap m;
  m.grid = g;
  m.background = background;
  m.c.resize(g.count());
  m.beta.resize(g.count());
  for (std::size_t i = 0; i < g.count(); ++i) {
    double pair[2];
    in.read(reinterpret_cast<char*>(pair), sizeof(pair));
    if (!in) throw std::runtime_error("medium-map raster '" + raster + "' is truncated");
    m.c[i] = pair[0];
    m.beta[i] = pair[1];
  }
  return m;
}

void write_medium_map(const std::string& header_path, const std::string& raster_path,
                      const MediumMap& map) {
  {
    std::ofstream hdr(header_path);
    if (!hdr) throw std::runtime_error("cannot write '" + header_path + "'");
    hdr << "nx = " << map.grid.dims.x() << "\nny = " << map.grid.dims.y()
        << "\nnz = " << map.grid.dims.z() << "\ndx = " << map.grid.dx
        << "\norigin_x = " << map.grid.box.lo.x() << "\norigin_y = " << map.grid.box.lo.y()
        << "\norigin_z = " << map.grid.box.lo.z() << "\nraster = "
        << std::filesystem::path(raster_path).filename().string() << "\n";
  }
  std::ofstream out(raster_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + raster_path + "'");
  for (Eigen::Index i = 0; i < map.c.size(); ++i) {
    const double pair[2] = {map.c[i], map.beta[i]};
    out.write(reinterpret_cast<const char*>(pair), sizeof(pair));
  }
}

Eigen::VectorXcd vie_operator_apply(const Eigen::VectorXcd& field,
                                    const Eigen::VectorXcd& contrast,
                                    const GreenKernel& kernel) {
  if (field.size() != contrast.size() || field.size() != Eigen::Index(kernel.grid().count()))
    throw std::invalid_argument("vie_operator_apply: grid mismatch");
  return field - kernel.apply((contrast.array() * field.array()).matrix());
}

VieSolution gmres(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
                  const Eigen::VectorXcd& rhs, double tol, int max_iter, int restart) {
  if (tol <= 0.0) throw std::invalid_argument("gmres: tol must be positive");
  const double rhs_norm = rhs.norm();

  VieSolution sol;
  sol.field = Eigen::VectorXcd::Zero(rhs.size());
  if (rhs_norm == 0.0) return sol;

  using Cplx = std::complex<double>;
  int total_iters = 0;

  while (true) {
    Eigen::VectorXcd r = rhs - op(sol.field);
    double beta = r.norm();
    double rel = beta / rhs_norm;
    if (sol.residual_history.empty()) sol.residual_history.push_back(rel);
    if (rel <= tol) {
      sol.iterations = total_iters;
      return sol;
    }
    if (total_iters >= max_iter)
      throw ConvergenceError("gmres: no convergence within " + std::to_string(max_iter) +
                                 " iterations (residual " + std::to_string(rel) + ")",
                             sol.residual_history);

    const int m = restart;
    std::vector<Eigen::VectorXcd> v;
    v.reserve(m + 1);
    v.push_back(r / beta);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
    g[0] = beta;
    std::vector<Cplx> cs(m);
    std::vector<Cplx> sn(m);

    int k = 0;
    for (; k < m && total_iters < max_iter; ++k, ++total_iters) {
      // Arnoldi with modified Gram-Schmidt.
      Eigen::VectorXcd w = op(v[k]);
      for (int j = 0; j <= k; ++j) {
        h(j, k) = v[j].dot(w);
        w -= h(j, k) * v[j];
      }
      h(k + 1, k) = w.norm();

      // Apply previous Givens rotations to the new column.
      for (int j = 0; j < k; ++j) {
        const Cplx tmp = std::conj(cs[j]) * h(j, k) + std::conj(sn[j]) * h(j + 1, k);
        h(j + 1, k) = -sn[j] * h(j, k) + cs[j] * h(j + 1, k);
        h(j, k) = tmp;
      }
      // New rotation annihilating h(k+1, k).
      const double denom = std::sqrt(std::norm(h(k, k)) + std::norm(h(k + 1, k)));
      if (denom == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else {
        cs[k] = h(k, k) / denom;
        sn[k] = h(k + 1, k) / denom;
      }
      h(k, k) = std::conj(cs[k]) * h(k, k) + std::conj(sn[k]) * h(k + 1, k);
      h(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];

      rel = std::abs(g[k + 1]) / rhs_norm;
      sol.residual_history.push_back(rel);

      if (rel <= tol) {
        ++k;
        break;
      }
      const double wnorm = w.norm();
      if (wnorm == 0.0) {
        ++k;
        break;  // invariant subspace reached
      }
      v.push_back(w / wnorm);
    }

    // Back-substitute y and update x.
    Eigen::VectorXcd y(k);
    for (int i = k - 1; i >= 0; --i) {
      Cplx s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
      y[i] = s / h(i, i);
    }
    for (int i = 0; i < k; ++i) sol.field += y[i] * v[i];

    if (rel <= tol) {
      sol.iterations = total_iters;
      return sol;
    }
  }
}

VieSolution solve_vie(const Eigen::VectorXcd& rhs, const Eigen::VectorXcd& contrast,
                      const GreenKernel& kernel, double tol, int max_iter, int restart) {
  auto op = [&](const Eigen::VectorXcd& p) { return vie_operator_apply(p, contrast, kernel); };
  return gmres(op, rhs, tol, max_iter, restart);
}

CascadeResult run_cascade_inhomogeneous(const CascadeConfig& config, const MediumMap& master_map,
                                        const VieConfig& vie) {
  const auto& plan = config.plan;
  const int n = config.n_harmonics;
  if (n < 1) throw std::invalid_argument("run_cascade_inhomogeneous: n_harmonics must be >= 1");
  const Medium& bg = master_map.background;
  const double f0 = config.transducer.f0;

  CascadeResult result;

  // Incident field and the first-harmonic scattering solve on the D_2 grid.
  const VoxelGrid& grid2 = plan.for_harmonic(2).grid;
  SourceField inc = evaluate_source_field(config.transducer, bg, grid2);
  result.source_normalization = inc.normalization;

  MediumMap map2 = master_map.resample(grid2);
  const Eigen::VectorXcd contrast1 = map2.wavenumber_contrast(f0, 1);
  HarmonicField p1;
  p1.grid = grid2;
  p1.wavenumber = inc.field.wavenumber;
  if (contrast1.isZero(0.0)) {
    p1.values = inc.field.values;
  } else {
    GreenKernel kernel1(grid2, complex_wavenumber(bg, f0, 1), config.pad_small_primes);
    p1.values =
        solve_vie(inc.field.values, contrast1, kernel1, vie.tol, vie.max_iter, vie.restart).field;
  }
  result.harmonics.push_back(std::move(p1));

  for (int i = 2; i <= n; ++i) {
    StageTiming st;
    st.harmonic = i;
    const VoxelGrid& grid = plan.for_harmonic(i).grid;
    st.voxels = grid.count();

    std::vector<HarmonicField> lower;
    lower.reserve(i - 1);
    for (int m = 1; m <= i - 1; ++m) {
      const HarmonicField& pm = result.harmonics[m - 1];
      lower.push_back(pm.grid.dims == grid.dims && pm.grid.box.lo == grid.box.lo ? pm
                                                                                 : interpolate(pm, grid));
    }

    const MediumMap map_i = (i == 2) ? std::move(map2) : master_map.resample(grid);
    const Wavenumber ki = complex_wavenumber(bg, f0, i);

    // Quadratic products without the material prefactor; the spatially
    // varying coefficient multiplies pointwise after the convolution.
    Eigen::VectorXcd products = Eigen::VectorXcd::Zero(grid.count());
    for (int m = 1; m <= i - 1; ++m)
      products.array() += lower[m - 1].values.array() * lower[i - m - 1].values.array();
    lower.clear();

    GreenKernel kernel(grid, ki, config.pad_small_primes);
    Eigen::VectorXcd conv = kernel.apply(products);
    products.resize(0);

    const double n2 = double(i) * double(i);
    Eigen::VectorXcd rhs(grid.count());
    for (Eigen::Index j = 0; j < rhs.size(); ++j) {
      const double coeff = map_i.beta[j] * ki.omega * ki.omega * n2 /
                           (2.0 * bg.rho0 * std::pow(map_i.c[j], 4));
      rhs[j] = -coeff * conv[j];
    }
    conv.resize(0);

    const Eigen::VectorXcd contrast = map_i.wavenumber_contrast(f0, i);
    HarmonicField pi;
    pi.grid = grid;
    pi.wavenumber = ki;
    if (contrast.isZero(0.0)) {
      pi.values = std::move(rhs);
    } else {
      pi.values = solve_vie(rhs, contrast, kernel, vie.tol, vie.max_iter, vie.restart).field;
    }
    result.harmonics.push_back(std::move(pi));
    result.timings.push_back(st);
  }
  return result;
}

}  // namespace fus
