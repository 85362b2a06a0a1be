#include "fus/grid.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fus/transducer.hpp"

namespace fus {

VoxelGrid make_grid(const DomainBox& request, double dx, int harmonic,
                    const std::optional<Eigen::Vector3d>& anchor) {
  if (dx <= 0.0) throw std::invalid_argument("make_grid: dx must be positive");
  if ((request.extent().array() <= 0.0).any())
    throw std::invalid_argument("make_grid: degenerate domain box");

  VoxelGrid g;
  g.dx = dx;
  g.harmonic = harmonic;
  for (int a = 0; a < 3; ++a) {
    double lo = request.lo[a];
    if (anchor) {
      // Shift lo down by < dx so the anchor is a voxel centre.
      const double m = std::ceil((anchor.value()[a] - lo) / dx - 0.5 - 1e-12);
      lo = anchor.value()[a] - (m + 0.5) * dx;
    }
    const int n = std::max(1, int(std::ceil((request.hi[a] - lo) / dx - 1e-9)));
    g.box.lo[a] = lo;
    g.box.hi[a] = lo + n * dx;
    g.dims[a] = n;
  }
  return g;
}

const PlannedGrid& MeshPlan::for_harmonic(int n) const {
  for (const auto& pg : grids)
    if (pg.harmonic == n) return pg;
  throw std::out_of_range("MeshPlan: no grid planned for harmonic " + std::to_string(n));
}

double MeshPlan::reduction_factor(int n) const {
  return double(reference.count()) / double(for_harmonic(n).grid.count());
}

std::string MeshPlan::report() const {
  std::ostringstream os;
  auto mem_gib = [](std::size_t n) { return 16.0 * double(n) / (1024.0 * 1024.0 * 1024.0); };
  os << "nested mesh plan (n_w = " << n_w << ", d = " << d * 1e3 << " mm, w = " << w * 1e3
     << " mm)\n";
  os << "  reference mesh (harmonic " << reference.harmonic << "): " << reference.dims.x() << " x "
     << reference.dims.y() << " x " << reference.dims.z() << " = " << double(reference.count())
     << " voxels, dx = " << reference.dx * 1e6 << " um, " << mem_gib(reference.count())
     << " GiB/field\n";
  std::size_t total = 0;
  for (const auto& pg : grids) {
    total += pg.grid.count();
    os << "  p" << pg.harmonic << ": " << pg.grid.dims.x() << " x " << pg.grid.dims.y() << " x "
       << pg.grid.dims.z() << " = " << double(pg.grid.count())
       << " voxels, dx = " << pg.grid.dx * 1e6 << " um, " << mem_gib(pg.grid.count())
       << " GiB/field, reduction " << reduction_factor(pg.harmonic) << "x\n";
  }
  const double single = double(reference.count()) * double(grids.size());
  os << "  total nested voxels: " << double(total) << " (vs " << single
     << " with all harmonics on the reference mesh, reduction " << single / double(total)
     << "x)\n";
  return os.str();
}

DomainBox reference_domain(const BowlTransducer& transducer, double d) {
  if (d < 0.0) throw std::invalid_argument("reference_domain: d must be >= 0");
  const double l = transducer.focal_length;
  const double R = transducer.outer_radius;
  const double L = std::sqrt(l * l - R * R) - 0.1e-3;
  DomainBox box;
  box.lo = {l - L, -R, -R};
  box.hi = {l + d, R, R};
  return box;
}

MeshPlan plan_nested_meshes(const BowlTransducer& transducer, const Medium& medium,
                            double d, int n_w, int n_harmonics, double width_scale) {
  if (n_harmonics < 2) throw std::invalid_argument("plan_nested_meshes: need n_harmonics >= 2");
  if (n_w < 1) throw std::invalid_argument("plan_nested_meshes: need n_w >= 1");

  const double lambda1 = medium.c0 / transducer.f0;
  const Eigen::Vector3d focus = transducer.focus();

  MeshPlan plan;
  plan.d = d;
  plan.n_w = n_w;
  plan.focus = focus;

  const DomainBox ref = reference_domain(transducer, d);
  const double L = focus.x() - ref.lo.x();
  plan.w = 2.0 * transducer.outer_radius * width_scale;

  DomainBox d2;
  d2.lo = {focus.x() - L, -plan.w / 2.0, -plan.w / 2.0};
  d2.hi = {focus.x() + d, plan.w / 2.0, plan.w / 2.0};

  plan.reference = make_grid(d2, lambda1 / (n_harmonics * n_w), n_harmonics, focus);

  for (int i = 2; i <= n_harmonics; ++i) {
    const double s = 2.0 / double(i);  // lambda_i / lambda_2
    DomainBox di;
    di.lo = {focus.x() - s * L, -s * plan.w / 2.0, -s * plan.w / 2.0};
    di.hi = {focus.x() + d, s * plan.w / 2.0, s * plan.w / 2.0};
    plan.grids.push_back({i, di, make_grid(di, lambda1 / (i * n_w), i, focus)});
  }
  return plan;
}

DomainBox shrink_domain_by_threshold(const HarmonicField& f, double q0) {
  const VoxelGrid& g = f.grid;
  const double max_abs = f.values.cwiseAbs().maxCoeff();
  if (max_abs <= 0.0)
    throw std::invalid_argument("shrink_domain_by_threshold: field is identically zero");

  // q0 >= 0 keeps only the max-magnitude voxel.
  const double threshold = (q0 >= 0.0) ? max_abs : max_abs * std::pow(10.0, q0);

  Eigen::Vector3i lo = g.dims, hi = {-1, -1, -1};
  for (int iz = 0; iz < g.dims.z(); ++iz)
    for (int iy = 0; iy < g.dims.y(); ++iy)
      for (int ix = 0; ix < g.dims.x(); ++ix) {
        if (std::abs(f.values[g.index(ix, iy, iz)]) >= threshold) {
          lo = lo.cwiseMin(Eigen::Vector3i{ix, iy, iz});
          hi = hi.cwiseMax(Eigen::Vector3i{ix, iy, iz});
        }
      }

  DomainBox box;
  for (int a = 0; a < 3; ++a) {
    box.lo[a] = g.box.lo[a] + lo[a] * g.dx;
    box.hi[a] = g.box.lo[a] + (hi[a] + 1) * g.dx;
  }
  return box;
}

HarmonicField interpolate(const HarmonicField& field, const VoxelGrid& target) {
  const VoxelGrid& src = field.grid;
  if (field.values.size() != Eigen::Index(src.count()))
    throw std::invalid_argument("interpolate: field size does not match its grid");

  for (int a = 0; a < 3; ++a) {
    if (target.box.lo[a] < src.box.lo[a] - src.dx || target.box.hi[a] > src.box.hi[a] + src.dx)
      throw std::invalid_argument(
          "interpolate: target extends more than one source voxel beyond the source domain");
  }

  HarmonicField out;
  out.grid = target;
  out.wavenumber = field.wavenumber;
  out.values.resize(target.count());

  const Eigen::Vector3i n = src.dims;
  auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };

#pragma omp parallel for collapse(2) schedule(static)
  for (int iz = 0; iz < target.dims.z(); ++iz)
    for (int iy = 0; iy < target.dims.y(); ++iy) {
      for (int ix = 0; ix < target.dims.x(); ++ix) {
        const Eigen::Vector3d p = target.center(ix, iy, iz);
        int i0[3];
        double t[3];
        for (int a = 0; a < 3; ++a) {
          const double q = (p[a] - src.box.lo[a]) / src.dx - 0.5;
          int base = int(std::floor(q));
          base = clampi(base, 0, std::max(0, n[a] - 2));
          double frac = q - base;
          // Clamp: points marginally outside the sample lattice take the
          // face value.
          if (frac < 0.0) frac = 0.0;
          if (frac > 1.0) frac = n[a] > 1 ? 1.0 : 0.0;
          i0[a] = base;
          t[a] = frac;
        }
        std::complex<double> acc = 0.0;
        for (int cz = 0; cz < 2; ++cz)
          for (int cy = 0; cy < 2; ++cy)
            for (int cx = 0; cx < 2; ++cx) {
              const double wgt = (cx ? t[0] : 1.0 - t[0]) * (cy ? t[1] : 1.0 - t[1]) *
                                 (cz ? t[2] : 1.0 - t[2]);
              if (wgt == 0.0) continue;
              const int jx = clampi(i0[0] + cx, 0, n[0] - 1);
              const int jy = clampi(i0[1] + cy, 0, n[1] - 1);
              const int jz = clampi(i0[2] + cz, 0, n[2] - 1);
              acc += wgt * field.values[src.index(jx, jy, jz)];
            }
        out.values[target.index(ix, iy, iz)] = acc;
      }
    }
  return out;
}

}  // namespace fus
