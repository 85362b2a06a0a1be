#include "fus/potential.hpp"

#include <fftw3.h>

#include <climits>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace fus {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void fft3_inplace(Eigen::VectorXcd& data, const Eigen::Vector3i& dims, int sign) {
  fftw_complex* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    // x fastest in memory -> x is FFTW's last dimension.
    plan = fftw_plan_dft_3d(dims.z(), dims.y(), dims.x(), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fftw plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

int next_fast_size(int n) {
  for (;; ++n) {
    int m = n;
    for (int p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

}  // namespace

std::complex<double> green_function(const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                                    const Wavenumber& k) {
  const double r = (x - y).norm();
  if (r < 1e-300) throw std::invalid_argument("green_function: singular at x == y");
  const double mag = std::exp(-k.k.imag() * r) / (4.0 * M_PI * r);
  return std::polar(mag, k.k.real() * r);
}

double equivalent_sphere_radius(double delta_x) {
  return delta_x * std::cbrt(3.0 / (4.0 * M_PI));
}

std::complex<double> self_weight(const Wavenumber& k, double delta_x) {
  if (delta_x <= 0.0) throw std::invalid_argument("self_weight: delta_x must be positive");
  const double a = equivalent_sphere_radius(delta_x);
  const std::complex<double> ka = k.k * a;
  if (std::abs(ka) < 1e-3) {
    // Series of (1/k^2)(e^{ika}(1-ika) - 1); exact limit a^2/2 at k = 0.
    return a * a / 2.0 + std::complex<double>(0.0, 1.0) * k.k * (a * a * a) / 3.0 -
           k.k * k.k * (a * a * a * a) / 8.0;
  }
  const std::complex<double> i(0.0, 1.0);
  return (std::exp(i * ka) * (1.0 - i * ka) - 1.0) / (k.k * k.k);
}

GreenKernel::GreenKernel(const VoxelGrid& grid, const Wavenumber& k, bool pad_small_primes)
    : grid_(grid), k_(k) {
  for (int a = 0; a < 3; ++a) {
    const int p = 2 * grid.dims[a];
    padded_[a] = pad_small_primes ? next_fast_size(p) : p;
  }

  const std::size_t total = std::size_t(padded_.x()) * padded_.y() * padded_.z();
  kernel_hat_.setZero(total);

  const double dx = grid.dx;
  const double vol = dx * dx * dx;
  const std::complex<double> self = self_weight(k, dx);
  const Eigen::Vector3i n = grid.dims;
  const Eigen::Vector3i p = padded_;

  auto offset_of = [](int m, int count, int padded) -> int {
    // Wrapped signed offset; indices covering neither [0, N) nor (-N, 0)
    // are never touched by the truncated convolution.
    if (m < count) return m;
    if (m > padded - count) return m - padded;
    return INT_MIN;
  };

#pragma omp parallel for collapse(2) schedule(static)
  for (int iz = 0; iz < p.z(); ++iz)
    for (int iy = 0; iy < p.y(); ++iy) {
      const int oz = offset_of(iz, n.z(), p.z());
      const int oy = offset_of(iy, n.y(), p.y());
      if (oz == INT_MIN || oy == INT_MIN) continue;
      for (int ix = 0; ix < p.x(); ++ix) {
        const int ox = offset_of(ix, n.x(), p.x());
        if (ox == INT_MIN) continue;
        const std::size_t idx =
            std::size_t(ix) + std::size_t(p.x()) * (std::size_t(iy) + std::size_t(p.y()) * iz);
        if (ox == 0 && oy == 0 && oz == 0) {
          kernel_hat_[idx] = self;
        } else {
          const double r = dx * std::sqrt(double(ox) * ox + double(oy) * oy + double(oz) * oz);
          const double mag = std::exp(-k.k.imag() * r) / (4.0 * M_PI * r);
          kernel_hat_[idx] = vol * std::polar(mag, k.k.real() * r);
        }
      }
    }

  fft3_inplace(kernel_hat_, padded_, FFTW_FORWARD);
}

Eigen::VectorXcd GreenKernel::apply(const Eigen::VectorXcd& f) const {
  if (f.size() != Eigen::Index(grid_.count()))
    throw std::invalid_argument("GreenKernel::apply: field size does not match kernel grid");

  const Eigen::Vector3i n = grid_.dims;
  const Eigen::Vector3i p = padded_;
  const std::size_t total = std::size_t(p.x()) * p.y() * p.z();

  Eigen::VectorXcd work;
  work.setZero(total);
#pragma omp parallel for collapse(2) schedule(static)
  for (int iz = 0; iz < n.z(); ++iz)
    for (int iy = 0; iy < n.y(); ++iy)
      for (int ix = 0; ix < n.x(); ++ix)
        work[std::size_t(ix) + std::size_t(p.x()) * (std::size_t(iy) + std::size_t(p.y()) * iz)] =
            f[grid_.index(ix, iy, iz)];

  Eigen::Vector3i dims = p;
  fft3_inplace(work, dims, FFTW_FORWARD);
  work.array() *= kernel_hat_.array();
  fft3_inplace(work, dims, FFTW_BACKWARD);
  work /= double(total);  // FFTW transforms are unnormalised

  Eigen::VectorXcd out(grid_.count());
#pragma omp parallel for collapse(2) schedule(static)
  for (int iz = 0; iz < n.z(); ++iz)
    for (int iy = 0; iy < n.y(); ++iy)
      for (int ix = 0; ix < n.x(); ++ix)
        out[grid_.index(ix, iy, iz)] =
            work[std::size_t(ix) + std::size_t(p.x()) * (std::size_t(iy) + std::size_t(p.y()) * iz)];
  return out;
}

HarmonicField GreenKernel::apply(const HarmonicField& f) const {
  HarmonicField out;
  out.grid = grid_;
  out.wavenumber = k_;
  out.values = apply(f.values);
  return out;
}

Eigen::VectorXcd evaluate_potential_at(const Wavenumber& k, const VoxelGrid& grid,
                                       const Eigen::VectorXcd& f,
                                       const std::vector<Eigen::Vector3d>& points) {
  if (f.size() != Eigen::Index(grid.count()))
    throw std::invalid_argument("evaluate_potential_at: field size mismatch");

  const double dx = grid.dx;
  const double vol = dx * dx * dx;
  const std::complex<double> self = self_weight(k, dx);
  const int nx = grid.dims.x(), ny = grid.dims.y(), nz = grid.dims.z();
  const double coincident = 1e-9 * dx;

  Eigen::VectorXcd out(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pi = 0; pi < std::ptrdiff_t(points.size()); ++pi) {
    const Eigen::Vector3d& x = points[std::size_t(pi)];
    std::complex<double> acc = 0.0;
    for (int jz = 0; jz < nz; ++jz)
      for (int jy = 0; jy < ny; ++jy) {
        // hoist the fixed y/z part of the squared distance
        const double cy = grid.box.lo.y() + (jy + 0.5) * dx - x.y();
        const double cz = grid.box.lo.z() + (jz + 0.5) * dx - x.z();
        const double ryz2 = cy * cy + cz * cz;
        const std::size_t row = grid.index(0, jy, jz);
        for (int jx = 0; jx < nx; ++jx) {
          const std::complex<double> fj = f[row + jx];
          if (fj == std::complex<double>(0.0, 0.0)) continue;
          const double cx = grid.box.lo.x() + (jx + 0.5) * dx - x.x();
          const double r = std::sqrt(cx * cx + ryz2);
          if (r < coincident) {
            acc += self * fj;
          } else {
            const double mag = std::exp(-k.k.imag() * r) / (4.0 * M_PI * r);
            acc += vol * std::polar(mag, k.k.real() * r) * fj;
          }
        }
      }
    out[pi] = acc;
  }
  return out;
}

Eigen::VectorXcd direct_potential_oracle(const Wavenumber& k, const VoxelGrid& grid,
                                         const Eigen::VectorXcd& f) {
  if (grid.count() > 100000)
    throw std::invalid_argument("direct_potential_oracle: grid exceeds the 1e5 voxel guard");
  if (f.size() != Eigen::Index(grid.count()))
    throw std::invalid_argument("direct_potential_oracle: field size mismatch");

  const double dx = grid.dx;
  const double vol = dx * dx * dx;
  const std::complex<double> self = self_weight(k, dx);
  const int nx = grid.dims.x(), ny = grid.dims.y(), nz = grid.dims.z();

  Eigen::VectorXcd out(grid.count());
#pragma omp parallel for collapse(2) schedule(static)
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        std::complex<double> acc = 0.0;
        for (int jz = 0; jz < nz; ++jz)
          for (int jy = 0; jy < ny; ++jy)
            for (int jx = 0; jx < nx; ++jx) {
              const std::complex<double> fj = f[grid.index(jx, jy, jz)];
              if (ix == jx && iy == jy && iz == jz) {
                acc += self * fj;
              } else {
                const double r = dx * std::sqrt(double(ix - jx) * (ix - jx) +
                                                double(iy - jy) * (iy - jy) +
                                                double(iz - jz) * (iz - jz));
                const double mag = std::exp(-k.k.imag() * r) / (4.0 * M_PI * r);
                acc += vol * std::polar(mag, k.k.real() * r) * fj;
              }
            }
        out[grid.index(ix, iy, iz)] = acc;
      }
  return out;
}

}  // namespace fus
