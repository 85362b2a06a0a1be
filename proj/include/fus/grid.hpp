#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fus/medium.hpp"

namespace fus {

struct BowlTransducer;

/// Axis-aligned cuboid. The transducer axis is x; y/z ranges are
/// symmetric about the axis for the standard setups.
struct DomainBox {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;

  Eigen::Vector3d extent() const { return hi - lo; }
  bool contains(const Eigen::Vector3d& p, double tol = 0.0) const {
    return (p.array() >= lo.array() - tol).all() && (p.array() <= hi.array() + tol).all();
  }
  bool contains(const DomainBox& other, double tol = 0.0) const {
    return contains(other.lo, tol) && contains(other.hi, tol);
  }
};

/// Uniform voxel mesh. The grid covers the requested box; the covered
/// extent dims*dx may overhang the request by less than dx per axis.
struct VoxelGrid {
  DomainBox box;        // covered box: box.hi == box.lo + dims.cast<double>()*dx
  double dx = 0.0;      // voxel edge length, m
  Eigen::Vector3i dims; // voxel counts (Nx, Ny, Nz)
  int harmonic = 1;     // which harmonic this grid resolves

  std::size_t count() const {
    return std::size_t(dims.x()) * std::size_t(dims.y()) * std::size_t(dims.z());
  }
  // Linear index, x fastest.
  std::size_t index(int ix, int iy, int iz) const {
    return std::size_t(ix) + std::size_t(dims.x()) * (std::size_t(iy) + std::size_t(dims.y()) * iz);
  }
  Eigen::Vector3d center(int ix, int iy, int iz) const {
    return box.lo + Eigen::Vector3d((ix + 0.5) * dx, (iy + 0.5) * dx, (iz + 0.5) * dx);
  }
};

// Builds the smallest grid of spacing dx covering `request`
// (N = ceil(extent/dx) per axis). If `anchor` is given, the grid origin is
// shifted by less than dx so the anchor lands exactly on a voxel centre;
// coverage of `request` is preserved.
VoxelGrid make_grid(const DomainBox& request, double dx, int harmonic,
                    const std::optional<Eigen::Vector3d>& anchor = std::nullopt);

/// Complex pressure amplitude of one harmonic at voxel centres.
struct HarmonicField {
  VoxelGrid grid;
  Eigen::VectorXcd values;  // size grid.count(), x fastest
  Wavenumber wavenumber;
};

/// One entry of a nested-mesh plan.
struct PlannedGrid {
  int harmonic;
  DomainBox domain;
  VoxelGrid grid;
};

/// Nested domains D_2 \supseteq D_3 \supseteq ... sharing the focal point,
/// each discretised at the resolution of its own harmonic.
struct MeshPlan {
  std::vector<PlannedGrid> grids;   // ordered by harmonic index, starting at 2
  VoxelGrid reference;              // single fine mesh resolving the top harmonic
  double d = 0.0;                   // post-focal distance, m
  double w = 0.0;                   // base (D_2) width, m
  Eigen::Vector3d focus;
  int n_w = 0;

  const PlannedGrid& for_harmonic(int n) const;
  // Reference voxel count / voxel count of grid n.
  double reduction_factor(int n) const;
  std::string report() const;
};

// Reference computation domain D_2 = [l-L, l+d] x [-R, R]^2 with
// L = sqrt(l^2 - R^2) - 0.1 mm (standoff from the bowl rim).
DomainBox reference_domain(const BowlTransducer& transducer, double d);

// Nested-mesh planner. D_2 is the reference domain scaled transversely by
// `width_scale`; D_i for i > 2 has dimensions
// [(lambda_i/lambda_2)L + d, (lambda_i/lambda_2)w, (lambda_i/lambda_2)w],
// centred on the axis with the post-focal extent d preserved. Grid spacing
// is lambda_1/(i*n_w) for harmonic i. All grids share the focus as an
// exact voxel-centre anchor.
MeshPlan plan_nested_meshes(const BowlTransducer& transducer, const Medium& medium,
                            double d, int n_w, int n_harmonics,
                            double width_scale = 1.0);

// Tightest axis-aligned box (snapped to voxel boundaries) containing all
// voxels with log10(|f|/max|f|) >= q0. q0 >= 0 degenerates to the box of
// the max-magnitude voxel.
DomainBox shrink_domain_by_threshold(const HarmonicField& f, double q0);

// Trilinear interpolation onto the target grid's voxel centres, real and
// imaginary parts independently. Target centres within half a source
// voxel outside the source sample lattice are clamped; a target extending
// more than one source voxel beyond the source domain is an error.
HarmonicField interpolate(const HarmonicField& field, const VoxelGrid& target);

}  // namespace fus
