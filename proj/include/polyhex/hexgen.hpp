#pragma once

#include "polyhex/hex_mesh.hpp"
#include "polyhex/pathopt.hpp"

namespace polyhex {

/// Piecewise-linear map of one surface patch into its 2D lattice polygon.
struct PatchParam {
    std::vector<int> tri_ids;                 // mesh triangles in the patch
    std::map<int, Eigen::Vector2d> uv;        // mesh vertex -> 2D coords
    const TriMesh* mesh = nullptr;

    /// Surface point at a parameter-domain location: locate the containing
    /// triangle (1e-9 barycentric snap, else best fit) and interpolate.
    Vec3 sample(const Eigen::Vector2d& p) const;
};

/// Chord-length boundary map of a four-sided patch onto the unit square.
/// `segments` lists the bounding paths in order; consecutive segments must
/// chain end-to-start. Throws if the patch is not four-sided.
std::map<int, Eigen::Vector2d> map_patch_boundary(const TriMesh& mesh,
                                                  const std::vector<std::vector<int>>& segments);

/// Cotangent-weight harmonic extension of fixed boundary UVs over the patch
/// interior (weights clamped to >= 1e-6). A fold-over (non-positive UV
/// triangle area) triggers a uniform-weight retry; if that also folds, the
/// better of the two maps is kept when only a handful of triangles fold
/// (common on multiply-connected patches), otherwise "fold-over" is thrown.
PatchParam harmonic_uv(const TriMesh& mesh, const std::vector<int>& tri_ids,
                       const std::map<int, Eigen::Vector2d>& boundary_uv);

/// All-hex mesh over the polycube at octree level L: (#cubes) * 8^L
/// elements. Boundary vertices are sampled on the segmented surface through
/// per-face harmonic maps; internal-facet and interior vertices come from
/// transfinite interpolation of their boundary curves/faces. Vertices are
/// welded exactly through a shared integer lattice key.
HexMesh assemble_hex_mesh(const TriMesh& mesh, const Segmentation& seg,
                          const PolycubeStructure& pc, const PathSet& ps, int level);

}  // namespace polyhex
