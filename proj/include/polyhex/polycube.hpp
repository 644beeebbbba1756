#pragma once

#include <Eigen/Dense>
#include <map>
#include <set>
#include <vector>

#include "polyhex/tri_mesh.hpp"

namespace polyhex {

using IVec3 = Eigen::Vector3i;

struct IVec3Less {
    bool operator()(const IVec3& a, const IVec3& b) const {
        return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    }
};

/// One of the six axis directions: +X -X +Y -Y +Z -Z.
struct AxisDir {
    int axis = 0;       // 0,1,2
    int sign = 1;       // +1 / -1
    Vec3 unit() const {
        Vec3 u = Vec3::Zero();
        u[axis] = sign;
        return u;
    }
    bool operator==(const AxisDir& o) const { return axis == o.axis && sign == o.sign; }
};

/// Unit lattice facet on the boundary: the square face of `cell` facing `dir`.
struct LatticeFacet {
    IVec3 cell;
    AxisDir dir;
    /// The 4 lattice corner points, CCW seen from outside.
    std::array<IVec3, 4> corner_points() const;
    /// Plane coordinate along dir.axis.
    int plane() const { return cell[dir.axis] + (dir.sign > 0 ? 1 : 0); }
};

/// Maximal connected same-label planar set of boundary facets (P_i).
struct PolycubeFace {
    int id = -1;
    AxisDir label;
    int plane = 0;
    std::vector<LatticeFacet> facets;
    /// Lattice centroid of the face (mean of facet centers).
    Vec3 lattice_centroid() const;
};

/// Unit internal facet (I_j): square between two stacked cells, normal along
/// `axis`, at plane lower_cell[axis]+1.
struct InternalFacet {
    IVec3 lower_cell;
    int axis = 0;
    std::array<IVec3, 4> corner_points() const;
};

/// Straight lattice segment between two polycube corners, shared by exactly
/// two boundary faces.
struct PolycubeEdge {
    int corner_a = -1, corner_b = -1;  // indices into corners
    std::vector<IVec3> points;         // lattice points from a to b inclusive
    std::array<int, 2> face_ids{-1, -1};
    int lattice_length() const { return static_cast<int>(points.size()) - 1; }
};

/// Axis-aligned union of unit lattice cubes plus its derived facet structure.
struct PolycubeStructure {
    int type_id = 0;
    std::vector<IVec3> cubes;

    std::vector<PolycubeFace> faces;           // boundary faces P_i
    std::vector<InternalFacet> internal_faces; // I_j
    std::vector<IVec3> corners;
    std::vector<PolycubeEdge> edges;

    int num_faces() const { return static_cast<int>(faces.size()); }
    bool has_cube(const IVec3& c) const { return cube_set.count(c) > 0; }
    int genus() const;
    /// Total boundary facet count.
    int boundary_facet_count() const;
    int corner_index(const IVec3& p) const;

    /// Derive faces/internal facets/corners/edges from `cubes`. Throws
    /// MeshError if the union is not face-connected or an internal facet's
    /// boundary leaves the surface (templates are thickness-1 by design).
    void build();

    std::set<IVec3, IVec3Less> cube_set;
};

/// Canonical lattice structure for template types 1..11.
PolycubeStructure polycube_template(int type_id);

/// Groups of boundary-face ids sharing axis label and lattice plane.
std::vector<std::vector<int>> coplanar_label_groups(const PolycubeStructure& pc);

/// Lattice points incident to boundary faces of >= 3 distinct axis labels.
std::vector<IVec3> corner_points(const PolycubeStructure& pc);

/// Plain-text serialization of the template lattice (one "i j k" per line).
std::string serialize_template(const PolycubeStructure& pc);
PolycubeStructure parse_template(const std::string& text, int type_id);

}  // namespace polyhex
