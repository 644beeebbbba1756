#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyhex {

using Vec3 = Eigen::Vector3d;

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Undirected vertex-index pair with a < b.
struct EdgeKey {
    int a = -1, b = -1;
    EdgeKey() = default;
    EdgeKey(int u, int v) : a(u < v ? u : v), b(u < v ? v : u) {}
    bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

/// Watertight manifold triangle surface. Faces are CCW seen from outside.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::set<EdgeKey> sharp_edges;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }

    Vec3 face_normal(int f) const;
    Vec3 face_centroid(int f) const;
    double face_area(int f) const;

    Vec3 bbox_min() const;
    Vec3 bbox_max() const;
    double bbox_diagonal() const;

    /// Euler characteristic V - E + F.
    int euler_characteristic() const;
    /// Genus of a closed surface, (2 - chi) / 2.
    int genus() const;

    /// Checks manifoldness (every edge on exactly 2 faces), index ranges and
    /// face degeneracy. Throws MeshError with the offending face/edge index.
    void validate() const;

    /// Map edge -> the (1 or 2) incident faces. Throws on >2.
    std::vector<std::pair<EdgeKey, std::array<int, 2>>> edge_faces() const;
};

/// Uniform scale + translate so the bounding box is centered at the origin
/// and the longest axis spans exactly 1.
TriMesh normalize_to_unit_box(const TriMesh& mesh);

/// Edges whose dihedral angle deviates from pi by more than the threshold.
std::set<EdgeKey> detect_sharp_edges(const TriMesh& mesh, double angle_threshold_deg);

}  // namespace polyhex
