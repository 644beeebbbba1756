#pragma once

#include "polyhex/tri_mesh.hpp"

namespace polyhex {

enum class VertexClass : std::uint8_t { Corner, Edge, Face, Interior };

/// 8-node hexahedral mesh. Element corner ordering follows the VTK_HEXAHEDRON
/// convention: (0,0,0) (1,0,0) (1,1,0) (0,1,0) then the same loop at the top.
struct HexMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 8>> elements;
    std::vector<VertexClass> boundary_tags;  // optional, per vertex

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_elements() const { return static_cast<int>(elements.size()); }

    Vec3 bbox_min() const;
    Vec3 bbox_max() const;

    /// The 6 outward-oriented quad faces of element e.
    static std::array<std::array<int, 4>, 6> element_faces(const std::array<int, 8>& elem);

    /// Quads appearing on exactly one element, outward-oriented.
    std::vector<std::array<int, 4>> boundary_quads() const;
    /// Per-element count of boundary quad faces.
    std::vector<int> boundary_face_counts() const;
    /// True for vertices used by at least one boundary quad.
    std::vector<bool> boundary_vertex_mask() const;

    /// Checks index ranges, distinct element corners, and that every quad face
    /// is shared by at most 2 elements.
    void validate() const;
};

}  // namespace polyhex
