#pragma once

#include "polyhex/polycube.hpp"
#include "polyhex/tri_mesh.hpp"

namespace polyhex {

/// Closed quad mesh. `face_tags` optionally carries the originating polycube
/// boundary-face id of each quad; subdivision and triangulation propagate it.
struct QuadMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> quads;
    std::vector<int> face_tags;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_quads() const { return static_cast<int>(quads.size()); }
};

/// Boundary surface of the cube union, one quad per boundary lattice facet,
/// outward-oriented, tagged with the owning face id.
QuadMesh assemble_surface(const PolycubeStructure& pc);

/// Catmull-Clark subdivision, `levels` rounds. Closed meshes only.
QuadMesh catmull_clark(const QuadMesh& mesh, int levels);

/// Split each quad along its shorter diagonal (ties: the diagonal through the
/// quad's lowest vertex index). Returns the mesh plus per-triangle tags.
std::pair<TriMesh, std::vector<int>> triangulate(const QuadMesh& mesh);

}  // namespace polyhex
