#include <map>

#include "polyhex/quality.hpp"

namespace polyhex {

HexMesh pillow(const HexMesh& mesh) {
    std::vector<std::array<int, 4>> bquads = mesh.boundary_quads();
    if (bquads.empty()) throw MeshError("pillow: mesh has no boundary");

    // Inward vertex normals (negated area-weighted quad normals) and local
    // edge lengths of the boundary vertices.
    std::vector<Vec3> inward(mesh.num_vertices(), Vec3::Zero());
    std::vector<double> edge_sum(mesh.num_vertices(), 0.0);
    std::vector<int> edge_cnt(mesh.num_vertices(), 0);
    for (const auto& q : bquads) {
        Vec3 a = mesh.vertices[q[0]], b = mesh.vertices[q[1]];
        Vec3 c = mesh.vertices[q[2]], d = mesh.vertices[q[3]];
        Vec3 n = 0.5 * (c - a).cross(d - b);  // outward (area-weighted)
        for (int i = 0; i < 4; ++i) {
            inward[q[i]] -= n;
            double len = (mesh.vertices[q[(i + 1) % 4]] - mesh.vertices[q[i]]).norm();
            edge_sum[q[i]] += len;
            edge_cnt[q[i]] += 2;
            edge_sum[q[(i + 1) % 4]] += len;
        }
    }

    HexMesh out = mesh;
    std::map<int, int> dup;  // boundary vertex -> inward duplicate
    for (const auto& q : bquads)
        for (int v : q)
            if (!dup.count(v)) {
                double local = edge_sum[v] / std::max(edge_cnt[v], 1);
                Vec3 n = inward[v];
                double nn = n.norm();
                if (nn < 1e-300) throw MeshError("pillow: degenerate boundary normal");
                dup[v] = static_cast<int>(out.vertices.size());
                out.vertices.push_back(mesh.vertices[v] + 0.25 * local * n / nn);
            }

    // Old elements now reference the inward duplicates.
    for (auto& e : out.elements)
        for (int& v : e) {
            auto it = dup.find(v);
            if (it != dup.end()) v = it->second;
        }

    // One new hex per boundary quad, between the quad and its duplicate.
    for (const auto& q : bquads)
        out.elements.push_back({dup[q[0]], dup[q[1]], dup[q[2]], dup[q[3]],
                                q[0], q[1], q[2], q[3]});

    out.boundary_tags.clear();
    out.validate();
    return out;
}

}  // namespace polyhex
