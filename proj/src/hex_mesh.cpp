#include "polyhex/hex_mesh.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace polyhex {

Vec3 HexMesh::bbox_min() const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    for (const auto& v : vertices) lo = lo.cwiseMin(v);
    return lo;
}

Vec3 HexMesh::bbox_max() const {
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
    for (const auto& v : vertices) hi = hi.cwiseMax(v);
    return hi;
}

std::array<std::array<int, 4>, 6> HexMesh::element_faces(const std::array<int, 8>& e) {
    // outward-oriented (CCW seen from outside the element)
    return {{{e[0], e[3], e[2], e[1]},    // bottom
             {e[4], e[5], e[6], e[7]},    // top
             {e[0], e[1], e[5], e[4]},    // front  (y-)
             {e[1], e[2], e[6], e[5]},    // right  (x+)
             {e[2], e[3], e[7], e[6]},    // back   (y+)
             {e[3], e[0], e[4], e[7]}}};  // left   (x-)
}

namespace {
std::array<int, 4> sorted4(std::array<int, 4> q) {
    std::sort(q.begin(), q.end());
    return q;
}
}  // namespace

std::vector<std::array<int, 4>> HexMesh::boundary_quads() const {
    std::map<std::array<int, 4>, std::pair<int, std::array<int, 4>>> count;
    for (const auto& e : elements)
        for (const auto& q : element_faces(e)) {
            auto& entry = count[sorted4(q)];
            entry.first++;
            entry.second = q;
        }
    std::vector<std::array<int, 4>> out;
    for (const auto& [k, v] : count)
        if (v.first == 1) out.push_back(v.second);
    return out;
}

std::vector<int> HexMesh::boundary_face_counts() const {
    std::map<std::array<int, 4>, int> count;
    for (const auto& e : elements)
        for (const auto& q : element_faces(e)) count[sorted4(q)]++;
    std::vector<int> per_elem(elements.size(), 0);
    for (size_t i = 0; i < elements.size(); ++i)
        for (const auto& q : element_faces(elements[i]))
            if (count[sorted4(q)] == 1) per_elem[i]++;
    return per_elem;
}

std::vector<bool> HexMesh::boundary_vertex_mask() const {
    std::vector<bool> mask(vertices.size(), false);
    for (const auto& q : boundary_quads())
        for (int v : q) mask[v] = true;
    return mask;
}

void HexMesh::validate() const {
    for (size_t i = 0; i < elements.size(); ++i) {
        const auto& e = elements[i];
        for (int v : e)
            if (v < 0 || v >= num_vertices())
                throw MeshError("element " + std::to_string(i) + " index out of range");
        auto s = e;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw MeshError("element " + std::to_string(i) + " has repeated corners");
    }
    std::map<std::array<int, 4>, int> count;
    for (const auto& e : elements)
        for (const auto& q : element_faces(e)) count[sorted4(q)]++;
    for (const auto& [k, c] : count)
        if (c > 2) throw MeshError("quad face shared by more than 2 elements");
}

}  // namespace polyhex
