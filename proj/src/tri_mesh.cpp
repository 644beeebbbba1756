#include "polyhex/tri_mesh.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace polyhex {

Vec3 TriMesh::face_normal(int f) const {
    const auto& t = faces[f];
    Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    double len = n.norm();
    if (len <= 0.0) throw MeshError("degenerate face " + std::to_string(f));
    return n / len;
}

Vec3 TriMesh::face_centroid(int f) const {
    const auto& t = faces[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

double TriMesh::face_area(int f) const {
    const auto& t = faces[f];
    return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
}

Vec3 TriMesh::bbox_min() const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    for (const auto& v : vertices) lo = lo.cwiseMin(v);
    return lo;
}

Vec3 TriMesh::bbox_max() const {
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
    for (const auto& v : vertices) hi = hi.cwiseMax(v);
    return hi;
}

double TriMesh::bbox_diagonal() const { return (bbox_max() - bbox_min()).norm(); }

std::vector<std::pair<EdgeKey, std::array<int, 2>>> TriMesh::edge_faces() const {
    std::map<EdgeKey, std::array<int, 2>> m;
    for (int f = 0; f < num_faces(); ++f) {
        for (int e = 0; e < 3; ++e) {
            EdgeKey k(faces[f][e], faces[f][(e + 1) % 3]);
            auto it = m.find(k);
            if (it == m.end()) {
                m[k] = {f, -1};
            } else if (it->second[1] == -1) {
                it->second[1] = f;
            } else {
                throw MeshError("non-manifold edge (" + std::to_string(k.a) + "," +
                                std::to_string(k.b) + ")");
            }
        }
    }
    return {m.begin(), m.end()};
}

int TriMesh::euler_characteristic() const {
    std::set<EdgeKey> edges;
    for (const auto& t : faces)
        for (int e = 0; e < 3; ++e) edges.insert(EdgeKey(t[e], t[(e + 1) % 3]));
    return num_vertices() - static_cast<int>(edges.size()) + num_faces();
}

int TriMesh::genus() const { return (2 - euler_characteristic()) / 2; }

void TriMesh::validate() const {
    const double area_floor = 1e-12 * bbox_diagonal() * bbox_diagonal();
    for (int f = 0; f < num_faces(); ++f) {
        const auto& t = faces[f];
        for (int i = 0; i < 3; ++i) {
            if (t[i] < 0 || t[i] >= num_vertices())
                throw MeshError("face " + std::to_string(f) + " index out of range");
            if (t[i] == t[(i + 1) % 3])
                throw MeshError("face " + std::to_string(f) + " has a repeated vertex");
        }
        if (face_area(f) <= area_floor)
            throw MeshError("degenerate face " + std::to_string(f));
    }
    for (const auto& [k, ff] : edge_faces()) {
        if (ff[1] == -1)
            throw MeshError("boundary edge (" + std::to_string(k.a) + "," + std::to_string(k.b) +
                            "): mesh is not watertight");
    }
}

TriMesh normalize_to_unit_box(const TriMesh& mesh) {
    Vec3 lo = mesh.bbox_min(), hi = mesh.bbox_max();
    Vec3 ext = hi - lo;
    double scale = ext.maxCoeff();
    if (!(scale > 0.0)) throw MeshError("zero-extent bounding box");
    Vec3 center = 0.5 * (lo + hi);
    TriMesh out = mesh;
    for (auto& v : out.vertices) v = (v - center) / scale;
    return out;
}

std::set<EdgeKey> detect_sharp_edges(const TriMesh& mesh, double angle_threshold_deg) {
    const double thresh = angle_threshold_deg * M_PI / 180.0;
    std::set<EdgeKey> sharp;
    for (const auto& [k, ff] : mesh.edge_faces()) {
        if (ff[1] == -1) continue;
        Vec3 n0 = mesh.face_normal(ff[0]);
        Vec3 n1 = mesh.face_normal(ff[1]);
        // deviation of the dihedral from pi equals the angle between normals
        double c = std::clamp(n0.dot(n1), -1.0, 1.0);
        if (std::acos(c) > thresh) sharp.insert(k);
    }
    return sharp;
}

}  // namespace polyhex
