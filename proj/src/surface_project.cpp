#include <algorithm>
#include <limits>

#include "polyhex/quality.hpp"

namespace polyhex {

namespace {

Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, 5.1.5.
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return a;
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + w * (c - b);
    }
    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 d = b - a;
    double len2 = d.squaredNorm();
    if (len2 < 1e-300) return a;
    double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    return a + t * d;
}

}  // namespace

Vec3 closest_point_on_triangles(const TriMesh& mesh, const std::vector<int>& tris,
                                const Vec3& x) {
    Vec3 best = x;
    double best_d = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::array<int, 3>& f) {
        Vec3 p = closest_on_triangle(x, mesh.vertices[f[0]], mesh.vertices[f[1]],
                                     mesh.vertices[f[2]]);
        double d = (p - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = p;
        }
    };
    if (tris.empty())
        for (const auto& f : mesh.faces) consider(f);
    else
        for (int t : tris) consider(mesh.faces[t]);
    return best;
}

std::vector<VertexClass> classify_boundary_vertices(const HexMesh& mesh,
                                                    const SurfaceFeatures& features) {
    std::vector<bool> on_boundary = mesh.boundary_vertex_mask();
    std::vector<VertexClass> cls(mesh.num_vertices(), VertexClass::Interior);
    double diag = (mesh.bbox_max() - mesh.bbox_min()).norm();
    double tol = 1e-6 * diag;

    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!on_boundary[v]) continue;
        cls[v] = VertexClass::Face;
        for (const auto& line : features.polylines) {
            for (size_t i = 0; i + 1 < line.size() && cls[v] != VertexClass::Edge; ++i)
                if ((closest_on_segment(mesh.vertices[v], line[i], line[i + 1]) -
                     mesh.vertices[v])
                        .norm() < tol)
                    cls[v] = VertexClass::Edge;
            if (cls[v] == VertexClass::Edge) break;
        }
    }
    for (const Vec3& c : features.corners) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            if (!on_boundary[v]) continue;
            double d = (mesh.vertices[v] - c).norm();
            if (d < best_d) {
                best_d = d;
                best = v;
            }
        }
        if (best < 0) throw MeshError("no boundary vertices");
        cls[best] = VertexClass::Corner;
    }
    return cls;
}

SurfaceProjector::SurfaceProjector(const SurfaceFeatures& features) : features_(&features) {
    const TriMesh& tri = *features.tri;
    double sum = 0.0;
    int cnt = 0;
    for (const auto& f : tri.faces)
        for (int i = 0; i < 3; ++i) {
            sum += (tri.vertices[f[i]] - tri.vertices[f[(i + 1) % 3]]).norm();
            ++cnt;
        }
    mean_edge_ = cnt ? sum / cnt : 0.0;
}

void SurfaceProjector::refresh(const std::vector<Vec3>& queries) {
    const TriMesh& tri = *features_->tri;
    candidates_.assign(queries.size(), {});
    std::vector<Vec3> lo(tri.num_faces()), hi(tri.num_faces());
    for (int f = 0; f < tri.num_faces(); ++f) {
        lo[f] = tri.vertices[tri.faces[f][0]].cwiseMin(tri.vertices[tri.faces[f][1]])
                    .cwiseMin(tri.vertices[tri.faces[f][2]]);
        hi[f] = tri.vertices[tri.faces[f][0]].cwiseMax(tri.vertices[tri.faces[f][1]])
                    .cwiseMax(tri.vertices[tri.faces[f][2]]);
    }
    for (size_t q = 0; q < queries.size(); ++q) {
        double r = 10.0 * mean_edge_;
        for (int attempt = 0; attempt < 4 && candidates_[q].empty(); ++attempt, r *= 2.0) {
            for (int f = 0; f < tri.num_faces(); ++f) {
                bool hit = true;
                for (int a = 0; a < 3; ++a)
                    hit &= queries[q][a] - r <= hi[f][a] && queries[q][a] + r >= lo[f][a];
                if (hit) candidates_[q].push_back(f);
            }
        }
        if (candidates_[q].empty())
            for (int f = 0; f < tri.num_faces(); ++f) candidates_[q].push_back(f);
    }
}

Vec3 SurfaceProjector::project(const Vec3& x, VertexClass cls, int query_id) const {
    if (cls == VertexClass::Face && query_id >= 0 &&
        query_id < static_cast<int>(candidates_.size()) && !candidates_[query_id].empty()) {
        const TriMesh& tri = *features_->tri;
        Vec3 best = x;
        double best_d = std::numeric_limits<double>::infinity();
        for (int f : candidates_[query_id]) {
            Vec3 p = closest_on_triangle(x, tri.vertices[tri.faces[f][0]],
                                         tri.vertices[tri.faces[f][1]],
                                         tri.vertices[tri.faces[f][2]]);
            double d = (p - x).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
        return best;
    }
    return project_global(x, cls);
}

Vec3 SurfaceProjector::project_global(const Vec3& x, VertexClass cls) const {
    Vec3 best = x;
    double best_d = std::numeric_limits<double>::infinity();
    if (cls == VertexClass::Corner) {
        for (const Vec3& c : features_->corners) {
            double d = (c - x).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return best;
    }
    if (cls == VertexClass::Edge) {
        for (const auto& line : features_->polylines)
            for (size_t i = 0; i + 1 < line.size(); ++i) {
                Vec3 p = closest_on_segment(x, line[i], line[i + 1]);
                double d = (p - x).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = p;
                }
            }
        return best;
    }
    const TriMesh& tri = *features_->tri;
    for (const auto& f : tri.faces) {
        Vec3 p = closest_on_triangle(x, tri.vertices[f[0]], tri.vertices[f[1]],
                                     tri.vertices[f[2]]);
        double d = (p - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

}  // namespace polyhex
