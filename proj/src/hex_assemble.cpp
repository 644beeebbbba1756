#include <algorithm>
#include <limits>

#include "polyhex/hexgen.hpp"
#include "polyhex/quality.hpp"

namespace polyhex {

namespace {

// (u,v) axes so that e_u x e_v equals the outward normal; mirrors the facet
// corner convention of the lattice structure.
std::pair<int, int> tangent_axes(const AxisDir& d) {
    static const int tab[3][2][2] = {{{1, 2}, {2, 1}},
                                     {{2, 0}, {0, 2}},
                                     {{0, 1}, {1, 0}}};
    const auto& t = tab[d.axis][d.sign > 0 ? 0 : 1];
    return {t[0], t[1]};
}

Vec3 polyline_point(const std::vector<Vec3>& line, double t) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < line.size(); ++i) total += (line[i + 1] - line[i]).norm();
    double target = t * total;
    for (size_t i = 0; i + 1 < line.size(); ++i) {
        double seg = (line[i + 1] - line[i]).norm();
        if (target <= seg || i + 2 == line.size()) {
            double f = seg > 0.0 ? target / seg : 0.0;
            return line[i] + std::clamp(f, 0.0, 1.0) * (line[i + 1] - line[i]);
        }
        target -= seg;
    }
    return line.back();
}

std::vector<double> arc_fractions(const std::vector<Vec3>& line) {
    std::vector<double> acc{0.0};
    for (size_t i = 0; i + 1 < line.size(); ++i)
        acc.push_back(acc.back() + (line[i + 1] - line[i]).norm());
    double total = acc.back();
    if (total <= 0.0) throw MeshError("degenerate boundary path");
    for (double& a : acc) a /= total;
    return acc;
}

struct KeyStore {
    std::map<IVec3, int, IVec3Less> ids;
    std::vector<Vec3> positions;
    std::vector<VertexClass> classes;

    int insert(const IVec3& key, const Vec3& pos, VertexClass cls) {
        auto [it, fresh] = ids.emplace(key, static_cast<int>(positions.size()));
        if (fresh) {
            positions.push_back(pos);
            classes.push_back(cls);
        }
        return it->second;
    }
    int require(const IVec3& key) const {
        auto it = ids.find(key);
        if (it == ids.end()) throw MeshError("missing lattice sample");
        return it->second;
    }
    bool has(const IVec3& key) const { return ids.count(key) > 0; }
    const Vec3& at(const IVec3& key) const { return positions[require(key)]; }
};

}  // namespace

HexMesh assemble_hex_mesh(const TriMesh& mesh, const Segmentation& seg,
                          const PolycubeStructure& pc, const PathSet& ps, int level) {
    if (level < 0 || level > 8) throw MeshError("octree level out of range");
    if (ps.paths.size() != pc.edges.size()) throw MeshError("path count mismatch");
    const int S = 1 << level;
    KeyStore store;

    // Polycube corners -> their chosen mesh vertices.
    for (size_t c = 0; c < pc.corners.size(); ++c)
        store.insert(pc.corners[c] * S, mesh.vertices[ps.corner_vertices[c]],
                     VertexClass::Corner);

    // Polycube edges -> uniform arc-length samples of the optimized paths.
    std::vector<std::vector<Vec3>> polylines = ps.polylines(mesh);
    for (size_t ei = 0; ei < pc.edges.size(); ++ei) {
        const PolycubeEdge& pe = pc.edges[ei];
        const int m = pe.lattice_length();
        IVec3 a = pc.corners[pe.corner_a];
        IVec3 step = (pc.corners[pe.corner_b] - a) / m;
        for (int q = 1; q < m * S; ++q)
            store.insert(a * S + step * q,
                         polyline_point(polylines[ei], static_cast<double>(q) / (m * S)),
                         VertexClass::Edge);
    }

    // Lattice -> mesh bbox transform, used only by the projection fallback.
    Vec3 lat_lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 lat_hi = -lat_lo;
    for (const auto& face : pc.faces)
        for (const auto& facet : face.facets)
            for (const IVec3& p : facet.corner_points()) {
                lat_lo = lat_lo.cwiseMin(p.cast<double>().eval());
                lat_hi = lat_hi.cwiseMax(p.cast<double>().eval());
            }
    Vec3 mesh_lo = mesh.bbox_min(), mesh_hi = mesh.bbox_max();
    auto lattice_anchor = [&](const Vec3& p) -> Vec3 {
        Vec3 t;
        for (int a = 0; a < 3; ++a) {
            double extent = std::max(lat_hi[a] - lat_lo[a], 1.0);
            t[a] = mesh_lo[a] + (p[a] - lat_lo[a]) / extent * (mesh_hi[a] - mesh_lo[a]);
        }
        return t;
    };

    // Boundary faces -> harmonic samples of their surface patches.
    for (const auto& face : pc.faces) {
        auto [u, v] = tangent_axes(face.label);

        std::map<int, Eigen::Vector2d> boundary_uv;
        for (size_t ei = 0; ei < pc.edges.size(); ++ei) {
            const PolycubeEdge& pe = pc.edges[ei];
            if (pe.face_ids[0] != face.id && pe.face_ids[1] != face.id) continue;
            Eigen::Vector2d ua(pc.corners[pe.corner_a][u], pc.corners[pe.corner_a][v]);
            Eigen::Vector2d ub(pc.corners[pe.corner_b][u], pc.corners[pe.corner_b][v]);
            std::vector<double> frac = arc_fractions(polylines[ei]);
            for (size_t i = 0; i < ps.paths[ei].size(); ++i)
                boundary_uv[ps.paths[ei][i]] = ua + frac[i] * (ub - ua);
        }

        std::vector<int> tri_ids;
        for (int f = 0; f < mesh.num_faces(); ++f)
            if (seg.labels[f] == face.id) tri_ids.push_back(f);
        if (tri_ids.empty()) throw MeshError("empty surface patch");
        PatchParam param;
        bool have_param = true;
        try {
            param = harmonic_uv(mesh, tri_ids, boundary_uv);
        } catch (const MeshError&) {
            // Both weight schemes folded (non-convex lattice polygon). Fall
            // back to geometric projection: lattice grid point -> bbox
            // transform -> closest point on the patch.
            have_param = false;
        }

        for (const auto& facet : face.facets) {
            IVec3 b = facet.corner_points()[0];
            IVec3 eu = IVec3::Zero(), ev = IVec3::Zero();
            eu[u] = 1;
            ev[v] = 1;
            for (int i = 0; i <= S; ++i)
                for (int j = 0; j <= S; ++j) {
                    IVec3 key = b * S + eu * i + ev * j;
                    if (store.has(key)) continue;
                    Vec3 pos;
                    if (have_param) {
                        Eigen::Vector2d p(static_cast<double>(key[u]) / S,
                                          static_cast<double>(key[v]) / S);
                        pos = param.sample(p);
                    } else {
                        pos = closest_point_on_triangles(mesh, tri_ids,
                                                         lattice_anchor(key.cast<double>() / S));
                    }
                    store.insert(key, pos, VertexClass::Face);
                }
        }
    }

    // Internal facets -> Coons patches over their boundary curves.
    for (const auto& facet : pc.internal_faces) {
        auto cp = facet.corner_points();
        IVec3 b = cp[0];
        IVec3 eu = cp[1] - cp[0], ev = cp[3] - cp[0];
        for (int i = 1; i < S; ++i)
            for (int j = 1; j < S; ++j) {
                IVec3 key = b * S + eu * i + ev * j;
                if (store.has(key)) continue;
                double s = static_cast<double>(i) / S, t = static_cast<double>(j) / S;
                Vec3 p = (1 - s) * store.at(b * S + ev * j) +
                         s * store.at(b * S + eu * S + ev * j) +
                         (1 - t) * store.at(b * S + eu * i) +
                         t * store.at(b * S + eu * i + ev * S) -
                         ((1 - s) * (1 - t) * store.at(b * S) +
                          s * (1 - t) * store.at(b * S + eu * S) +
                          s * t * store.at(b * S + eu * S + ev * S) +
                          (1 - s) * t * store.at(b * S + ev * S));
                store.insert(key, p, VertexClass::Interior);
            }
    }

    // Cube interiors -> transfinite interpolation of the six face grids.
    for (const IVec3& cube : pc.cubes) {
        IVec3 b = cube * S;
        auto X = [&](int i, int j, int k) { return store.at(b + IVec3(i, j, k)); };
        for (int i = 1; i < S; ++i)
            for (int j = 1; j < S; ++j)
                for (int k = 1; k < S; ++k) {
                    IVec3 key = b + IVec3(i, j, k);
                    if (store.has(key)) continue;
                    double uu = static_cast<double>(i) / S;
                    double vv = static_cast<double>(j) / S;
                    double ww = static_cast<double>(k) / S;
                    Vec3 lu = (1 - uu) * X(0, j, k) + uu * X(S, j, k);
                    Vec3 lv = (1 - vv) * X(i, 0, k) + vv * X(i, S, k);
                    Vec3 lw = (1 - ww) * X(i, j, 0) + ww * X(i, j, S);
                    Vec3 luv = (1 - uu) * (1 - vv) * X(0, 0, k) + uu * (1 - vv) * X(S, 0, k) +
                               (1 - uu) * vv * X(0, S, k) + uu * vv * X(S, S, k);
                    Vec3 luw = (1 - uu) * (1 - ww) * X(0, j, 0) + uu * (1 - ww) * X(S, j, 0) +
                               (1 - uu) * ww * X(0, j, S) + uu * ww * X(S, j, S);
                    Vec3 lvw = (1 - vv) * (1 - ww) * X(i, 0, 0) + vv * (1 - ww) * X(i, S, 0) +
                               (1 - vv) * ww * X(i, 0, S) + vv * ww * X(i, S, S);
                    Vec3 luvw =
                        (1 - uu) * (1 - vv) * (1 - ww) * X(0, 0, 0) +
                        uu * (1 - vv) * (1 - ww) * X(S, 0, 0) +
                        (1 - uu) * vv * (1 - ww) * X(0, S, 0) +
                        uu * vv * (1 - ww) * X(S, S, 0) +
                        (1 - uu) * (1 - vv) * ww * X(0, 0, S) +
                        uu * (1 - vv) * ww * X(S, 0, S) +
                        (1 - uu) * vv * ww * X(0, S, S) + uu * vv * ww * X(S, S, S);
                    store.insert(key, lu + lv + lw - luv - luw - lvw + luvw,
                                 VertexClass::Interior);
                }
    }

    HexMesh hex;
    hex.vertices = store.positions;
    hex.boundary_tags = store.classes;
    for (const IVec3& cube : pc.cubes) {
        IVec3 b = cube * S;
        for (int i = 0; i < S; ++i)
            for (int j = 0; j < S; ++j)
                for (int k = 0; k < S; ++k) {
                    std::array<int, 8> e{
                        store.require(b + IVec3(i, j, k)),
                        store.require(b + IVec3(i + 1, j, k)),
                        store.require(b + IVec3(i + 1, j + 1, k)),
                        store.require(b + IVec3(i, j + 1, k)),
                        store.require(b + IVec3(i, j, k + 1)),
                        store.require(b + IVec3(i + 1, j, k + 1)),
                        store.require(b + IVec3(i + 1, j + 1, k + 1)),
                        store.require(b + IVec3(i, j + 1, k + 1))};
                    hex.elements.push_back(e);
                }
    }
    hex.validate();
    return hex;
}

}  // namespace polyhex
