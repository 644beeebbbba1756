#include <Eigen/Sparse>

#include "polyhex/hexgen.hpp"

namespace polyhex {

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

}  // namespace

Vec3 PatchParam::sample(const Eigen::Vector2d& p) const {
    constexpr double snap = 1e-9;
    double best_fit = -std::numeric_limits<double>::infinity();
    Vec3 best_pt = Vec3::Zero();
    for (int t : tri_ids) {
        const auto& f = mesh->faces[t];
        Eigen::Vector2d a = uv.at(f[0]), b = uv.at(f[1]), c = uv.at(f[2]);
        double area = signed_area(a, b, c);
        if (std::abs(area) < 1e-300) continue;
        double l0 = signed_area(p, b, c) / area;
        double l1 = signed_area(a, p, c) / area;
        double l2 = 1.0 - l0 - l1;
        double fit = std::min({l0, l1, l2});
        Vec3 pt = l0 * mesh->vertices[f[0]] + l1 * mesh->vertices[f[1]] +
                  l2 * mesh->vertices[f[2]];
        if (fit >= -snap) return pt;
        if (fit > best_fit) {
            best_fit = fit;
            best_pt = pt;
        }
    }
    if (best_fit == -std::numeric_limits<double>::infinity())
        throw MeshError("parameter point outside patch");
    return best_pt;
}

std::map<int, Eigen::Vector2d> map_patch_boundary(
    const TriMesh& mesh, const std::vector<std::vector<int>>& segments) {
    if (segments.size() != 4)
        throw MeshError("patch is not four-sided: " + std::to_string(segments.size()) +
                        " boundary segments");
    static const Eigen::Vector2d sq[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::map<int, Eigen::Vector2d> uv;
    for (int s = 0; s < 4; ++s) {
        const auto& seg = segments[s];
        if (seg.size() < 2) throw MeshError("degenerate boundary segment");
        if (seg.front() != segments[(s + 3) % 4].back())
            throw MeshError("boundary segments do not chain");
        double total = 0.0;
        std::vector<double> acc{0.0};
        for (size_t i = 0; i + 1 < seg.size(); ++i) {
            total += (mesh.vertices[seg[i + 1]] - mesh.vertices[seg[i]]).norm();
            acc.push_back(total);
        }
        if (total <= 0.0) throw MeshError("degenerate boundary segment");
        Eigen::Vector2d a = sq[s], b = sq[(s + 1) % 4];
        for (size_t i = 0; i < seg.size(); ++i)
            uv[seg[i]] = a + (acc[i] / total) * (b - a);
    }
    return uv;
}

PatchParam harmonic_uv(const TriMesh& mesh, const std::vector<int>& tri_ids,
                       const std::map<int, Eigen::Vector2d>& boundary_uv) {
    PatchParam param;
    param.mesh = &mesh;
    param.tri_ids = tri_ids;

    // Interior vertices get contiguous unknown indices.
    std::map<int, int> unknown;
    std::set<int> verts;
    for (int t : tri_ids)
        for (int v : mesh.faces[t]) verts.insert(v);
    for (int v : verts)
        if (!boundary_uv.count(v)) unknown.emplace(v, static_cast<int>(unknown.size()));

    auto solve = [&](bool uniform) -> int {
        std::map<EdgeKey, double> weight;
        for (int t : tri_ids) {
            const auto& f = mesh.faces[t];
            for (int i = 0; i < 3; ++i) {
                int a = f[i], b = f[(i + 1) % 3], c = f[(i + 2) % 3];
                double w = 1.0;
                if (!uniform) {
                    Vec3 ca = mesh.vertices[a] - mesh.vertices[c];
                    Vec3 cb = mesh.vertices[b] - mesh.vertices[c];
                    double cos_c = ca.dot(cb);
                    double sin_c = ca.cross(cb).norm();
                    w = 0.5 * cos_c / std::max(sin_c, 1e-300);
                }
                weight[EdgeKey(a, b)] += w;
            }
        }
        for (auto& [k, w] : weight) w = std::max(w, 1e-6);

        const int n = static_cast<int>(unknown.size());
        param.uv.clear();
        for (const auto& [v, p] : boundary_uv)
            if (verts.count(v)) param.uv[v] = p;
        if (n > 0) {
            Eigen::SparseMatrix<double> L(n, n);
            Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 2);
            std::vector<Eigen::Triplet<double>> trip;
            std::vector<double> diag(n, 0.0);
            for (const auto& [k, w] : weight) {
                auto ia = unknown.find(k.a), ib = unknown.find(k.b);
                if (ia != unknown.end()) diag[ia->second] += w;
                if (ib != unknown.end()) diag[ib->second] += w;
                if (ia != unknown.end() && ib != unknown.end()) {
                    trip.emplace_back(ia->second, ib->second, -w);
                    trip.emplace_back(ib->second, ia->second, -w);
                } else if (ia != unknown.end()) {
                    rhs.row(ia->second) += w * boundary_uv.at(k.b).transpose();
                } else if (ib != unknown.end()) {
                    rhs.row(ib->second) += w * boundary_uv.at(k.a).transpose();
                }
            }
            for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);
            L.setFromTriplets(trip.begin(), trip.end());
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(L);
            if (chol.info() != Eigen::Success) throw MeshError("harmonic solve failed");
            Eigen::MatrixXd x = chol.solve(rhs);
            for (const auto& [v, i] : unknown) param.uv[v] = x.row(i).transpose();
        }
        // Fold-over count: every patch triangle should keep positive UV area.
        // Triangles with all three vertices pinned to one collinear stretch
        // of the target polygon are degenerate by construction, not folds.
        int folds = 0;
        for (int t : tri_ids) {
            const auto& f = mesh.faces[t];
            double a = signed_area(param.uv.at(f[0]), param.uv.at(f[1]), param.uv.at(f[2]));
            if (a <= 0.0) {
                bool pinned = boundary_uv.count(f[0]) && boundary_uv.count(f[1]) &&
                              boundary_uv.count(f[2]);
                if (!(pinned && a >= -1e-12)) ++folds;
            }
        }
        return folds;
    };

    int cot_folds = solve(false);
    if (cot_folds == 0) return param;
    auto cot_uv = param.uv;
    int uni_folds = solve(true);
    if (uni_folds == 0) return param;
    // Both weight schemes folded. A handful of folded triangles (typical on
    // multiply-connected patches, where the Tutte guarantee does not apply)
    // only perturbs samples locally, which beats abandoning the map, so keep
    // the better solution; larger fold counts mean the boundary itself is bad.
    if (cot_folds < uni_folds) param.uv = std::move(cot_uv);
    if (std::min(cot_folds, uni_folds) > std::max<int>(1, tri_ids.size() / 100))
        throw MeshError("fold-over");
    return param;
}

}  // namespace polyhex
