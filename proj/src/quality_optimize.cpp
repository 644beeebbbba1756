#include <algorithm>
#include <limits>
#include <map>

#include "polyhex/quality.hpp"

namespace polyhex {

double mean_edge_length(const HexMesh& mesh) {
    // Corner edge-vector neighbors (same frame as the Jacobian).
    static const int nb[8][3] = {{1, 3, 4}, {2, 0, 5}, {3, 1, 6}, {0, 2, 7},
                                 {7, 5, 0}, {4, 6, 1}, {5, 7, 2}, {6, 4, 3}};
    double sum = 0.0;
    long cnt = 0;
    for (const auto& e : mesh.elements)
        for (int i = 0; i < 8; ++i) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += (mesh.vertices[e[nb[i][k]]] - mesh.vertices[e[i]]).norm();
            sum += s / 3.0;
            ++cnt;
        }
    return cnt ? sum / cnt : 0.0;
}

namespace {

double element_energy_term(const HexMesh& mesh, int e, double lbar) {
    auto c = element_corners(mesh, e);
    double min_j = jacobian(c).min;
    if (min_j < 0.0) return -min_j / lbar;
    return -lbar * lbar * scaled_jacobian(c).min;
}

double fitting_term(const HexMesh& mesh, const std::vector<Vec3>& targets,
                    const std::vector<VertexClass>& classes, int v) {
    if (classes[v] == VertexClass::Interior) return 0.0;
    return (mesh.vertices[v] - targets[v]).squaredNorm();
}

std::vector<std::vector<int>> build_vertex_elements(const HexMesh& mesh) {
    std::vector<std::vector<int>> ve(mesh.num_vertices());
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (int v : mesh.elements[e]) ve[v].push_back(e);
    return ve;
}

double local_energy(HexMesh& mesh, const std::vector<Vec3>& targets,
                    const std::vector<VertexClass>& classes, double lbar, int v,
                    const std::vector<std::vector<int>>& ve) {
    double e = fitting_term(mesh, targets, classes, v);
    for (int el : ve[v]) e += element_energy_term(mesh, el, lbar);
    return e;
}

}  // namespace

double quality_energy(const HexMesh& mesh, const std::vector<Vec3>& targets,
                      const std::vector<VertexClass>& classes, double lbar) {
    double e = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        e += fitting_term(mesh, targets, classes, v);
    for (int el = 0; el < mesh.num_elements(); ++el)
        e += element_energy_term(mesh, el, lbar);
    return e;
}

Vec3 energy_gradient(HexMesh& mesh, const std::vector<Vec3>& targets,
                     const std::vector<VertexClass>& classes, double lbar, int v,
                     const std::vector<std::vector<int>>& vertex_elements) {
    const double h = 1e-6 * std::max(lbar, 1e-12);
    Vec3 g;
    Vec3 saved = mesh.vertices[v];
    for (int a = 0; a < 3; ++a) {
        mesh.vertices[v][a] = saved[a] + h;
        double ep = local_energy(mesh, targets, classes, lbar, v, vertex_elements);
        mesh.vertices[v][a] = saved[a] - h;
        double em = local_energy(mesh, targets, classes, lbar, v, vertex_elements);
        mesh.vertices[v][a] = saved[a];
        g[a] = (ep - em) / (2.0 * h);
    }
    return g;
}

void smart_laplacian_smoothing(HexMesh& mesh, const std::vector<VertexClass>& classes) {
    std::vector<std::vector<int>> ve = build_vertex_elements(mesh);
    std::vector<std::array<int, 4>> bquads = mesh.boundary_quads();
    std::vector<std::vector<int>> vquads(mesh.num_vertices());
    for (int q = 0; q < static_cast<int>(bquads.size()); ++q)
        for (int v : bquads[q]) vquads[v].push_back(q);

    // Curve neighbors: boundary-quad edge neighbors that are Edge/Corner.
    std::vector<std::set<int>> curve_nb(mesh.num_vertices());
    for (const auto& q : bquads)
        for (int i = 0; i < 4; ++i) {
            int a = q[i], b = q[(i + 1) % 4];
            if (classes[a] == VertexClass::Edge &&
                (classes[b] == VertexClass::Edge || classes[b] == VertexClass::Corner))
                curve_nb[a].insert(b);
            if (classes[b] == VertexClass::Edge &&
                (classes[a] == VertexClass::Edge || classes[a] == VertexClass::Corner))
                curve_nb[b].insert(a);
        }

    auto local_min_sj = [&](int v) {
        double m = std::numeric_limits<double>::infinity();
        for (int el : ve[v]) m = std::min(m, scaled_jacobian(element_corners(mesh, el)).min);
        return m;
    };

    for (int v = 0; v < mesh.num_vertices(); ++v) {
        Vec3 target;
        if (classes[v] == VertexClass::Corner) continue;
        if (classes[v] == VertexClass::Edge) {
            if (curve_nb[v].size() != 2) continue;
            target = Vec3::Zero();
            for (int n : curve_nb[v]) target += mesh.vertices[n];
            target /= 2.0;
        } else if (classes[v] == VertexClass::Face) {
            Vec3 sum = Vec3::Zero();
            double wsum = 0.0;
            for (int q : vquads[v]) {
                Vec3 a = mesh.vertices[bquads[q][0]], b = mesh.vertices[bquads[q][1]];
                Vec3 c = mesh.vertices[bquads[q][2]], d = mesh.vertices[bquads[q][3]];
                double area = 0.5 * ((c - a).cross(d - b)).norm();
                sum += area * 0.25 * (a + b + c + d);
                wsum += area;
            }
            if (wsum <= 0.0) continue;
            target = sum / wsum;
        } else {
            Vec3 sum = Vec3::Zero();
            double wsum = 0.0;
            for (int el : ve[v]) {
                auto c = element_corners(mesh, el);
                Vec3 center = Vec3::Zero();
                for (const auto& p : c) center += p;
                center /= 8.0;
                double vol = std::abs(jacobian(c).values[8]);
                sum += vol * center;
                wsum += vol;
            }
            if (wsum <= 0.0) continue;
            target = sum / wsum;
        }
        Vec3 saved = mesh.vertices[v];
        double before = local_min_sj(v);
        mesh.vertices[v] = saved + 0.3 * (target - saved);
        if (local_min_sj(v) <= before) mesh.vertices[v] = saved;
    }
}

QualityReport optimize_quality(HexMesh& mesh, const SurfaceFeatures& features,
                               const OptimizeConfig& cfg) {
    std::vector<VertexClass> classes = classify_boundary_vertices(mesh, features);
    std::vector<std::vector<int>> ve = build_vertex_elements(mesh);
    SurfaceProjector projector(features);

    std::vector<Vec3> targets(mesh.num_vertices(), Vec3::Zero());
    auto refresh_targets = [&](bool rebuild_cache) {
        if (rebuild_cache) projector.refresh(mesh.vertices);
        for (int v = 0; v < mesh.num_vertices(); ++v)
            if (classes[v] != VertexClass::Interior)
                targets[v] = projector.project(mesh.vertices[v], classes[v], v);
    };
    refresh_targets(true);

    double lbar = mean_edge_length(mesh);
    std::vector<double> sj(mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e)
        sj[e] = scaled_jacobian(element_corners(mesh, e)).min;

    HexMesh best = mesh;
    double best_min = *std::min_element(sj.begin(), sj.end());
    long iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        int worst = static_cast<int>(
            std::min_element(sj.begin(), sj.end()) - sj.begin());
        if (sj[worst] >= cfg.threshold) break;

        for (int v : mesh.elements[worst]) {
            Vec3 g = energy_gradient(mesh, targets, classes, lbar, v, ve);
            mesh.vertices[v] -= cfg.alpha * g;
            if (classes[v] != VertexClass::Interior)
                targets[v] = projector.project(mesh.vertices[v], classes[v], v);
        }
        std::set<int> touched;
        for (int v : mesh.elements[worst])
            for (int el : ve[v]) touched.insert(el);
        for (int el : touched) sj[el] = scaled_jacobian(element_corners(mesh, el)).min;

        if ((iter + 1) % cfg.maintenance_every == 0) {
            smart_laplacian_smoothing(mesh, classes);
            lbar = mean_edge_length(mesh);
            refresh_targets(true);
            for (int e = 0; e < mesh.num_elements(); ++e)
                sj[e] = scaled_jacobian(element_corners(mesh, e)).min;
        }
        double cur_min = *std::min_element(sj.begin(), sj.end());
        if (cur_min > best_min) {
            best_min = cur_min;
            best = mesh;
        }
    }
    if (best_min > *std::min_element(sj.begin(), sj.end())) mesh = best;

    // Snap boundary vertices that have converged onto the surface.
    refresh_targets(true);
    double diag = (mesh.bbox_max() - mesh.bbox_min()).norm();
    double worst_dev = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (classes[v] != VertexClass::Interior)
            worst_dev = std::max(worst_dev, (mesh.vertices[v] - targets[v]).norm());
    if (worst_dev < cfg.snap_tolerance * diag)
        for (int v = 0; v < mesh.num_vertices(); ++v)
            if (classes[v] != VertexClass::Interior) mesh.vertices[v] = targets[v];

    QualityReport rep = evaluate_quality(mesh);
    rep.iterations = iter;
    return rep;
}

}  // namespace polyhex
