#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "polyhex/pathopt.hpp"

namespace polyhex {

EdgeGraph build_edge_graph(const TriMesh& mesh, const std::set<EdgeKey>& sharp_edges) {
    EdgeGraph g;
    g.mesh = &mesh;
    g.incident.resize(mesh.num_vertices());
    for (const auto& [key, tris] : mesh.edge_faces()) {
        EdgeGraph::Edge e;
        e.u = key.a;
        e.v = key.b;
        e.length = (mesh.vertices[key.a] - mesh.vertices[key.b]).norm();
        e.sharp = sharp_edges.count(key) > 0;
        e.tris = tris;
        int id = static_cast<int>(g.edges.size());
        g.edges.push_back(e);
        g.incident[e.u].push_back(id);
        g.incident[e.v].push_back(id);
    }
    return g;
}

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
    double c = a.normalized().dot(b.normalized());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

double edge_weight(double length, bool sharp, const std::optional<Vec3>& prev_dir,
                   const Vec3& edge_dir, const Vec3& goal_dir, const PathWeights& w) {
    double l0 = sharp ? w.lambda0_sharp : w.lambda0;
    double theta = prev_dir ? angle_between(*prev_dir, edge_dir) : 0.0;
    double phi = angle_between(edge_dir, goal_dir);
    return length / l0 + w.lambda1 * theta + w.lambda2 * phi;
}

std::vector<int> shortest_path(EdgeGraph& g, int src, int dst, const PathWeights& w,
                               const std::vector<char>* vertex_allowed,
                               const std::vector<char>* edge_allowed) {
    if (src == dst) throw MeshError("no path: src equals dst");
    const TriMesh& mesh = *g.mesh;
    Vec3 goal_dir = mesh.vertices[dst] - mesh.vertices[src];
    if (goal_dir.norm() < 1e-300) throw MeshError("no path: coincident endpoints");

    auto ok_edge = [&](int e) {
        return !g.used_edges.count(e) && (!edge_allowed || (*edge_allowed)[e]);
    };
    auto ok_vertex = [&](int v) {
        return v == dst || !vertex_allowed || (*vertex_allowed)[v];
    };

    // State = directed edge: edge id * 2 + (0 if heading into v, 1 into u).
    const int ns = static_cast<int>(g.edges.size()) * 2;
    std::vector<double> dist(ns, std::numeric_limits<double>::infinity());
    std::vector<int> prev_state(ns, -1);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;

    auto head = [&](int s) { return s % 2 == 0 ? g.edges[s / 2].v : g.edges[s / 2].u; };
    auto tail = [&](int s) { return s % 2 == 0 ? g.edges[s / 2].u : g.edges[s / 2].v; };
    auto dir_of = [&](int s) {
        return (mesh.vertices[head(s)] - mesh.vertices[tail(s)]).normalized();
    };

    for (int e : g.incident[src]) {
        if (!ok_edge(e)) continue;
        int to = g.other(e, src);
        if (!ok_vertex(to)) continue;
        int s = e * 2 + (g.edges[e].v == to ? 0 : 1);
        double d = edge_weight(g.edges[e].length, g.edges[e].sharp, std::nullopt,
                               dir_of(s), goal_dir, w);
        if (d < dist[s]) {
            dist[s] = d;
            pq.emplace(d, s);
        }
    }

    int final_state = -1;
    while (!pq.empty()) {
        auto [d, s] = pq.top();
        pq.pop();
        if (d > dist[s]) continue;
        int v = head(s);
        if (v == dst) {
            final_state = s;
            break;
        }
        Vec3 pdir = dir_of(s);
        for (int e : g.incident[v]) {
            if (!ok_edge(e)) continue;
            int to = g.other(e, v);
            if (!ok_vertex(to)) continue;
            int s2 = e * 2 + (g.edges[e].v == to ? 0 : 1);
            double nd = d + edge_weight(g.edges[e].length, g.edges[e].sharp, pdir,
                                        dir_of(s2), goal_dir, w);
            if (nd < dist[s2]) {
                dist[s2] = nd;
                prev_state[s2] = s;
                pq.emplace(nd, s2);
            }
        }
    }
    if (final_state < 0) throw MeshError("no path");

    std::vector<int> path{dst};
    for (int s = final_state; s >= 0; s = prev_state[s]) path.push_back(tail(s));
    std::reverse(path.begin(), path.end());
    for (size_t i = 0; i + 1 < path.size(); ++i)
        for (int e : g.incident[path[i]])
            if (g.other(e, path[i]) == path[i + 1]) g.used_edges.insert(e);
    return path;
}

}  // namespace polyhex
