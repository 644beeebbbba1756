#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

#include "polyhex/dataset.hpp"
#include "polyhex/pathopt.hpp"

using namespace polyhex;

namespace {

struct SynthGraph {
    TriMesh mesh;  // vertices only; keeps EdgeGraph::mesh alive
    EdgeGraph g;
};

SynthGraph make_graph(const std::vector<Vec3>& verts,
                      const std::vector<std::tuple<int, int, bool>>& edges) {
    SynthGraph s;
    s.mesh.vertices = verts;
    s.g.mesh = &s.mesh;
    s.g.incident.resize(verts.size());
    for (const auto& [u, v, sharp] : edges) {
        EdgeGraph::Edge e;
        e.u = u;
        e.v = v;
        e.length = (verts[u] - verts[v]).norm();
        e.sharp = sharp;
        int id = static_cast<int>(s.g.edges.size());
        s.g.edges.push_back(e);
        s.g.incident[u].push_back(id);
        s.g.incident[v].push_back(id);
    }
    return s;
}

double turn(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
}

// Cost of a vertex path under the weight formula, computed from scratch.
double path_cost(const SynthGraph& s, const std::vector<int>& path, const PathWeights& w) {
    Vec3 goal = s.mesh.vertices[path.back()] - s.mesh.vertices[path.front()];
    double cost = 0.0;
    Vec3 prev = Vec3::Zero();
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const EdgeGraph::Edge* e = nullptr;
        for (int id : s.g.incident[path[i]])
            if (s.g.other(id, path[i]) == path[i + 1]) e = &s.g.edges[id];
        REQUIRE(e != nullptr);
        Vec3 dir = (s.mesh.vertices[path[i + 1]] - s.mesh.vertices[path[i]]).normalized();
        cost += e->length / (e->sharp ? w.lambda0_sharp : w.lambda0);
        if (i > 0) cost += w.lambda1 * turn(prev, dir);
        cost += w.lambda2 * turn(dir, goal);
        prev = dir;
    }
    return cost;
}

// Exhaustive minimum over walks that never reuse a directed edge (any walk
// repeating one contains a removable non-negative cycle, so this covers the
// true optimum).
double brute_force_cost(const SynthGraph& s, int src, int dst, const PathWeights& w) {
    Vec3 goal = s.mesh.vertices[dst] - s.mesh.vertices[src];
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> used(s.g.edges.size() * 2, 0);
    auto dfs = [&](auto&& self, int v, const Vec3* prev, double cost) -> void {
        if (cost >= best) return;
        if (v == dst) {
            best = cost;
            return;
        }
        for (int id : s.g.incident[v]) {
            int to = s.g.other(id, v);
            int state = id * 2 + (s.g.edges[id].v == to ? 0 : 1);
            if (used[state]) continue;
            Vec3 dir = (s.mesh.vertices[to] - s.mesh.vertices[v]).normalized();
            double step = s.g.edges[id].length /
                              (s.g.edges[id].sharp ? w.lambda0_sharp : w.lambda0) +
                          (prev ? w.lambda1 * turn(*prev, dir) : 0.0) +
                          w.lambda2 * turn(dir, goal);
            used[state] = 1;
            self(self, to, &dir, cost + step);
            used[state] = 0;
        }
    };
    dfs(dfs, src, nullptr, 0.0);
    return best;
}

void check_boundary_invariants(const TriMesh& mesh, const Segmentation& out,
                               const PathSet& ps, const PolycubeStructure& pc) {
    REQUIRE(ps.paths.size() == pc.edges.size());
    std::set<int> corners(ps.corner_vertices.begin(), ps.corner_vertices.end());
    CHECK(corners.size() == pc.corners.size());

    std::set<EdgeKey> path_edges;
    std::set<int> interiors;
    for (size_t e = 0; e < pc.edges.size(); ++e) {
        const auto& p = ps.paths[e];
        REQUIRE(p.size() >= 2);
        CHECK(p.front() == ps.corner_vertices[pc.edges[e].corner_a]);
        CHECK(p.back() == ps.corner_vertices[pc.edges[e].corner_b]);
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            EdgeKey k(p[i], p[i + 1]);
            CHECK(!path_edges.count(k));  // paths are edge-disjoint
            path_edges.insert(k);
        }
        for (size_t i = 1; i + 1 < p.size(); ++i) {
            CHECK(!corners.count(p[i]));
            CHECK(!interiors.count(p[i]));  // interiors are vertex-disjoint
            interiors.insert(p[i]);
        }
    }

    // The label boundary is exactly the union of the stored paths.
    std::set<EdgeKey> boundary;
    for (const auto& [key, tris] : mesh.edge_faces())
        if (out.labels[tris[0]] != out.labels[tris[1]]) boundary.insert(key);
    CHECK(boundary == path_edges);

    // Every face keeps a nonempty patch.
    std::vector<int> count(out.k, 0);
    for (int l : out.labels) count[l]++;
    for (int c = 0; c < out.k; ++c) CHECK(count[c] > 0);
}

}  // namespace

TEST_CASE("edge weight closed forms") {
    PathWeights w;
    Vec3 x = Vec3::UnitX();
    // Straight continuation toward the goal: only the length term survives.
    CHECK(edge_weight(2.0, false, x, x, x, w) == doctest::Approx(2.0).epsilon(1e-12));
    // Sharp edges are 4x cheaper per unit length.
    CHECK(edge_weight(2.0, true, x, x, x, w) == doctest::Approx(0.5).epsilon(1e-12));
    // First edge: no turning term even against a previous direction.
    CHECK(edge_weight(1.0, false, std::nullopt, x, x, w) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // Full reversal aligned with the goal: pi/2 turning penalty.
    CHECK(edge_weight(1.0, false, -x, x, x, w) ==
          doctest::Approx(1.0 + 0.5 * M_PI).epsilon(1e-12));
    // Perpendicular to the goal only: pi/4 deviation penalty.
    CHECK(edge_weight(1.0, false, Vec3::UnitY(), Vec3::UnitY(), x, w) ==
          doctest::Approx(1.0 + 0.25 * M_PI).epsilon(1e-12));
}

TEST_CASE("edge weight is non-negative") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    PathWeights w;
    for (int i = 0; i < 200; ++i) {
        Vec3 prev(c(rng), c(rng), c(rng)), dir(c(rng), c(rng), c(rng)),
            goal(c(rng), c(rng), c(rng));
        if (prev.norm() < 0.1 || dir.norm() < 0.1 || goal.norm() < 0.1) continue;
        CHECK(edge_weight(std::abs(c(rng)), i % 2 == 0, prev, dir, goal, w) >= 0.0);
    }
}

TEST_CASE("shortest path on a line") {
    SynthGraph s = make_graph({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {1.5, 1, 0}},
                              {{0, 1, false},
                               {1, 2, false},
                               {2, 3, false},
                               {0, 4, false},
                               {4, 3, false}});
    PathWeights w;
    std::vector<int> p = shortest_path(s.g, 0, 3, w);
    CHECK(p == std::vector<int>{0, 1, 2, 3});
    CHECK(path_cost(s, p, w) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("shortest path matches exhaustive search") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    int solved = 0;
    for (int trial = 0; trial < 100; ++trial) {
        CAPTURE(trial);
        int n = 4 + static_cast<int>(rng() % 5);
        std::vector<Vec3> verts(n);
        for (auto& v : verts) v = Vec3(c(rng), c(rng), c(rng));
        std::vector<std::tuple<int, int, bool>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng() % 100 < 40) edges.push_back({u, v, rng() % 4 == 0});
        if (edges.empty()) continue;
        SynthGraph s = make_graph(verts, edges);
        PathWeights w;
        double ref = brute_force_cost(s, 0, n - 1, w);
        if (std::isinf(ref)) {
            CHECK_THROWS_WITH_AS(shortest_path(s.g, 0, n - 1, w),
                                 doctest::Contains("no path"), MeshError);
            continue;
        }
        std::vector<int> p = shortest_path(s.g, 0, n - 1, w);
        CHECK(p.front() == 0);
        CHECK(p.back() == n - 1);
        CHECK(path_cost(s, p, w) == doctest::Approx(ref).epsilon(1e-9));
        ++solved;
    }
    CHECK(solved >= 50);  // the generator must actually exercise the solver
}

TEST_CASE("used edges are excluded from later paths") {
    SynthGraph s = make_graph({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}},
                              {{0, 1, false}, {1, 2, false}});
    PathWeights w;
    CHECK(shortest_path(s.g, 0, 2, w) == std::vector<int>{0, 1, 2});
    CHECK(s.g.used_edges.size() == 2);
    // The only route is now consumed.
    CHECK_THROWS_WITH_AS(shortest_path(s.g, 0, 2, w), doctest::Contains("no path"),
                         MeshError);
    CHECK_THROWS_WITH_AS(shortest_path(s.g, 0, 0, w), doctest::Contains("no path"),
                         MeshError);
}

TEST_CASE("identify corners on a deformed cube") {
    TrainingSample s = generate_sample(1, 9, DatasetParams{});
    PolycubeStructure pc = polycube_template(1);
    auto cents = ground_truth_face_centroids(s.mesh, s.face_tags, pc.num_faces());
    Segmentation seg = segment(s.mesh, pc, cents);
    std::vector<int> corners = identify_corners(s.mesh, seg, pc);
    REQUIRE(corners.size() == 8);
    CHECK(std::set<int>(corners.begin(), corners.end()).size() == 8);

    // Each chosen vertex sits on a junction of at least two of its faces.
    std::vector<std::set<int>> vertex_patches(s.mesh.num_vertices());
    for (int f = 0; f < s.mesh.num_faces(); ++f)
        for (int v : s.mesh.faces[f]) vertex_patches[v].insert(seg.labels[f]);
    for (int v : corners) CHECK(vertex_patches[v].size() >= 2);
}

TEST_CASE("optimize boundaries on a deformed cube") {
    TrainingSample s = generate_sample(1, 9, DatasetParams{});
    PolycubeStructure pc = polycube_template(1);
    auto cents = ground_truth_face_centroids(s.mesh, s.face_tags, pc.num_faces());
    Segmentation seg = segment(s.mesh, pc, cents);
    auto [out, ps] = optimize_boundaries(s.mesh, seg, pc);
    check_boundary_invariants(s.mesh, out, ps, pc);
}

TEST_CASE("optimize boundaries on a genus-1 ring") {
    TrainingSample s = generate_sample(2, 14, DatasetParams{});
    PolycubeStructure pc = polycube_template(2);
    auto cents = ground_truth_face_centroids(s.mesh, s.face_tags, pc.num_faces());
    Segmentation seg = segment(s.mesh, pc, cents);
    auto [out, ps] = optimize_boundaries(s.mesh, seg, pc);
    check_boundary_invariants(s.mesh, out, ps, pc);
}

TEST_CASE("zigzag labels are cleaned up") {
    TrainingSample s = generate_sample(1, 9, DatasetParams{});
    PolycubeStructure pc = polycube_template(1);
    auto cents = ground_truth_face_centroids(s.mesh, s.face_tags, pc.num_faces());
    Segmentation seg = segment(s.mesh, pc, cents);
    auto [clean, ps_clean] = optimize_boundaries(s.mesh, seg, pc);

    // Flip a few triangles that straddle a patch boundary to the neighbour
    // label; the optimizer must still produce path-bounded patches.
    Segmentation noisy = seg;
    int flips = 0;
    for (const auto& [key, tris] : s.mesh.edge_faces()) {
        if (flips >= 5) break;
        if (noisy.labels[tris[0]] != noisy.labels[tris[1]]) {
            noisy.labels[tris[0]] = noisy.labels[tris[1]];
            ++flips;
        }
    }
    REQUIRE(flips == 5);
    auto [out, ps] = optimize_boundaries(s.mesh, noisy, pc);
    check_boundary_invariants(s.mesh, out, ps, pc);
}

TEST_CASE("path file round trip") {
    PathSet ps;
    ps.corner_vertices = {3, 1, 4, 1, 5, 9, 2, 6};
    ps.paths = {{3, 7, 1}, {4, 1}};
    std::string path = "/tmp/polyhex_test_paths.txt";
    save_paths(ps, path);
    PathSet back = load_paths(path);
    CHECK(back.corner_vertices == ps.corner_vertices);
    CHECK(back.paths == ps.paths);

    std::ofstream(path) << "2 1\n0 1\n1 7\n";  // path shorter than 2 vertices
    CHECK_THROWS_WITH_AS(load_paths(path), doctest::Contains("corrupt path file"),
                         MeshError);
    std::ofstream(path) << "2 1\n0 1\n3 7 8\n";  // truncated vertex list
    CHECK_THROWS_WITH_AS(load_paths(path), doctest::Contains("corrupt path file"),
                         MeshError);
}
