#pragma once

#include <optional>

#include "polyhex/segmentation.hpp"

namespace polyhex {

/// Mesh-edge graph used by boundary path optimization.
struct EdgeGraph {
    struct Edge {
        int u = -1, v = -1;
        double length = 0.0;
        bool sharp = false;
        std::array<int, 2> tris{-1, -1};  // incident triangles
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> incident;  // vertex -> edge ids
    std::set<int> used_edges;
    const TriMesh* mesh = nullptr;

    int other(int e, int v) const { return edges[e].u == v ? edges[e].v : edges[e].u; }
};

EdgeGraph build_edge_graph(const TriMesh& mesh, const std::set<EdgeKey>& sharp_edges);

/// Weight term parameters: w(e) = len/lambda0 + lambda1*theta + lambda2*phi
/// with theta the turning angle from the previous edge (0 on the first edge)
/// and phi the deviation from the goal direction, both in radians.
struct PathWeights {
    double lambda0 = 1.0;
    double lambda0_sharp = 4.0;
    double lambda1 = 0.5;
    double lambda2 = 0.5;
};

double edge_weight(double length, bool sharp, const std::optional<Vec3>& prev_dir,
                   const Vec3& edge_dir, const Vec3& goal_dir, const PathWeights& w);

/// Minimum-weight vertex path src -> dst (Dijkstra over directed edge
/// states, exact for the turning-angle term). Edges in `used_edges` and
/// edges/vertices excluded by the optional masks are skipped. On success the
/// path edges are added to `used_edges`. Throws "no path" if unreachable.
std::vector<int> shortest_path(EdgeGraph& g, int src, int dst, const PathWeights& w,
                               const std::vector<char>* vertex_allowed = nullptr,
                               const std::vector<char>* edge_allowed = nullptr);

/// Mesh vertex chosen for each polycube corner: among vertices whose
/// incident patch labels cover the corner's face set (at least 2 of them on
/// smeared junctions), the one closest to the lattice corner mapped through
/// the bbox-to-bbox transform. Throws "corner not found".
std::vector<int> identify_corners(const TriMesh& mesh, const Segmentation& seg,
                                  const PolycubeStructure& pc);

struct PathSet {
    std::vector<int> corner_vertices;      // per polycube corner
    std::vector<std::vector<int>> paths;   // per polycube edge, vertex indices a..b

    std::vector<Vec3> corner_positions(const TriMesh& mesh) const;
    std::vector<std::vector<Vec3>> polylines(const TriMesh& mesh) const;
};

/// Traces one optimized path per polycube edge (corridor limited to the two
/// adjacent patches, falling back to the full graph), then flood-fills the
/// dual graph to rebuild patches bounded exactly by the paths. Throws
/// "flood fill leakage" if regions and faces fail to match 1:1.
std::pair<Segmentation, PathSet> optimize_boundaries(const TriMesh& mesh,
                                                     const Segmentation& seg,
                                                     const PolycubeStructure& pc,
                                                     const PathWeights& w = {});

void save_paths(const PathSet& ps, const std::string& path);
PathSet load_paths(const std::string& path);

}  // namespace polyhex
