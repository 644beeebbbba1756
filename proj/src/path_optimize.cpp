#include <algorithm>
#include <fstream>
#include <map>

#include "polyhex/pathopt.hpp"

namespace polyhex {

std::vector<Vec3> PathSet::corner_positions(const TriMesh& mesh) const {
    std::vector<Vec3> out;
    out.reserve(corner_vertices.size());
    for (int v : corner_vertices) out.push_back(mesh.vertices[v]);
    return out;
}

std::vector<std::vector<Vec3>> PathSet::polylines(const TriMesh& mesh) const {
    std::vector<std::vector<Vec3>> out;
    out.reserve(paths.size());
    for (const auto& p : paths) {
        std::vector<Vec3> line;
        line.reserve(p.size());
        for (int v : p) line.push_back(mesh.vertices[v]);
        out.push_back(std::move(line));
    }
    return out;
}

std::vector<int> identify_corners(const TriMesh& mesh, const Segmentation& seg,
                                  const PolycubeStructure& pc) {
    // Expected corner position: the lattice corner mapped through the
    // bbox-to-bbox transform (the pipeline is axis-aligned throughout, so
    // this anchor disambiguates wide junction regions on smooth inputs
    // better than patch-centroid distances do).
    Vec3 lat_lo = pc.corners.empty() ? Vec3::Zero() : Vec3(pc.corners[0].cast<double>());
    Vec3 lat_hi = lat_lo;
    for (const auto& face : pc.faces)
        for (const auto& facet : face.facets)
            for (const IVec3& p : facet.corner_points()) {
                lat_lo = lat_lo.cwiseMin(p.cast<double>());
                lat_hi = lat_hi.cwiseMax(p.cast<double>());
            }
    Vec3 lo = mesh.bbox_min(), hi = mesh.bbox_max();
    auto anchor = [&](const IVec3& p) -> Vec3 {
        Vec3 t;
        for (int a = 0; a < 3; ++a) {
            double extent = std::max(lat_hi[a] - lat_lo[a], 1.0);
            t[a] = lo[a] + (p[a] - lat_lo[a]) / extent * (hi[a] - lo[a]);
        }
        return t;
    };

    // Faces incident to each lattice corner point.
    std::vector<std::set<int>> corner_faces(pc.corners.size());
    for (const auto& face : pc.faces)
        for (const auto& facet : face.facets)
            for (const IVec3& p : facet.corner_points()) {
                int ci = pc.corner_index(p);
                if (ci >= 0) corner_faces[ci].insert(face.id);
            }

    // Patch labels around each mesh vertex.
    std::vector<std::set<int>> vertex_patches(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f)
        for (int v : mesh.faces[f]) vertex_patches[v].insert(seg.labels[f]);

    std::vector<int> result(pc.corners.size(), -1);
    std::vector<char> taken(mesh.num_vertices(), 0);
    for (size_t c = 0; c < pc.corners.size(); ++c) {
        const std::set<int>& want = corner_faces[c];
        // Prefer full patch coverage; degrade gracefully on junctions the
        // clustering smeared too wide to cover every face.
        int best = -1, best_cover = 0;
        double best_score = 0.0;
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            if (taken[v]) continue;
            int cover = 0;
            for (int fid : want) cover += vertex_patches[v].count(fid);
            if (cover < 2) continue;
            double score = (mesh.vertices[v] - anchor(pc.corners[c])).norm();
            if (cover > best_cover || (cover == best_cover && score < best_score)) {
                best = v;
                best_cover = cover;
                best_score = score;
            }
        }
        if (best < 0)
            throw MeshError("corner not found for polycube corner " + std::to_string(c));
        taken[best] = 1;
        result[c] = best;
    }
    return result;
}

namespace {

struct DSU {
    std::vector<int> parent;
    explicit DSU(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::pair<Segmentation, PathSet> optimize_boundaries(const TriMesh& mesh,
                                                     const Segmentation& seg,
                                                     const PolycubeStructure& pc,
                                                     const PathWeights& w) {
    PathSet ps;
    ps.corner_vertices = identify_corners(mesh, seg, pc);

    std::set<EdgeKey> sharp = mesh.sharp_edges;
    if (sharp.empty()) sharp = detect_sharp_edges(mesh, 30.0);
    EdgeGraph g = build_edge_graph(mesh, sharp);

    // Polycube edges are already sorted by (min, max) corner id.
    std::vector<char> vertex_allowed(mesh.num_vertices(), 1);
    ps.paths.resize(pc.edges.size());
    for (size_t ei = 0; ei < pc.edges.size(); ++ei) {
        const PolycubeEdge& pe = pc.edges[ei];
        int src = ps.corner_vertices[pe.corner_a];
        int dst = ps.corner_vertices[pe.corner_b];

        // Corridor: edges with both incident triangles in the two adjacent
        // patches (one-sided membership would let a path trace a foreign
        // patch boundary and break the flood fill).
        std::vector<char> edge_allowed(g.edges.size(), 0);
        for (size_t e = 0; e < g.edges.size(); ++e) {
            bool inside = true;
            for (int t : g.edges[e].tris)
                inside &= t >= 0 && (seg.labels[t] == pe.face_ids[0] ||
                                     seg.labels[t] == pe.face_ids[1]);
            edge_allowed[e] = inside;
        }

        std::vector<char> allowed = vertex_allowed;
        allowed[src] = 1;
        std::vector<int> path;
        try {
            path = shortest_path(g, src, dst, w, &allowed, &edge_allowed);
        } catch (const MeshError&) {
            path = shortest_path(g, src, dst, w, &allowed, nullptr);
        }
        for (size_t i = 1; i + 1 < path.size(); ++i) vertex_allowed[path[i]] = 0;
        ps.paths[ei] = std::move(path);
    }

    // Flood fill over the dual graph, not crossing path edges.
    std::set<EdgeKey> barrier;
    for (const auto& p : ps.paths)
        for (size_t i = 0; i + 1 < p.size(); ++i) barrier.insert(EdgeKey(p[i], p[i + 1]));

    DSU dsu(mesh.num_faces());
    for (const auto& [key, tris] : mesh.edge_faces())
        if (!barrier.count(key)) dsu.unite(tris[0], tris[1]);

    std::map<int, std::vector<int>> regions;  // root -> triangle ids
    for (int f = 0; f < mesh.num_faces(); ++f) regions[dsu.find(f)].push_back(f);
    if (static_cast<int>(regions.size()) != seg.k) throw MeshError("flood fill leakage");

    // Region -> face by greedy vote matching (a plain per-region majority
    // can hand two regions the same face when labels are noisy).
    std::vector<const std::vector<int>*> region_tris;
    for (const auto& [root, tris] : regions) region_tris.push_back(&tris);
    std::vector<std::array<int, 3>> votes;  // (count, region, face)
    for (size_t r = 0; r < region_tris.size(); ++r) {
        std::map<int, int> v;
        for (int t : *region_tris[r]) v[seg.labels[t]]++;
        for (const auto& [face, n] : v) votes.push_back({n, static_cast<int>(r), face});
    }
    std::sort(votes.begin(), votes.end(), [](const auto& a, const auto& b) {
        return a[0] != b[0] ? a[0] > b[0] : (a[1] != b[1] ? a[1] < b[1] : a[2] < b[2]);
    });
    std::vector<int> region_face(region_tris.size(), -1);
    std::vector<char> face_used(seg.k, 0);
    for (const auto& [n, r, face] : votes) {
        if (region_face[r] >= 0 || face_used[face]) continue;
        region_face[r] = face;
        face_used[face] = 1;
    }
    Segmentation out = seg;
    for (size_t r = 0; r < region_tris.size(); ++r) {
        if (region_face[r] < 0) throw MeshError("flood fill leakage");
        for (int t : *region_tris[r]) out.labels[t] = region_face[r];
    }
    return {out, ps};
}

void save_paths(const PathSet& ps, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot open " + path);
    out << ps.corner_vertices.size() << " " << ps.paths.size() << "\n";
    for (size_t i = 0; i < ps.corner_vertices.size(); ++i)
        out << ps.corner_vertices[i] << (i + 1 == ps.corner_vertices.size() ? "\n" : " ");
    for (const auto& p : ps.paths) {
        out << p.size();
        for (int v : p) out << " " << v;
        out << "\n";
    }
}

PathSet load_paths(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open " + path);
    size_t nc = 0, np = 0;
    if (!(in >> nc >> np)) throw MeshError("corrupt path file");
    PathSet ps;
    ps.corner_vertices.resize(nc);
    for (size_t i = 0; i < nc; ++i)
        if (!(in >> ps.corner_vertices[i])) throw MeshError("corrupt path file");
    ps.paths.resize(np);
    for (size_t i = 0; i < np; ++i) {
        size_t len = 0;
        if (!(in >> len) || len < 2) throw MeshError("corrupt path file");
        ps.paths[i].resize(len);
        for (size_t j = 0; j < len; ++j)
            if (!(in >> ps.paths[i][j])) throw MeshError("corrupt path file");
    }
    return ps;
}

}  // namespace polyhex
