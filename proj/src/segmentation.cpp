#include <fstream>
#include <map>
#include <sstream>

#include "polyhex/segmentation.hpp"

namespace polyhex {

std::vector<Vec3> seed_normals(const PolycubeStructure& pc) {
    std::vector<Vec3> seeds;
    seeds.reserve(pc.faces.size());
    for (const auto& f : pc.faces) seeds.push_back(f.label.unit());
    return seeds;
}

namespace {

int dir_index(const AxisDir& d) { return d.axis * 2 + (d.sign > 0 ? 0 : 1); }

}  // namespace

Segmentation segment(const TriMesh& mesh, const PolycubeStructure& pc,
                     const std::vector<Vec3>& face_centroids, double tol) {
    if (static_cast<int>(face_centroids.size()) != pc.num_faces())
        throw MeshError("segmentation: centroid count mismatch");

    // Stage 1: cluster unit triangle normals around the distinct axis labels.
    std::map<int, std::vector<int>> by_dir;  // dir index -> face ids
    for (const auto& f : pc.faces) by_dir[dir_index(f.label)].push_back(f.id);

    std::vector<Vec3> dir_seeds;
    std::vector<int> dir_of_cluster;
    for (const auto& [d, ids] : by_dir) {
        AxisDir ad{d / 2, d % 2 == 0 ? 1 : -1};
        dir_seeds.push_back(ad.unit());
        dir_of_cluster.push_back(d);
    }

    std::vector<Vec3> normals(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) normals[f] = mesh.face_normal(f);
    ClusterState stage1 = kmeans(normals, dir_seeds, tol);

    // Stage 2: faces sharing a label are split in centroid space, seeded at
    // the (predicted or ground-truth) face centroids.
    Segmentation seg;
    seg.k = pc.num_faces();
    seg.labels.assign(mesh.num_faces(), -1);
    seg.patch_to_face.resize(seg.k);
    for (int i = 0; i < seg.k; ++i) seg.patch_to_face[i] = i;

    for (size_t c = 0; c < dir_seeds.size(); ++c) {
        const std::vector<int>& ids = by_dir[dir_of_cluster[c]];
        std::vector<int> tri_ids;
        for (int f = 0; f < mesh.num_faces(); ++f)
            if (stage1.assignment[f] == static_cast<int>(c)) tri_ids.push_back(f);
        if (tri_ids.empty()) throw MeshError("segmentation mismatch: empty direction cluster");

        if (ids.size() == 1) {
            for (int f : tri_ids) seg.labels[f] = ids[0];
            continue;
        }
        std::vector<Vec3> pts(tri_ids.size());
        for (size_t i = 0; i < tri_ids.size(); ++i) pts[i] = mesh.face_centroid(tri_ids[i]);
        std::vector<Vec3> seeds(ids.size());
        for (size_t i = 0; i < ids.size(); ++i) seeds[i] = face_centroids[ids[i]];
        ClusterState sub = kmeans(pts, seeds, tol);
        for (size_t i = 0; i < tri_ids.size(); ++i)
            seg.labels[tri_ids[i]] = ids[sub.assignment[i]];
    }

    std::vector<int> count(seg.k, 0);
    for (int l : seg.labels) {
        if (l < 0) throw MeshError("segmentation mismatch: unlabeled triangle");
        count[l]++;
    }
    for (int i = 0; i < seg.k; ++i)
        if (count[i] == 0)
            throw MeshError("segmentation mismatch: empty patch " + std::to_string(i));
    return seg;
}

void save_segmentation(const Segmentation& seg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot open " + path);
    out << seg.k << " " << seg.labels.size() << "\n";
    for (size_t i = 0; i < seg.labels.size(); ++i)
        out << seg.labels[i] << (i + 1 == seg.labels.size() ? "\n" : " ");
}

Segmentation load_segmentation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open " + path);
    Segmentation seg;
    size_t n = 0;
    if (!(in >> seg.k >> n)) throw MeshError("corrupt segmentation file");
    seg.labels.resize(n);
    for (size_t i = 0; i < n; ++i)
        if (!(in >> seg.labels[i]) || seg.labels[i] < 0 || seg.labels[i] >= seg.k)
            throw MeshError("corrupt segmentation file");
    seg.patch_to_face.resize(seg.k);
    for (int i = 0; i < seg.k; ++i) seg.patch_to_face[i] = i;
    return seg;
}

}  // namespace polyhex
