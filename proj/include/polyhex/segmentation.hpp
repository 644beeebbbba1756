#pragma once

#include "polyhex/polycube.hpp"
#include "polyhex/tri_mesh.hpp"

namespace polyhex {

struct ClusterState {
    std::vector<Vec3> centroids;
    std::vector<int> assignment;
    double loss = 0.0;
    std::vector<double> loss_history;  // one entry per Lloyd iteration
};

/// Lloyd iterations seeded at `seeds`; assignment ties go to the lowest
/// cluster index; empty clusters are reseeded to the globally worst-fit
/// point. Stops when the relative loss change drops below `tol`.
ClusterState kmeans(const std::vector<Vec3>& points, const std::vector<Vec3>& seeds,
                    double tol = 0.03, int max_iters = 500);

/// One unit seed per boundary face: its axis-label vector (k = N, with
/// repeats across same-label faces).
std::vector<Vec3> seed_normals(const PolycubeStructure& pc);

struct Segmentation {
    std::vector<int> labels;         // per triangle -> patch id
    std::vector<int> patch_to_face;  // patch id -> polycube face id (identity)
    int k = 0;
};

/// Two-stage segmentation: K-means over unit face normals seeded by the
/// distinct polycube axis labels, then a centroid-space re-split of every
/// label shared by several boundary faces (coplanar or parallel-plane),
/// seeded at `face_centroids` (ground truth in oracle mode, GCN-centroid
/// predictions otherwise). Throws "segmentation mismatch" if any face ends
/// up empty.
Segmentation segment(const TriMesh& mesh, const PolycubeStructure& pc,
                     const std::vector<Vec3>& face_centroids, double tol = 0.03);

void save_segmentation(const Segmentation& seg, const std::string& path);
Segmentation load_segmentation(const std::string& path);

}  // namespace polyhex
