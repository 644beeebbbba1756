#pragma once

#include <Eigen/Sparse>

#include "polyhex/tri_mesh.hpp"

namespace polyhex {

/// Dual graph of a triangle mesh: one node per face, edges between faces
/// sharing a mesh edge. Node features are the 9 vertex coordinates plus the
/// unit normal; centroid features are the face centroids.
struct FaceGraph {
    Eigen::SparseMatrix<double> adjacency;    // symmetric 0/1, zero diagonal
    Eigen::MatrixXd node_features;            // n x 12
    Eigen::MatrixXd centroid_features;        // n x 3

    int num_nodes() const { return static_cast<int>(adjacency.rows()); }
};

FaceGraph build_face_graph(const TriMesh& mesh);

}  // namespace polyhex
