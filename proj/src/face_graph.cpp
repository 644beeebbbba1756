#include "polyhex/face_graph.hpp"

namespace polyhex {

FaceGraph build_face_graph(const TriMesh& mesh) {
    const int n = mesh.num_faces();
    FaceGraph g;
    g.node_features.resize(n, 12);
    g.centroid_features.resize(n, 3);
    for (int f = 0; f < n; ++f) {
        const auto& t = mesh.faces[f];
        for (int i = 0; i < 3; ++i)
            g.node_features.block<1, 3>(f, 3 * i) = mesh.vertices[t[i]].transpose();
        g.node_features.block<1, 3>(f, 9) = mesh.face_normal(f).transpose();
        g.centroid_features.row(f) = mesh.face_centroid(f).transpose();
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& [k, ff] : mesh.edge_faces()) {
        if (ff[1] == -1) continue;
        trip.emplace_back(ff[0], ff[1], 1.0);
        trip.emplace_back(ff[1], ff[0], 1.0);
    }
    g.adjacency.resize(n, n);
    g.adjacency.setFromTriplets(trip.begin(), trip.end());
    return g;
}

}  // namespace polyhex
