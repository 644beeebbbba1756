#pragma once

#include <cstdint>
#include <random>

#include "polyhex/face_graph.hpp"
#include "polyhex/quad_mesh.hpp"

namespace polyhex {

/// Trilinear free-form deformation cage: a resolution^3 control lattice
/// strictly enclosing the mesh bounding box.
struct DeformationCage {
    int resolution = 4;             // control points per axis
    Vec3 origin;                    // lattice corner
    Vec3 cell_size;                 // spacing per axis
    std::vector<Vec3> offsets;      // per control point displacement

    DeformationCage(const TriMesh& mesh, int resolution);

    int index(int i, int j, int k) const {
        return (i * resolution + j) * resolution + k;
    }
    Vec3 control_point(int i, int j, int k) const;
    /// Trilinear interpolation of control offsets at p.
    Vec3 displacement(const Vec3& p) const;
    TriMesh apply(const TriMesh& mesh) const;
};

struct DeformParams {
    int cage_resolution = 4;
    double select_fraction = 0.3;   // fraction of control points perturbed
    double sigma = 0.08;            // stddev as a fraction of the bbox diagonal
};

/// Random cage deformation; displacement components are i.i.d. normal with
/// stddev sigma * bbox_diagonal. Rejection-resampled (<= 100 attempts) until
/// no face degenerates.
TriMesh random_deform(const TriMesh& mesh, const DeformParams& params, std::uint64_t rng_seed);

struct TrainingSample {
    FaceGraph graph;
    int label = 0;                  // template type id 1..11
    std::uint64_t seed = 0;
    TriMesh mesh;                   // normalized, deformed
    std::vector<int> face_tags;     // ground-truth polycube face id per triangle
};

/// Mean triangle centroid per polycube face id, ordered by face id.
std::vector<Vec3> ground_truth_face_centroids(const TriMesh& mesh,
                                              const std::vector<int>& face_tags,
                                              int num_faces);

struct DatasetParams {
    int subdivision_levels = 2;
    DeformParams deform;
};

/// assemble -> subdivide -> triangulate -> normalize -> deform, one sample per
/// (type, index); seed = base_seed + running index.
TrainingSample generate_sample(int type_id, std::uint64_t seed, const DatasetParams& params);
std::vector<TrainingSample> generate_dataset(const std::vector<int>& types, int per_type,
                                             std::uint64_t base_seed,
                                             const DatasetParams& params = {});

/// Deterministic uniform / normal draws (the std distributions are not
/// portable across library implementations).
double uniform_draw(std::mt19937_64& rng, double lo, double hi);
double normal_draw(std::mt19937_64& rng, double mean, double stddev);

}  // namespace polyhex
