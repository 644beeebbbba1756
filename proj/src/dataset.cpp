#include "polyhex/dataset.hpp"

namespace polyhex {

std::vector<Vec3> ground_truth_face_centroids(const TriMesh& mesh,
                                              const std::vector<int>& face_tags,
                                              int num_faces) {
    std::vector<Vec3> sum(num_faces, Vec3::Zero());
    std::vector<int> cnt(num_faces, 0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        int tag = face_tags[f];
        if (tag < 0 || tag >= num_faces) throw MeshError("face tag out of range");
        sum[tag] += mesh.face_centroid(f);
        cnt[tag]++;
    }
    for (int i = 0; i < num_faces; ++i) {
        if (cnt[i] == 0) throw MeshError("empty polycube face " + std::to_string(i));
        sum[i] /= cnt[i];
    }
    return sum;
}

TrainingSample generate_sample(int type_id, std::uint64_t seed, const DatasetParams& params) {
    PolycubeStructure pc = polycube_template(type_id);
    QuadMesh quads = catmull_clark(assemble_surface(pc), params.subdivision_levels);
    auto [tri, tags] = triangulate(quads);
    tri = normalize_to_unit_box(tri);
    tri = random_deform(tri, params.deform, seed);
    tri.validate();
    if (tri.genus() != pc.genus()) throw MeshError("deformed sample changed genus");

    TrainingSample s;
    s.label = type_id;
    s.seed = seed;
    s.face_tags = tags;
    s.graph = build_face_graph(tri);
    s.mesh = std::move(tri);
    return s;
}

std::vector<TrainingSample> generate_dataset(const std::vector<int>& types, int per_type,
                                             std::uint64_t base_seed,
                                             const DatasetParams& params) {
    std::vector<TrainingSample> out;
    std::uint64_t idx = 0;
    for (int t : types)
        for (int i = 0; i < per_type; ++i, ++idx)
            out.push_back(generate_sample(t, base_seed + idx, params));
    return out;
}

}  // namespace polyhex
