#include <cmath>

#include "polyhex/dataset.hpp"

namespace polyhex {

double uniform_draw(std::mt19937_64& rng, double lo, double hi) {
    // 53-bit mantissa draw
    double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    return lo + u * (hi - lo);
}

double normal_draw(std::mt19937_64& rng, double mean, double stddev) {
    // Box-Muller; one value per call keeps the stream layout simple
    double u1 = uniform_draw(rng, 0.0, 1.0);
    double u2 = uniform_draw(rng, 0.0, 1.0);
    while (u1 <= 1e-300) u1 = uniform_draw(rng, 0.0, 1.0);
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

DeformationCage::DeformationCage(const TriMesh& mesh, int res) : resolution(res) {
    if (res < 2) throw MeshError("cage resolution must be >= 2");
    Vec3 lo = mesh.bbox_min(), hi = mesh.bbox_max();
    Vec3 margin = 0.05 * (hi - lo).norm() * Vec3::Ones();
    origin = lo - margin;
    cell_size = (hi - lo + 2.0 * margin) / static_cast<double>(res - 1);
    offsets.assign(res * res * res, Vec3::Zero());
}

Vec3 DeformationCage::control_point(int i, int j, int k) const {
    return origin + Vec3(i * cell_size.x(), j * cell_size.y(), k * cell_size.z());
}

Vec3 DeformationCage::displacement(const Vec3& p) const {
    Vec3 local = (p - origin).cwiseQuotient(cell_size);
    int ci[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        ci[a] = std::clamp(static_cast<int>(std::floor(local[a])), 0, resolution - 2);
        t[a] = std::clamp(local[a] - ci[a], 0.0, 1.0);
    }
    Vec3 d = Vec3::Zero();
    for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
            for (int dk = 0; dk < 2; ++dk) {
                double w = (di ? t[0] : 1 - t[0]) * (dj ? t[1] : 1 - t[1]) * (dk ? t[2] : 1 - t[2]);
                d += w * offsets[index(ci[0] + di, ci[1] + dj, ci[2] + dk)];
            }
    return d;
}

TriMesh DeformationCage::apply(const TriMesh& mesh) const {
    TriMesh out = mesh;
    for (auto& v : out.vertices) v += displacement(v);
    return out;
}

TriMesh random_deform(const TriMesh& mesh, const DeformParams& params, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    const double diag = mesh.bbox_diagonal();
    const double area_floor = 1e-12 * diag * diag;
    for (int attempt = 0; attempt < 100; ++attempt) {
        DeformationCage cage(mesh, params.cage_resolution);
        const int n = static_cast<int>(cage.offsets.size());
        for (int i = 0; i < n; ++i) {
            bool selected = uniform_draw(rng, 0.0, 1.0) < params.select_fraction;
            Vec3 d(normal_draw(rng, 0.0, params.sigma * diag),
                   normal_draw(rng, 0.0, params.sigma * diag),
                   normal_draw(rng, 0.0, params.sigma * diag));
            if (selected) cage.offsets[i] = d;
        }
        TriMesh out = cage.apply(mesh);
        bool ok = true;
        for (int f = 0; f < out.num_faces() && ok; ++f)
            if (out.face_area(f) <= area_floor) ok = false;
        if (ok) return out;
    }
    throw MeshError("deformation failed");
}

}  // namespace polyhex
