#include <algorithm>
#include <cstdio>
#include <fstream>

#include "polyhex/quality.hpp"

namespace polyhex {

namespace {

// Edge-vector neighbors of each corner, ordered so the frame determinant is
// +1 on the reference cube.
constexpr int kNeighbors[8][3] = {{1, 3, 4}, {2, 0, 5}, {3, 1, 6}, {0, 2, 7},
                                  {7, 5, 0}, {4, 6, 1}, {5, 7, 2}, {6, 4, 3}};

JacobianResult jacobian_impl(const std::array<Vec3, 8>& c, bool scaled) {
    JacobianResult r;
    constexpr double tiny = 1e-30;
    for (int i = 0; i < 8; ++i) {
        Eigen::Matrix3d J;
        bool bad = false;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = c[kNeighbors[i][k]] - c[i];
            if (scaled) {
                double n = e.norm();
                if (n < tiny) bad = true;
                else e /= n;
            }
            J.col(k) = e;
        }
        r.values[i] = bad ? -1.0 : J.determinant();
        r.degenerate |= bad;
    }
    // Center frame from the three opposite-face-center differences.
    auto face_center = [&](std::initializer_list<int> ids) -> Vec3 {
        Vec3 s = Vec3::Zero();
        for (int i : ids) s += c[i];
        return s / 4.0;
    };
    Eigen::Matrix3d J;
    J.col(0) = face_center({1, 2, 6, 5}) - face_center({0, 3, 7, 4});
    J.col(1) = face_center({2, 3, 7, 6}) - face_center({0, 1, 5, 4});
    J.col(2) = face_center({4, 5, 6, 7}) - face_center({0, 1, 2, 3});
    if (scaled) {
        bool bad = false;
        for (int k = 0; k < 3; ++k) {
            double n = J.col(k).norm();
            if (n < tiny) bad = true;
            else J.col(k) /= n;
        }
        r.values[8] = bad ? -1.0 : J.determinant();
        r.degenerate |= bad;
    } else {
        r.values[8] = J.determinant();
    }
    r.min = *std::min_element(r.values.begin(), r.values.end());
    return r;
}

}  // namespace

JacobianResult scaled_jacobian(const std::array<Vec3, 8>& corners) {
    return jacobian_impl(corners, true);
}

JacobianResult jacobian(const std::array<Vec3, 8>& corners) {
    return jacobian_impl(corners, false);
}

std::array<Vec3, 8> element_corners(const HexMesh& mesh, int e) {
    std::array<Vec3, 8> c;
    for (int i = 0; i < 8; ++i) c[i] = mesh.vertices[mesh.elements[e][i]];
    return c;
}

QualityReport evaluate_quality(const HexMesh& mesh) {
    QualityReport rep;
    rep.per_element.resize(mesh.num_elements());
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        double sj = scaled_jacobian(element_corners(mesh, e)).min;
        rep.per_element[e] = sj;
        sum += sj;
        if (sj < 0.0) rep.negative_count++;
    }
    rep.min_sj = mesh.num_elements()
                     ? *std::min_element(rep.per_element.begin(), rep.per_element.end())
                     : 0.0;
    rep.mean_sj = mesh.num_elements() ? sum / mesh.num_elements() : 0.0;
    return rep;
}

void save_quality_report(const QualityReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot open " + path);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "elements %zu\nmin_sj %.9g\nmean_sj %.9g\nnegative %d\niterations %ld\n",
                  report.per_element.size(), report.min_sj, report.mean_sj,
                  report.negative_count, report.iterations);
    out << buf;
}

}  // namespace polyhex
