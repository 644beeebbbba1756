#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "polyhex/dataset.hpp"
#include "polyhex/quality.hpp"

using namespace polyhex;

namespace {

std::array<Vec3, 8> unit_corners() {
    return {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0),
            Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(1, 1, 1), Vec3(0, 1, 1)};
}

// n^3 unit-spacing grid over [0,n]^3.
HexMesh grid_mesh(int n) {
    HexMesh m;
    auto id = [&](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) m.vertices.push_back(Vec3(i, j, k));
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                m.elements.push_back({id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k),
                                      id(i, j + 1, k), id(i, j, k + 1), id(i + 1, j, k + 1),
                                      id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)});
    return m;
}

// Cube surface features matching grid_mesh(n): triangle mesh, 12 edge
// polylines, 8 corner points.
struct CubeFeatures {
    TriMesh tri;
    SurfaceFeatures features;
};

CubeFeatures cube_features(int n) {
    CubeFeatures cf;
    cf.tri = triangulate(assemble_surface(polycube_template(1))).first;
    for (auto& v : cf.tri.vertices) v *= double(n);
    cf.features.tri = &cf.tri;
    for (const auto& key : detect_sharp_edges(cf.tri, 30.0))
        cf.features.polylines.push_back({cf.tri.vertices[key.a], cf.tri.vertices[key.b]});
    for (int i = 0; i < 8; ++i)
        cf.features.corners.push_back(
            Vec3(i & 1 ? n : 0, i & 2 ? n : 0, i & 4 ? n : 0));
    return cf;
}

std::vector<VertexClass> boundary_face_classes(const HexMesh& m) {
    std::vector<bool> b = m.boundary_vertex_mask();
    std::vector<VertexClass> cls(m.num_vertices(), VertexClass::Interior);
    for (int v = 0; v < m.num_vertices(); ++v)
        if (b[v]) cls[v] = VertexClass::Face;
    return cls;
}

}  // namespace

TEST_CASE("scaled jacobian of reference elements") {
    auto unit = unit_corners();
    JacobianResult r = scaled_jacobian(unit);
    CHECK(!r.degenerate);
    for (double v : r.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.min == doctest::Approx(1.0).epsilon(1e-14));

    // Unscaled Jacobian picks up volume: a 2x cube has det 8 everywhere.
    auto big = unit;
    for (auto& c : big) c *= 2.0;
    JacobianResult j = jacobian(big);
    for (double v : j.values) CHECK(v == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(scaled_jacobian(big).min == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("scaled jacobian of sheared elements") {
    // Shear x += s*z: every frame has columns x, y, (s,0,1)/sqrt(1+s^2),
    // so all 9 determinants equal 1/sqrt(1+s^2).
    for (double s : {0.3, 1.0, 2.5}) {
        CAPTURE(s);
        auto c = unit_corners();
        for (auto& p : c) p.x() += s * p.z();
        JacobianResult r = scaled_jacobian(c);
        double expect = 1.0 / std::sqrt(1.0 + s * s);
        for (double v : r.values) CHECK(v == doctest::Approx(expect).epsilon(1e-12));
        CHECK(r.min == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("inverted and degenerate elements") {
    auto c = unit_corners();
    for (auto& p : c) p.x() = -p.x();  // mirror flips orientation
    JacobianResult r = scaled_jacobian(c);
    CHECK(!r.degenerate);
    for (double v : r.values) CHECK(v == doctest::Approx(-1.0).epsilon(1e-14));

    auto d = unit_corners();
    d[1] = d[0];  // collapsed edge
    JacobianResult rd = scaled_jacobian(d);
    CHECK(rd.degenerate);
    CHECK(rd.min == -1.0);

    HexMesh m = grid_mesh(1);
    m.vertices[m.elements[0][1]] = m.vertices[m.elements[0][0]];
    QualityReport rep = evaluate_quality(m);
    CHECK(rep.negative_count == 1);
    CHECK(rep.min_sj == -1.0);
}

TEST_CASE("pillow single element") {
    HexMesh one = grid_mesh(1);
    HexMesh p = pillow(one);
    CHECK(p.num_elements() == 7);  // shrunk core + 6 boundary sheets
    CHECK(p.num_vertices() == 16);
    p.validate();
    for (int c : p.boundary_face_counts()) CHECK(c <= 1);
    CHECK((p.bbox_min() - one.bbox_min()).norm() < 1e-12);
    CHECK((p.bbox_max() - one.bbox_max()).norm() < 1e-12);
    // Duplicates sit strictly inside, a quarter edge off the boundary.
    for (int v = 8; v < 16; ++v) {
        CHECK(p.vertices[v].minCoeff() > 0.0);
        CHECK(p.vertices[v].maxCoeff() < 1.0);
    }
    CHECK(evaluate_quality(p).min_sj > 0.0);
}

TEST_CASE("pillow cube grid") {
    HexMesh m = grid_mesh(8);
    REQUIRE(m.num_elements() == 512);
    HexMesh p = pillow(m);
    CHECK(p.num_elements() == 512 + 384);  // one sheet element per boundary quad
    p.validate();
    for (int c : p.boundary_face_counts()) CHECK(c <= 1);
    CHECK(evaluate_quality(p).min_sj > 0.0);

    HexMesh closed;  // no boundary at all -> error
    CHECK_THROWS_WITH_AS(pillow(closed), doctest::Contains("no boundary"), MeshError);
}

TEST_CASE("classify boundary vertices on a cube grid") {
    HexMesh m = grid_mesh(2);
    CubeFeatures cf = cube_features(2);
    std::vector<VertexClass> cls = classify_boundary_vertices(m, cf.features);
    REQUIRE(cls.size() == 27);
    int corner = 0, edge = 0, face = 0, interior = 0;
    for (int v = 0; v < 27; ++v) {
        int extreme = 0;
        for (int a = 0; a < 3; ++a)
            extreme += m.vertices[v][a] == 0.0 || m.vertices[v][a] == 2.0;
        VertexClass expect = extreme == 3   ? VertexClass::Corner
                             : extreme == 2 ? VertexClass::Edge
                             : extreme == 1 ? VertexClass::Face
                                            : VertexClass::Interior;
        CHECK(cls[v] == expect);
        corner += cls[v] == VertexClass::Corner;
        edge += cls[v] == VertexClass::Edge;
        face += cls[v] == VertexClass::Face;
        interior += cls[v] == VertexClass::Interior;
    }
    CHECK(corner == 8);
    CHECK(edge == 12);
    CHECK(face == 6);
    CHECK(interior == 1);
}

TEST_CASE("mean edge length") {
    CHECK(mean_edge_length(grid_mesh(1)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean_edge_length(grid_mesh(3)) == doctest::Approx(1.0).epsilon(1e-14));
    HexMesh stretched = grid_mesh(1);
    for (auto& v : stretched.vertices) v *= 2.0;
    CHECK(mean_edge_length(stretched) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("energy identities") {
    HexMesh m = grid_mesh(2);
    std::vector<VertexClass> cls = boundary_face_classes(m);
    std::vector<Vec3> targets = m.vertices;
    double lbar = mean_edge_length(m);
    REQUIRE(lbar == doctest::Approx(1.0));
    // Perfect on-target mesh: only the quality reward remains.
    CHECK(quality_energy(m, targets, cls, lbar) ==
          doctest::Approx(-lbar * lbar * m.num_elements()).epsilon(1e-12));

    // Offsetting one boundary target adds exactly its squared distance.
    int bv = -1, iv = -1;
    for (int v = 0; v < m.num_vertices(); ++v)
        (cls[v] == VertexClass::Face ? bv : iv) = v;
    REQUIRE(bv >= 0);
    REQUIRE(iv >= 0);
    std::vector<Vec3> t2 = targets;
    t2[bv] += Vec3(0.1, -0.2, 0.0);
    CHECK(quality_energy(m, t2, cls, lbar) - quality_energy(m, targets, cls, lbar) ==
          doctest::Approx(0.01 + 0.04).epsilon(1e-9));
    // Interior targets never enter the fitting term.
    std::vector<Vec3> t3 = targets;
    t3[iv] += Vec3(5, 5, 5);
    CHECK(quality_energy(m, t3, cls, lbar) == quality_energy(m, targets, cls, lbar));
}

TEST_CASE("energy gradient matches full-energy differences") {
    HexMesh m = grid_mesh(3);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> c(-0.1, 0.1);
    std::vector<Vec3> targets = m.vertices;
    for (auto& v : m.vertices) v += Vec3(c(rng), c(rng), c(rng));
    std::vector<VertexClass> cls = boundary_face_classes(m);
    double lbar = mean_edge_length(m);
    std::vector<std::vector<int>> ve(m.num_vertices());
    for (int e = 0; e < m.num_elements(); ++e)
        for (int v : m.elements[e]) ve[v].push_back(e);

    const double h = 1e-6 * lbar;  // same step the gradient uses internally
    for (int probe = 0; probe < 20; ++probe) {
        int v = static_cast<int>(rng() % m.num_vertices());
        Vec3 g = energy_gradient(m, targets, cls, lbar, v, ve);
        Vec3 fd;
        Vec3 saved = m.vertices[v];
        for (int a = 0; a < 3; ++a) {
            m.vertices[v][a] = saved[a] + h;
            double ep = quality_energy(m, targets, cls, lbar);
            m.vertices[v][a] = saved[a] - h;
            double em = quality_energy(m, targets, cls, lbar);
            m.vertices[v][a] = saved[a];
            fd[a] = (ep - em) / (2.0 * h);
        }
        CHECK((g - fd).norm() < 1e-6 * (1.0 + g.norm()));
    }
}

TEST_CASE("optimize stops immediately above threshold") {
    HexMesh m = grid_mesh(2);
    HexMesh orig = m;
    CubeFeatures cf = cube_features(2);
    QualityReport rep = optimize_quality(m, cf.features);
    CHECK(rep.iterations == 0);
    CHECK(rep.min_sj == doctest::Approx(1.0).epsilon(1e-12));
    for (int v = 0; v < m.num_vertices(); ++v)
        CHECK((m.vertices[v] - orig.vertices[v]).norm() < 1e-9);
}

TEST_CASE("optimize recovers a jittered grid") {
    HexMesh m = grid_mesh(4);
    CubeFeatures cf = cube_features(4);
    std::vector<bool> b = m.boundary_vertex_mask();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> c(-0.35, 0.35);
    for (int v = 0; v < m.num_vertices(); ++v)
        if (!b[v]) m.vertices[v] += Vec3(c(rng), c(rng), c(rng));
    double before = evaluate_quality(m).min_sj;
    REQUIRE(before < 0.5);

    OptimizeConfig cfg;
    cfg.threshold = 0.5;
    cfg.alpha = 1e-3;
    cfg.max_iters = 50000;
    QualityReport rep = optimize_quality(m, cf.features, cfg);
    CHECK(rep.min_sj >= 0.5);
    CHECK(rep.min_sj > before);
    CHECK(rep.negative_count == 0);
}

TEST_CASE("smart laplacian never lowers the minimum") {
    HexMesh m = grid_mesh(3);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> c(-0.25, 0.25);
    std::vector<bool> b = m.boundary_vertex_mask();
    for (int v = 0; v < m.num_vertices(); ++v)
        if (!b[v]) m.vertices[v] += Vec3(c(rng), c(rng), c(rng));
    CubeFeatures cf = cube_features(3);
    std::vector<VertexClass> cls = classify_boundary_vertices(m, cf.features);
    double before = evaluate_quality(m).min_sj;
    smart_laplacian_smoothing(m, cls);
    double after = evaluate_quality(m).min_sj;
    CHECK(after >= before - 1e-12);
}

TEST_CASE("quality report file") {
    HexMesh m = grid_mesh(1);
    QualityReport rep = evaluate_quality(m);
    rep.iterations = 42;
    std::string path = "/tmp/polyhex_test_quality.txt";
    save_quality_report(rep, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("elements 1\n") != std::string::npos);
    CHECK(ss.str().find("min_sj 1\n") != std::string::npos);
    CHECK(ss.str().find("negative 0\n") != std::string::npos);
    CHECK(ss.str().find("iterations 42\n") != std::string::npos);
}
