#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "polyhex/dataset.hpp"
#include "polyhex/gcn.hpp"
#include "polyhex/quad_mesh.hpp"

using namespace polyhex;

namespace {

Eigen::SparseMatrix<double> random_adjacency(std::mt19937_64& rng, int n) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng() % 3 == 0) A(i, j) = A(j, i) = 1.0;
    return A.sparseView();
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
    Eigen::MatrixXd M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = uniform_draw(rng, -1.0, 1.0);
    return M;
}

// Dense-matrix oracle for one layer: ReLU(D^-1/2 (A+I) D^-1/2 F W).
Eigen::MatrixXd dense_layer(const Eigen::MatrixXd& A, const Eigen::MatrixXd& F,
                            const Eigen::MatrixXd& W) {
    Eigen::MatrixXd At = A + Eigen::MatrixXd::Identity(A.rows(), A.cols());
    Eigen::VectorXd d = At.rowwise().sum().array().sqrt().inverse();
    Eigen::MatrixXd Ah = d.asDiagonal() * At * d.asDiagonal();
    return (Ah * F * W).cwiseMax(0.0);
}

GcnModel zero_classifier() {
    GcnModel m = GcnModel::make_classifier();
    for (auto& W : m.gconv) W.setZero();
    for (auto& W : m.head_w) W.setZero();
    for (auto& b : m.head_b) b.setZero();
    return m;
}

FaceGraph cube_graph() {
    return build_face_graph(triangulate(assemble_surface(polycube_template(1))).first);
}

// Batch loss matching the training objective (CE mean + L2 on gconv).
// `labels` holds 0-based class indices.
double batch_loss(const GcnModel& model, const std::vector<FaceGraph>& graphs,
                  const std::vector<int>& labels, double lambda) {
    std::vector<Eigen::VectorXd> probs;
    for (const auto& g : graphs) probs.push_back(forward_classify(model, g));
    return cross_entropy_loss(probs, labels, lambda, model);
}

}  // namespace

TEST_CASE("normalize adjacency") {
    Eigen::SparseMatrix<double> single(1, 1);
    CHECK(Eigen::MatrixXd(normalize_adjacency(single).matrix)(0, 0) == doctest::Approx(1.0));

    Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(2, 2);
    pair(0, 1) = pair(1, 0) = 1.0;
    Eigen::MatrixXd P = Eigen::MatrixXd(normalize_adjacency(pair.sparseView()).matrix);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(P(i, j) == doctest::Approx(0.5));

    Eigen::MatrixXd tet = Eigen::MatrixXd::Ones(4, 4) - Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd T = Eigen::MatrixXd(normalize_adjacency(tet.sparseView()).matrix);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(T(i, j) == doctest::Approx(0.25));
}

TEST_CASE("layer forward matches dense oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng() % 49);
        Eigen::SparseMatrix<double> A = random_adjacency(rng, n);
        int fin = 1 + static_cast<int>(rng() % 12), fout = 1 + static_cast<int>(rng() % 16);
        Eigen::MatrixXd F = random_matrix(rng, n, fin);
        Eigen::MatrixXd W = random_matrix(rng, fin, fout);
        Eigen::MatrixXd got = gcn_layer_forward(F, normalize_adjacency(A), W);
        Eigen::MatrixXd want = dense_layer(Eigen::MatrixXd(A), F, W);
        REQUIRE((got - want).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("layer forward edge cases") {
    std::mt19937_64 rng(3);
    Eigen::SparseMatrix<double> single(1, 1);
    Eigen::MatrixXd F = Eigen::MatrixXd::Ones(1, 12);
    Eigen::MatrixXd I12 = Eigen::MatrixXd::Identity(12, 12);
    CHECK((gcn_layer_forward(F, normalize_adjacency(single), I12) - F).norm() == 0.0);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(12, 7);
    CHECK(gcn_layer_forward(F, normalize_adjacency(single), Z).norm() == 0.0);
    CHECK_THROWS_AS(
        gcn_layer_forward(random_matrix(rng, 1, 5), normalize_adjacency(single), I12),
        MeshError);
}

TEST_CASE("classifier forward basics") {
    FaceGraph g = cube_graph();
    Eigen::VectorXd p0 = forward_classify(zero_classifier(), g);
    REQUIRE(p0.size() == kNumClasses);
    for (int c = 0; c < kNumClasses; ++c) CHECK(p0[c] == doctest::Approx(1.0 / 11.0));

    GcnModel m = GcnModel::make_classifier();
    m.init_glorot(5);
    Eigen::VectorXd p = forward_classify(m, g);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.maxCoeff() <= 1.0);

    // Graph-level output is invariant to node relabeling.
    int n = g.num_nodes();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(9);
    std::shuffle(perm.begin(), perm.end(), rng);
    FaceGraph h;
    Eigen::MatrixXd A = Eigen::MatrixXd(g.adjacency), B = Eigen::MatrixXd::Zero(n, n);
    h.node_features.resize(n, g.node_features.cols());
    for (int i = 0; i < n; ++i) {
        h.node_features.row(perm[i]) = g.node_features.row(i);
        for (int j = 0; j < n; ++j) B(perm[i], perm[j]) = A(i, j);
    }
    h.adjacency = B.sparseView();
    CHECK((forward_classify(m, h) - p).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("cross entropy loss") {
    GcnModel zero = zero_classifier();
    std::vector<Eigen::VectorXd> hot(3, Eigen::VectorXd::Zero(kNumClasses));
    hot[0][2] = hot[1][5] = hot[2][0] = 1.0;
    CHECK(cross_entropy_loss(hot, {2, 5, 0}, 0.0, zero) == doctest::Approx(0.0));

    std::vector<Eigen::VectorXd> uni(4, Eigen::VectorXd::Constant(kNumClasses, 1.0 / 11.0));
    CHECK(cross_entropy_loss(uni, {0, 3, 6, 10}, 0.0, zero) ==
          doctest::Approx(std::log(11.0)).epsilon(1e-9));
    // Zero weights: the lambda term vanishes.
    CHECK(cross_entropy_loss(uni, {0, 3, 6, 10}, 0.5, zero) ==
          doctest::Approx(std::log(11.0)).epsilon(1e-9));

    // L2 term is exactly lambda * sum ||W_gconv||^2.
    GcnModel m = GcnModel::make_classifier();
    m.init_glorot(17);
    double reg = 0.0;
    for (const auto& W : m.gconv) reg += W.squaredNorm();
    double l0 = cross_entropy_loss(uni, {0, 3, 6, 10}, 0.0, m);
    double l1 = cross_entropy_loss(uni, {0, 3, 6, 10}, 0.1, m);
    CHECK(l1 - l0 == doctest::Approx(0.1 * reg).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches finite differences") {
    std::vector<TrainingSample> batch = generate_dataset({1, 2, 3, 4, 7}, 1, 31);
    REQUIRE(batch.size() == 5);
    std::vector<FaceGraph> graphs;
    std::vector<int> labels;
    for (const auto& s : batch) {
        graphs.push_back(s.graph);
        labels.push_back(s.label - 1);
    }
    const double lambda = 0.01;
    GcnModel model = GcnModel::make_classifier();
    model.init_glorot(23);

    // Analytic batch gradient: mean of per-sample backward + L2 on gconv.
    GcnGradients grad = GcnGradients::zeros_like(model);
    for (size_t i = 0; i < graphs.size(); ++i) {
        NormalizedAdjacency adj = normalize_adjacency(graphs[i].adjacency);
        ForwardCache cache;
        Eigen::VectorXd logits = forward_raw(model, adj, graphs[i].node_features, &cache);
        Eigen::VectorXd dlogits = softmax(logits);
        dlogits[labels[i]] -= 1.0;
        grad.add_scaled(backward(model, adj, cache, dlogits), 1.0 / graphs.size());
    }
    for (size_t l = 0; l < model.gconv.size(); ++l)
        grad.gconv[l] += 2.0 * lambda * model.gconv[l];

    const double h = 1e-5;
    std::mt19937_64 rng(71);
    // Mixed tolerance: a ReLU kink within h of the probe point biases the
    // central difference by (slope jump)/2, a tiny absolute offset that no
    // step size avoids, so allow 1e-6 absolute on top of 1e-4 relative.
    auto check_value = [&](double* p, double analytic) {
        double saved = *p;
        *p = saved + h;
        double lp = batch_loss(model, graphs, labels, lambda);
        *p = saved - h;
        double lm = batch_loss(model, graphs, labels, lambda);
        *p = saved;
        double fd = (lp - lm) / (2.0 * h);
        double scale = std::max(std::abs(fd), std::abs(analytic));
        CHECK(std::abs(fd - analytic) < 1e-6 + 1e-4 * scale);
    };
    auto check_matrix = [&](Eigen::MatrixXd& W, const Eigen::MatrixXd& G) {
        for (int r = 0; r < 4; ++r) {
            int i = static_cast<int>(rng() % W.rows()),
                j = static_cast<int>(rng() % W.cols());
            check_value(&W(i, j), G(i, j));
        }
    };
    for (size_t l = 0; l < model.gconv.size(); ++l)
        check_matrix(model.gconv[l], grad.gconv[l]);
    for (size_t l = 0; l < model.head_w.size(); ++l)
        check_matrix(model.head_w[l], grad.head_w[l]);
    for (size_t l = 0; l < model.head_b.size(); ++l)
        for (int r = 0; r < 2; ++r) {
            int i = static_cast<int>(rng() % model.head_b[l].size());
            check_value(&model.head_b[l][i], grad.head_b[l][i]);
        }
}

TEST_CASE("centroid regressor forward") {
    FaceGraph g = cube_graph();
    GcnModel m = GcnModel::make_centroid_regressor(4);
    for (auto& W : m.gconv) W.setZero();
    for (auto& W : m.head_w) W.setZero();
    for (auto& b : m.head_b) b.setZero();
    m.head_b.back() << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
    std::vector<Vec3> pts = forward_centroid(m, g, 4);
    REQUIRE(pts.size() == 4);
    CHECK((pts[0] - Vec3(1, 2, 3)).norm() == 0.0);
    CHECK((pts[3] - Vec3(10, 11, 12)).norm() == 0.0);
    CHECK_THROWS_AS(forward_centroid(m, g, 5), MeshError);
}

TEST_CASE("model save load round trip") {
    std::string path = "/tmp/polyhex_test_model.txt";
    GcnModel m = GcnModel::make_classifier();
    m.init_glorot(99);
    save_model(m, path);
    GcnModel back = load_model(path);
    CHECK(back.kind == ModelKind::Classifier);
    FaceGraph g = cube_graph();
    CHECK((forward_classify(m, g) - forward_classify(back, g)).norm() == 0.0);

    // Truncation is detected.
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream out(path);
    out << text.substr(0, text.size() / 2);
    out.close();
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("corrupt model file"), MeshError);

    // Kind tags round trip for the regressor too.
    GcnModel r = GcnModel::make_centroid_regressor(3);
    r.init_glorot(7);
    save_model(r, path);
    CHECK(load_model(path).kind == ModelKind::CentroidRegressor);
}

TEST_CASE("training determinism and degenerate tasks") {
    std::vector<TrainingSample> data = generate_dataset({1, 3}, 8, 51);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.rng_seed = 2;
    cfg.batch_size = 4;
    TrainResult a = train_classifier(data, cfg);
    TrainResult b = train_classifier(data, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t e = 0; e < a.trace.size(); ++e) {
        CHECK(a.trace[e].loss == b.trace[e].loss);
        CHECK(a.trace[e].val_accuracy == b.trace[e].val_accuracy);
        CHECK(std::isfinite(a.trace[e].loss));
    }

    std::vector<TrainingSample> mono = generate_dataset({2}, 8, 77);
    TrainConfig mcfg;
    mcfg.epochs = 5;
    mcfg.rng_seed = 3;
    TrainResult m = train_classifier(mono, mcfg);
    CHECK(m.trace.back().train_accuracy == 1.0);

    CHECK_THROWS_WITH_AS(train_classifier({}, cfg), doctest::Contains("empty dataset"),
                         MeshError);
}

TEST_CASE("centroid training memorizes a fixed sample") {
    TrainingSample s = generate_sample(1, 13, DatasetParams{});
    CentroidSample cs;
    cs.graph = s.graph;
    cs.targets = ground_truth_face_centroids(s.mesh, s.face_tags, 6);
    std::vector<CentroidSample> data(8, cs);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.rng_seed = 4;
    cfg.optimizer = Optimizer::RmsProp;
    cfg.learning_rate = 1e-3;
    cfg.validation_fraction = 0.0;
    TrainResult r = train_centroid(data, cfg);
    CHECK(r.trace.back().loss < 1e-3);
    CHECK(r.trace.back().loss < r.trace.front().loss);
}
