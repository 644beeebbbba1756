#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "polyhex/gcn.hpp"

namespace polyhex {

NormalizedAdjacency normalize_adjacency(const Eigen::SparseMatrix<double>& A) {
    const int n = static_cast<int>(A.rows());
    Eigen::VectorXd deg = Eigen::VectorXd::Ones(n);  // self-loop
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            deg[it.row()] += it.value();
    Eigen::VectorXd dinv = deg.array().rsqrt();
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, dinv[i] * dinv[i]);
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            trip.emplace_back(it.row(), it.col(), it.value() * dinv[it.row()] * dinv[it.col()]);
    NormalizedAdjacency out;
    out.matrix.resize(n, n);
    out.matrix.setFromTriplets(trip.begin(), trip.end());
    return out;
}

GcnModel GcnModel::make_classifier() {
    GcnModel m;
    m.kind = ModelKind::Classifier;
    m.pooling = Pooling::Mean;
    m.gconv = {Eigen::MatrixXd::Zero(12, 128), Eigen::MatrixXd::Zero(128, 256),
               Eigen::MatrixXd::Zero(256, 256), Eigen::MatrixXd::Zero(256, 256)};
    m.head_w = {Eigen::MatrixXd::Zero(256, 128), Eigen::MatrixXd::Zero(128, 128),
                Eigen::MatrixXd::Zero(128, kNumClasses)};
    m.head_b = {Eigen::VectorXd::Zero(128), Eigen::VectorXd::Zero(128),
                Eigen::VectorXd::Zero(kNumClasses)};
    return m;
}

GcnModel GcnModel::make_centroid_regressor(int k) {
    GcnModel m;
    m.kind = ModelKind::CentroidRegressor;
    m.pooling = Pooling::Max;
    m.gconv = {Eigen::MatrixXd::Zero(3, 128), Eigen::MatrixXd::Zero(128, 256),
               Eigen::MatrixXd::Zero(256, 256), Eigen::MatrixXd::Zero(256, 256)};
    m.head_w = {Eigen::MatrixXd::Zero(256, 128), Eigen::MatrixXd::Zero(128, 128),
                Eigen::MatrixXd::Zero(128, 3 * k)};
    m.head_b = {Eigen::VectorXd::Zero(128), Eigen::VectorXd::Zero(128),
                Eigen::VectorXd::Zero(3 * k)};
    return m;
}

void GcnModel::init_glorot(std::uint64_t seed) {
    init_seed = seed;
    std::mt19937_64 rng(seed);
    auto fill = [&](Eigen::MatrixXd& W) {
        double bound = std::sqrt(6.0 / (W.rows() + W.cols()));
        for (Eigen::Index j = 0; j < W.cols(); ++j)
            for (Eigen::Index i = 0; i < W.rows(); ++i)
                W(i, j) = uniform_draw(rng, -bound, bound);
    };
    for (auto& W : gconv) fill(W);
    for (auto& W : head_w) fill(W);
    for (auto& b : head_b) b.setZero();
}

void GcnModel::check_finite() const {
    for (const auto& W : gconv)
        if (!W.allFinite()) throw MeshError("non-finite gconv weights");
    for (const auto& W : head_w)
        if (!W.allFinite()) throw MeshError("non-finite head weights");
    for (const auto& b : head_b)
        if (!b.allFinite()) throw MeshError("non-finite biases");
}

Eigen::MatrixXd gcn_layer_forward(const Eigen::MatrixXd& F, const NormalizedAdjacency& adj,
                                  const Eigen::MatrixXd& W) {
    if (F.cols() != W.rows()) throw MeshError("gcn layer dimension mismatch");
    return ((adj.matrix * F) * W).cwiseMax(0.0);
}

Eigen::VectorXd forward_raw(const GcnModel& model, const NormalizedAdjacency& adj,
                            const Eigen::MatrixXd& features, ForwardCache* cache) {
    if (features.cols() != model.input_dim()) throw MeshError("feature width mismatch");
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.node_x.clear();
    c.ax.clear();
    c.pre.clear();
    c.act.clear();
    c.node_x.push_back(features);
    for (const auto& W : model.gconv) {
        Eigen::MatrixXd ax = adj.matrix * c.node_x.back();
        c.node_x.push_back((ax * W).cwiseMax(0.0));
        c.ax.push_back(std::move(ax));
    }
    const Eigen::MatrixXd& last = c.node_x.back();
    const int n = static_cast<int>(last.rows());
    if (model.pooling == Pooling::Mean) {
        c.pooled = last.colwise().mean();
    } else {
        c.pooled.resize(last.cols());
        c.argmax_rows.assign(last.cols(), 0);
        for (Eigen::Index j = 0; j < last.cols(); ++j) {
            int best = 0;
            for (int i = 1; i < n; ++i)
                if (last(i, j) > last(best, j)) best = i;
            c.argmax_rows[j] = best;
            c.pooled[j] = last(best, j);
        }
    }
    Eigen::VectorXd h = c.pooled;
    for (size_t l = 0; l < model.head_w.size(); ++l) {
        Eigen::VectorXd a = model.head_w[l].transpose() * h + model.head_b[l];
        c.pre.push_back(a);
        if (l + 1 < model.head_w.size()) {
            h = a.cwiseMax(0.0);
            c.act.push_back(h);
        } else {
            h = a;
        }
    }
    return h;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
    return e / e.sum();
}

Eigen::VectorXd forward_classify(const GcnModel& model, const FaceGraph& graph) {
    if (model.kind != ModelKind::Classifier) throw MeshError("model kind mismatch");
    auto adj = normalize_adjacency(graph.adjacency);
    return softmax(forward_raw(model, adj, graph.node_features));
}

std::vector<Vec3> forward_centroid(const GcnModel& model, const FaceGraph& graph, int k) {
    if (model.kind != ModelKind::CentroidRegressor) throw MeshError("model kind mismatch");
    if (model.output_dim() != 3 * k) throw MeshError("centroid head width mismatch");
    auto adj = normalize_adjacency(graph.adjacency);
    Eigen::VectorXd y = forward_raw(model, adj, graph.centroid_features);
    std::vector<Vec3> pts(k);
    for (int i = 0; i < k; ++i) pts[i] = y.segment<3>(3 * i);
    return pts;
}

double cross_entropy_loss(const std::vector<Eigen::VectorXd>& probs,
                          const std::vector<int>& labels, double lambda,
                          const GcnModel& model) {
    if (probs.size() != labels.size() || probs.empty())
        throw MeshError("loss batch size mismatch");
    double ce = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        double p = std::max(probs[i][labels[i]], 1e-12);
        ce -= std::log(p);
    }
    ce /= static_cast<double>(probs.size());
    double reg = 0.0;
    for (const auto& W : model.gconv) reg += W.squaredNorm();
    return ce + lambda * reg;
}

GcnGradients GcnGradients::zeros_like(const GcnModel& m) {
    GcnGradients g;
    for (const auto& W : m.gconv) g.gconv.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
    for (const auto& W : m.head_w) g.head_w.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
    for (const auto& b : m.head_b) g.head_b.push_back(Eigen::VectorXd::Zero(b.size()));
    return g;
}

void GcnGradients::add_scaled(const GcnGradients& g, double s) {
    for (size_t i = 0; i < gconv.size(); ++i) gconv[i] += s * g.gconv[i];
    for (size_t i = 0; i < head_w.size(); ++i) head_w[i] += s * g.head_w[i];
    for (size_t i = 0; i < head_b.size(); ++i) head_b[i] += s * g.head_b[i];
}

GcnGradients backward(const GcnModel& model, const NormalizedAdjacency& adj,
                      const ForwardCache& c, const Eigen::VectorXd& dlogits) {
    GcnGradients g = GcnGradients::zeros_like(model);
    // head
    Eigen::VectorXd d = dlogits;
    for (int l = static_cast<int>(model.head_w.size()) - 1; l >= 0; --l) {
        const Eigen::VectorXd& in = (l == 0) ? c.pooled : c.act[l - 1];
        g.head_w[l] = in * d.transpose();
        g.head_b[l] = d;
        Eigen::VectorXd din = model.head_w[l] * d;
        if (l > 0)
            d = din.cwiseProduct((c.pre[l - 1].array() > 0.0).cast<double>().matrix());
        else
            d = din;  // gradient wrt pooled vector
    }
    // unpool
    const Eigen::MatrixXd& last = c.node_x.back();
    Eigen::MatrixXd dx(last.rows(), last.cols());
    if (model.pooling == Pooling::Mean) {
        dx = Eigen::VectorXd::Constant(last.rows(), 1.0 / last.rows()) * d.transpose();
    } else {
        dx.setZero();
        for (Eigen::Index j = 0; j < last.cols(); ++j) dx(c.argmax_rows[j], j) = d[j];
    }
    // graph layers
    for (int l = static_cast<int>(model.gconv.size()) - 1; l >= 0; --l) {
        Eigen::MatrixXd dz =
            dx.cwiseProduct((c.node_x[l + 1].array() > 0.0).cast<double>().matrix());
        g.gconv[l] = c.ax[l].transpose() * dz;
        if (l > 0) dx = adj.matrix * (dz * model.gconv[l].transpose());
    }
    return g;
}

void save_model(const GcnModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write '" + path + "'");
    out << "polyhex-gcn 1\n";
    out << "kind " << (model.kind == ModelKind::Classifier ? "classifier" : "centroid") << '\n';
    out << "pool " << (model.pooling == Pooling::Mean ? "mean" : "max") << '\n';
    out << "seed " << model.init_seed << '\n';
    char buf[64];
    auto dump = [&](const char* tag, const Eigen::MatrixXd& W) {
        out << tag << ' ' << W.rows() << ' ' << W.cols() << '\n';
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g\n", W(i, j));
                out << buf;
            }
    };
    for (const auto& W : model.gconv) dump("gconv", W);
    for (size_t l = 0; l < model.head_w.size(); ++l) {
        dump("linear", model.head_w[l]);
        dump("bias", model.head_b[l]);
    }
    out << "end\n";
}

GcnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open '" + path + "'");
    std::string magic;
    int version;
    if (!(in >> magic >> version) || magic != "polyhex-gcn" || version != 1)
        throw MeshError("corrupt model file: bad header");
    GcnModel m;
    std::string tag, val;
    if (!(in >> tag >> val) || tag != "kind") throw MeshError("corrupt model file");
    if (val == "classifier")
        m.kind = ModelKind::Classifier;
    else if (val == "centroid")
        m.kind = ModelKind::CentroidRegressor;
    else
        throw MeshError("corrupt model file: unknown kind");
    if (!(in >> tag >> val) || tag != "pool") throw MeshError("corrupt model file");
    m.pooling = (val == "mean") ? Pooling::Mean : Pooling::Max;
    if (!(in >> tag >> m.init_seed) || tag != "seed") throw MeshError("corrupt model file");
    auto read_mat = [&](const char* want) {
        Eigen::Index r, c;
        if (!(in >> tag >> r >> c) || tag != want) throw MeshError("corrupt model file");
        Eigen::MatrixXd W(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j)
                if (!(in >> W(i, j))) throw MeshError("corrupt model file: truncated");
        return W;
    };
    for (int l = 0; l < 4; ++l) m.gconv.push_back(read_mat("gconv"));
    for (int l = 0; l < 3; ++l) {
        m.head_w.push_back(read_mat("linear"));
        Eigen::MatrixXd b = read_mat("bias");
        m.head_b.push_back(b.col(0));
    }
    if (!(in >> tag) || tag != "end") throw MeshError("corrupt model file: truncated");
    // shape table check
    GcnModel ref = (m.kind == ModelKind::Classifier)
                       ? GcnModel::make_classifier()
                       : GcnModel::make_centroid_regressor(m.output_dim() / 3);
    for (int l = 0; l < 4; ++l)
        if (m.gconv[l].rows() != ref.gconv[l].rows() || m.gconv[l].cols() != ref.gconv[l].cols())
            throw MeshError("model shape table mismatch");
    m.check_finite();
    return m;
}

}  // namespace polyhex
