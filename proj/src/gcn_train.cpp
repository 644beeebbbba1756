#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "polyhex/gcn.hpp"

namespace polyhex {

namespace {

// Adam / RMSprop over the flattened parameter list.
struct OptimizerState {
    Optimizer kind;
    double lr;
    GcnGradients m, v;
    long step = 0;

    OptimizerState(const GcnModel& model, Optimizer kind, double lr)
        : kind(kind), lr(lr), m(GcnGradients::zeros_like(model)),
          v(GcnGradients::zeros_like(model)) {}

    template <typename T>
    void update_one(T& p, const T& g, T& m1, T& v1) {
        constexpr double b1 = 0.9, b2 = 0.999, rho = 0.9, eps = 1e-8;
        if (kind == Optimizer::Adam) {
            m1 = b1 * m1 + (1.0 - b1) * g;
            v1 = b2 * v1 + (1.0 - b2) * g.cwiseProduct(g);
            double bc1 = 1.0 - std::pow(b1, step), bc2 = 1.0 - std::pow(b2, step);
            p -= (lr * (m1 / bc1).array() / ((v1 / bc2).array().sqrt() + eps)).matrix();
        } else {
            v1 = rho * v1 + (1.0 - rho) * g.cwiseProduct(g);
            p -= (lr * g.array() / (v1.array().sqrt() + eps)).matrix();
        }
    }

    void apply(GcnModel& model, const GcnGradients& g) {
        ++step;
        for (size_t i = 0; i < model.gconv.size(); ++i)
            update_one(model.gconv[i], g.gconv[i], m.gconv[i], v.gconv[i]);
        for (size_t i = 0; i < model.head_w.size(); ++i)
            update_one(model.head_w[i], g.head_w[i], m.head_w[i], v.head_w[i]);
        for (size_t i = 0; i < model.head_b.size(); ++i)
            update_one(model.head_b[i], g.head_b[i], m.head_b[i], v.head_b[i]);
    }
};

struct PreparedGraph {
    NormalizedAdjacency adj;
    Eigen::MatrixXd features;
};

std::vector<int> seeded_shuffle(int n, std::mt19937_64& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

void add_l2_gradient(const GcnModel& model, double lambda, GcnGradients& g) {
    if (lambda == 0.0) return;
    for (size_t l = 0; l < model.gconv.size(); ++l) g.gconv[l] += 2.0 * lambda * model.gconv[l];
}

}  // namespace

TrainResult train_classifier(const std::vector<TrainingSample>& dataset, const TrainConfig& cfg) {
    if (dataset.empty()) throw MeshError("empty dataset");
    const int n = static_cast<int>(dataset.size());
    std::vector<PreparedGraph> graphs(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        graphs[i].adj = normalize_adjacency(dataset[i].graph.adjacency);
        graphs[i].features = dataset[i].graph.node_features;
        labels[i] = dataset[i].label - 1;
        if (labels[i] < 0 || labels[i] >= kNumClasses) throw MeshError("label out of range");
    }

    std::mt19937_64 rng(cfg.rng_seed);
    std::vector<int> order = seeded_shuffle(n, rng);
    int n_val = static_cast<int>(std::round(cfg.validation_fraction * n));
    std::vector<int> val_idx(order.begin(), order.begin() + n_val);
    std::vector<int> train_idx(order.begin() + n_val, order.end());
    if (train_idx.empty()) throw MeshError("no training samples after split");

    TrainResult res;
    res.model = GcnModel::make_classifier();
    res.model.init_glorot(cfg.rng_seed);
    OptimizerState opt(res.model, cfg.optimizer, cfg.learning_rate);

    auto predict = [&](int i) {
        return softmax(forward_raw(res.model, graphs[i].adj, graphs[i].features));
    };
    auto accuracy = [&](const std::vector<int>& idx) {
        if (idx.empty()) return 1.0;
        int hit = 0;
        for (int i : idx) {
            Eigen::Index arg;
            predict(i).maxCoeff(&arg);
            if (static_cast<int>(arg) == labels[i]) ++hit;
        }
        return static_cast<double>(hit) / idx.size();
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<int> perm = seeded_shuffle(static_cast<int>(train_idx.size()), rng);
        double epoch_ce = 0.0;
        for (size_t start = 0; start < perm.size(); start += cfg.batch_size) {
            size_t stop = std::min(perm.size(), start + cfg.batch_size);
            GcnGradients batch_g = GcnGradients::zeros_like(res.model);
            double inv = 1.0 / static_cast<double>(stop - start);
            for (size_t b = start; b < stop; ++b) {
                int i = train_idx[perm[b]];
                ForwardCache cache;
                Eigen::VectorXd logits =
                    forward_raw(res.model, graphs[i].adj, graphs[i].features, &cache);
                Eigen::VectorXd p = softmax(logits);
                epoch_ce -= std::log(std::max(p[labels[i]], 1e-12));
                Eigen::VectorXd dlogits = p;
                dlogits[labels[i]] -= 1.0;
                batch_g.add_scaled(backward(res.model, graphs[i].adj, cache, dlogits), inv);
            }
            add_l2_gradient(res.model, cfg.l2_lambda, batch_g);
            opt.apply(res.model, batch_g);
        }
        EpochStats st;
        double reg = 0.0;
        for (const auto& W : res.model.gconv) reg += W.squaredNorm();
        st.loss = epoch_ce / static_cast<double>(train_idx.size()) + cfg.l2_lambda * reg;
        if (!std::isfinite(st.loss))
            throw MeshError("training diverged at epoch " + std::to_string(epoch));
        st.train_accuracy = accuracy(train_idx);
        st.val_accuracy = accuracy(val_idx);
        res.trace.push_back(st);
        if (st.val_accuracy >= cfg.target_val_accuracy) break;
    }
    return res;
}

TrainResult train_centroid(const std::vector<CentroidSample>& dataset, const TrainConfig& cfg) {
    if (dataset.empty()) throw MeshError("empty dataset");
    const int n = static_cast<int>(dataset.size());
    const int k = static_cast<int>(dataset[0].targets.size());
    std::vector<PreparedGraph> graphs(n);
    std::vector<Eigen::VectorXd> targets(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(dataset[i].targets.size()) != k)
            throw MeshError("inconsistent centroid target count");
        graphs[i].adj = normalize_adjacency(dataset[i].graph.adjacency);
        graphs[i].features = dataset[i].graph.centroid_features;
        targets[i].resize(3 * k);
        for (int j = 0; j < k; ++j) targets[i].segment<3>(3 * j) = dataset[i].targets[j];
    }

    std::mt19937_64 rng(cfg.rng_seed);
    std::vector<int> order = seeded_shuffle(n, rng);
    int n_val = static_cast<int>(std::round(cfg.validation_fraction * n));
    std::vector<int> train_idx(order.begin() + n_val, order.end());
    if (train_idx.empty()) throw MeshError("no training samples after split");

    TrainResult res;
    res.model = GcnModel::make_centroid_regressor(k);
    res.model.init_glorot(cfg.rng_seed);
    OptimizerState opt(res.model, cfg.optimizer, cfg.learning_rate);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<int> perm = seeded_shuffle(static_cast<int>(train_idx.size()), rng);
        double epoch_mse = 0.0;
        for (size_t start = 0; start < perm.size(); start += cfg.batch_size) {
            size_t stop = std::min(perm.size(), start + cfg.batch_size);
            GcnGradients batch_g = GcnGradients::zeros_like(res.model);
            double inv = 1.0 / static_cast<double>(stop - start);
            for (size_t b = start; b < stop; ++b) {
                int i = train_idx[perm[b]];
                ForwardCache cache;
                Eigen::VectorXd y =
                    forward_raw(res.model, graphs[i].adj, graphs[i].features, &cache);
                Eigen::VectorXd err = y - targets[i];
                epoch_mse += err.squaredNorm() / err.size();
                Eigen::VectorXd dy = 2.0 * err / err.size();
                batch_g.add_scaled(backward(res.model, graphs[i].adj, cache, dy), inv);
            }
            add_l2_gradient(res.model, cfg.l2_lambda, batch_g);
            opt.apply(res.model, batch_g);
        }
        EpochStats st;
        st.loss = epoch_mse / static_cast<double>(train_idx.size());
        if (!std::isfinite(st.loss))
            throw MeshError("training diverged at epoch " + std::to_string(epoch));
        res.trace.push_back(st);
    }
    return res;
}

}  // namespace polyhex
