#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <optional>

#include "polyhex/dataset.hpp"
#include "polyhex/face_graph.hpp"

namespace polyhex {

/// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
struct NormalizedAdjacency {
    Eigen::SparseMatrix<double> matrix;
};

NormalizedAdjacency normalize_adjacency(const Eigen::SparseMatrix<double>& A);

enum class ModelKind { Classifier, CentroidRegressor };
enum class Pooling { Mean, Max };

constexpr int kNumClasses = 11;

/// Four graph-convolution layers plus a three-layer linear head.
/// Classifier: 12->128->256->256->256, head 256->128->128->11, mean pooling.
/// Centroid regressor: 3-wide input, head output 3k, max pooling.
struct GcnModel {
    ModelKind kind = ModelKind::Classifier;
    Pooling pooling = Pooling::Mean;
    std::vector<Eigen::MatrixXd> gconv;   // 4 weight matrices
    std::vector<Eigen::MatrixXd> head_w;  // 3 weight matrices (in x out)
    std::vector<Eigen::VectorXd> head_b;  // 3 biases
    std::uint64_t init_seed = 0;

    int input_dim() const { return static_cast<int>(gconv[0].rows()); }
    int output_dim() const { return static_cast<int>(head_w.back().cols()); }

    static GcnModel make_classifier();
    static GcnModel make_centroid_regressor(int k);
    /// Seeded uniform Glorot init of all weights; biases zero.
    void init_glorot(std::uint64_t seed);
    void check_finite() const;
};

/// ReLU(A_hat * F * W).
Eigen::MatrixXd gcn_layer_forward(const Eigen::MatrixXd& F, const NormalizedAdjacency& adj,
                                  const Eigen::MatrixXd& W);

struct ForwardCache {
    std::vector<Eigen::MatrixXd> node_x;  // X0..X4, post-activation
    std::vector<Eigen::MatrixXd> ax;      // A_hat * X_l, l = 0..3
    Eigen::VectorXd pooled;
    std::vector<int> argmax_rows;         // max pooling provenance
    std::vector<Eigen::VectorXd> pre;     // head pre-activations a1,a2,logits
    std::vector<Eigen::VectorXd> act;     // h1,h2
};

/// Raw network output (logits for the classifier, coordinates for the
/// regressor). `cache` enables a subsequent backward pass.
Eigen::VectorXd forward_raw(const GcnModel& model, const NormalizedAdjacency& adj,
                            const Eigen::MatrixXd& features, ForwardCache* cache = nullptr);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// 11-class probability vector (softmax over logits).
Eigen::VectorXd forward_classify(const GcnModel& model, const FaceGraph& graph);

/// k predicted 3D points from the centroid regressor.
std::vector<Vec3> forward_centroid(const GcnModel& model, const FaceGraph& graph, int k);

/// -(1/N) sum y log(y_hat) + lambda * sum_l ||W_gconv^(l)||^2.
/// Probabilities are clamped to >= 1e-12 before the log.
double cross_entropy_loss(const std::vector<Eigen::VectorXd>& probs,
                          const std::vector<int>& labels, double lambda,
                          const GcnModel& model);

struct GcnGradients {
    std::vector<Eigen::MatrixXd> gconv;
    std::vector<Eigen::MatrixXd> head_w;
    std::vector<Eigen::VectorXd> head_b;

    static GcnGradients zeros_like(const GcnModel& model);
    void add_scaled(const GcnGradients& g, double s);
};

/// Gradient of the per-sample loss wrt all weights, given the output-side
/// gradient dL/d(logits). Excludes the L2 term.
GcnGradients backward(const GcnModel& model, const NormalizedAdjacency& adj,
                      const ForwardCache& cache, const Eigen::VectorXd& dlogits);

enum class Optimizer { Adam, RmsProp };

struct TrainConfig {
    double learning_rate = 1e-3;
    double l2_lambda = 0.0;
    int epochs = 60;
    int batch_size = 32;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t rng_seed = 0;
    double validation_fraction = 0.1;
    double target_val_accuracy = 2.0;  // early stop threshold; >1 disables
};

struct EpochStats {
    double loss = 0.0;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    GcnModel model;
    std::vector<EpochStats> trace;
};

TrainResult train_classifier(const std::vector<TrainingSample>& dataset, const TrainConfig& cfg);

struct CentroidSample {
    FaceGraph graph;
    std::vector<Vec3> targets;  // per polycube face, ordered by face id
};

TrainResult train_centroid(const std::vector<CentroidSample>& dataset, const TrainConfig& cfg);

void save_model(const GcnModel& model, const std::string& path);
GcnModel load_model(const std::string& path);

}  // namespace polyhex
