#pragma once

#include <iosfwd>

#include "polyhex/gcn.hpp"
#include "polyhex/hexgen.hpp"
#include "polyhex/quality.hpp"

namespace polyhex {

/// Key=value configuration of the end-to-end run. Unknown keys are an error;
/// CLI flags override file values.
struct PipelineConfig {
    std::string mesh;            // input OBJ; empty with oracle fixtures
    std::string model;           // classifier file
    std::string centroid_model;  // centroid regressor file (optional)
    bool oracle = false;         // ground-truth labels/centroids
    int oracle_type = 0;         // fixture template type (oracle mode)
    std::uint64_t oracle_seed = 0;
    int level = 3;
    PathWeights weights;
    double kmeans_tol = 0.03;
    OptimizeConfig quality;
    std::string out = "hex.vtk";
    std::string report;
    std::string seg_out;
    std::string paths_out;

    static PipelineConfig parse(const std::string& path);
    void set(const std::string& key, const std::string& value);
    void validate() const;
};

struct PipelineResult {
    int predicted_type = 0;
    Eigen::VectorXd probabilities;  // 11 entries
    int tri_vertices = 0, tri_faces = 0;
    int hex_vertices = 0, hex_elements = 0;
    QualityReport quality;
};

/// load -> normalize -> classify -> segment -> path-optimize -> hexmesh ->
/// pillow -> optimize -> save. Prints a Table-1-style probability row and a
/// Table-2-style statistics row to `log`. Stage failures rethrow MeshError
/// prefixed with the stage name.
PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream& log);

std::string probability_row(const Eigen::VectorXd& probs);

}  // namespace polyhex
