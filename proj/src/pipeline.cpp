#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "polyhex/io.hpp"
#include "polyhex/pipeline.hpp"

namespace polyhex {

PipelineConfig PipelineConfig::parse(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open config " + path);
    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw MeshError("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    auto num = [&] {
        try {
            size_t pos = 0;
            double d = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument(value);
            return d;
        } catch (const std::exception&) {
            throw MeshError("config value for " + key + " is not numeric: " + value);
        }
    };
    if (key == "mesh") mesh = value;
    else if (key == "model") model = value;
    else if (key == "centroid_model") centroid_model = value;
    else if (key == "oracle") oracle = num() != 0;
    else if (key == "oracle_type") oracle_type = static_cast<int>(num());
    else if (key == "oracle_seed") oracle_seed = static_cast<std::uint64_t>(num());
    else if (key == "level") level = static_cast<int>(num());
    else if (key == "lambda0") weights.lambda0 = num();
    else if (key == "lambda0_sharp") weights.lambda0_sharp = num();
    else if (key == "lambda1") weights.lambda1 = num();
    else if (key == "lambda2") weights.lambda2 = num();
    else if (key == "kmeans_tol") kmeans_tol = num();
    else if (key == "alpha") quality.alpha = num();
    else if (key == "sj_threshold") quality.threshold = num();
    else if (key == "max_iters") quality.max_iters = static_cast<long>(num());
    else if (key == "out") out = value;
    else if (key == "report") report = value;
    else if (key == "seg_out") seg_out = value;
    else if (key == "paths_out") paths_out = value;
    else throw MeshError("unknown config key: " + key);
}

void PipelineConfig::validate() const {
    if (level < 0 || level > 8) throw MeshError("config: level out of range");
    if (kmeans_tol <= 0.0 || kmeans_tol >= 1.0) throw MeshError("config: kmeans_tol out of range");
    if (quality.alpha <= 0.0) throw MeshError("config: alpha out of range");
    if (quality.max_iters < 0) throw MeshError("config: max_iters out of range");
    if (weights.lambda0 <= 0.0 || weights.lambda0_sharp <= 0.0 ||
        weights.lambda1 < 0.0 || weights.lambda2 < 0.0)
        throw MeshError("config: path weights out of range");
    if (mesh.empty() && !(oracle && oracle_type >= 1 && oracle_type <= 11))
        throw MeshError("config: either mesh or an oracle fixture type is required");
}

std::string probability_row(const Eigen::VectorXd& probs) {
    std::string row;
    char buf[32];
    for (int i = 0; i < probs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.2f", i ? " " : "", 100.0 * probs[i]);
        row += buf;
    }
    return row;
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const MeshError& e) {
        throw MeshError(std::string(name) + ": " + e.what());
    }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
    cfg.validate();
    PipelineResult res;

    TriMesh mesh;
    std::vector<int> oracle_tags;
    if (!cfg.mesh.empty()) {
        mesh = stage("load", [&] { return normalize_to_unit_box(load_tri_mesh(cfg.mesh)); });
    } else {
        TrainingSample s = stage("fixture", [&] {
            return generate_sample(cfg.oracle_type, cfg.oracle_seed, DatasetParams{});
        });
        mesh = std::move(s.mesh);
        oracle_tags = std::move(s.face_tags);
    }
    res.tri_vertices = mesh.num_vertices();
    res.tri_faces = mesh.num_faces();

    FaceGraph graph = build_face_graph(mesh);
    if (cfg.oracle) {
        res.predicted_type = cfg.oracle_type;
        res.probabilities = Eigen::VectorXd::Zero(kNumClasses);
        res.probabilities[cfg.oracle_type - 1] = 1.0;
    } else {
        GcnModel cls = stage("classify", [&] { return load_model(cfg.model); });
        res.probabilities = stage("classify", [&] { return forward_classify(cls, graph); });
        Eigen::Index arg;
        res.probabilities.maxCoeff(&arg);
        res.predicted_type = static_cast<int>(arg) + 1;
    }
    log << probability_row(res.probabilities) << "\n";

    PolycubeStructure pc = polycube_template(res.predicted_type);

    std::vector<Vec3> centroids;
    if (cfg.oracle && !oracle_tags.empty()) {
        centroids = ground_truth_face_centroids(mesh, oracle_tags, pc.num_faces());
    } else if (!cfg.centroid_model.empty()) {
        GcnModel ctr = stage("segment", [&] { return load_model(cfg.centroid_model); });
        centroids = stage("segment", [&] { return forward_centroid(ctr, graph, pc.num_faces()); });
    } else {
        bool duplicates = false;
        std::map<int, int> per_label;
        for (const auto& f : pc.faces)
            duplicates |= ++per_label[f.label.axis * 2 + (f.label.sign > 0 ? 0 : 1)] > 1;
        if (duplicates)
            throw MeshError("segment: centroid model required for type " +
                            std::to_string(res.predicted_type));
        for (const auto& f : pc.faces) centroids.push_back(f.lattice_centroid());
    }

    Segmentation seg =
        stage("segment", [&] { return segment(mesh, pc, centroids, cfg.kmeans_tol); });

    auto [opt_seg, paths] =
        stage("pathopt", [&] { return optimize_boundaries(mesh, seg, pc, cfg.weights); });
    if (!cfg.seg_out.empty()) save_segmentation(opt_seg, cfg.seg_out);
    if (!cfg.paths_out.empty()) save_paths(paths, cfg.paths_out);

    HexMesh hex = stage("hexmesh", [&] {
        return assemble_hex_mesh(mesh, opt_seg, pc, paths, cfg.level);
    });
    hex = stage("pillow", [&] { return pillow(hex); });

    SurfaceFeatures features;
    features.tri = &mesh;
    features.polylines = paths.polylines(mesh);
    features.corners = paths.corner_positions(mesh);
    res.quality = stage("quality", [&] { return optimize_quality(hex, features, cfg.quality); });
    res.hex_vertices = hex.num_vertices();
    res.hex_elements = hex.num_elements();

    stage("save", [&] {
        save_hex_mesh(hex, cfg.out, &res.quality.per_element);
        if (!cfg.report.empty()) save_quality_report(res.quality, cfg.report);
        return 0;
    });

    char buf[128];
    std::snprintf(buf, sizeof(buf), "(%d %d) %d (%d %d) %.2f", res.tri_vertices,
                  res.tri_faces, cfg.level, res.hex_vertices, res.hex_elements,
                  res.quality.min_sj);
    log << buf << "\n";
    return res;
}

}  // namespace polyhex
