#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "polyhex/io.hpp"
#include "polyhex/pipeline.hpp"

namespace fs = std::filesystem;
using namespace polyhex;

namespace {

std::vector<int> parse_types(const std::string& spec) {
    std::vector<int> types;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t dots = tok.find("..");
        if (dots != std::string::npos) {
            int a = std::stoi(tok.substr(0, dots));
            int b = std::stoi(tok.substr(dots + 2));
            for (int t = a; t <= b; ++t) types.push_back(t);
        } else if (!tok.empty()) {
            types.push_back(std::stoi(tok));
        }
    }
    if (types.empty()) throw MeshError("no template types given");
    return types;
}

TrainConfig parse_train_config(const std::string& path) {
    TrainConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open config " + path);
    std::string key, eq_value;
    std::string line;
    while (std::getline(in, line)) {
        size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        std::stringstream ls(line);
        std::string kv;
        if (!(ls >> kv)) continue;
        size_t eq = kv.find('=');
        if (eq == std::string::npos) throw MeshError("train config: expected key=value");
        std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        if (k == "lr") cfg.learning_rate = std::stod(v);
        else if (k == "l2_lambda") cfg.l2_lambda = std::stod(v);
        else if (k == "epochs") cfg.epochs = std::stoi(v);
        else if (k == "batch_size") cfg.batch_size = std::stoi(v);
        else if (k == "seed") cfg.rng_seed = std::stoull(v);
        else if (k == "val_fraction") cfg.validation_fraction = std::stod(v);
        else if (k == "target_val_accuracy") cfg.target_val_accuracy = std::stod(v);
        else if (k == "optimizer") {
            if (v == "adam") cfg.optimizer = Optimizer::Adam;
            else if (v == "rmsprop") cfg.optimizer = Optimizer::RmsProp;
            else throw MeshError("train config: unknown optimizer " + v);
        } else {
            throw MeshError("train config: unknown key " + k);
        }
    }
    return cfg;
}

struct ManifestEntry {
    std::string file;
    int type = 0;
    std::uint64_t seed = 0;
};

std::vector<ManifestEntry> load_manifest(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "manifest.txt");
    if (!in) throw MeshError("cannot open " + dir + "/manifest.txt");
    std::vector<ManifestEntry> entries;
    ManifestEntry e;
    while (in >> e.file >> e.type >> e.seed) entries.push_back(e);
    if (entries.empty()) throw MeshError("empty manifest in " + dir);
    return entries;
}

TriMesh load_normalized(const std::string& path) {
    return normalize_to_unit_box(load_tri_mesh(path));
}

int predicted_type(const GcnModel& model, const FaceGraph& graph, Eigen::VectorXd* probs_out) {
    Eigen::VectorXd probs = forward_classify(model, graph);
    Eigen::Index arg;
    probs.maxCoeff(&arg);
    if (probs_out) *probs_out = probs;
    return static_cast<int>(arg) + 1;
}

std::vector<Vec3> stage_centroids(const PolycubeStructure& pc, const std::string& centroid_model,
                                  const FaceGraph& graph) {
    if (!centroid_model.empty())
        return forward_centroid(load_model(centroid_model), graph, pc.num_faces());
    if (!coplanar_label_groups(pc).empty())
        throw MeshError("centroid model required: polycube has same-label face groups");
    std::vector<Vec3> c;
    for (const auto& f : pc.faces) c.push_back(f.lattice_centroid());
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polycube-guided all-hex mesh generation"};
    app.require_subcommand(1);

    // gen-dataset
    auto* gen = app.add_subcommand("gen-dataset", "generate labeled training meshes");
    std::string g_types = "1..11", g_out;
    int g_per_type = 10;
    std::uint64_t g_seed = 0;
    DatasetParams g_params;
    gen->add_option("--types", g_types, "template types, e.g. 1..11 or 1,3,5");
    gen->add_option("--per-type", g_per_type)->check(CLI::PositiveNumber);
    gen->add_option("--seed", g_seed);
    gen->add_option("--out", g_out)->required();
    gen->add_option("--levels", g_params.subdivision_levels);
    gen->add_option("--cage-res", g_params.deform.cage_resolution);
    gen->add_option("--select-fraction", g_params.deform.select_fraction);
    gen->add_option("--sigma", g_params.deform.sigma);

    // train
    auto* train = app.add_subcommand("train", "train the classifier or centroid regressor");
    std::string t_dataset, t_config, t_out, t_kind = "classifier";
    train->add_option("--dataset", t_dataset)->required();
    train->add_option("--config", t_config);
    train->add_option("--out", t_out)->required();
    train->add_option("--kind", t_kind)->check(CLI::IsMember({"classifier", "centroid"}));

    // predict
    auto* predict = app.add_subcommand("predict", "print class probabilities for a mesh");
    std::string p_model, p_mesh;
    predict->add_option("--model", p_model)->required();
    predict->add_option("--mesh", p_mesh)->required();

    // segment
    auto* seg_cmd = app.add_subcommand("segment", "K-means surface segmentation");
    std::string s_mesh, s_model, s_centroid, s_out;
    double s_tol = 0.03;
    seg_cmd->add_option("--mesh", s_mesh)->required();
    seg_cmd->add_option("--model", s_model)->required();
    seg_cmd->add_option("--centroid-model", s_centroid);
    seg_cmd->add_option("--out", s_out)->required();
    seg_cmd->add_option("--tol", s_tol);

    // pathopt
    auto* po = app.add_subcommand("pathopt", "optimize patch boundaries");
    std::string po_mesh, po_seg, po_out, po_paths;
    int po_type = 0;
    PathWeights po_w;
    po->add_option("--mesh", po_mesh)->required();
    po->add_option("--seg", po_seg)->required();
    po->add_option("--polycube-type", po_type)->required();
    po->add_option("--out", po_out)->required();
    po->add_option("--paths", po_paths)->required();
    po->add_option("--lambda0", po_w.lambda0);
    po->add_option("--lambda0-sharp", po_w.lambda0_sharp);
    po->add_option("--lambda1", po_w.lambda1);
    po->add_option("--lambda2", po_w.lambda2);

    // hexmesh
    auto* hm = app.add_subcommand("hexmesh", "octree + harmonic-map hex generation");
    std::string h_mesh, h_seg, h_paths, h_out;
    int h_type = 0, h_level = 3;
    bool h_pillow = false;
    hm->add_option("--mesh", h_mesh)->required();
    hm->add_option("--seg", h_seg)->required();
    hm->add_option("--paths", h_paths)->required();
    hm->add_option("--polycube-type", h_type)->required();
    hm->add_option("--level", h_level);
    hm->add_option("--out", h_out)->required();
    hm->add_flag("--pillow", h_pillow, "add the boundary pillow layer");

    // quality
    auto* q = app.add_subcommand("quality", "scaled-Jacobian optimization");
    std::string q_hex, q_tri, q_paths, q_out, q_report;
    OptimizeConfig q_cfg;
    bool q_pillow = false;
    q->add_option("--hex", q_hex)->required();
    q->add_option("--tri", q_tri)->required();
    q->add_option("--paths", q_paths, "feature curves from pathopt");
    q->add_option("--alpha", q_cfg.alpha);
    q->add_option("--threshold", q_cfg.threshold);
    q->add_option("--max-iters", q_cfg.max_iters);
    q->add_option("--out", q_out)->required();
    q->add_option("--report", q_report);
    q->add_flag("--pillow", q_pillow, "pillow before optimizing");

    // pipeline
    auto* pl = app.add_subcommand("pipeline", "run all stages end to end");
    std::string pl_config;
    std::vector<std::string> pl_set;
    pl->add_option("--config", pl_config);
    pl->add_option("--set", pl_set, "key=value overrides (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            fs::create_directories(g_out);
            std::ofstream manifest(fs::path(g_out) / "manifest.txt");
            if (!manifest) throw MeshError("cannot open " + g_out + "/manifest.txt");
            std::uint64_t idx = 0;
            for (int t : parse_types(g_types))
                for (int i = 0; i < g_per_type; ++i, ++idx) {
                    TrainingSample s = generate_sample(t, g_seed + idx, g_params);
                    char name[64];
                    std::snprintf(name, sizeof(name), "type%02d_%04d.obj", t, i);
                    save_tri_mesh(s.mesh, (fs::path(g_out) / name).string());
                    manifest << name << " " << t << " " << s.seed << "\n";
                }
        } else if (*train) {
            TrainConfig cfg = parse_train_config(t_config);
            TrainResult result;
            if (t_kind == "classifier") {
                std::vector<TrainingSample> data;
                for (const auto& e : load_manifest(t_dataset)) {
                    TrainingSample s;
                    s.mesh = load_normalized((fs::path(t_dataset) / e.file).string());
                    s.graph = build_face_graph(s.mesh);
                    s.label = e.type;
                    s.seed = e.seed;
                    data.push_back(std::move(s));
                }
                result = train_classifier(data, cfg);
            } else {
                // Regenerate samples from (type, seed) to recover the
                // ground-truth face tags the OBJ files do not carry.
                std::vector<CentroidSample> data;
                int k = -1;
                for (const auto& e : load_manifest(t_dataset)) {
                    TrainingSample s = generate_sample(e.type, e.seed, DatasetParams{});
                    PolycubeStructure pc = polycube_template(e.type);
                    if (k < 0) k = pc.num_faces();
                    if (k != pc.num_faces())
                        throw MeshError("centroid training needs a single-type dataset");
                    CentroidSample c;
                    c.graph = std::move(s.graph);
                    c.targets = ground_truth_face_centroids(s.mesh, s.face_tags, k);
                    data.push_back(std::move(c));
                }
                cfg.optimizer = Optimizer::RmsProp;
                result = train_centroid(data, cfg);
            }
            save_model(result.model, t_out);
            for (size_t e = 0; e < result.trace.size(); ++e) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "epoch %zu loss %.9g train_acc %.4f val_acc %.4f", e,
                              result.trace[e].loss, result.trace[e].train_accuracy,
                              result.trace[e].val_accuracy);
                std::cout << buf << "\n";
            }
        } else if (*predict) {
            TriMesh mesh = load_normalized(p_mesh);
            Eigen::VectorXd probs;
            int type = predicted_type(load_model(p_model), build_face_graph(mesh), &probs);
            std::cout << probability_row(probs) << "\n";
            std::cout << "predicted type " << type << "\n";
        } else if (*seg_cmd) {
            TriMesh mesh = load_normalized(s_mesh);
            FaceGraph graph = build_face_graph(mesh);
            int type = predicted_type(load_model(s_model), graph, nullptr);
            PolycubeStructure pc = polycube_template(type);
            Segmentation seg = segment(mesh, pc, stage_centroids(pc, s_centroid, graph), s_tol);
            save_segmentation(seg, s_out);
            std::cout << "type " << type << " patches " << seg.k << "\n";
        } else if (*po) {
            TriMesh mesh = load_normalized(po_mesh);
            PolycubeStructure pc = polycube_template(po_type);
            Segmentation seg = load_segmentation(po_seg);
            if (static_cast<int>(seg.labels.size()) != mesh.num_faces())
                throw MeshError("segmentation does not match mesh");
            auto [opt_seg, paths] = optimize_boundaries(mesh, seg, pc, po_w);
            save_segmentation(opt_seg, po_out);
            save_paths(paths, po_paths);
        } else if (*hm) {
            TriMesh mesh = load_normalized(h_mesh);
            PolycubeStructure pc = polycube_template(h_type);
            Segmentation seg = load_segmentation(h_seg);
            if (static_cast<int>(seg.labels.size()) != mesh.num_faces())
                throw MeshError("segmentation does not match mesh");
            HexMesh hex = assemble_hex_mesh(mesh, seg, pc, load_paths(h_paths), h_level);
            if (h_pillow) hex = pillow(hex);
            save_hex_mesh(hex, h_out);
            std::cout << "vertices " << hex.num_vertices() << " elements "
                      << hex.num_elements() << "\n";
        } else if (*q) {
            HexMesh hex = load_hex_mesh(q_hex);
            TriMesh tri = load_normalized(q_tri);
            if (q_pillow) hex = pillow(hex);
            SurfaceFeatures features;
            features.tri = &tri;
            if (!q_paths.empty()) {
                PathSet ps = load_paths(q_paths);
                features.polylines = ps.polylines(tri);
                features.corners = ps.corner_positions(tri);
            }
            QualityReport rep = optimize_quality(hex, features, q_cfg);
            save_hex_mesh(hex, q_out, &rep.per_element);
            if (!q_report.empty()) save_quality_report(rep, q_report);
            char buf[128];
            std::snprintf(buf, sizeof(buf), "min_sj %.6g mean_sj %.6g iterations %ld",
                          rep.min_sj, rep.mean_sj, rep.iterations);
            std::cout << buf << "\n";
        } else if (*pl) {
            PipelineConfig cfg =
                pl_config.empty() ? PipelineConfig{} : PipelineConfig::parse(pl_config);
            for (const auto& kv : pl_set) {
                size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    throw MeshError("--set expects key=value, got " + kv);
                cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
            }
            run_pipeline(cfg, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
