#pragma once

#include "polyhex/hex_mesh.hpp"

namespace polyhex {

/// Jacobian determinants at the 8 corners plus the element center, computed
/// from the corner edge-vector frames. `scaled` normalizes each frame's
/// columns; near-zero edges mark the value degenerate (reported as -1).
struct JacobianResult {
    std::array<double, 9> values{};
    double min = 0.0;
    bool degenerate = false;
};

JacobianResult scaled_jacobian(const std::array<Vec3, 8>& corners);
JacobianResult jacobian(const std::array<Vec3, 8>& corners);

std::array<Vec3, 8> element_corners(const HexMesh& mesh, int e);

struct QualityReport {
    std::vector<double> per_element;  // min scaled Jacobian
    double min_sj = 0.0;
    double mean_sj = 0.0;
    int negative_count = 0;
    long iterations = 0;
};

QualityReport evaluate_quality(const HexMesh& mesh);

/// One inward sheet of elements under every boundary quad; boundary vertices
/// are duplicated and offset inward by a quarter of the local edge length.
HexMesh pillow(const HexMesh& mesh);

/// Closest point to x on the given triangle subset (all triangles when
/// `tris` is empty).
Vec3 closest_point_on_triangles(const TriMesh& mesh, const std::vector<int>& tris,
                                const Vec3& x);

/// Surface features the optimizer projects onto.
struct SurfaceFeatures {
    const TriMesh* tri = nullptr;
    std::vector<std::vector<Vec3>> polylines;  // sharp feature curves
    std::vector<Vec3> corners;                 // feature corner points
};

/// Classify boundary hex vertices against the feature set: nearest boundary
/// vertex of each corner point -> Corner, vertices within tolerance of a
/// polyline -> Edge, other boundary vertices -> Face, the rest Interior.
std::vector<VertexClass> classify_boundary_vertices(const HexMesh& mesh,
                                                    const SurfaceFeatures& features);

/// Closest-point projection helper with per-vertex candidate-triangle caches
/// (axis box of 10x the local edge length, doubled on miss up to 4 tries).
class SurfaceProjector {
  public:
    SurfaceProjector(const SurfaceFeatures& features);

    /// Refresh the candidate cache for the given query points.
    void refresh(const std::vector<Vec3>& queries);
    Vec3 project(const Vec3& x, VertexClass cls, int query_id) const;
    Vec3 project_global(const Vec3& x, VertexClass cls) const;

  private:
    const SurfaceFeatures* features_;
    std::vector<std::vector<int>> candidates_;  // per query point
    double mean_edge_ = 0.0;
};

struct OptimizeConfig {
    double alpha = 1e-4;         // gradient step length
    double threshold = 0.1;      // target min scaled Jacobian
    long max_iters = 200000;
    long maintenance_every = 1000;  // smoothing + cache refresh cadence
    double snap_tolerance = 1e-8;   // x bbox diagonal
};

/// Mean over all element corners of the average of the 3 incident edge
/// lengths (the l-bar normalizer of the energy).
double mean_edge_length(const HexMesh& mesh);

/// Combined surface-fitting / untangling / quality energy:
/// sum ||x - x^s||^2 - (1/lbar) sum_neg minJ - lbar^2 sum_pos minSJ.
double quality_energy(const HexMesh& mesh, const std::vector<Vec3>& targets,
                      const std::vector<VertexClass>& classes, double lbar);

/// Numerical (central-difference) gradient of the energy wrt vertex v.
Vec3 energy_gradient(HexMesh& mesh, const std::vector<Vec3>& targets,
                     const std::vector<VertexClass>& classes, double lbar, int v,
                     const std::vector<std::vector<int>>& vertex_elements);

/// Gradient-descent untangling/quality loop: per iteration the worst
/// element's corners move along the numerical gradient; every
/// `maintenance_every` iterations the projection targets are refreshed and a
/// smart Laplacian smoothing pass runs. Stops at the threshold or iteration
/// cap, returning the best mesh seen. Final positions snap to their surface
/// targets when the largest deviation falls below the snap tolerance.
QualityReport optimize_quality(HexMesh& mesh, const SurfaceFeatures& features,
                               const OptimizeConfig& cfg = {});

/// Smart Laplacian pass: move each vertex toward its class target (curve
/// midpoint / area-weighted quad centers / volume-weighted cell centers),
/// keeping a move only if the local min scaled Jacobian improves.
void smart_laplacian_smoothing(HexMesh& mesh, const std::vector<VertexClass>& classes);

void save_quality_report(const QualityReport& report, const std::string& path);

}  // namespace polyhex
