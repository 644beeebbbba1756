#include <cassert>
#include <limits>

#include "polyhex/segmentation.hpp"

namespace polyhex {

ClusterState kmeans(const std::vector<Vec3>& points, const std::vector<Vec3>& seeds,
                    double tol, int max_iters) {
    if (points.empty()) throw MeshError("kmeans: no points");
    if (seeds.empty()) throw MeshError("kmeans: no seeds");
    const int n = static_cast<int>(points.size());
    const int k = static_cast<int>(seeds.size());

    ClusterState st;
    st.centroids = seeds;
    st.assignment.assign(n, 0);

    for (int iter = 0; iter < max_iters; ++iter) {
        // Assignment; ties resolved to the lowest cluster index by strict <.
        double loss = 0.0;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points[i] - st.centroids[0]).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double d = (points[i] - st.centroids[c]).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            st.assignment[i] = best;
            loss += best_d;
        }
        if (!st.loss_history.empty())
            assert(loss <= st.loss_history.back() + 1e-9 * (1.0 + st.loss_history.back()));
        bool converged = !st.loss_history.empty() &&
                         std::abs(st.loss_history.back() - loss) <
                             tol * std::max(st.loss_history.back(), 1e-300);
        st.loss = loss;
        st.loss_history.push_back(loss);
        if (converged || loss == 0.0) break;

        // Update step.
        std::vector<Vec3> sum(k, Vec3::Zero());
        std::vector<int> cnt(k, 0);
        for (int i = 0; i < n; ++i) {
            sum[st.assignment[i]] += points[i];
            cnt[st.assignment[i]]++;
        }
        for (int c = 0; c < k; ++c)
            if (cnt[c] > 0) st.centroids[c] = sum[c] / cnt[c];
        // Empty clusters grab the globally worst-fit point.
        for (int c = 0; c < k; ++c) {
            if (cnt[c] > 0) continue;
            int worst = -1;
            double worst_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (cnt[st.assignment[i]] <= 1) continue;  // don't empty another cluster
                double d = (points[i] - st.centroids[st.assignment[i]]).squaredNorm();
                if (d > worst_d) {
                    worst_d = d;
                    worst = i;
                }
            }
            if (worst < 0) throw MeshError("kmeans: cannot reseed empty cluster");
            cnt[st.assignment[worst]]--;
            st.centroids[c] = points[worst];
            st.assignment[worst] = c;
            cnt[c] = 1;
        }
    }
    return st;
}

}  // namespace polyhex
