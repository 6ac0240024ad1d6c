#ifndef ITCR_KMEANS_HPP
#define ITCR_KMEANS_HPP

#include "itcr/types.hpp"

#include <cstdint>

namespace itcr {

struct KMeansConfig {
    Index k = 2;
    std::uint64_t seed = 0;
    int max_iterations = 300;
    double tolerance = 1e-6;   // relative objective improvement
    int restarts = 10;
};

struct Clustering {
    Eigen::VectorXi assignment;   // cluster index per point, in [0, k)
    Matrix centroids;             // k x dim
    double objective = 0.0;       // sum of squared distances to assigned centroid
    int iterations = 0;
    int restart = 0;              // which restart produced this result
    // Objective after every Lloyd step of the winning restart; non-increasing.
    std::vector<double> objective_trace;
};

// Lloyd iterations from k-means++ seeding, best of `restarts` runs.
// Points are rows. Fully determined by (points, config).
Clustering kmeans(const Eigen::Ref<const Matrix>& points, const KMeansConfig& config);

// Every restart's final result, in restart order; `kmeans` picks the minimum.
std::vector<Clustering> kmeans_all_restarts(const Eigen::Ref<const Matrix>& points, const KMeansConfig& config);

// Index of the nearest centroid (rows of `centroids`); ties go to the lowest index.
Index nearest_centroid(const Eigen::Ref<const Vector>& point, const Eigen::Ref<const Matrix>& centroids);

double clustering_objective(const Eigen::Ref<const Matrix>& points, const Eigen::VectorXi& assignment,
                            const Eigen::Ref<const Matrix>& centroids);

} // namespace itcr

#endif // ITCR_KMEANS_HPP
