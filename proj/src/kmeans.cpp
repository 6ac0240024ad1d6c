#include "itcr/kmeans.hpp"

#include "itcr/random.hpp"

#include <cmath>
#include <limits>

namespace itcr {

Index nearest_centroid(const Eigen::Ref<const Vector>& point, const Eigen::Ref<const Matrix>& centroids)
{
    if (centroids.rows() == 0) {
        throw ValidationError("nearest_centroid: no centroids");
    }
    if (centroids.cols() != point.size()) {
        throw ValidationError("nearest_centroid: dimension mismatch");
    }
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centroids.rows(); ++c) {
        const double dist = (centroids.row(c).transpose() - point).squaredNorm();
        if (dist < best_d) {
            best_d = dist;
            best = c;
        }
    }
    return best;
}

double clustering_objective(const Eigen::Ref<const Matrix>& points, const Eigen::VectorXi& assignment,
                            const Eigen::Ref<const Matrix>& centroids)
{
    double total = 0.0;
    for (Index i = 0; i < points.rows(); ++i) {
        total += (points.row(i) - centroids.row(assignment(i))).squaredNorm();
    }
    return total;
}

namespace {

Matrix seed_plus_plus(const Eigen::Ref<const Matrix>& points, Index k, Rng& rng)
{
    const Index m = points.rows();
    Matrix centroids(k, points.cols());
    std::vector<bool> chosen(static_cast<std::size_t>(m), false);
    Index first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
    centroids.row(0) = points.row(first);
    chosen[static_cast<std::size_t>(first)] = true;

    Vector d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (Index c = 1; c < k; ++c) {
        const double total = d2.sum();
        Index pick = -1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (Index i = 0; i < m; ++i) {
                acc += d2(i);
                if (d2(i) > 0.0 && acc > target) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) {
                // rounding left target at the very end; take the last positive weight
                for (Index i = m - 1; i >= 0; --i) {
                    if (d2(i) > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            // all remaining points coincide with chosen centroids
            for (Index i = 0; i < m; ++i) {
                if (!chosen[static_cast<std::size_t>(i)]) {
                    pick = i;
                    break;
                }
            }
        }
        chosen[static_cast<std::size_t>(pick)] = true;
        centroids.row(c) = points.row(pick);
        d2 = d2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

Clustering lloyd(const Eigen::Ref<const Matrix>& points, const KMeansConfig& cfg, std::uint64_t seed)
{
    const Index m = points.rows();
    const Index k = cfg.k;
    Rng rng(seed);

    Clustering cl;
    cl.centroids = seed_plus_plus(points, k, rng);
    cl.assignment = Eigen::VectorXi::Constant(m, -1);

    Vector dist(m);
    Eigen::VectorXi counts(k);
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iterations; ++it) {
        bool changed = false;
        for (Index i = 0; i < m; ++i) {
            const Index c = nearest_centroid(points.row(i).transpose(), cl.centroids);
            if (c != cl.assignment(i)) {
                changed = true;
                cl.assignment(i) = static_cast<int>(c);
            }
            dist(i) = (points.row(i) - cl.centroids.row(c)).squaredNorm();
        }

        // empty-cluster repair: the point farthest from its centroid moves to the empty cluster
        counts.setZero();
        for (Index i = 0; i < m; ++i) {
            ++counts(cl.assignment(i));
        }
        for (Index c = 0; c < k; ++c) {
            if (counts(c) > 0) {
                continue;
            }
            Index far = -1;
            for (Index i = 0; i < m; ++i) {
                if (counts(cl.assignment(i)) > 1 && (far < 0 || dist(i) > dist(far))) {
                    far = i;
                }
            }
            --counts(cl.assignment(far));
            cl.assignment(far) = static_cast<int>(c);
            counts(c) = 1;
            dist(far) = 0.0;
            changed = true;
        }

        cl.centroids.setZero();
        for (Index i = 0; i < m; ++i) {
            cl.centroids.row(cl.assignment(i)) += points.row(i);
        }
        for (Index c = 0; c < k; ++c) {
            cl.centroids.row(c) /= static_cast<double>(counts(c));
        }
        const double objective = clustering_objective(points, cl.assignment, cl.centroids);
        cl.objective_trace.push_back(objective);
        cl.iterations = it + 1;
        cl.objective = objective;

        if (!changed) {
            break;
        }
        if (std::isfinite(previous) && (previous <= 0.0 || (previous - objective) <= cfg.tolerance * previous)) {
            break;
        }
        previous = objective;
    }
    return cl;
}

void check_config(const Eigen::Ref<const Matrix>& points, const KMeansConfig& cfg)
{
    if (points.rows() == 0 || points.cols() == 0) {
        throw ValidationError("kmeans: empty input");
    }
    if (cfg.k < 1) {
        throw ValidationError("kmeans: k must be positive");
    }
    if (points.rows() < cfg.k) {
        throw ValidationError("kmeans: fewer points (" + std::to_string(points.rows()) + ") than clusters (" +
                              std::to_string(cfg.k) + ")");
    }
    if (cfg.max_iterations < 1 || cfg.restarts < 1 || !(cfg.tolerance > 0.0)) {
        throw ValidationError("kmeans: max_iterations, restarts and tolerance must be positive");
    }
    if (!points.allFinite()) {
        throw ValidationError("kmeans: non-finite input");
    }
}

} // namespace

std::vector<Clustering> kmeans_all_restarts(const Eigen::Ref<const Matrix>& points, const KMeansConfig& config)
{
    check_config(points, config);
    std::vector<Clustering> runs;
    runs.reserve(static_cast<std::size_t>(config.restarts));
    for (int r = 0; r < config.restarts; ++r) {
        runs.push_back(lloyd(points, config, derive_seed(config.seed, static_cast<std::uint64_t>(r))));
        runs.back().restart = r;
    }
    return runs;
}

Clustering kmeans(const Eigen::Ref<const Matrix>& points, const KMeansConfig& config)
{
    auto runs = kmeans_all_restarts(points, config);
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].objective < runs[best].objective) {
            best = r;
        }
    }
    return std::move(runs[best]);
}

} // namespace itcr
