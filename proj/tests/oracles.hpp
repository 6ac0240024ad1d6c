#ifndef ITCR_TESTS_ORACLES_HPP
#define ITCR_TESTS_ORACLES_HPP

// Reference computations written without the library's solvers, used to
// freeze expected values. Deliberately naive: long double Gauss-Jordan,
// literal refits, exhaustive enumeration.

#include "itcr/random.hpp"
#include "itcr/types.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

using LMat = std::vector<std::vector<long double>>;
using LVec = std::vector<long double>;

inline itcr::Matrix random_matrix(itcr::Rng& rng, itcr::Index rows, itcr::Index cols)
{
    itcr::Matrix a(rows, cols);
    for (itcr::Index j = 0; j < cols; ++j) {
        for (itcr::Index i = 0; i < rows; ++i) {
            a(i, j) = rng.normal();
        }
    }
    return a;
}

inline itcr::Vector random_vector(itcr::Rng& rng, itcr::Index n)
{
    itcr::Vector v(n);
    for (itcr::Index i = 0; i < n; ++i) {
        v(i) = rng.normal();
    }
    return v;
}

// Gauss-Jordan with partial pivoting on an augmented system.
inline LVec solve(LMat a, LVec b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(a[r][c]) > std::fabs(a[p][c])) {
                p = r;
            }
        }
        if (a[p][c] == 0.0L) {
            throw std::runtime_error("oracle: singular system");
        }
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) {
                continue;
            }
            const long double f = a[r][c] / a[c][c];
            if (f == 0.0L) {
                continue;
            }
            for (std::size_t k = c; k < n; ++k) {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        b[i] /= a[i][i];
    }
    return b;
}

// (X'X + kI) b = X'y accumulated in long double, skipping row `skip` if given.
inline LVec ridge_coefficients(const itcr::Matrix& X, const itcr::Vector& y, long double k, long skip = -1)
{
    const auto m = static_cast<std::size_t>(X.rows());
    const auto n = static_cast<std::size_t>(X.cols());
    LMat a(n, LVec(n, 0.0L));
    LVec rhs(n, 0.0L);
    for (std::size_t i = 0; i < m; ++i) {
        if (static_cast<long>(i) == skip) {
            continue;
        }
        for (std::size_t p = 0; p < n; ++p) {
            const long double xp = X(static_cast<itcr::Index>(i), static_cast<itcr::Index>(p));
            rhs[p] += xp * y(static_cast<itcr::Index>(i));
            for (std::size_t q = 0; q < n; ++q) {
                a[p][q] += xp * X(static_cast<itcr::Index>(i), static_cast<itcr::Index>(q));
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        a[p][p] += k;
    }
    return solve(a, rhs);
}

inline itcr::Vector to_vector(const LVec& v)
{
    itcr::Vector out(static_cast<itcr::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<itcr::Index>(i)) = static_cast<double>(v[i]);
    }
    return out;
}

// Sum of squared errors of m literal leave-one-out refits.
inline long double literal_loo_sse(const itcr::Matrix& X, const itcr::Vector& y, long double k)
{
    long double sse = 0.0L;
    for (itcr::Index i = 0; i < X.rows(); ++i) {
        const LVec b = ridge_coefficients(X, y, k, static_cast<long>(i));
        long double pred = 0.0L;
        for (itcr::Index j = 0; j < X.cols(); ++j) {
            pred += b[static_cast<std::size_t>(j)] * X(i, j);
        }
        const long double e = y(i) - pred;
        sse += e * e;
    }
    return sse;
}

// GCV from the eigenvalues of X'X, found by cyclic Jacobi rotations.
inline long double spectral_gcv(const itcr::Matrix& X, const itcr::Vector& y, long double k)
{
    const auto n = static_cast<std::size_t>(X.cols());
    const auto m = static_cast<std::size_t>(X.rows());
    LMat a(n, LVec(n, 0.0L));
    LMat v(n, LVec(n, 0.0L));
    for (std::size_t p = 0; p < n; ++p) {
        v[p][p] = 1.0L;
        for (std::size_t q = 0; q < n; ++q) {
            for (std::size_t i = 0; i < m; ++i) {
                a[p][q] += static_cast<long double>(X(static_cast<itcr::Index>(i), static_cast<itcr::Index>(p))) *
                           X(static_cast<itcr::Index>(i), static_cast<itcr::Index>(q));
            }
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        long double off = 0.0L;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a[p][q] * a[p][q];
            }
        }
        if (off < 1e-36L) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0L) {
                    continue;
                }
                const long double theta = (a[q][q] - a[p][p]) / (2.0L * a[p][q]);
                const long double t = (theta >= 0 ? 1.0L : -1.0L) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0L));
                const long double c = 1.0L / std::sqrt(t * t + 1.0L);
                const long double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const long double arp = a[r][p];
                    const long double arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const long double apr = a[p][r];
                    const long double aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const long double vrp = v[r][p];
                    const long double vrq = v[r][q];
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }
    // X'y in the eigenbasis; RSS = y'y - sum (2 l/(l+k) - l^2/(l+k)^2) z_j^2 / l with z = V'X'y
    LVec xty(n, 0.0L);
    long double yty = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
        yty += static_cast<long double>(y(static_cast<itcr::Index>(i))) * y(static_cast<itcr::Index>(i));
        for (std::size_t p = 0; p < n; ++p) {
            xty[p] += static_cast<long double>(X(static_cast<itcr::Index>(i), static_cast<itcr::Index>(p))) *
                      y(static_cast<itcr::Index>(i));
        }
    }
    long double trace = 0.0L;
    long double rss = yty;
    for (std::size_t j = 0; j < n; ++j) {
        const long double l = a[j][j];
        long double z = 0.0L;
        for (std::size_t p = 0; p < n; ++p) {
            z += v[p][j] * xty[p];
        }
        trace += l / (l + k);
        if (l > 0.0L) {
            const long double g = l / (l + k);
            rss -= (2.0L * g - g * g) * z * z / l;
        }
    }
    const long double dm = static_cast<long double>(m);
    return dm * rss / ((dm - trace) * (dm - trace));
}

// Lowest k=2 objective over every bipartition with both sides non-empty.
inline double best_bipartition(const itcr::Matrix& points)
{
    const auto m = static_cast<unsigned>(points.rows());
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1U << (m - 1)); ++mask) {
        double total = 0.0;
        for (int side = 0; side < 2; ++side) {
            itcr::Vector centroid = itcr::Vector::Zero(points.cols());
            int count = 0;
            for (unsigned i = 0; i < m; ++i) {
                if (static_cast<int>((mask >> i) & 1U) == side) {
                    centroid += points.row(i).transpose();
                    ++count;
                }
            }
            centroid /= count;
            for (unsigned i = 0; i < m; ++i) {
                if (static_cast<int>((mask >> i) & 1U) == side) {
                    total += (points.row(i).transpose() - centroid).squaredNorm();
                }
            }
        }
        best = std::min(best, total);
    }
    return best;
}

// Nearest-centroid leave-one-out accuracy using the given columns.
inline double nearest_centroid_loo_accuracy(const itcr::Matrix& values, const Eigen::VectorXi& labels,
                                            const itcr::IndexList& columns)
{
    const itcr::Index m = values.rows();
    int correct = 0;
    for (itcr::Index u = 0; u < m; ++u) {
        itcr::Vector c[2] = {itcr::Vector::Zero(static_cast<itcr::Index>(columns.size())),
                             itcr::Vector::Zero(static_cast<itcr::Index>(columns.size()))};
        int count[2] = {0, 0};
        for (itcr::Index i = 0; i < m; ++i) {
            if (i == u) {
                continue;
            }
            for (std::size_t j = 0; j < columns.size(); ++j) {
                c[labels(i)](static_cast<itcr::Index>(j)) += values(i, columns[j]);
            }
            ++count[labels(i)];
        }
        double d[2];
        for (int s = 0; s < 2; ++s) {
            c[s] /= count[s];
            d[s] = 0.0;
            for (std::size_t j = 0; j < columns.size(); ++j) {
                const double diff = values(u, columns[j]) - c[s](static_cast<itcr::Index>(j));
                d[s] += diff * diff;
            }
        }
        const int pred = d[1] < d[0] ? 1 : 0;
        correct += pred == labels(u) ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(m);
}

inline double rel_diff(double a, double b)
{
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

} // namespace oracle

#endif // ITCR_TESTS_ORACLES_HPP
