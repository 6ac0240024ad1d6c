#ifndef ITCR_RIDGE_HPP
#define ITCR_RIDGE_HPP

#include "itcr/preprocess.hpp"
#include "itcr/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace itcr {

// Ridge regression on centered and scaled data, without intercept:
//   b = (X'X + kI)^{-1} X'y
// All routines are templated on the scalar type so that the same code can be
// run in extended precision.

template <typename Scalar>
struct BasicRidgeFit {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vec coefficients;
    Scalar ridge_constant = 0;
    Vec fitted;
    Vec residuals;
    Vec hat_diagonal;
    Scalar hat_trace = 0;
    Scalar rss = 0;
    Scalar sigma2_hat = std::numeric_limits<Scalar>::quiet_NaN();
    // diag of (X'X+kI)^{-1} X'X (X'X+kI)^{-1}; coefficient variances up to sigma^2
    Vec sandwich_diagonal;
    Vec t_ratios;   // empty when m <= tr H
    bool spectral_fallback = false;
    StandardizationParams standardization;   // filled by callers that fit on transformed raw data
};

using RidgeFit = BasicRidgeFit<double>;

enum class RidgeCriterion { PRESS, GCV };

inline std::string_view to_string(RidgeCriterion c) { return c == RidgeCriterion::PRESS ? "press" : "gcv"; }

// 181 log-spaced values over [1e-6, 1e3] by default.
inline std::vector<double> log_grid(double lo = 1e-6, double hi = 1e3, int count = 181)
{
    if (!(lo > 0.0 && hi > lo) || count < 1) {
        throw ValidationError("ridge grid: need 0 < lo < hi and count >= 1");
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        grid[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * t);
    }
    grid.front() = lo;
    if (count > 1) {
        grid.back() = hi;
    }
    return grid;
}

struct RidgeSearchConfig {
    std::vector<double> grid = log_grid();
    RidgeCriterion criterion = RidgeCriterion::PRESS;

    void check() const
    {
        if (grid.empty()) {
            throw ValidationError("ridge grid is empty");
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
                throw ValidationError("ridge grid must be finite, non-negative and strictly increasing");
            }
        }
    }
};

namespace detail {

inline constexpr double kConditionLimit = 1e12;

template <typename DerivedX, typename DerivedY>
void check_ridge_inputs(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                        typename DerivedX::Scalar k)
{
    if (X.rows() != y.size()) {
        throw ValidationError("ridge: X has " + std::to_string(X.rows()) + " rows but y has " +
                              std::to_string(y.size()) + " entries");
    }
    if (X.rows() < 1) {
        throw ValidationError("ridge: no observations");
    }
    if (!(k >= 0) || !std::isfinite(static_cast<double>(k))) {
        throw ValidationError("ridge: ridge constant must be finite and >= 0");
    }
    if (!X.allFinite() || !y.allFinite()) {
        throw NumericError("ridge: non-finite input");
    }
}

// Z = (X'X + kI)^{-1} X', n x m. Uses the smaller of the primal (n x n) and
// dual (m x m) systems; both are symmetric positive definite for k > 0.
template <typename Scalar, typename DerivedX>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> ridge_operator(const Eigen::MatrixBase<DerivedX>& X, Scalar k,
                                                                      bool& spectral)
{
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Index m = X.rows();
    const Index n = X.cols();
    const bool primal = n <= m;
    const Index dim = primal ? n : m;

    Mat gram = primal ? Mat(X.transpose() * X) : Mat(X * X.transpose());
    if (!primal && k == Scalar(0)) {
        throw NumericError("ridge: X'X is singular at k = 0 (more predictors than observations)");
    }
    Mat system = gram;
    system.diagonal().array() += k;

    spectral = false;
    Eigen::LLT<Mat> llt(system);
    if (llt.info() == Eigen::Success && static_cast<double>(llt.rcond()) * kConditionLimit >= 1.0) {
        return primal ? Mat(llt.solve(X.transpose())) : Mat(llt.solve(X).transpose());
    }

    // ill-conditioned: solve through the eigendecomposition of the Gram matrix
    spectral = true;
    Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
    if (eig.info() != Eigen::Success) {
        throw NumericError("ridge: eigendecomposition failed");
    }
    const auto& lambda = eig.eigenvalues();
    const Scalar floor = std::max(lambda.cwiseAbs().maxCoeff(), Scalar(1)) * Scalar(dim) *
                         std::numeric_limits<Scalar>::epsilon();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv(dim);
    for (Index j = 0; j < dim; ++j) {
        const Scalar v = std::max(lambda(j), Scalar(0)) + k;
        if (v <= floor) {
            throw NumericError("ridge: singular system (k = " + std::to_string(static_cast<double>(k)) + ")");
        }
        inv(j) = Scalar(1) / v;
    }
    const Mat& V = eig.eigenvectors();
    const Mat inverse = V * inv.asDiagonal() * V.transpose();
    return primal ? Mat(inverse * X.transpose()) : Mat(X.transpose() * inverse);
}

} // namespace detail

template <typename DerivedX, typename DerivedY>
BasicRidgeFit<typename DerivedX::Scalar> ridge_fit(const Eigen::MatrixBase<DerivedX>& X,
                                                   const Eigen::MatrixBase<DerivedY>& y,
                                                   typename DerivedX::Scalar k)
{
    using Scalar = typename DerivedX::Scalar;
    detail::check_ridge_inputs(X, y, k);
    const Index m = X.rows();

    BasicRidgeFit<Scalar> fit;
    fit.ridge_constant = k;
    const auto Z = detail::ridge_operator<Scalar>(X, k, fit.spectral_fallback);
    fit.coefficients = Z * y;
    fit.fitted = X * fit.coefficients;
    fit.residuals = y - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();
    fit.hat_diagonal = (X.derived().array() * Z.transpose().array()).rowwise().sum();
    fit.hat_trace = fit.hat_diagonal.sum();
    fit.sandwich_diagonal = Z.rowwise().squaredNorm();

    const Scalar dof = Scalar(m) - fit.hat_trace;
    if (dof > Scalar(0)) {
        fit.sigma2_hat = fit.rss / dof;
        fit.t_ratios.resize(fit.coefficients.size());
        for (Index j = 0; j < fit.coefficients.size(); ++j) {
            const Scalar se = std::sqrt(fit.sigma2_hat * fit.sandwich_diagonal(j));
            fit.t_ratios(j) = (fit.coefficients(j) == Scalar(0) || se == Scalar(0)) ? Scalar(0)
                                                                                      : fit.coefficients(j) / se;
        }
    }
    return fit;
}

// t_j = b_j / se_j with se_j^2 = sigma^2 [(X'X+kI)^{-1} X'X (X'X+kI)^{-1}]_jj, sigma^2 = RSS/(m - tr H).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> t_ratios(const BasicRidgeFit<Scalar>& fit)
{
    if (fit.t_ratios.size() == 0) {
        throw NumericError("t_ratios: residual degrees of freedom m - tr(H) <= 0");
    }
    return fit.t_ratios;
}

// Leave-one-out prediction sum of squares from a single fit.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar press(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                                typename DerivedX::Scalar k)
{
    using Scalar = typename DerivedX::Scalar;
    const auto fit = ridge_fit(X, y, k);
    Scalar total = 0;
    for (Index i = 0; i < X.rows(); ++i) {
        const Scalar denom = Scalar(1) - fit.hat_diagonal(i);
        if (!(denom > Scalar(1e-12))) {
            throw NumericError("press: leverage h_" + std::to_string(i) + " = 1");
        }
        const Scalar r = fit.residuals(i) / denom;
        total += r * r;
    }
    return total;
}

// m * RSS / (m - tr H)^2
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar gcv(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                              typename DerivedX::Scalar k)
{
    using Scalar = typename DerivedX::Scalar;
    const auto fit = ridge_fit(X, y, k);
    const Scalar m = Scalar(X.rows());
    const Scalar dof = m - fit.hat_trace;
    if (!(dof > m * Scalar(1e-12))) {
        throw NumericError("gcv: tr(H) = m");
    }
    return m * fit.rss / (dof * dof);
}

// The whole ridge path from one thin SVD X = U S V'. Every k costs O(m r).
template <typename Scalar>
class BasicRidgePath {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    template <typename DerivedX, typename DerivedY>
    BasicRidgePath(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y) : m_(X.rows())
    {
        detail::check_ridge_inputs(X, y, Scalar(0));
        Eigen::BDCSVD<Mat> svd(Mat(X), Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vec& s = svd.singularValues();
        const Scalar cutoff = (s.size() > 0 ? s(0) : Scalar(0)) * Scalar(std::max(X.rows(), X.cols())) *
                              std::numeric_limits<Scalar>::epsilon();
        Index rank = 0;
        while (rank < s.size() && s(rank) > cutoff) {
            ++rank;
        }
        s2_ = s.head(rank).cwiseAbs2();
        s_ = s.head(rank);
        U_ = svd.matrixU().leftCols(rank);
        V_ = svd.matrixV().leftCols(rank);
        uty_ = U_.transpose() * y;
        y_ = y;
    }

    Index rank() const { return s2_.size(); }

    Vec shrinkage(Scalar k) const { return s2_.array() / (s2_.array() + k); }

    Vec coefficients(Scalar k) const
    {
        return V_ * (s_.array() / (s2_.array() + k) * uty_.array()).matrix();
    }

    Vec fitted(Scalar k) const { return U_ * (shrinkage(k).array() * uty_.array()).matrix(); }

    Vec hat_diagonal(Scalar k) const { return U_.array().square().matrix() * shrinkage(k); }

    Scalar hat_trace(Scalar k) const { return shrinkage(k).sum(); }

    Scalar rss(Scalar k) const { return (y_ - fitted(k)).squaredNorm(); }

    Scalar press(Scalar k) const
    {
        const Vec h = hat_diagonal(k);
        const Vec e = y_ - fitted(k);
        Scalar total = 0;
        for (Index i = 0; i < m_; ++i) {
            const Scalar denom = Scalar(1) - h(i);
            if (!(denom > Scalar(1e-12))) {
                return std::numeric_limits<Scalar>::quiet_NaN();
            }
            total += (e(i) / denom) * (e(i) / denom);
        }
        return total;
    }

    Scalar gcv(Scalar k) const
    {
        const Scalar m = Scalar(m_);
        const Scalar dof = m - hat_trace(k);
        if (!(dof > m * Scalar(1e-12))) {
            return std::numeric_limits<Scalar>::quiet_NaN();
        }
        return m * rss(k) / (dof * dof);
    }

    Scalar criterion(RidgeCriterion c, Scalar k) const { return c == RidgeCriterion::PRESS ? press(k) : gcv(k); }

private:
    Index m_;
    Vec s_;
    Vec s2_;
    Mat U_;
    Mat V_;
    Vec uty_;
    Vec y_;
};

using RidgePath = BasicRidgePath<double>;

struct RidgeSelection {
    double k = 0.0;
    Index grid_index = 0;
    std::vector<double> curve;   // criterion value at each grid point (NaN where undefined)
};

// argmin of the criterion over the grid; ties go to the smaller k.
template <typename DerivedX, typename DerivedY>
RidgeSelection select_k(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                        const RidgeSearchConfig& cfg)
{
    cfg.check();
    const BasicRidgePath<double> path(X.template cast<double>(), y.template cast<double>());
    RidgeSelection sel;
    sel.curve.reserve(cfg.grid.size());
    Index best = -1;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        const double v = path.criterion(cfg.criterion, cfg.grid[i]);
        sel.curve.push_back(v);
        if (std::isfinite(v) && (best < 0 || v < sel.curve[static_cast<std::size_t>(best)])) {
            best = static_cast<Index>(i);
        }
    }
    if (best < 0) {
        throw NumericError("select_k: criterion is non-finite over the entire grid");
    }
    sel.grid_index = best;
    sel.k = cfg.grid[static_cast<std::size_t>(best)];
    return sel;
}

struct ClassPrediction {
    double score = 0.0;   // prediction on the response scale
    int predicted = 0;
};

// Raw predictor values -> log shift -> fit's standardization -> b'x, mapped
// back to the response scale; class 1 iff the score is strictly above cutoff.
inline ClassPrediction predict_class(const RidgeFit& fit, const Eigen::Ref<const Vector>& x_raw, double cutoff = 0.5)
{
    if (x_raw.size() != fit.coefficients.size()) {
        throw ValidationError("predict_class: expected " + std::to_string(fit.coefficients.size()) +
                              " predictor values, got " + std::to_string(x_raw.size()));
    }
    if (!x_raw.allFinite()) {
        throw ValidationError("predict_class: non-finite predictor value");
    }
    const Vector transformed = log_shift_transform(x_raw);
    const Vector z = fit.standardization.apply_row(transformed);
    ClassPrediction p;
    p.score = fit.standardization.response_to_scale(fit.coefficients.dot(z));
    p.predicted = p.score > cutoff ? 1 : 0;
    return p;
}

} // namespace itcr

#endif // ITCR_RIDGE_HPP
