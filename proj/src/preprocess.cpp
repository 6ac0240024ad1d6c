#include "itcr/preprocess.hpp"

#include <cmath>

namespace itcr {

NormalizedMatrix normalize_predictors(const Dataset& d, double eps)
{
    return normalize_predictors(d.values, eps);
}

NormalizedMatrix normalize_predictors(const Eigen::Ref<const Matrix>& values, double eps)
{
    const Index m = values.rows();
    const Index n = values.cols();
    NormalizedMatrix out;
    out.values.resize(m, n);
    out.kept_predictor_indices.reserve(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
        out.kept_predictor_indices.push_back(j);
        const auto col = values.col(j);
        const double mu = col.mean();
        const double scale = col.cwiseAbs().maxCoeff();
        double divisor = std::fabs(mu);
        if (!(divisor > eps * scale)) {
            divisor = 1.0;
            if (scale == 0.0) {
                out.guard_log.push_back({j, "all-zero column, divisor 1"});
                out.warnings.push_back("predictor " + std::to_string(j) + " is all zeros");
            } else {
                out.guard_log.push_back({j, "mean near zero, divisor 1"});
            }
        }
        out.values.col(j) = (col.array() - mu) / divisor;
    }
    return out;
}

CosineFilterResult constant_cosine_filter(const Dataset& d, double threshold)
{
    return constant_cosine_filter(d.values, threshold);
}

CosineFilterResult constant_cosine_filter(const Eigen::Ref<const Matrix>& values, double threshold)
{
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ValidationError("cosine threshold must lie in (0,1]");
    }
    const Index m = values.rows();
    const double ones_norm = std::sqrt(static_cast<double>(m));
    CosineFilterResult r;
    r.cosines.resize(values.cols());
    for (Index j = 0; j < values.cols(); ++j) {
        const auto col = values.col(j);
        const double norm = col.norm();
        const double c = norm > 0.0 ? std::min(1.0, std::fabs(col.sum()) / (norm * ones_norm)) : 1.0;
        r.cosines(j) = c;
        (c >= threshold ? r.removed : r.kept).push_back(j);
    }
    return r;
}

Matrix StandardizationParams::apply(const Eigen::Ref<const Matrix>& raw) const
{
    return (raw.rowwise() - means.transpose()).array().rowwise() / sds.transpose().array();
}

Vector StandardizationParams::apply_row(const Eigen::Ref<const Vector>& raw) const
{
    return (raw - means).cwiseQuotient(sds);
}

Matrix StandardizationParams::invert(const Eigen::Ref<const Matrix>& standardized) const
{
    Matrix out = standardized.array().rowwise() * sds.transpose().array();
    out.rowwise() += means.transpose();
    return out;
}

namespace {

double sample_sd(const Eigen::Ref<const Vector>& v, double mean)
{
    const Index m = v.size();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(m - 1));
}

} // namespace

IndexList zero_variance_columns(const Eigen::Ref<const Matrix>& values)
{
    IndexList out;
    for (Index j = 0; j < values.cols(); ++j) {
        const auto col = values.col(j);
        if (col.maxCoeff() == col.minCoeff()) {
            out.push_back(j);
        }
    }
    return out;
}

Standardized standardize(const Eigen::Ref<const Matrix>& values, const Eigen::Ref<const Vector>& response)
{
    const Index m = values.rows();
    if (m < 2) {
        throw ValidationError("standardize: need at least 2 rows");
    }
    if (response.size() != m) {
        throw ValidationError("standardize: response length does not match rows");
    }
    const auto zero = zero_variance_columns(values);
    if (!zero.empty()) {
        std::string cols;
        for (auto j : zero) {
            cols += (cols.empty() ? "" : ",") + std::to_string(j);
        }
        throw ValidationError("standardize: zero-variance columns: " + cols);
    }

    Standardized s;
    s.params.means = values.colwise().mean().transpose();
    s.params.sds.resize(values.cols());
    for (Index j = 0; j < values.cols(); ++j) {
        s.params.sds(j) = sample_sd(values.col(j), s.params.means(j));
    }
    s.params.response_mean = response.mean();
    s.params.response_sd = sample_sd(response, s.params.response_mean);
    if (!(s.params.response_sd > 0.0)) {
        throw ValidationError("standardize: response is constant");
    }
    s.values = s.params.apply(values);
    s.response = (response.array() - s.params.response_mean) / s.params.response_sd;
    return s;
}

} // namespace itcr
