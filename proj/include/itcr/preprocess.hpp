#ifndef ITCR_PREPROCESS_HPP
#define ITCR_PREPROCESS_HPP

#include "itcr/dataset.hpp"

#include <cmath>

namespace itcr {

struct NormalizationGuard {
    Index predictor;
    std::string fallback;   // which divisor was substituted and why
};

// Mean-relative predictor values w' = (w - mu) / |mu|, one column per predictor.
struct NormalizedMatrix {
    Matrix values;
    IndexList kept_predictor_indices;
    std::vector<NormalizationGuard> guard_log;
    std::vector<std::string> warnings;
};

// |mu| is used as divisor when |mu| > eps * max|w|; otherwise the column is only
// centered (divisor 1) and the fallback is logged.
NormalizedMatrix normalize_predictors(const Dataset& d, double eps = 1e-8);
NormalizedMatrix normalize_predictors(const Eigen::Ref<const Matrix>& values, double eps = 1e-8);

struct CosineFilterResult {
    IndexList kept;
    IndexList removed;
    Vector cosines;   // |cos| of each raw column against the all-ones vector
};

// Removes predictors that are nearly constant across compounds: |cos(g, 1)| >= threshold.
// Zero-norm columns are reported with cosine 1 and removed.
CosineFilterResult constant_cosine_filter(const Dataset& d, double threshold = 0.9);
CosineFilterResult constant_cosine_filter(const Eigen::Ref<const Matrix>& values, double threshold = 0.9);

// Shift added before the logarithm: 1 for x > 0, else -(largest integer < x).
inline double log_shift_constant(double x)
{
    return x > 0.0 ? 1.0 : -(std::ceil(x) - 1.0);
}

// Entrywise x -> ln(x + C(x)).
template <typename Derived>
Matrix log_shift_transform(const Eigen::MatrixBase<Derived>& values)
{
    return values.unaryExpr([](double x) { return std::log(x + log_shift_constant(x)); });
}

struct StandardizationParams {
    Vector means;
    Vector sds;
    double response_mean = 0.0;
    double response_sd = 1.0;

    Matrix apply(const Eigen::Ref<const Matrix>& raw) const;
    Vector apply_row(const Eigen::Ref<const Vector>& raw) const;
    Matrix invert(const Eigen::Ref<const Matrix>& standardized) const;
    double response_to_scale(double standardized_score) const { return response_mean + response_sd * standardized_score; }
};

struct Standardized {
    Matrix values;
    Vector response;
    StandardizationParams params;
};

// Columns with zero sample standard deviation (divisor m-1).
IndexList zero_variance_columns(const Eigen::Ref<const Matrix>& values);

// Centers and scales each column and the response to mean 0 / sample sd 1.
// Throws ValidationError listing zero-variance columns, or if the response is constant.
Standardized standardize(const Eigen::Ref<const Matrix>& values, const Eigen::Ref<const Vector>& response);

} // namespace itcr

#endif // ITCR_PREPROCESS_HPP
