#ifndef ITCR_REPORT_HPP
#define ITCR_REPORT_HPP

#include "itcr/crossval.hpp"
#include "itcr/dataset.hpp"
#include "itcr/itc.hpp"
#include "itcr/pipeline.hpp"

#include <iosfwd>
#include <map>

namespace itcr {

// All report files are plain text with a fixed key order: `key = value`
// headers, then `[section]` blocks of comma-separated rows. Doubles are
// written in shortest round-trip form, so equal runs give equal bytes.

void write_itc_trace(std::ostream& out, const ITCResult& result, const Dataset& d);
void write_cv_report(std::ostream& out, const CVReport& report);
CVReport read_cv_report(std::istream& in);

// "Leave-one-out CV", "Two-deep CV", ...
std::string cv_type_label(const CVReport& report, Thinning thinning);

// One tab-separated row in the fixed summary column order; percentages
// rounded half-up to 2 decimals, absent metrics written as NA.
std::string summary_header();
std::string summary_row(const CVReport& report, const std::string& cv_type);

struct FitArtifact {
    std::vector<std::string> predictor_ids;
    std::vector<PredictorClass> classes;
    RidgeFit fit;
    RidgeCriterion criterion = RidgeCriterion::PRESS;
    double cutoff = 0.5;
    std::vector<double> grid;
    std::vector<double> curve;

    ClassPrediction predict(const Eigen::Ref<const Vector>& x_raw) const { return predict_class(fit, x_raw, cutoff); }
};

FitArtifact make_fit_artifact(const FittedModel& model, const RidgeSearchConfig& search);
void write_fit_artifact(std::ostream& out, const FitArtifact& artifact);
FitArtifact read_fit_artifact(std::istream& in);

struct SignificantPredictor {
    std::string id;
    double abs_t = 0.0;
    PredictorClass cls = PredictorClass::TS;
};

// Predictors with |t| >= threshold, largest first.
std::vector<SignificantPredictor> significant_predictors(const FitArtifact& artifact, double threshold = 1.96);
void write_significance_table(std::ostream& out, const std::vector<SignificantPredictor>& rows);

} // namespace itcr

#endif // ITCR_REPORT_HPP
