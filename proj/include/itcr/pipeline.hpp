#ifndef ITCR_PIPELINE_HPP
#define ITCR_PIPELINE_HPP

#include "itcr/dataset.hpp"
#include "itcr/itc.hpp"
#include "itcr/ridge.hpp"

#include <optional>

namespace itcr {

enum class Thinning { None, ITC };
std::string_view to_string(Thinning t);

// Everything needed to go from a raw dataset to a fitted classifier:
//   class subset -> [cosine filter] -> [ITC] -> log shift -> standardize -> select k -> ridge fit
struct PipelineSpec {
    std::vector<PredictorClass> classes{kAllClasses.begin(), kAllClasses.end()};
    Thinning thinning = Thinning::None;
    ITCConfig itc{};
    std::optional<int> itc_iteration;   // use this iteration's snapshot; default: final
    RidgeSearchConfig ridge_search{};
    double cutoff = 0.5;
    bool cosine_filter = false;
    double cosine_threshold = 0.9;

    void check() const;
    // e.g. "RR with ITC thinning (after first iteration)"
    std::string model_description() const;
};

// Predictor columns surviving the class subset, cosine filter and ITC.
struct ThinningResult {
    IndexList columns;                  // positions in the input dataset, ascending
    IndexList cosine_removed;           // positions in the input dataset
    std::optional<ITCResult> itc;       // ITC indices refer to the post-filter subset
    IndexList itc_input_columns;        // maps ITC positions back to dataset positions
};

ThinningResult thin_predictors(const Dataset& d, const PipelineSpec& spec);

struct FittedModel {
    IndexList columns;                  // dataset positions used by the fit
    std::vector<std::string> predictor_ids;
    std::vector<PredictorClass> predictor_classes;
    IndexList dropped_constant;         // dataset positions dropped for zero variance after the log shift
    RidgeSelection selection;
    RidgeFit fit;
    RidgeCriterion criterion = RidgeCriterion::PRESS;
    double cutoff = 0.5;

    // x_full: one raw row over all dataset columns.
    ClassPrediction predict(const Eigen::Ref<const Vector>& x_full) const;
};

// Log shift, standardization, k selection and fit on the given columns.
FittedModel fit_ridge_stage(const Dataset& train, const IndexList& columns, const PipelineSpec& spec);

struct TrainedPipeline {
    ThinningResult thinning;
    FittedModel model;
};

TrainedPipeline train_pipeline(const Dataset& train, const PipelineSpec& spec);

} // namespace itcr

#endif // ITCR_PIPELINE_HPP
