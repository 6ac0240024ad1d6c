#include "itcr/pipeline.hpp"

#include <algorithm>

namespace itcr {

std::string_view to_string(Thinning t)
{
    return t == Thinning::ITC ? "itc" : "none";
}

void PipelineSpec::check() const
{
    if (classes.empty()) {
        throw ValidationError("pipeline: no predictor classes selected");
    }
    if (!(cutoff > 0.0 && cutoff < 1.0)) {
        throw ValidationError("pipeline: cutoff must lie in (0,1)");
    }
    if (!(cosine_threshold > 0.0 && cosine_threshold <= 1.0)) {
        throw ValidationError("pipeline: cosine threshold must lie in (0,1]");
    }
    if (itc_iteration && *itc_iteration < 1) {
        throw ValidationError("pipeline: ITC iteration numbers start at 1");
    }
    itc.check();
    ridge_search.check();
}

std::string PipelineSpec::model_description() const
{
    if (thinning == Thinning::None) {
        return "Ridge regression without descriptor thinning";
    }
    static const char* const ordinals[] = {"first", "second", "third", "fourth", "fifth"};
    if (itc_iteration && *itc_iteration <= 5) {
        return std::string("RR with ITC thinning (after ") + ordinals[*itc_iteration - 1] + " iteration)";
    }
    if (itc_iteration) {
        return "RR with ITC thinning (after iteration " + std::to_string(*itc_iteration) + ")";
    }
    return "RR with ITC thinning";
}

ThinningResult thin_predictors(const Dataset& d, const PipelineSpec& spec)
{
    ThinningResult r;
    IndexList cols;
    for (std::size_t j = 0; j < d.classes.size(); ++j) {
        if (std::find(spec.classes.begin(), spec.classes.end(), d.classes[j]) != spec.classes.end()) {
            cols.push_back(static_cast<Index>(j));
        }
    }
    if (cols.empty()) {
        throw ValidationError("pipeline: no predictors of class " + join_classes(spec.classes));
    }

    if (spec.cosine_filter) {
        const Dataset subset = d.select_columns(cols);
        const auto filtered = constant_cosine_filter(subset, spec.cosine_threshold);
        IndexList kept;
        for (Index j : filtered.kept) {
            kept.push_back(cols[static_cast<std::size_t>(j)]);
        }
        for (Index j : filtered.removed) {
            r.cosine_removed.push_back(cols[static_cast<std::size_t>(j)]);
        }
        cols = std::move(kept);
        if (cols.empty()) {
            throw ValidationError("pipeline: every predictor was removed by the cosine filter");
        }
    }

    if (spec.thinning == Thinning::ITC) {
        r.itc_input_columns = cols;
        r.itc = run_itc(d.select_columns(cols), spec.itc);
        IndexList selected;
        for (Index j : r.itc->selection(spec.itc_iteration, static_cast<Index>(cols.size()))) {
            selected.push_back(cols[static_cast<std::size_t>(j)]);
        }
        cols = std::move(selected);
    }
    r.columns = std::move(cols);
    return r;
}

ClassPrediction FittedModel::predict(const Eigen::Ref<const Vector>& x_full) const
{
    Vector x(static_cast<Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] >= x_full.size()) {
            throw ValidationError("predict: row has too few columns");
        }
        x(static_cast<Index>(j)) = x_full(columns[j]);
    }
    return predict_class(fit, x, cutoff);
}

FittedModel fit_ridge_stage(const Dataset& train, const IndexList& columns, const PipelineSpec& spec)
{
    if (columns.empty()) {
        throw ValidationError("ridge stage: no predictors");
    }
    Matrix raw(train.compounds(), static_cast<Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        raw.col(static_cast<Index>(j)) = train.values.col(columns[j]);
    }
    Matrix transformed = log_shift_transform(raw);

    FittedModel model;
    model.criterion = spec.ridge_search.criterion;
    model.cutoff = spec.cutoff;
    const IndexList zero = zero_variance_columns(transformed);
    IndexList keep_local;
    for (std::size_t j = 0, z = 0; j < columns.size(); ++j) {
        if (z < zero.size() && zero[z] == static_cast<Index>(j)) {
            model.dropped_constant.push_back(columns[j]);
            ++z;
        } else {
            keep_local.push_back(static_cast<Index>(j));
        }
    }
    if (keep_local.empty()) {
        throw ValidationError("ridge stage: every selected predictor is constant on the training compounds");
    }
    if (!model.dropped_constant.empty()) {
        Matrix kept(transformed.rows(), static_cast<Index>(keep_local.size()));
        for (std::size_t j = 0; j < keep_local.size(); ++j) {
            kept.col(static_cast<Index>(j)) = transformed.col(keep_local[j]);
        }
        transformed = std::move(kept);
    }
    for (Index j : keep_local) {
        const Index col = columns[static_cast<std::size_t>(j)];
        model.columns.push_back(col);
        model.predictor_ids.push_back(train.predictor_ids[static_cast<std::size_t>(col)]);
        model.predictor_classes.push_back(train.classes[static_cast<std::size_t>(col)]);
    }

    Standardized s = standardize(transformed, train.response_as_real());
    model.selection = select_k(s.values, s.response, spec.ridge_search);
    model.fit = ridge_fit(s.values, s.response, model.selection.k);
    model.fit.standardization = std::move(s.params);
    return model;
}

TrainedPipeline train_pipeline(const Dataset& train, const PipelineSpec& spec)
{
    spec.check();
    TrainedPipeline t;
    t.thinning = thin_predictors(train, spec);
    t.model = fit_ridge_stage(train, t.thinning.columns, spec);
    return t;
}

} // namespace itcr
