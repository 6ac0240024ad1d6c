#include "itcr/crossval.hpp"

#include "itcr/parallel.hpp"
#include "itcr/random.hpp"

#include <algorithm>
#include <cmath>

namespace itcr {

std::string_view to_string(CVMode m)
{
    switch (m) {
    case CVMode::Naive: return "naive";
    case CVMode::Proper: return "proper";
    case CVMode::Holdout: return "holdout";
    }
    return "?";
}

Index CVReport::total_holdout_reads() const
{
    Index total = 0;
    for (const auto& r : per_compound) {
        total += r.holdout_reads;
    }
    return total;
}

void compute_metrics(CVReport& report)
{
    report.tp = report.fn = report.tn = report.fp = 0;
    for (const auto& r : report.per_compound) {
        if (r.truth != 0 && r.truth != 1) {
            throw ValidationError("metrics: true class of '" + r.id + "' is not 0 or 1");
        }
        if (r.truth == 1) {
            ++(r.predicted == 1 ? report.tp : report.fn);
        } else {
            ++(r.predicted == 0 ? report.tn : report.fp);
        }
    }
    const auto pct = [](Index num, Index den) { return 100.0 * static_cast<double>(num) / static_cast<double>(den); };
    const Index m = report.compounds();
    report.correct_pct = m > 0 ? pct(report.tp + report.tn, m) : 0.0;
    report.sensitivity_pct = report.tp + report.fn > 0 ? std::optional(pct(report.tp, report.tp + report.fn)) : std::nullopt;
    report.specificity_pct = report.tn + report.fp > 0 ? std::optional(pct(report.tn, report.tn + report.fp)) : std::nullopt;
}

CVReport metrics_from_counts(Index tp, Index fn, Index tn, Index fp)
{
    if (tp < 0 || fn < 0 || tn < 0 || fp < 0) {
        throw ValidationError("metrics: counts must be non-negative");
    }
    CVReport r;
    auto add = [&](Index count, int truth, int predicted) {
        for (Index i = 0; i < count; ++i) {
            r.per_compound.push_back({"c" + std::to_string(r.per_compound.size()), truth, 0.0, predicted});
        }
    };
    add(tp, 1, 1);
    add(fn, 1, 0);
    add(tn, 0, 0);
    add(fp, 0, 1);
    compute_metrics(r);
    return r;
}

namespace {

void check_cv_input(const Dataset& d, const PipelineSpec& spec)
{
    spec.check();
    if (d.compounds() < 5) {
        throw ValidationError("cross-validation needs at least 5 compounds, got " + std::to_string(d.compounds()));
    }
    const auto report = validate(d);
    if (!report.is_valid()) {
        throw ValidationError(report.errors.front().location + ": " + report.errors.front().message);
    }
}

template <typename Fn>
auto with_fold_context(Index fold, const std::string& id, Fn&& fn)
{
    const std::string prefix = "fold " + std::to_string(fold) + " (" + id + "): ";
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(prefix + e.what());
    } catch (const NumericError& e) {
        throw NumericError(prefix + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(prefix + e.what());
    }
}

CVReport make_report(CVMode mode, const Dataset& d, const PipelineSpec& spec, std::vector<CompoundResult> results)
{
    CVReport r;
    r.mode = mode;
    r.model_description = spec.model_description();
    // label with the requested classes that actually occur in the data
    std::vector<PredictorClass> used;
    for (PredictorClass c : spec.classes) {
        if (std::find(d.classes.begin(), d.classes.end(), c) != d.classes.end()) {
            used.push_back(c);
        }
    }
    r.classes = join_classes(used);
    r.criterion = spec.ridge_search.criterion;
    r.per_compound = std::move(results);
    compute_metrics(r);
    return r;
}

} // namespace

CVReport proper_loo_cv(const Dataset& d, const PipelineSpec& spec, const CVOptions& opts)
{
    check_cv_input(d, spec);
    const Index m = d.compounds();
    std::vector<CompoundResult> results(static_cast<std::size_t>(m));

    parallel_for(static_cast<std::size_t>(m), opts.threads, [&](std::size_t fold) {
        const auto i = static_cast<Index>(fold);
        const auto& id = d.compound_ids[fold];
        results[fold] = with_fold_context(i, id, [&] {
            SealedRow holdout(d.values.row(i).transpose());
            const Dataset train = d.without_row(i);
            if (std::find(train.compound_ids.begin(), train.compound_ids.end(), id) != train.compound_ids.end()) {
                throw std::logic_error("holdout compound present in its training fold");
            }
            PipelineSpec fold_spec = spec;
            if (opts.fold_seed) {
                fold_spec.itc.kmeans.seed = derive_seed(*opts.fold_seed, static_cast<std::uint64_t>(i));
            }
            const TrainedPipeline trained = train_pipeline(train, fold_spec);

            const Index premature = holdout.premature_reads();
            holdout.unseal();
            const auto p = trained.model.predict(holdout.read());
            return CompoundResult{id, d.response(i), p.score, p.predicted, trained.model.selection.k,
                                  static_cast<Index>(trained.model.columns.size()), premature};
        });
    });

    CVReport report = make_report(CVMode::Proper, d, spec, std::move(results));
    report.n_predictors = static_cast<Index>(train_pipeline(d, spec).model.columns.size());
    return report;
}

CVReport naive_loo_cv(const Dataset& d, const PipelineSpec& spec, const CVOptions& opts)
{
    check_cv_input(d, spec);
    const Index m = d.compounds();
    // thinning sees every compound, including each future holdout
    const ThinningResult thinning = thin_predictors(d, spec);
    std::vector<CompoundResult> results(static_cast<std::size_t>(m));

    parallel_for(static_cast<std::size_t>(m), opts.threads, [&](std::size_t fold) {
        const auto i = static_cast<Index>(fold);
        const auto& id = d.compound_ids[fold];
        results[fold] = with_fold_context(i, id, [&] {
            SealedRow holdout(d.values.row(i).transpose());
            const Dataset train = d.without_row(i);
            const FittedModel model = fit_ridge_stage(train, thinning.columns, spec);
            const Index premature = holdout.premature_reads();
            holdout.unseal();
            const auto p = model.predict(holdout.read());
            return CompoundResult{id, d.response(i), p.score, p.predicted, model.selection.k,
                                  static_cast<Index>(model.columns.size()), premature};
        });
    });

    CVReport report = make_report(CVMode::Naive, d, spec, std::move(results));
    report.n_predictors = static_cast<Index>(fit_ridge_stage(d, thinning.columns, spec).columns.size());
    return report;
}

CVReport holdout_cv(const Dataset& d, const PipelineSpec& spec, double fraction, std::uint64_t seed)
{
    check_cv_input(d, spec);
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ValidationError("holdout fraction must lie in (0,1)");
    }
    const Index m = d.compounds();
    const Index n_test = std::clamp<Index>(static_cast<Index>(std::llround(fraction * static_cast<double>(m))), 1, m - 3);
    IndexList order(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    Rng rng(seed);
    rng.shuffle(order.begin(), order.end());
    IndexList test(order.begin(), order.begin() + n_test);
    IndexList train_rows(order.begin() + n_test, order.end());
    std::sort(test.begin(), test.end());
    std::sort(train_rows.begin(), train_rows.end());

    const Dataset train = d.select_rows(train_rows);
    const TrainedPipeline trained = train_pipeline(train, spec);
    std::vector<CompoundResult> results;
    for (Index i : test) {
        SealedRow holdout(d.values.row(i).transpose());
        const Index premature = holdout.premature_reads();
        holdout.unseal();
        const auto p = trained.model.predict(holdout.read());
        results.push_back({d.compound_ids[static_cast<std::size_t>(i)], d.response(i), p.score, p.predicted,
                           trained.model.selection.k, static_cast<Index>(trained.model.columns.size()), premature});
    }
    CVReport report = make_report(CVMode::Holdout, d, spec, std::move(results));
    report.n_predictors = static_cast<Index>(trained.model.columns.size());
    return report;
}

} // namespace itcr
