#ifndef ITCR_CROSSVAL_HPP
#define ITCR_CROSSVAL_HPP

#include "itcr/pipeline.hpp"

#include <optional>

namespace itcr {

// Naive: thinning once on all compounds, only the ridge stage is cross-validated.
// Proper ("two-deep"): the whole pipeline is rerun without the holdout.
// Holdout: one random training/test split through the proper pipeline.
enum class CVMode { Naive, Proper, Holdout };
std::string_view to_string(CVMode m);

struct CompoundResult {
    std::string id;
    int truth = 0;
    double score = 0.0;
    int predicted = 0;
    double k_star = 0.0;
    Index n_predictors = 0;
    Index holdout_reads = 0;      // reads of the holdout row before its prediction
};

struct CVReport {
    CVMode mode = CVMode::Proper;
    std::string model_description;
    std::string classes;          // e.g. "TS+TC+AP"
    RidgeCriterion criterion = RidgeCriterion::PRESS;
    Index n_predictors = 0;       // predictors of the pipeline trained on all compounds
    Index tp = 0, fn = 0, tn = 0, fp = 0;
    double correct_pct = 0.0;     // unrounded
    std::optional<double> sensitivity_pct;
    std::optional<double> specificity_pct;
    std::vector<CompoundResult> per_compound;

    Index compounds() const { return tp + fn + tn + fp; }
    Index total_holdout_reads() const;
};

// Confusion counts and percentages. Sensitivity/specificity are absent when
// there are no positives/negatives.
void compute_metrics(CVReport& report);
CVReport metrics_from_counts(Index tp, Index fn, Index tn, Index fp);

// A holdout row that counts every read made before it is unsealed.
class SealedRow {
public:
    explicit SealedRow(Vector values) : values_(std::move(values)) {}

    const Vector& read()
    {
        if (sealed_) {
            ++premature_reads_;
        }
        return values_;
    }
    void unseal() { sealed_ = false; }
    Index premature_reads() const { return premature_reads_; }

private:
    Vector values_;
    bool sealed_ = true;
    Index premature_reads_ = 0;
};

struct CVOptions {
    unsigned threads = 1;
    // Seed for per-fold ITC streams: fold i uses derive_seed(fold_seed, i).
    // Unset: every fold uses the spec's own k-means seed.
    std::optional<std::uint64_t> fold_seed;
};

CVReport proper_loo_cv(const Dataset& d, const PipelineSpec& spec, const CVOptions& opts = {});
CVReport naive_loo_cv(const Dataset& d, const PipelineSpec& spec, const CVOptions& opts = {});
// `fraction` of the compounds (at least one) is held out, chosen with `seed`.
CVReport holdout_cv(const Dataset& d, const PipelineSpec& spec, double fraction, std::uint64_t seed);

} // namespace itcr

#endif // ITCR_CROSSVAL_HPP
