#ifndef ITCR_ITC_HPP
#define ITCR_ITC_HPP

#include "itcr/dataset.hpp"
#include "itcr/kmeans.hpp"
#include "itcr/preprocess.hpp"

#include <optional>

namespace itcr {

// Interrelated two-way clustering: predictors are pre-grouped by descriptor
// class; samples are split in two per group, the per-group splits are
// intersected into 2^k cells, complementary cells form heterogeneous pairs,
// and each iteration keeps the predictors that best separate the pair with
// the lowest leave-one-out error.

struct ITCConfig {
    double occ_threshold = 0.9;
    Index min_predictors = 100;
    double keep_fraction = 1.0 / 3.0;
    int max_iterations = 20;
    KMeansConfig kmeans{};

    void check() const;
};

// Samples sharing one cluster label per predictor group. signature[i] is the
// label ('0'/'1') under group i.
struct SampleCell {
    std::string signature;
    IndexList members;   // ascending sample indices
};

struct HeterogeneousPair {
    SampleCell left;    // lexicographically smaller signature
    SampleCell right;   // bitwise complement of left

    Index size() const { return static_cast<Index>(left.members.size() + right.members.size()); }
};

enum class Termination { OccRatioReached, MinPredictorsReached, MaxIterations, GroupsCollapsed };
std::string_view to_string(Termination t);

struct PairScore {
    std::string left_signature;
    std::string right_signature;
    Index left_size = 0;
    Index right_size = 0;
    double error_rate = 1.0;
    Index errors = 0;
    bool degenerate = false;   // a side had fewer than 2 members; error rate forced to 1
};

struct ITCIteration {
    int iteration = 0;   // 1-based
    std::vector<PredictorClass> group_classes;
    std::vector<Index> group_sizes;   // predictors per group at iteration start
    Index predictors_in = 0;
    std::vector<std::pair<std::string, Index>> cell_sizes;
    double occ_ratio = 0.0;
    std::vector<PairScore> pairs;
    Index winner = -1;           // index into pairs
    IndexList selected;          // positions in the input Dataset, ascending
    std::vector<std::pair<PredictorClass, Index>> selected_per_class;
};

struct ITCResult {
    std::vector<ITCIteration> iterations;
    Termination termination = Termination::MaxIterations;
    std::vector<std::string> warnings;

    // Selected set after `iteration` (1-based); nullopt means the last one.
    // With no completed iteration every input predictor is returned.
    IndexList selection(std::optional<int> iteration, Index total_predictors) const;
};

// One 0/1 sample split per predictor group, computed by 2-means on the
// group's columns. Labels are canonical: sample 0 always gets label 0.
std::vector<Eigen::VectorXi> cluster_samples_per_group(const NormalizedMatrix& normalized,
                                                       const std::vector<IndexList>& groups,
                                                       const KMeansConfig& cfg);

// All 2^k cells in ascending signature order, empty ones included.
std::vector<SampleCell> combine_cells(const std::vector<Eigen::VectorXi>& assignments);

// The 2^(k-1) complement pairs, left signature < right, sorted by left signature.
std::vector<HeterogeneousPair> heterogeneous_pairs(const std::vector<SampleCell>& cells);

// ceil(keep_fraction * n) with a small slack so that 1/3 * 300 gives 100.
Index keep_count(double keep_fraction, Index n);

// Predictors (column positions, ascending) ranked in the top keep_count by
// signed cosine against either the 0..01..1 or the 1..10..0 pattern over
// left-then-right samples. `exclude` removes one sample from the pair first.
IndexList sort_and_reduce(const NormalizedMatrix& normalized, const HeterogeneousPair& pair, double keep_fraction,
                          std::optional<Index> exclude = std::nullopt);

// Leave-one-out misclassification rate of the pair: every held-out sample is
// classified by nearest centroid in the subspace reduced without it.
PairScore pair_loo_error(const NormalizedMatrix& normalized, const HeterogeneousPair& pair, double keep_fraction);

// Largest fraction of samples covered by a pair.
double occ_ratio(const std::vector<HeterogeneousPair>& pairs, Index m);

ITCResult run_itc(const Dataset& d, const ITCConfig& cfg);

} // namespace itcr

#endif // ITCR_ITC_HPP
