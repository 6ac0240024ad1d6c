#include "itcr/itc.hpp"

#include "itcr/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace itcr {

std::string_view to_string(Termination t)
{
    switch (t) {
    case Termination::OccRatioReached: return "OccRatioReached";
    case Termination::MinPredictorsReached: return "MinPredictorsReached";
    case Termination::MaxIterations: return "MaxIterations";
    case Termination::GroupsCollapsed: return "GroupsCollapsed";
    }
    return "?";
}

void ITCConfig::check() const
{
    if (!(occ_threshold > 0.0 && occ_threshold <= 1.0)) {
        throw ValidationError("itc: occ_threshold must lie in (0,1]");
    }
    if (!(keep_fraction > 0.0 && keep_fraction <= 0.5)) {
        throw ValidationError("itc: keep_fraction must lie in (0,0.5]");
    }
    if (min_predictors < 1 || max_iterations < 1) {
        throw ValidationError("itc: min_predictors and max_iterations must be positive");
    }
}

IndexList ITCResult::selection(std::optional<int> iteration, Index total_predictors) const
{
    if (iterations.empty()) {
        IndexList all(static_cast<std::size_t>(total_predictors));
        std::iota(all.begin(), all.end(), Index{0});
        return all;
    }
    if (!iteration) {
        return iterations.back().selected;
    }
    if (*iteration < 1) {
        throw ValidationError("itc: iteration numbers start at 1");
    }
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(*iteration), iterations.size()) - 1;
    return iterations[idx].selected;
}

std::vector<Eigen::VectorXi> cluster_samples_per_group(const NormalizedMatrix& normalized,
                                                       const std::vector<IndexList>& groups,
                                                       const KMeansConfig& cfg)
{
    const Index m = normalized.values.rows();
    if (m < 2) {
        throw ValidationError("itc: need at least 2 samples to split");
    }
    std::vector<Eigen::VectorXi> out;
    out.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& cols = groups[g];
        if (cols.empty()) {
            throw ValidationError("itc: predictor group " + std::to_string(g) + " is empty");
        }
        Matrix points(m, static_cast<Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            points.col(static_cast<Index>(j)) = normalized.values.col(cols[j]);
        }
        KMeansConfig group_cfg = cfg;
        group_cfg.k = 2;
        group_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(g));
        Eigen::VectorXi labels = kmeans(points, group_cfg).assignment;
        if (labels(0) != 0) {
            labels = 1 - labels.array();
        }
        out.push_back(std::move(labels));
    }
    return out;
}

std::vector<SampleCell> combine_cells(const std::vector<Eigen::VectorXi>& assignments)
{
    if (assignments.empty()) {
        throw ValidationError("combine_cells: no assignments");
    }
    const std::size_t k = assignments.size();
    if (k > 20) {
        throw ValidationError("combine_cells: too many groups");
    }
    const Index m = assignments.front().size();
    for (const auto& a : assignments) {
        if (a.size() != m) {
            throw ValidationError("combine_cells: assignments have mismatched lengths");
        }
    }
    // cell index: group 0 is the most significant bit, so index order == signature order
    const std::size_t count = std::size_t{1} << k;
    std::vector<SampleCell> cells(count);
    for (std::size_t c = 0; c < count; ++c) {
        cells[c].signature.resize(k);
        for (std::size_t g = 0; g < k; ++g) {
            cells[c].signature[g] = ((c >> (k - 1 - g)) & 1U) ? '1' : '0';
        }
    }
    for (Index i = 0; i < m; ++i) {
        std::size_t c = 0;
        for (std::size_t g = 0; g < k; ++g) {
            const int label = assignments[g](i);
            if (label != 0 && label != 1) {
                throw ValidationError("combine_cells: labels must be 0 or 1");
            }
            c = (c << 1) | static_cast<std::size_t>(label);
        }
        cells[c].members.push_back(i);
    }
    return cells;
}

std::vector<HeterogeneousPair> heterogeneous_pairs(const std::vector<SampleCell>& cells)
{
    auto complement = [](std::string s) {
        for (auto& ch : s) {
            ch = ch == '0' ? '1' : '0';
        }
        return s;
    };
    std::vector<SampleCell> sorted = cells;
    std::sort(sorted.begin(), sorted.end(),
              [](const SampleCell& a, const SampleCell& b) { return a.signature < b.signature; });
    std::vector<HeterogeneousPair> pairs;
    for (const auto& cell : sorted) {
        const auto comp = complement(cell.signature);
        if (cell.signature >= comp) {
            continue;
        }
        auto it = std::lower_bound(sorted.begin(), sorted.end(), comp,
                                   [](const SampleCell& c, const std::string& s) { return c.signature < s; });
        HeterogeneousPair p;
        p.left = cell;
        if (it != sorted.end() && it->signature == comp) {
            p.right = *it;
        } else {
            p.right.signature = comp;
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

Index keep_count(double keep_fraction, Index n)
{
    const double raw = keep_fraction * static_cast<double>(n);
    auto k = static_cast<Index>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    return std::clamp<Index>(k, std::min<Index>(1, n), n);
}

double occ_ratio(const std::vector<HeterogeneousPair>& pairs, Index m)
{
    if (m < 1) {
        throw ValidationError("occ_ratio: sample count must be positive");
    }
    Index best = 0;
    for (const auto& p : pairs) {
        best = std::max(best, p.size());
    }
    return static_cast<double>(best) / static_cast<double>(m);
}

namespace {

// Per-predictor sums over the pair's two sides; everything sort_and_reduce
// and the leave-one-out classifier need, with O(n) removal of one sample.
struct PairSums {
    Vector left;    // sum over left members
    Vector right;   // sum over right members
    Vector sq;      // sum of squares over both sides
    Index n_left = 0;
    Index n_right = 0;

    PairSums(const Matrix& w, const HeterogeneousPair& pair)
        : left(Vector::Zero(w.cols())), right(Vector::Zero(w.cols())), sq(Vector::Zero(w.cols())),
          n_left(static_cast<Index>(pair.left.members.size())), n_right(static_cast<Index>(pair.right.members.size()))
    {
        for (Index i : pair.left.members) {
            left += w.row(i).transpose();
            sq += w.row(i).transpose().cwiseAbs2();
        }
        for (Index i : pair.right.members) {
            right += w.row(i).transpose();
            sq += w.row(i).transpose().cwiseAbs2();
        }
    }

    void remove(const Matrix& w, Index sample, bool on_left)
    {
        const auto row = w.row(sample).transpose();
        (on_left ? left : right) -= row;
        (on_left ? n_left : n_right) -= 1;
        sq -= row.cwiseAbs2();
    }
};

bool on_left_side(const HeterogeneousPair& pair, Index sample)
{
    return std::binary_search(pair.left.members.begin(), pair.left.members.end(), sample);
}

IndexList top_by_cosine(const Vector& cosines, Index keep)
{
    IndexList order(static_cast<std::size_t>(cosines.size()));
    std::iota(order.begin(), order.end(), Index{0});
    auto better = [&](Index a, Index b) {
        if (cosines(a) != cosines(b)) {
            return cosines(a) > cosines(b);
        }
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), better);
    order.resize(static_cast<std::size_t>(keep));
    return order;
}

IndexList reduce_from_sums(const PairSums& s, double keep_fraction)
{
    const Index n = s.left.size();
    const Index keep = keep_count(keep_fraction, n);
    Vector cos_right_pattern(n);   // zeros on left, ones on right
    Vector cos_left_pattern(n);    // ones on left, zeros on right
    const double sqrt_left = std::sqrt(static_cast<double>(s.n_left));
    const double sqrt_right = std::sqrt(static_cast<double>(s.n_right));
    for (Index j = 0; j < n; ++j) {
        // the running sum of squares can drift slightly negative after removals
        const double norm = std::sqrt(std::max(0.0, s.sq(j)));
        if (norm > 0.0) {
            cos_right_pattern(j) = s.right(j) / (norm * sqrt_right);
            cos_left_pattern(j) = s.left(j) / (norm * sqrt_left);
        } else {
            cos_right_pattern(j) = 0.0;
            cos_left_pattern(j) = 0.0;
        }
    }
    IndexList a = top_by_cosine(cos_right_pattern, keep);
    IndexList b = top_by_cosine(cos_left_pattern, keep);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    IndexList out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

IndexList sort_and_reduce(const NormalizedMatrix& normalized, const HeterogeneousPair& pair, double keep_fraction,
                          std::optional<Index> exclude)
{
    const Matrix& w = normalized.values;
    if (w.cols() == 0) {
        throw ValidationError("sort_and_reduce: no predictors");
    }
    PairSums sums(w, pair);
    if (exclude) {
        const bool left = on_left_side(pair, *exclude);
        if (!left && !std::binary_search(pair.right.members.begin(), pair.right.members.end(), *exclude)) {
            throw ValidationError("sort_and_reduce: excluded sample is not in the pair");
        }
        sums.remove(w, *exclude, left);
    }
    if (sums.n_left < 1 || sums.n_right < 1) {
        throw ValidationError("sort_and_reduce: pair " + pair.left.signature + "/" + pair.right.signature +
                              " has an empty side");
    }
    return reduce_from_sums(sums, keep_fraction);
}

PairScore pair_loo_error(const NormalizedMatrix& normalized, const HeterogeneousPair& pair, double keep_fraction)
{
    PairScore score;
    score.left_signature = pair.left.signature;
    score.right_signature = pair.right.signature;
    score.left_size = static_cast<Index>(pair.left.members.size());
    score.right_size = static_cast<Index>(pair.right.members.size());
    if (score.left_size < 2 || score.right_size < 2) {
        score.degenerate = true;
        score.error_rate = 1.0;
        score.errors = score.left_size + score.right_size;
        return score;
    }

    const Matrix& w = normalized.values;
    const PairSums full(w, pair);
    auto holdout = [&](Index u, bool actually_left) {
        PairSums s = full;
        s.remove(w, u, actually_left);
        const IndexList reduced = reduce_from_sums(s, keep_fraction);
        double d_left = 0.0;
        double d_right = 0.0;
        for (Index j : reduced) {
            const double x = w(u, j);
            const double cl = s.left(j) / static_cast<double>(s.n_left);
            const double cr = s.right(j) / static_cast<double>(s.n_right);
            d_left += (x - cl) * (x - cl);
            d_right += (x - cr) * (x - cr);
        }
        // nearest centroid; a tie goes to the left side (centroid index 0)
        const bool predicted_left = !(d_right < d_left);
        return predicted_left != actually_left;
    };

    for (Index u : pair.left.members) {
        score.errors += holdout(u, true) ? 1 : 0;
    }
    for (Index u : pair.right.members) {
        score.errors += holdout(u, false) ? 1 : 0;
    }
    score.error_rate = static_cast<double>(score.errors) / static_cast<double>(pair.size());
    return score;
}

ITCResult run_itc(const Dataset& d, const ITCConfig& cfg)
{
    cfg.check();
    const Index m = d.compounds();
    if (m < 4) {
        throw ValidationError("itc: need at least 4 compounds, got " + std::to_string(m));
    }
    if (d.predictors() < 1) {
        throw ValidationError("itc: no predictors left to cluster");
    }

    const NormalizedMatrix full = normalize_predictors(d);
    ITCResult result;
    result.warnings = full.warnings;

    IndexList current(static_cast<std::size_t>(d.predictors()));
    std::iota(current.begin(), current.end(), Index{0});

    for (int iter = 1;; ++iter) {
        ITCIteration rec;
        rec.iteration = iter;
        rec.predictors_in = static_cast<Index>(current.size());

        // working matrix over the current predictors; groups hold positions within it
        NormalizedMatrix work;
        work.values.resize(m, static_cast<Index>(current.size()));
        std::vector<IndexList> groups;
        for (auto cls : kAllClasses) {
            IndexList g;
            for (std::size_t j = 0; j < current.size(); ++j) {
                if (d.classes[static_cast<std::size_t>(current[j])] == cls) {
                    g.push_back(static_cast<Index>(j));
                }
            }
            if (!g.empty()) {
                rec.group_classes.push_back(cls);
                rec.group_sizes.push_back(static_cast<Index>(g.size()));
                groups.push_back(std::move(g));
            }
        }
        for (std::size_t j = 0; j < current.size(); ++j) {
            work.values.col(static_cast<Index>(j)) = full.values.col(current[j]);
        }

        KMeansConfig kcfg = cfg.kmeans;
        kcfg.seed = derive_seed(cfg.kmeans.seed, static_cast<std::uint64_t>(iter));
        const auto assignments = cluster_samples_per_group(work, groups, kcfg);
        const auto cells = combine_cells(assignments);
        for (const auto& c : cells) {
            rec.cell_sizes.emplace_back(c.signature, static_cast<Index>(c.members.size()));
        }
        const auto pairs = heterogeneous_pairs(cells);
        rec.occ_ratio = occ_ratio(pairs, m);

        for (const auto& p : pairs) {
            rec.pairs.push_back(pair_loo_error(work, p, cfg.keep_fraction));
            if (rec.pairs.back().degenerate) {
                result.warnings.push_back("iteration " + std::to_string(iter) + ": pair " + p.left.signature + "/" +
                                          p.right.signature + " has a side with fewer than 2 samples; error set to 1");
            }
        }

        // lowest error, then larger coverage, then smaller left signature (pairs are already in that order)
        Index winner = -1;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (pairs[i].left.members.empty() || pairs[i].right.members.empty()) {
                continue;
            }
            if (winner < 0) {
                winner = static_cast<Index>(i);
                continue;
            }
            const auto& a = rec.pairs[i];
            const auto& b = rec.pairs[static_cast<std::size_t>(winner)];
            if (a.error_rate < b.error_rate || (a.error_rate == b.error_rate && pairs[i].size() > pairs[static_cast<std::size_t>(winner)].size())) {
                winner = static_cast<Index>(i);
            }
        }
        if (winner < 0) {
            result.warnings.push_back("iteration " + std::to_string(iter) +
                                      ": every heterogeneous pair has an empty side; stopping");
            result.termination = Termination::GroupsCollapsed;
            break;
        }
        rec.winner = winner;

        const IndexList reduced = sort_and_reduce(work, pairs[static_cast<std::size_t>(winner)], cfg.keep_fraction);
        if (!result.iterations.empty() && reduced.size() >= current.size()) {
            result.warnings.push_back("iteration " + std::to_string(iter) + ": reduction did not shrink the pool; stopping");
            result.termination = Termination::MinPredictorsReached;
            break;
        }
        rec.selected.reserve(reduced.size());
        for (Index j : reduced) {
            rec.selected.push_back(current[static_cast<std::size_t>(j)]);
        }
        for (auto cls : kAllClasses) {
            const auto count = std::count_if(rec.selected.begin(), rec.selected.end(), [&](Index j) {
                return d.classes[static_cast<std::size_t>(j)] == cls;
            });
            if (count > 0) {
                rec.selected_per_class.emplace_back(cls, static_cast<Index>(count));
            }
        }
        current = rec.selected;
        const bool single_group = rec.group_classes.size() == 1;
        const double occ = rec.occ_ratio;
        result.iterations.push_back(std::move(rec));

        if (single_group) {
            result.termination = Termination::GroupsCollapsed;
            break;
        }
        if (occ >= cfg.occ_threshold) {
            result.termination = Termination::OccRatioReached;
            break;
        }
        if (static_cast<Index>(current.size()) <= cfg.min_predictors) {
            result.termination = Termination::MinPredictorsReached;
            break;
        }
        if (iter >= cfg.max_iterations) {
            result.termination = Termination::MaxIterations;
            break;
        }
    }
    return result;
}

} // namespace itcr
