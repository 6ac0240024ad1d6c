#include "itcr/synth.hpp"

#include "itcr/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace itcr {

void SynthConfig::check() const
{
    if (m < 4 || n < 1) {
        throw ValidationError("synth: need m >= 4 and n >= 1");
    }
    if (n_informative < 0 || n_informative > n) {
        throw ValidationError("synth: n_informative must lie in [0, n]");
    }
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw ValidationError("synth: delta must be finite and >= 0");
    }
    if (!(class_balance > 0.0 && class_balance < 1.0)) {
        throw ValidationError("synth: class_balance must lie in (0,1)");
    }
    if (!(base_offset > 0.0) || !std::isfinite(base_offset)) {
        throw ValidationError("synth: base_offset must be positive");
    }
    double total = 0.0;
    for (const auto& [cls, w] : class_proportions) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ValidationError("synth: class proportions must be non-negative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw ValidationError("synth: class proportions sum to zero");
    }
}

namespace {

// Largest-remainder apportionment of n predictors to classes.
std::vector<PredictorClass> apportion(const std::vector<std::pair<PredictorClass, double>>& props, Index n)
{
    double total = 0.0;
    for (const auto& p : props) {
        total += p.second;
    }
    std::vector<Index> counts(props.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    Index assigned = 0;
    for (std::size_t c = 0; c < props.size(); ++c) {
        const double exact = props[c].second / total * static_cast<double>(n);
        counts[c] = static_cast<Index>(std::floor(exact));
        assigned += counts[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n; ++r, ++assigned) {
        ++counts[remainders[r % remainders.size()].second];
    }
    std::vector<PredictorClass> out;
    for (std::size_t c = 0; c < props.size(); ++c) {
        out.insert(out.end(), static_cast<std::size_t>(counts[c]), props[c].first);
    }
    return out;
}

std::string numbered(const char* prefix, Index i, Index total)
{
    const int width = static_cast<int>(std::to_string(std::max<Index>(total, 1)).size());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%0*lld", prefix, width, static_cast<long long>(i + 1));
    return buf;
}

} // namespace

SyntheticData generate_synthetic(const SynthConfig& cfg)
{
    cfg.check();
    Rng rng(cfg.seed);
    SyntheticData out;
    Dataset& d = out.dataset;

    const Index positives = std::clamp<Index>(
        static_cast<Index>(std::llround(cfg.class_balance * static_cast<double>(cfg.m))), 1, cfg.m - 1);
    std::vector<int> response(static_cast<std::size_t>(cfg.m), 0);
    std::fill(response.begin(), response.begin() + positives, 1);
    rng.shuffle(response.begin(), response.end());
    d.response = Eigen::Map<Eigen::VectorXi>(response.data(), cfg.m);

    IndexList order(static_cast<std::size_t>(cfg.n));
    std::iota(order.begin(), order.end(), Index{0});
    rng.shuffle(order.begin(), order.end());
    out.informative.assign(order.begin(), order.begin() + cfg.n_informative);
    std::sort(out.informative.begin(), out.informative.end());

    d.classes = apportion(cfg.class_proportions, cfg.n);
    rng.shuffle(d.classes.begin(), d.classes.end());

    for (Index i = 0; i < cfg.m; ++i) {
        d.compound_ids.push_back(numbered("c", i, cfg.m));
    }
    for (Index j = 0; j < cfg.n; ++j) {
        d.predictor_ids.push_back(numbered("p", j, cfg.n));
    }

    std::vector<bool> is_informative(static_cast<std::size_t>(cfg.n), false);
    for (Index j : out.informative) {
        is_informative[static_cast<std::size_t>(j)] = true;
    }
    d.values.resize(cfg.m, cfg.n);
    for (Index j = 0; j < cfg.n; ++j) {
        const bool signal = is_informative[static_cast<std::size_t>(j)];
        for (Index i = 0; i < cfg.m; ++i) {
            double mean = cfg.base_offset;
            if (signal) {
                mean += (d.response(i) == 1 ? 0.5 : -0.5) * cfg.delta;
            }
            d.values(i, j) = mean + rng.normal();
        }
    }
    return out;
}

double recall(const IndexList& selected, const IndexList& truth)
{
    if (truth.empty()) {
        return 1.0;
    }
    IndexList s = selected;
    std::sort(s.begin(), s.end());
    const auto hits = std::count_if(truth.begin(), truth.end(),
                                    [&](Index j) { return std::binary_search(s.begin(), s.end(), j); });
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

} // namespace itcr
