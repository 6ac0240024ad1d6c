// Acceptance suite: one PASS/FAIL line per criterion, exit status = number of failures.

#include "itcr/crossval.hpp"
#include "itcr/parallel.hpp"
#include "itcr/report.hpp"
#include "itcr/synth.hpp"
#include "itcr/text.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace itcr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool pass, const std::string& title, const std::string& detail)
{
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << title << "  [" << detail << "]"
              << std::endl;
    failures += pass ? 0 : 1;
}

std::string fmt(double v, int digits = 3)
{
    return text::format_fixed(v, digits);
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

struct Instance {
    Matrix X;
    Vector y;
};

Instance standardized_instance(std::uint64_t seed, Index m, Index n)
{
    Rng rng(seed);
    const Matrix X = oracle::random_matrix(rng, m, n);
    const Vector y = X * oracle::random_vector(rng, n) + oracle::random_vector(rng, m);
    const auto s = standardize(X, y);
    return {s.values, s.response};
}

void ridge_oracle_equivalence()
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    double worst_ols = 0.0;
    int instances = 0;
    for (std::uint64_t s = 0; s < 25; ++s) {
        for (auto [m, n] : {std::pair<Index, Index>{40, 60}, {60, 20}}) {
            const auto inst = standardized_instance(derive_seed(1001, s * 2 + (m == 40 ? 0 : 1)), m, n);
            ++instances;
            for (double k : {1e-2, 1.0, 100.0}) {
                const Vector b = ridge_fit(inst.X, inst.y, k).coefficients;
                const Vector ref = oracle::to_vector(oracle::ridge_coefficients(inst.X, inst.y, k));
                worst = std::max(worst, (b - ref).norm() / ref.norm());
            }
            if (m > n) {
                const Vector b = ridge_fit(inst.X, inst.y, 0.0).coefficients;
                const Vector ols = inst.X.colPivHouseholderQr().solve(inst.y);
                const Vector ref = oracle::to_vector(oracle::ridge_coefficients(inst.X, inst.y, 0.0L));
                worst_ols = std::max({worst_ols, (b - ref).norm() / ref.norm(), (b - ols).norm() / ols.norm()});
            }
        }
    }
    const double secs = seconds_since(t0);
    verdict(1, instances == 50 && worst <= 1e-8 && worst_ols <= 1e-8 && secs < 5.0,
            "ridge_fit matches the direct-solve oracle; k=0 equals OLS",
            std::to_string(instances) + " instances, max rel err " + sci(worst) + ", k=0 vs OLS " + sci(worst_ols) +
                ", " + fmt(secs, 2) + " s");
}

void press_exactness()
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    const auto inst = standardized_instance(2002, 30, 10);
    for (double k : {0.1, 1.0, 10.0}) {
        const double shortcut = press(inst.X, inst.y, k);
        const double literal = static_cast<double>(oracle::literal_loo_sse(inst.X, inst.y, k));
        worst = std::max(worst, oracle::rel_diff(shortcut, literal));
    }
    const double secs = seconds_since(t0);
    verdict(2, worst <= 1e-8 && secs < 1.0, "PRESS shortcut equals 30 literal refits",
            "max rel err " + sci(worst) + ", " + fmt(secs, 3) + " s");
}

void shrinkage()
{
    const auto grid = log_grid();
    int monotone = 0;
    double worst_ratio = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto inst = standardized_instance(derive_seed(3003, s), 40, 15);
        double prev = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (double k : grid) {
            const double norm = ridge_fit(inst.X, inst.y, k).coefficients.norm();
            ok = ok && norm < prev;
            prev = norm;
        }
        monotone += ok ? 1 : 0;
        const double ratio =
            ridge_fit(inst.X, inst.y, 1e6).coefficients.norm() / ridge_fit(inst.X, inst.y, 1e-6).coefficients.norm();
        worst_ratio = std::max(worst_ratio, ratio);
    }
    verdict(3, monotone == 20 && worst_ratio < 1e-3, "coefficient norm strictly decreasing in k, b(1e6) ~ 0",
            std::to_string(monotone) + "/20 monotone over 181 grid points, max |b(1e6)|/|b(1e-6)| = " + sci(worst_ratio));
}

void kmeans_optimality()
{
    int optimal = 0;
    long steps = 0;
    long non_increasing = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        Rng rng(derive_seed(4004, t));
        const Index m = 3 + static_cast<Index>(rng.below(6));   // 3..8 points
        const Matrix p = oracle::random_matrix(rng, m, 2);
        KMeansConfig cfg;
        cfg.seed = derive_seed(4005, t);
        cfg.restarts = 10;
        const Clustering best = kmeans(p, cfg);
        if (std::fabs(best.objective - oracle::best_bipartition(p)) <= 1e-9 * std::max(1.0, best.objective)) {
            ++optimal;
        }
        for (const Clustering& c : kmeans_all_restarts(p, cfg)) {
            for (std::size_t i = 1; i < c.objective_trace.size(); ++i) {
                ++steps;
                non_increasing += c.objective_trace[i] <= c.objective_trace[i - 1] ? 1 : 0;
            }
        }
    }
    verdict(4, optimal >= 95 && non_increasing == steps, "k-means matches the exhaustive bipartition optimum",
            std::to_string(optimal) + "/100 optimal, " + std::to_string(non_increasing) + "/" + std::to_string(steps) +
                " Lloyd steps non-increasing");
}

void itc_invariants()
{
    int cases = 0;
    int bad = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        Rng rng(derive_seed(5005, t));
        const int k = 1 + static_cast<int>(rng.below(3));
        const Index m = 4 + static_cast<Index>(rng.below(30));
        std::vector<Eigen::VectorXi> assignments;
        for (int g = 0; g < k; ++g) {
            Eigen::VectorXi a(m);
            for (Index i = 0; i < m; ++i) {
                a(i) = static_cast<int>(rng.below(2));
            }
            assignments.push_back(a);
        }
        ++cases;
        const auto cells = combine_cells(assignments);
        const auto pairs = heterogeneous_pairs(cells);
        bool ok = pairs.size() == (std::size_t{1} << (k - 1));
        for (const auto& p : pairs) {
            bool complement = p.left.signature.size() == static_cast<std::size_t>(k) &&
                              p.right.signature.size() == static_cast<std::size_t>(k);
            for (std::size_t c = 0; complement && c < p.left.signature.size(); ++c) {
                complement = p.left.signature[c] != p.right.signature[c];
            }
            ok = ok && complement;
        }
        const double occ = occ_ratio(pairs, m);
        ok = ok && occ > 0.0 && occ <= 1.0;

        // reduction bound on a random non-degenerate pair
        const auto it = std::find_if(pairs.begin(), pairs.end(),
                                     [](const auto& p) { return !p.left.members.empty() && !p.right.members.empty(); });
        if (it != pairs.end()) {
            const Index n = 3 + static_cast<Index>(rng.below(120));
            NormalizedMatrix w;
            w.values = oracle::random_matrix(rng, m, n);
            const auto kept = sort_and_reduce(w, *it, 1.0 / 3.0);
            const auto third = static_cast<std::size_t>((n + 2) / 3);
            ok = ok && kept.size() >= third && kept.size() <= 2 * third;
        }
        bad += ok ? 0 : 1;
    }
    verdict(5, cases == 1000 && bad == 0, "ITC pair count, complements, occ_ratio range, reduction bound",
            std::to_string(cases) + " cases, " + std::to_string(bad) + " failures");
}

void metric_fixture()
{
    const CVReport r = metrics_from_counts(216, 40, 182, 70);
    const double sens = text::round_half_up_2(*r.sensitivity_pct);
    const double spec = text::round_half_up_2(*r.specificity_pct);
    const double correct = text::round_half_up_2(r.correct_pct);
    verdict(6, sens == 84.38 && spec == 72.22 && correct == 78.35, "metrics on 216/40/182/70",
            "sensitivity " + fmt(sens, 2) + ", specificity " + fmt(spec, 2) + ", correct " + fmt(correct, 2));
}

struct SeedRun {
    std::string trace;
    std::string report;
    double recall = 0.0;
    int iterations = 0;
    double correct = 0.0;
    Index holdout_reads = 0;
    bool plain_identical = false;
};

PipelineSpec itc_spec(std::uint64_t seed)
{
    PipelineSpec spec;
    spec.thinning = Thinning::ITC;
    spec.itc.kmeans.seed = derive_seed(seed, "kmeans");
    return spec;
}

SeedRun planted_run(std::uint64_t seed, bool with_plain)
{
    SynthConfig cfg;
    cfg.seed = seed;
    const SyntheticData data = generate_synthetic(cfg);
    const PipelineSpec spec = itc_spec(seed);
    SeedRun out;

    const ITCResult itc = run_itc(data.dataset, spec.itc);
    std::ostringstream trace;
    write_itc_trace(trace, itc, data.dataset);
    out.trace = trace.str();
    out.iterations = static_cast<int>(itc.iterations.size());
    out.recall = recall(itc.selection(std::nullopt, data.dataset.predictors()), data.informative);

    CVOptions opts;
    opts.threads = default_threads();
    opts.fold_seed = derive_seed(seed, "folds");
    const CVReport r = proper_loo_cv(data.dataset, spec, opts);
    std::ostringstream report;
    write_cv_report(report, r);
    out.report = report.str();
    out.correct = r.correct_pct;
    out.holdout_reads = r.total_holdout_reads();

    if (with_plain) {
        PipelineSpec plain;
        const CVReport p = proper_loo_cv(data.dataset, plain, opts);
        const CVReport n = naive_loo_cv(data.dataset, plain, opts);
        bool same = p.per_compound.size() == n.per_compound.size();
        for (std::size_t i = 0; same && i < p.per_compound.size(); ++i) {
            same = p.per_compound[i].id == n.per_compound[i].id && p.per_compound[i].score == n.per_compound[i].score &&
                   p.per_compound[i].predicted == n.per_compound[i].predicted &&
                   p.per_compound[i].k_star == n.per_compound[i].k_star;
        }
        out.plain_identical = same;
        out.holdout_reads += p.total_holdout_reads() + n.total_holdout_reads();
    }
    return out;
}

void planted_signal_and_isolation_and_determinism()
{
    // Calibration baseline: nearest centroid on the true informative set.
    double baseline = 1.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthConfig cfg;
        cfg.seed = seed;
        const auto data = generate_synthetic(cfg);
        baseline = std::min(baseline, oracle::nearest_centroid_loo_accuracy(data.dataset.values, data.dataset.response,
                                                                            data.informative));
    }
    std::cout << "calibration: nearest-centroid LOO on the true informative set, worst seed " << fmt(100 * baseline, 2)
              << "%" << std::endl;

    const auto t0 = Clock::now();
    std::vector<SeedRun> first;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        first.push_back(planted_run(seed, true));
    }
    const double secs = seconds_since(t0);

    std::vector<double> recalls;
    int max_iter = 0;
    double worst_correct = 100.0;
    Index reads = 0;
    int identical = 0;
    for (const auto& r : first) {
        recalls.push_back(r.recall);
        max_iter = std::max(max_iter, r.iterations);
        worst_correct = std::min(worst_correct, r.correct);
        reads += r.holdout_reads;
        identical += r.plain_identical ? 1 : 0;
    }
    std::sort(recalls.begin(), recalls.end());
    const double median = 0.5 * (recalls[4] + recalls[5]);
    verdict(7, max_iter <= 5 && median >= 0.8 && worst_correct >= 85.0 && secs < 600.0,
            "planted signal recovered by ITC, two-deep CV accuracy",
            "max iterations " + std::to_string(max_iter) + ", median recall " + fmt(median, 3) + ", worst correct " +
                fmt(worst_correct, 2) + "%, " + fmt(secs, 1) + " s");

    verdict(8, reads == 0 && identical == 10, "holdout never read before prediction; naive == proper without thinning",
            std::to_string(reads) + " early holdout reads, " + std::to_string(identical) + "/10 seeds fold-identical");

    int same = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SeedRun again = planted_run(seed, false);
        same += again.trace == first[seed].trace && again.report == first[seed].report ? 1 : 0;
    }
    verdict(10, same == 10, "repeated runs are byte-identical",
            std::to_string(same) + "/10 seeds with identical trace and report");
}

void naive_optimism()
{
    int naive_ahead = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthConfig cfg;
        cfg.delta = 0.0;
        cfg.seed = derive_seed(seed, "noise");
        const auto data = generate_synthetic(cfg);
        const PipelineSpec spec = itc_spec(seed);
        CVOptions opts;
        opts.threads = default_threads();
        opts.fold_seed = derive_seed(seed, "folds");
        const CVReport naive = naive_loo_cv(data.dataset, spec, opts);
        const CVReport proper = proper_loo_cv(data.dataset, spec, opts);
        naive_ahead += naive.correct_pct >= proper.correct_pct ? 1 : 0;
        detail += (seed ? " " : "") + fmt(naive.correct_pct, 1) + "/" + fmt(proper.correct_pct, 1);
    }
    verdict(9, naive_ahead >= 8, "naive CV at least as optimistic as two-deep CV on pure noise",
            std::to_string(naive_ahead) + "/10 seeds; naive/proper %: " + detail);
}

} // namespace

int main()
{
    ridge_oracle_equivalence();
    press_exactness();
    shrinkage();
    kmeans_optimality();
    itc_invariants();
    metric_fixture();
    planted_signal_and_isolation_and_determinism();
    naive_optimism();
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures;
}
