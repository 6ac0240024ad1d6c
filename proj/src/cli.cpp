#include "itcr/cli.hpp"

#include "itcr/config.hpp"
#include "itcr/crossval.hpp"
#include "itcr/pipeline.hpp"
#include "itcr/report.hpp"
#include "itcr/synth.hpp"
#include "itcr/text.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace itcr {

namespace {

namespace fs = std::filesystem;

// Binds CLI flags to config keys; only flags given on the command line
// override values from the config file.
class Overrides {
public:
    void option(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
    {
        auto& slot = values_[key];
        bound_.push_back({app->add_option(flag, slot, help), key, ""});
    }
    // Flag that writes a fixed value, e.g. --no-cosine-filter -> pipeline.cosine_filter = false.
    void flag(CLI::App* app, const std::string& flag, const std::string& key, std::string value, const std::string& help)
    {
        bound_.push_back({app->add_flag(flag, help), key, std::move(value)});
    }

    void apply(Config& cfg) const
    {
        for (const auto& b : bound_) {
            if (b.opt->count() > 0) {
                cfg.set(b.key, b.fixed.empty() ? values_.at(b.key) : b.fixed);
            }
        }
    }

private:
    struct Bound {
        CLI::Option* opt;
        std::string key;
        std::string fixed;
    };
    std::map<std::string, std::string> values_;
    std::vector<Bound> bound_;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    RunConfig run;

    void log(const std::string& line) const
    {
        if (run.verbosity > 0) {
            err << "[itcr] " << line << '\n';
        }
    }
};

void add_common(CLI::App* app, Overrides& ov, std::string& config_path, bool data = true)
{
    app->add_option("--config,--spec", config_path, "key = value configuration file");
    if (data) {
        ov.option(app, "--matrix", "data.matrix", "matrix CSV (compound_id,response,predictors...)");
        ov.option(app, "--classmap", "data.classmap", "class map CSV (predictor_id,class)");
    }
    ov.option(app, "--out", "output.dir", "output directory");
    ov.option(app, "--seed", "seed", "global seed; sub-seeds are derived from it");
    ov.option(app, "--threads", "threads", "worker threads (default: available cores)");
    ov.flag(app, "-v,--verbose", "verbosity", "1", "log progress to stderr");
}

void add_pipeline(CLI::App* app, Overrides& ov)
{
    ov.option(app, "--classes", "pipeline.classes", "predictor classes, e.g. TS+TC+AP");
    ov.flag(app, "--cosine-filter", "pipeline.cosine_filter", "true", "drop near-constant predictors first");
    ov.flag(app, "--no-cosine-filter", "pipeline.cosine_filter", "false", "skip the near-constant filter (default)");
    ov.option(app, "--cosine-threshold", "pipeline.cosine_threshold", "near-constant threshold (default 0.9)");
}

void add_itc(CLI::App* app, Overrides& ov)
{
    ov.option(app, "--occ-threshold", "itc.occ_threshold", "stop once the occupancy ratio reaches this (default 0.9)");
    ov.option(app, "--min-predictors", "itc.min_predictors", "stop once at most this many predictors remain (default 100)");
    ov.option(app, "--keep-fraction", "itc.keep_fraction", "fraction kept per pattern (default 1/3)");
    ov.option(app, "--max-iterations", "itc.max_iterations", "iteration cap (default 20)");
    ov.option(app, "--kmeans-seed", "kmeans.seed", "explicit k-means seed (default: derived from --seed)");
    ov.option(app, "--kmeans-restarts", "kmeans.restarts", "k-means restarts (default 10)");
    ov.option(app, "--kmeans-max-iter", "kmeans.max_iter", "Lloyd iteration cap (default 300)");
}

void add_ridge(CLI::App* app, Overrides& ov)
{
    ov.option(app, "--thinning", "pipeline.thinning", "none or itc");
    ov.option(app, "--iteration", "pipeline.itc_iteration", "use the predictor set after this ITC iteration");
    ov.option(app, "--criterion", "ridge.criterion", "press or gcv");
    ov.option(app, "--k-grid", "ridge.k_grid", "lo,hi,count log-spaced ridge constants");
    ov.option(app, "--cutoff", "pipeline.cutoff", "class 1 iff predicted response > cutoff (default 0.5)");
}

Dataset load_input(const Context& ctx)
{
    if (ctx.run.matrix_path.empty() || ctx.run.classmap_path.empty()) {
        throw ValidationError("--matrix and --classmap (or data.matrix / data.classmap) are required");
    }
    ctx.log("loading " + ctx.run.matrix_path.string());
    return load_dataset(ctx.run.matrix_path, ctx.run.classmap_path);
}

std::ofstream open_output(const Context& ctx, const std::string& name)
{
    fs::create_directories(ctx.run.output_dir);
    const fs::path path = ctx.run.output_dir / name;
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    ctx.log("writing " + path.string());
    return f;
}

int cmd_ingest(Context& ctx)
{
    const Dataset d = load_input(ctx);
    const auto report = validate(d);
    ctx.out << "compounds = " << d.compounds() << '\n';
    ctx.out << "predictors = " << d.predictors() << '\n';
    ctx.out << "responses = " << d.response.sum() << " x 1, " << d.compounds() - d.response.sum() << " x 0\n";
    for (const auto& [cls, cols] : d.groups_by_class()) {
        ctx.out << "class." << to_string(cls) << " = " << cols.size() << '\n';
    }
    for (const auto& w : report.warnings) {
        ctx.out << "warning: " << w.location << ": " << w.message << '\n';
    }
    ctx.out << "valid = " << (report.is_valid() ? "true" : "false") << '\n';
    return report.is_valid() ? kExitOk : kExitValidation;
}

int cmd_preprocess(Context& ctx)
{
    const Dataset all = load_input(ctx);
    const Dataset d = subset_by_class(all, ctx.run.spec.classes);
    const auto filtered = constant_cosine_filter(d, ctx.run.spec.cosine_threshold);
    {
        auto f = open_output(ctx, "cosine_filter.csv");
        f << "predictor_id,class,cosine,kept\n";
        for (Index j = 0; j < d.predictors(); ++j) {
            const bool kept = std::binary_search(filtered.kept.begin(), filtered.kept.end(), j);
            f << d.predictor_ids[static_cast<std::size_t>(j)] << ',' << to_string(d.classes[static_cast<std::size_t>(j)])
              << ',' << text::format_exact(filtered.cosines(j)) << ',' << (kept ? 1 : 0) << '\n';
        }
    }
    const Dataset kept = ctx.run.spec.cosine_filter ? d.select_columns(filtered.kept) : d;
    if (kept.predictors() == 0) {
        throw ValidationError("preprocess: every predictor was removed by the cosine filter");
    }
    const auto normalized = normalize_predictors(kept);
    {
        Dataset out = kept;
        out.values = normalized.values;
        auto f = open_output(ctx, "normalized.csv");
        write_matrix_csv(out, f);
    }
    {
        Dataset out = kept;
        out.values = log_shift_transform(kept.values);
        auto f = open_output(ctx, "log_shift.csv");
        write_matrix_csv(out, f);
        auto c = open_output(ctx, "classmap.csv");
        write_classmap_csv(out, c);
    }
    auto f = open_output(ctx, "preprocess_summary.txt");
    f << "predictors_in = " << d.predictors() << '\n';
    f << "cosine_filter = " << (ctx.run.spec.cosine_filter ? "on" : "off") << '\n';
    f << "cosine_threshold = " << text::format_exact(ctx.run.spec.cosine_threshold) << '\n';
    f << "near_constant = " << filtered.removed.size() << '\n';
    f << "predictors_out = " << kept.predictors() << '\n';
    for (const auto& g : normalized.guard_log) {
        f << "guard." << kept.predictor_ids[static_cast<std::size_t>(g.predictor)] << " = " << g.fallback << '\n';
    }
    ctx.out << "predictors " << d.predictors() << " -> " << kept.predictors() << " (" << filtered.removed.size()
            << " near-constant at threshold " << text::format_exact(ctx.run.spec.cosine_threshold)
            << (ctx.run.spec.cosine_filter ? ", removed" : ", filter off") << ")\n";
    return kExitOk;
}

void write_itc_outputs(Context& ctx, const Dataset& d, const ThinningResult& thinning)
{
    const Dataset itc_input = d.select_columns(thinning.itc_input_columns);
    {
        auto f = open_output(ctx, "itc_trace.txt");
        write_itc_trace(f, *thinning.itc, itc_input);
    }
    for (const auto& it : thinning.itc->iterations) {
        auto f = open_output(ctx, "selected_iter" + std::to_string(it.iteration) + ".txt");
        for (Index j : it.selected) {
            f << itc_input.predictor_ids[static_cast<std::size_t>(j)] << '\n';
        }
    }
    for (const auto& it : thinning.itc->iterations) {
        ctx.out << "iteration " << it.iteration << ": occ_ratio " << text::format_fixed(it.occ_ratio, 4) << ", "
                << it.predictors_in << " -> " << it.selected.size() << " predictors (";
        for (std::size_t c = 0; c < it.selected_per_class.size(); ++c) {
            ctx.out << (c ? " " : "") << to_string(it.selected_per_class[c].first) << ":" << it.selected_per_class[c].second;
        }
        ctx.out << ")\n";
    }
    ctx.out << "termination: " << to_string(thinning.itc->termination) << '\n';
}

int cmd_itc(Context& ctx)
{
    ctx.run.require_seed();
    const Dataset d = load_input(ctx);
    PipelineSpec spec = ctx.run.spec;
    spec.thinning = Thinning::ITC;
    spec.check();
    const ThinningResult thinning = thin_predictors(d, spec);
    write_itc_outputs(ctx, d, thinning);
    return kExitOk;
}

int cmd_fit(Context& ctx)
{
    const Dataset d = load_input(ctx);
    if (ctx.run.spec.thinning == Thinning::ITC) {
        ctx.run.require_seed();
    }
    const TrainedPipeline trained = train_pipeline(d, ctx.run.spec);
    if (trained.thinning.itc) {
        write_itc_outputs(ctx, d, trained.thinning);
    }
    const FitArtifact artifact = make_fit_artifact(trained.model, ctx.run.spec.ridge_search);
    {
        auto f = open_output(ctx, "fit.txt");
        write_fit_artifact(f, artifact);
    }
    ctx.out << "predictors = " << trained.model.columns.size() << '\n';
    ctx.out << "criterion = " << to_string(trained.model.criterion) << '\n';
    ctx.out << "ridge_constant = " << text::format_exact(trained.model.selection.k) << '\n';
    ctx.out << "significant (|t| >= 1.96) = " << significant_predictors(artifact).size() << '\n';
    return kExitOk;
}

int cmd_cv(Context& ctx)
{
    const Dataset d = load_input(ctx);
    const PipelineSpec& spec = ctx.run.spec;
    CVOptions opts;
    opts.threads = ctx.run.threads;
    if (spec.thinning == Thinning::ITC || ctx.run.cv_mode == CVMode::Holdout) {
        opts.fold_seed = ctx.run.fold_seed();
    }
    ctx.log(std::string("cross-validation mode ") + std::string(to_string(ctx.run.cv_mode)));
    CVReport report;
    switch (ctx.run.cv_mode) {
    case CVMode::Proper: report = proper_loo_cv(d, spec, opts); break;
    case CVMode::Naive: report = naive_loo_cv(d, spec, opts); break;
    case CVMode::Holdout: report = holdout_cv(d, spec, ctx.run.holdout_fraction, ctx.run.holdout_seed()); break;
    }
    {
        auto f = open_output(ctx, "cv_report.txt");
        write_cv_report(f, report);
    }
    const std::string row = summary_row(report, cv_type_label(report, spec.thinning));
    {
        auto f = open_output(ctx, "cv_summary.txt");
        f << summary_header() << '\n' << row << '\n';
    }
    ctx.out << summary_header() << '\n' << row << '\n';
    return kExitOk;
}

int cmd_synth(Context& ctx)
{
    ctx.run.require_seed();
    const SyntheticData data = generate_synthetic(ctx.run.synth);
    {
        auto m = open_output(ctx, "matrix.csv");
        write_matrix_csv(data.dataset, m);
        auto c = open_output(ctx, "classmap.csv");
        write_classmap_csv(data.dataset, c);
    }
    auto t = open_output(ctx, "truth.txt");
    for (Index j : data.informative) {
        t << data.dataset.predictor_ids[static_cast<std::size_t>(j)] << '\n';
    }
    ctx.out << "compounds = " << data.dataset.compounds() << '\n';
    ctx.out << "predictors = " << data.dataset.predictors() << '\n';
    ctx.out << "informative = " << data.informative.size() << '\n';
    return kExitOk;
}

struct ReportArgs {
    std::vector<std::string> cv_files;
    std::vector<std::string> thinning;   // per cv file, optional
    std::string fit_file;
    std::string predict_matrix;
    std::string predict_classmap;
    double t_threshold = 1.96;
};

int cmd_report(Context& ctx, const ReportArgs& args)
{
    if (args.cv_files.empty() && args.fit_file.empty()) {
        throw ValidationError("report: give --cv and/or --fit");
    }
    if (!args.cv_files.empty()) {
        ctx.out << summary_header() << '\n';
        for (const auto& path : args.cv_files) {
            std::ifstream in(path);
            if (!in) {
                throw ValidationError("cannot open '" + path + "'");
            }
            const CVReport r = read_cv_report(in);
            const Thinning t = r.model_description.find("ITC") != std::string::npos ? Thinning::ITC : Thinning::None;
            ctx.out << summary_row(r, cv_type_label(r, t)) << '\n';
        }
    }
    if (!args.fit_file.empty()) {
        std::ifstream in(args.fit_file);
        if (!in) {
            throw ValidationError("cannot open '" + args.fit_file + "'");
        }
        const FitArtifact artifact = read_fit_artifact(in);
        if (args.predict_matrix.empty()) {
            write_significance_table(ctx.out, significant_predictors(artifact, args.t_threshold));
        } else {
            const Dataset d = load_dataset(args.predict_matrix, args.predict_classmap);
            IndexList cols;
            for (const auto& id : artifact.predictor_ids) {
                auto it = std::find(d.predictor_ids.begin(), d.predictor_ids.end(), id);
                if (it == d.predictor_ids.end()) {
                    throw ValidationError("report: predictor '" + id + "' missing from prediction matrix");
                }
                cols.push_back(static_cast<Index>(it - d.predictor_ids.begin()));
            }
            ctx.out << "compound_id,response,score,predicted\n";
            for (Index i = 0; i < d.compounds(); ++i) {
                Vector x(static_cast<Index>(cols.size()));
                for (std::size_t j = 0; j < cols.size(); ++j) {
                    x(static_cast<Index>(j)) = d.values(i, cols[j]);
                }
                const auto p = artifact.predict(x);
                ctx.out << d.compound_ids[static_cast<std::size_t>(i)] << ',' << d.response(i) << ','
                        << text::format_exact(p.score) << ',' << p.predicted << '\n';
            }
        }
    }
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Two-way clustering predictor thinning, ridge classification and two-deep cross-validation", "itcr"};
    app.require_subcommand(1);

    std::map<std::string, Overrides> overrides;
    std::map<std::string, std::string> config_paths;
    auto sub = [&](const std::string& name, const std::string& help) {
        auto* s = app.add_subcommand(name, help);
        return s;
    };

    auto* ingest = sub("ingest", "load and validate a dataset");
    add_common(ingest, overrides["ingest"], config_paths["ingest"]);
    add_pipeline(ingest, overrides["ingest"]);

    auto* preprocess = sub("preprocess", "near-constant filter, normalization and log-shift transform");
    add_common(preprocess, overrides["preprocess"], config_paths["preprocess"]);
    add_pipeline(preprocess, overrides["preprocess"]);

    auto* itc = sub("itc", "run two-way clustering thinning and write the iteration trace");
    add_common(itc, overrides["itc"], config_paths["itc"]);
    add_pipeline(itc, overrides["itc"]);
    add_itc(itc, overrides["itc"]);

    auto* fit = sub("fit", "fit the ridge classifier on all compounds");
    add_common(fit, overrides["fit"], config_paths["fit"]);
    add_pipeline(fit, overrides["fit"]);
    add_itc(fit, overrides["fit"]);
    add_ridge(fit, overrides["fit"]);

    auto* cv = sub("cv", "leave-one-out (naive or proper) or holdout cross-validation");
    add_common(cv, overrides["cv"], config_paths["cv"]);
    add_pipeline(cv, overrides["cv"]);
    add_itc(cv, overrides["cv"]);
    add_ridge(cv, overrides["cv"]);
    overrides["cv"].option(cv, "--mode", "cv.mode", "proper, naive or holdout");
    overrides["cv"].option(cv, "--holdout-fraction", "cv.holdout_fraction", "test fraction in holdout mode (default 0.2)");

    auto* synth = sub("synth", "generate a planted-signal dataset");
    add_common(synth, overrides["synth"], config_paths["synth"], false);
    auto& so = overrides["synth"];
    so.option(synth, "--m", "synth.m", "compounds");
    so.option(synth, "--n", "synth.n", "predictors");
    so.option(synth, "--n-informative", "synth.n_informative", "informative predictors");
    so.option(synth, "--delta", "synth.delta", "class mean separation in noise sd units");
    so.option(synth, "--class-balance", "synth.class_balance", "fraction of compounds with response 1");
    so.option(synth, "--synth-classes", "synth.classes", "class proportions, e.g. TS:1,TC:1,AP:1");
    so.option(synth, "--base-offset", "synth.base_offset", "common predictor mean");

    ReportArgs report_args;
    auto* report = sub("report", "summarize cross-validation reports or a fit artifact");
    report->add_option("--cv", report_args.cv_files, "cv_report.txt files (one summary row each)");
    report->add_option("--fit", report_args.fit_file, "fit.txt artifact (significant t-ratio table)");
    report->add_option("--predict", report_args.predict_matrix, "matrix CSV to classify with --fit");
    report->add_option("--classmap", report_args.predict_classmap, "class map for --predict");
    report->add_option("--t-threshold", report_args.t_threshold, "|t| threshold (default 1.96)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        const std::string name = chosen->get_name();
        Config cfg;
        if (auto it = config_paths.find(name); it != config_paths.end() && !it->second.empty()) {
            cfg = Config::load(it->second);
        }
        if (auto it = overrides.find(name); it != overrides.end()) {
            it->second.apply(cfg);
        }
        Context ctx{out, err, resolve_run_config(cfg)};
        if (name == "ingest") {
            return cmd_ingest(ctx);
        }
        if (name == "preprocess") {
            return cmd_preprocess(ctx);
        }
        if (name == "itc") {
            return cmd_itc(ctx);
        }
        if (name == "fit") {
            return cmd_fit(ctx);
        }
        if (name == "cv") {
            return cmd_cv(ctx);
        }
        if (name == "synth") {
            return cmd_synth(ctx);
        }
        return cmd_report(ctx, report_args);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace itcr
