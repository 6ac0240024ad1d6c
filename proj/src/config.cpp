#include "itcr/config.hpp"

#include "itcr/parallel.hpp"
#include "itcr/random.hpp"
#include "itcr/text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace itcr {

namespace {

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys = {
        "data.matrix", "data.classmap", "output.dir", "seed", "threads", "verbosity",
        "pipeline.classes", "pipeline.thinning", "pipeline.cosine_filter", "pipeline.cosine_threshold",
        "pipeline.cutoff", "pipeline.itc_iteration",
        "itc.occ_threshold", "itc.min_predictors", "itc.keep_fraction", "itc.max_iterations",
        "kmeans.seed", "kmeans.restarts", "kmeans.max_iter", "kmeans.tolerance",
        "ridge.criterion", "ridge.k_grid",
        "cv.mode", "cv.holdout_fraction",
        "synth.m", "synth.n", "synth.n_informative", "synth.delta", "synth.class_balance", "synth.classes",
        "synth.base_offset", "synth.seed"};
    return keys;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& expected)
{
    throw ValidationError("config: " + key + " = '" + value + "': expected " + expected);
}

double as_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    if (!text::parse_double(v, out)) {
        bad(key, v, "a number");
    }
    return out;
}

long long as_int(const std::string& key, const std::string& v)
{
    long long out = 0;
    if (!text::parse_int(v, out)) {
        bad(key, v, "an integer");
    }
    return out;
}

std::uint64_t as_seed(const std::string& key, const std::string& v)
{
    const auto t = text::trim(v);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        bad(key, v, "a non-negative 64-bit integer");
    }
    return out;
}

bool as_bool(const std::string& key, const std::string& v)
{
    std::string s(text::trim(v));
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
    }
    bad(key, v, "true or false");
}

std::vector<double> as_grid(const std::string& key, const std::string& v)
{
    const auto parts = text::split(v, ',');
    if (parts.size() != 3) {
        bad(key, v, "lo,hi,count");
    }
    double lo = 0.0, hi = 0.0;
    long long count = 0;
    if (!text::parse_double(parts[0], lo) || !text::parse_double(parts[1], hi) || !text::parse_int(parts[2], count) ||
        count < 1) {
        bad(key, v, "lo,hi,count");
    }
    return log_grid(lo, hi, static_cast<int>(count));
}

// "TS:1,TC:1,AP:1"
std::vector<std::pair<PredictorClass, double>> as_proportions(const std::string& key, const std::string& v)
{
    std::vector<std::pair<PredictorClass, double>> out;
    for (auto item : text::split(v, ',')) {
        const auto kv = text::split(item, ':');
        double w = 1.0;
        auto cls = parse_predictor_class(kv[0]);
        if (!cls || kv.size() > 2 || (kv.size() == 2 && !text::parse_double(kv[1], w))) {
            bad(key, v, "CLASS[:weight],... with CLASS in TS,TC,3D,QC,AP");
        }
        out.emplace_back(*cls, w);
    }
    return out;
}

} // namespace

bool Config::is_known_key(const std::string& key)
{
    return known_keys().count(key) > 0;
}

void Config::set(const std::string& key, const std::string& value)
{
    if (!is_known_key(key)) {
        throw ValidationError("config: unknown key '" + key + "'");
    }
    entries_[key] = value;
}

std::optional<std::string> Config::get(const std::string& key) const
{
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Config Config::parse(std::istream& in)
{
    Config cfg;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto hash = line.find('#');
        const auto t = text::trim(std::string_view(line).substr(0, hash));
        if (t.empty()) {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("config line " + std::to_string(no) + ": expected 'key = value'");
        }
        cfg.set(std::string(text::trim(t.substr(0, eq))), std::string(text::trim(t.substr(eq + 1))));
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file '" + path.string() + "'");
    }
    return parse(in);
}

std::uint64_t RunConfig::require_seed() const
{
    if (!seed) {
        throw ValidationError("a seed is required for this command (--seed or 'seed = ...')");
    }
    return *seed;
}

std::uint64_t RunConfig::kmeans_seed() const { return derive_seed(require_seed(), "kmeans"); }
std::uint64_t RunConfig::synth_seed() const { return derive_seed(require_seed(), "synth"); }
std::uint64_t RunConfig::fold_seed() const { return derive_seed(require_seed(), "folds"); }
std::uint64_t RunConfig::holdout_seed() const { return derive_seed(require_seed(), "holdout"); }

RunConfig resolve_run_config(const Config& cfg)
{
    RunConfig r;
    r.threads = default_threads();
    for (const auto& [key, v] : cfg.entries()) {
        if (key == "data.matrix") {
            r.matrix_path = v;
        } else if (key == "data.classmap") {
            r.classmap_path = v;
        } else if (key == "output.dir") {
            r.output_dir = v;
        } else if (key == "seed") {
            r.seed = as_seed(key, v);
        } else if (key == "threads") {
            const auto t = as_int(key, v);
            if (t < 1) {
                bad(key, v, "a positive integer");
            }
            r.threads = static_cast<unsigned>(t);
        } else if (key == "verbosity") {
            r.verbosity = static_cast<int>(as_int(key, v));
        } else if (key == "pipeline.classes") {
            r.spec.classes = parse_class_list(v);
        } else if (key == "pipeline.thinning") {
            if (v == "itc") {
                r.spec.thinning = Thinning::ITC;
            } else if (v == "none") {
                r.spec.thinning = Thinning::None;
            } else {
                bad(key, v, "itc or none");
            }
        } else if (key == "pipeline.cosine_filter") {
            r.spec.cosine_filter = as_bool(key, v);
        } else if (key == "pipeline.cosine_threshold") {
            r.spec.cosine_threshold = as_double(key, v);
        } else if (key == "pipeline.cutoff") {
            r.spec.cutoff = as_double(key, v);
        } else if (key == "pipeline.itc_iteration") {
            if (v != "final") {
                r.spec.itc_iteration = static_cast<int>(as_int(key, v));
            }
        } else if (key == "itc.occ_threshold") {
            r.spec.itc.occ_threshold = as_double(key, v);
        } else if (key == "itc.min_predictors") {
            r.spec.itc.min_predictors = static_cast<Index>(as_int(key, v));
        } else if (key == "itc.keep_fraction") {
            r.spec.itc.keep_fraction = as_double(key, v);
        } else if (key == "itc.max_iterations") {
            r.spec.itc.max_iterations = static_cast<int>(as_int(key, v));
        } else if (key == "kmeans.seed") {
            // handled below so it wins over the derived seed regardless of key order
        } else if (key == "kmeans.restarts") {
            r.spec.itc.kmeans.restarts = static_cast<int>(as_int(key, v));
        } else if (key == "kmeans.max_iter") {
            r.spec.itc.kmeans.max_iterations = static_cast<int>(as_int(key, v));
        } else if (key == "kmeans.tolerance") {
            r.spec.itc.kmeans.tolerance = as_double(key, v);
        } else if (key == "ridge.criterion") {
            if (v == "press") {
                r.spec.ridge_search.criterion = RidgeCriterion::PRESS;
            } else if (v == "gcv") {
                r.spec.ridge_search.criterion = RidgeCriterion::GCV;
            } else {
                bad(key, v, "press or gcv");
            }
        } else if (key == "ridge.k_grid") {
            r.spec.ridge_search.grid = as_grid(key, v);
        } else if (key == "cv.mode") {
            if (v == "proper") {
                r.cv_mode = CVMode::Proper;
            } else if (v == "naive") {
                r.cv_mode = CVMode::Naive;
            } else if (v == "holdout") {
                r.cv_mode = CVMode::Holdout;
            } else {
                bad(key, v, "proper, naive or holdout");
            }
        } else if (key == "cv.holdout_fraction") {
            r.holdout_fraction = as_double(key, v);
        } else if (key == "synth.m") {
            r.synth.m = static_cast<Index>(as_int(key, v));
        } else if (key == "synth.n") {
            r.synth.n = static_cast<Index>(as_int(key, v));
        } else if (key == "synth.n_informative") {
            r.synth.n_informative = static_cast<Index>(as_int(key, v));
        } else if (key == "synth.delta") {
            r.synth.delta = as_double(key, v);
        } else if (key == "synth.class_balance") {
            r.synth.class_balance = as_double(key, v);
        } else if (key == "synth.classes") {
            r.synth.class_proportions = as_proportions(key, v);
        } else if (key == "synth.base_offset") {
            r.synth.base_offset = as_double(key, v);
        } else if (key == "synth.seed") {
            // handled below
        }
    }
    if (r.seed) {
        r.spec.itc.kmeans.seed = r.kmeans_seed();
        r.synth.seed = r.synth_seed();
    }
    if (auto v = cfg.get("kmeans.seed")) {
        r.spec.itc.kmeans.seed = as_seed("kmeans.seed", *v);
    }
    if (auto v = cfg.get("synth.seed")) {
        r.synth.seed = as_seed("synth.seed", *v);
    }
    return r;
}

} // namespace itcr
