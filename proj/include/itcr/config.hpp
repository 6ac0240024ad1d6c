#ifndef ITCR_CONFIG_HPP
#define ITCR_CONFIG_HPP

#include "itcr/crossval.hpp"
#include "itcr/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>

namespace itcr {

// Flat `section.key = value` text; '#' starts a comment. Unknown keys are
// rejected so that typos do not silently fall back to defaults.
class Config {
public:
    static Config parse(std::istream& in);
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

    static bool is_known_key(const std::string& key);

private:
    std::map<std::string, std::string> entries_;
};

struct RunConfig {
    std::filesystem::path matrix_path;
    std::filesystem::path classmap_path;
    std::filesystem::path output_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    int verbosity = 0;

    PipelineSpec spec;
    CVMode cv_mode = CVMode::Proper;
    double holdout_fraction = 0.2;
    SynthConfig synth;

    // Named sub-seeds of the global seed; throws ValidationError if no seed was given.
    std::uint64_t require_seed() const;
    std::uint64_t kmeans_seed() const;
    std::uint64_t synth_seed() const;
    std::uint64_t fold_seed() const;
    std::uint64_t holdout_seed() const;
};

RunConfig resolve_run_config(const Config& cfg);

} // namespace itcr

#endif // ITCR_CONFIG_HPP
