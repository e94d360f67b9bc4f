#pragma once

#include "irfad/data.hpp"
#include "irfad/net.hpp"
#include "irfad/pipeline.hpp"
#include "irfad/schedule.hpp"
#include "irfad/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irfad::cli {

/// Everything a subcommand needs, resolved from defaults, an optional config
/// file, --set overrides and dedicated flags, in that order of precedence.
struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";
    std::filesystem::path dataset;
    std::filesystem::path checkpoint;

    std::string generator = "toy";
    BlobConfig blobs;

    ScheduleParams schedule;
    /// Empty means the default for the data: 128 x 3 for toy data, 256 x 3 otherwise.
    std::vector<std::size_t> hidden;
    std::size_t time_dim = 32;

    TrainConfig train;

    ScorerConfig scorer;
    /// 0 means the default for the data: 250 for one-dimensional data, 500 otherwise.
    int t = 0;
    bool write_maps = false;

    double fpr_limit = 0.3;
    int bench_repeats = 5;

    NetConfig net_config(std::size_t input_dim) const;
    int resolved_t(std::size_t input_dim) const;
};

/// Names of every recognised key, in manifest order.
const std::vector<std::string>& config_keys();

/// Throws ConfigError for an unknown key or an unparsable value.
void set_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_value(const RunConfig& cfg, std::string_view key);

/// Flat text: one `key = value` per line; `#` starts a comment; blank lines
/// are ignored. Later lines override earlier ones.
void apply_config_text(RunConfig& cfg, std::string_view text, const std::string& origin);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Applies a `key=value` override.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// The resolved configuration as config-file text (re-readable by
/// apply_config_text), headed by the command name.
std::string render_manifest(const RunConfig& cfg);

} // namespace irfad::cli
