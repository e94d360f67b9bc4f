#include "cli/config.hpp"

#include "irfad/binary_io.hpp"
#include "irfad/errors.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>

namespace irfad::cli {

NetConfig RunConfig::net_config(std::size_t input_dim) const {
    NetConfig nc;
    nc.input_dim = input_dim;
    nc.time_dim = time_dim;
    if (!hidden.empty()) {
        nc.hidden = hidden;
    } else {
        const std::size_t width = input_dim == 1 ? 128 : 256;
        nc.hidden = {width, width, width};
    }
    return nc;
}

int RunConfig::resolved_t(std::size_t input_dim) const {
    if (t != 0) return t;
    return input_dim == 1 ? 250 : 500;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
    throw ConfigError("key '" + std::string(key) + "': cannot parse '" + std::string(value) + "' as " + expected);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, const char* expected) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) bad_value(key, value, expected);
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad_value(key, value, "a boolean (true/false)");
}

std::vector<std::size_t> parse_widths(std::string_view key, std::string_view value) {
    std::vector<std::size_t> out;
    if (value.empty() || value == "auto") return out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto part = trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
        out.push_back(parse_number<std::size_t>(key, part, "a comma-separated list of widths"));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Entry {
    std::string key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Entry number_entry(std::string key, T RunConfig::*field) {
    return {key, [key, field](RunConfig& c, std::string_view v) { c.*field = parse_number<T>(key, v, "a number"); },
            [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

template <typename S, typename T>
Entry nested_number(std::string key, S RunConfig::*outer, T S::*field) {
    return {key,
            [key, outer, field](RunConfig& c, std::string_view v) {
                (c.*outer).*field = parse_number<T>(key, v, "a number");
            },
            [outer, field](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return fmt_double((c.*outer).*field);
                } else {
                    return std::to_string((c.*outer).*field);
                }
            }};
}

Entry path_entry(std::string key, std::filesystem::path RunConfig::*field) {
    return {key, [field](RunConfig& c, std::string_view v) { c.*field = std::string(v); },
            [field](const RunConfig& c) { return (c.*field).string(); }};
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = [] {
        std::vector<Entry> e;
        e.push_back(number_entry("seed", &RunConfig::seed));
        e.push_back(path_entry("out", &RunConfig::out));
        e.push_back(path_entry("dataset", &RunConfig::dataset));
        e.push_back(path_entry("checkpoint", &RunConfig::checkpoint));
        e.push_back({"generator",
                     [](RunConfig& c, std::string_view v) {
                         if (v != "toy" && v != "blobs") bad_value("generator", v, "toy or blobs");
                         c.generator = std::string(v);
                     },
                     [](const RunConfig& c) { return c.generator; }});

        e.push_back(nested_number("blobs.n_train", &RunConfig::blobs, &BlobConfig::n_train));
        e.push_back(nested_number("blobs.n_test", &RunConfig::blobs, &BlobConfig::n_test));
        e.push_back({"blobs.channels",
                     [](RunConfig& c, std::string_view v) {
                         c.blobs.dims.channels = parse_number<std::size_t>("blobs.channels", v, "a number");
                     },
                     [](const RunConfig& c) { return std::to_string(c.blobs.dims.channels); }});
        e.push_back({"blobs.height",
                     [](RunConfig& c, std::string_view v) {
                         c.blobs.dims.height = parse_number<std::size_t>("blobs.height", v, "a number");
                     },
                     [](const RunConfig& c) { return std::to_string(c.blobs.dims.height); }});
        e.push_back({"blobs.width",
                     [](RunConfig& c, std::string_view v) {
                         c.blobs.dims.width = parse_number<std::size_t>("blobs.width", v, "a number");
                     },
                     [](const RunConfig& c) { return std::to_string(c.blobs.dims.width); }});
        e.push_back(nested_number("blobs.mask_height", &RunConfig::blobs, &BlobConfig::mask_height));
        e.push_back(nested_number("blobs.mask_width", &RunConfig::blobs, &BlobConfig::mask_width));
        e.push_back(nested_number("blobs.blob_size", &RunConfig::blobs, &BlobConfig::blob_size));
        e.push_back(nested_number("blobs.amplitude", &RunConfig::blobs, &BlobConfig::amplitude));
        e.push_back(nested_number("blobs.modes", &RunConfig::blobs, &BlobConfig::modes));
        e.push_back(nested_number("blobs.mode_std", &RunConfig::blobs, &BlobConfig::mode_std));
        e.push_back(nested_number("blobs.noise_std", &RunConfig::blobs, &BlobConfig::noise_std));
        e.push_back(nested_number("blobs.abnormal_fraction", &RunConfig::blobs, &BlobConfig::abnormal_fraction));

        e.push_back({"schedule.steps",
                     [](RunConfig& c, std::string_view v) {
                         c.schedule.steps = parse_number<int>("schedule.steps", v, "an integer");
                     },
                     [](const RunConfig& c) { return std::to_string(c.schedule.steps); }});
        e.push_back(nested_number("schedule.beta_start", &RunConfig::schedule, &ScheduleParams::beta_start));
        e.push_back(nested_number("schedule.beta_end", &RunConfig::schedule, &ScheduleParams::beta_end));

        e.push_back({"net.hidden",
                     [](RunConfig& c, std::string_view v) { c.hidden = parse_widths("net.hidden", v); },
                     [](const RunConfig& c) {
                         if (c.hidden.empty()) return std::string("auto");
                         std::string s;
                         for (std::size_t i = 0; i < c.hidden.size(); ++i) {
                             s += (i ? "," : "") + std::to_string(c.hidden[i]);
                         }
                         return s;
                     }});
        e.push_back(number_entry("net.time_dim", &RunConfig::time_dim));

        e.push_back(nested_number("train.epochs", &RunConfig::train, &TrainConfig::epochs));
        e.push_back(nested_number("train.batch_size", &RunConfig::train, &TrainConfig::batch_size));
        e.push_back(nested_number("train.lr", &RunConfig::train, &TrainConfig::learning_rate));
        e.push_back(nested_number("train.weight_decay", &RunConfig::train, &TrainConfig::weight_decay));
        e.push_back(nested_number("train.beta1", &RunConfig::train, &TrainConfig::beta1));
        e.push_back(nested_number("train.beta2", &RunConfig::train, &TrainConfig::beta2));
        e.push_back(nested_number("train.epsilon", &RunConfig::train, &TrainConfig::epsilon));

        e.push_back({"score.scorer",
                     [](RunConfig& c, std::string_view v) {
                         try {
                             c.scorer.kind = parse_scorer(v);
                         } catch (const ParameterError&) {
                             bad_value("score.scorer", v, "one of irf-mean, irf-noisy, recon, ddim");
                         }
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.scorer.kind)); }});
        e.push_back({"score.t", [](RunConfig& c, std::string_view v) {
                         c.t = v == "auto" ? 0 : parse_number<int>("score.t", v, "an integer or auto");
                     },
                     [](const RunConfig& c) { return c.t == 0 ? std::string("auto") : std::to_string(c.t); }});
        e.push_back(nested_number("score.eps_seed", &RunConfig::scorer, &ScorerConfig::eps_seed));
        e.push_back(nested_number("score.recon_t_start", &RunConfig::scorer, &ScorerConfig::recon_t_start));
        e.push_back(nested_number("score.recon_steps", &RunConfig::scorer, &ScorerConfig::recon_steps));
        e.push_back(nested_number("score.ddim_steps", &RunConfig::scorer, &ScorerConfig::ddim_steps));
        e.push_back(nested_number("score.batch", &RunConfig::scorer, &ScorerConfig::batch));
        e.push_back({"score.standardize",
                     [](RunConfig& c, std::string_view v) { c.scorer.standardize = parse_bool("score.standardize", v); },
                     [](const RunConfig& c) { return std::string(c.scorer.standardize ? "true" : "false"); }});
        e.push_back({"score.write_maps",
                     [](RunConfig& c, std::string_view v) { c.write_maps = parse_bool("score.write_maps", v); },
                     [](const RunConfig& c) { return std::string(c.write_maps ? "true" : "false"); }});

        e.push_back({"eval.fpr_limit",
                     [](RunConfig& c, std::string_view v) {
                         c.fpr_limit = parse_number<double>("eval.fpr_limit", v, "a number");
                     },
                     [](const RunConfig& c) { return fmt_double(c.fpr_limit); }});
        e.push_back(number_entry("bench.repeats", &RunConfig::bench_repeats));
        return e;
    }();
    return table;
}

const Entry& find_entry(std::string_view key) {
    for (const auto& e : entries()) {
        if (e.key == key) return e;
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& e : entries()) k.push_back(e.key);
        return k;
    }();
    return keys;
}

void set_value(RunConfig& cfg, std::string_view key, std::string_view value) {
    find_entry(key).set(cfg, value);
}

std::string get_value(const RunConfig& cfg, std::string_view key) {
    return find_entry(key).get(cfg);
}

void apply_config_text(RunConfig& cfg, std::string_view text, const std::string& origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (key == "command") continue;
        try {
            set_value(cfg, key, trim(std::string_view(body).substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(std::string("cannot read config file: ") + e.what());
    }
    apply_config_text(cfg, std::string(bytes.begin(), bytes.end()), path.string());
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
    }
    set_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string render_manifest(const RunConfig& cfg) {
    std::string out = "command = " + cfg.command + "\n";
    for (const auto& e : entries()) out += e.key + " = " + e.get(cfg) + "\n";
    return out;
}

} // namespace irfad::cli
