#include "cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    using namespace irfad::cli;

    CLI::App app{"irfad: one-step diffusion anomaly detection"};
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> t;
    std::optional<std::string> scorer, out, dataset, checkpoint;

    const std::pair<const char*, const char*> commands[] = {
        {"gen", "generate a dataset directory"},
        {"train", "train the noise predictor on a dataset's train split"},
        {"score", "write per-sample scores for a dataset's test split"},
        {"eval", "score and evaluate a dataset's test split"},
        {"toy", "run the one-dimensional toy experiment end to end"},
        {"bench", "compare IRF, DDIM inversion and reconstruction scorers"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_file, "key = value config file");
        sub->add_option("--set", overrides, "override one key, key=value (repeatable)");
        sub->add_option("--seed", seed, "root seed");
        sub->add_option("--t", t, "inference step");
        sub->add_option("--scorer", scorer, "irf-mean | irf-noisy | recon | ddim");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--dataset", dataset, "dataset directory");
        sub->add_option("--checkpoint", checkpoint, "checkpoint file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error kind=config message=\"" << e.what() << "\"\n";
        return 2;
    }

    RunConfig cfg;
    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (!config_file.empty()) apply_config_file(cfg, config_file);
        for (const auto& o : overrides) apply_override(cfg, o);
        if (seed) cfg.seed = *seed;
        if (t) set_value(cfg, "score.t", std::to_string(*t));
        if (scorer) set_value(cfg, "score.scorer", *scorer);
        if (out) cfg.out = *out;
        if (dataset) cfg.dataset = *dataset;
        if (checkpoint) cfg.checkpoint = *checkpoint;
        run_command(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << error_line(e) << '\n';
        return exit_code(e);
    }
    return 0;
}
