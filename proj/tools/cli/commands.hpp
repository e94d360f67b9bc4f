#pragma once

#include "cli/config.hpp"

#include <exception>
#include <iosfwd>
#include <string>

namespace irfad::cli {

// Each command writes its artifacts under cfg.out (atomically, file by file)
// together with run_manifest.txt holding the resolved configuration, and
// reports progress on `log`.

/// Dataset directory from the configured generator.
void cmd_gen(const RunConfig& cfg, std::ostream& log);
/// checkpoint.bin and train_log.csv (epoch, mean_loss, seconds).
void cmd_train(const RunConfig& cfg, std::ostream& log);
/// scores.csv for the test split, and maps/ when score.write_maps is set.
void cmd_score(const RunConfig& cfg, std::ostream& log);
/// eval.csv with one EvalReport row; the same report as a table on `log`.
void cmd_eval(const RunConfig& cfg, std::ostream& log);
/// Toy data, checkpoint.bin, train_log.csv, trajectories.tsv and eval.csv
/// (one row per input convention).
void cmd_toy(const RunConfig& cfg, std::ostream& log);
/// bench.csv comparing irf-mean, ddim and recon on the test split.
void cmd_bench(const RunConfig& cfg, std::ostream& log);

/// Dispatches on cfg.command after checking referenced paths.
void run_command(const RunConfig& cfg, std::ostream& log);

/// Throws ConfigError when a path the command reads does not exist.
void check_paths(const RunConfig& cfg);

/// 2 configuration, 3 data or checkpoint, 4 numeric or training, 1 otherwise.
int exit_code(const std::exception& e);

/// `error kind=<kind> message="<text>"` on one line.
std::string error_line(const std::exception& e);

} // namespace irfad::cli
