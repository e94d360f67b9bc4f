#include "cli/commands.hpp"
#include "cli/config.hpp"

#include "irfad/binary_io.hpp"
#include "irfad/errors.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace irfad;
using namespace irfad::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    const auto bytes = read_file(p);
    return {bytes.begin(), bytes.end()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

// Dataset and checkpoint for the perfect-detector fixture under dir.
RunConfig perfect_run(const fs::path& dir, const std::string& command) {
    save_dataset(irfad::testing::perfect_detector_data(), dir / "data");
    save_checkpoint(irfad::testing::identity_silu_net(4), dir / "checkpoint.bin");
    RunConfig cfg;
    cfg.command = command;
    cfg.dataset = dir / "data";
    cfg.checkpoint = dir / "checkpoint.bin";
    cfg.out = dir / "out";
    return cfg;
}

} // namespace

TEST(CliConfig, DefaultsAndAutoValues) {
    RunConfig c;
    EXPECT_EQ(c.resolved_t(1), 250);
    EXPECT_EQ(c.resolved_t(256), 500);
    EXPECT_EQ(c.net_config(1).hidden, (std::vector<std::size_t>{128, 128, 128}));
    EXPECT_EQ(c.net_config(4).hidden, (std::vector<std::size_t>{256, 256, 256}));
    c.t = 40;
    EXPECT_EQ(c.resolved_t(1), 40);
    EXPECT_EQ(get_value(c, "score.t"), "40");
}

TEST(CliConfig, ParsesFileText) {
    RunConfig c;
    apply_config_text(c,
                      "# comment\n"
                      "seed = 42\n"
                      "  train.lr=0.002   # trailing\n"
                      "\n"
                      "net.hidden = 32, 16\n"
                      "score.scorer = ddim\n"
                      "score.standardize = true\n"
                      "command = ignored\n",
                      "cfg.txt");
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.train.learning_rate, 0.002);
    EXPECT_EQ(c.hidden, (std::vector<std::size_t>{32, 16}));
    EXPECT_EQ(c.scorer.kind, ScorerKind::ddim);
    EXPECT_TRUE(c.scorer.standardize);
    EXPECT_TRUE(c.command.empty());
}

TEST(CliConfig, ErrorsNameTheLine) {
    RunConfig c;
    try {
        apply_config_text(c, "seed = 1\nbogus.key = 3\n", "f.cfg");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("f.cfg:2:"), std::string::npos);
    }
    EXPECT_THROW(apply_config_text(c, "no equals sign\n", "f"), ConfigError);
    EXPECT_THROW(set_value(c, "seed", "-1x"), ConfigError);
    EXPECT_THROW(set_value(c, "score.scorer", "fancy"), ConfigError);
    EXPECT_THROW(set_value(c, "generator", "mnist"), ConfigError);
    EXPECT_THROW(set_value(c, "score.standardize", "maybe"), ConfigError);
    EXPECT_THROW(apply_override(c, "seed"), ConfigError);
    EXPECT_THROW((void)get_value(c, "nope"), ConfigError);
}

TEST(CliConfig, LaterSourcesWin) {
    RunConfig c;
    apply_config_text(c, "seed = 3\ntrain.epochs = 9\n", "file");
    apply_override(c, "seed=5");
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.train.epochs, 9);
}

TEST(CliConfig, ManifestRoundTrips) {
    RunConfig a;
    a.command = "eval";
    apply_config_text(a, "seed = 7\ntrain.lr = 0.1\nschedule.beta_end = 0.0123456789\nnet.hidden = 8,8\n", "x");
    a.out = "some/dir";
    const std::string m = render_manifest(a);
    EXPECT_EQ(m.rfind("command = eval\n", 0), 0u);
    RunConfig b;
    b.command = "eval";
    apply_config_text(b, m, "manifest");
    EXPECT_EQ(render_manifest(b), m);
    EXPECT_EQ(b.schedule.beta_end, 0.0123456789);
    EXPECT_EQ(lines(m).size(), config_keys().size() + 1);
}

TEST(CliErrors, ExitCodesByKind) {
    EXPECT_EQ(exit_code(ConfigError("x")), 2);
    EXPECT_EQ(exit_code(ParameterError("x")), 2);
    EXPECT_EQ(exit_code(DataError("x")), 3);
    EXPECT_EQ(exit_code(ShapeError("x")), 3);
    EXPECT_EQ(exit_code(CheckpointError(ErrorKind::checkpoint_corrupt, "x")), 3);
    EXPECT_EQ(exit_code(NumericError("x")), 4);
    EXPECT_EQ(exit_code(TrainingDivergedError(2, "x")), 4);
    EXPECT_EQ(exit_code(std::runtime_error("x")), 1);
    EXPECT_EQ(error_line(DataError("bad \"file\"\nhere")), "error kind=data message=\"bad 'file' here\"");
}

TEST(CliCommands, MissingInputsAreConfigErrors) {
    RunConfig c;
    c.command = "eval";
    c.dataset = "/nonexistent/dir";
    std::ostringstream log;
    EXPECT_THROW(run_command(c, log), ConfigError);
    c.command = "launch";
    EXPECT_THROW(run_command(c, log), ConfigError);
}

TEST(CliCommands, EvalOnPerfectDetector) {
    const auto dir = irfad::testing::scratch_dir("cli_eval");
    const RunConfig cfg = perfect_run(dir, "eval");
    std::ostringstream log;
    run_command(cfg, log);
    const auto rows = lines(slurp(cfg.out / "eval.csv"));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "scorer,image_auroc,image_ap,image_f1_max,pixel_auroc,pixel_ap,pixel_f1_max,pixel_aupro,mad,"
                       "nfe,samples_per_sec");
    EXPECT_EQ(rows[1].rfind("irf-mean,1,1,1,1,1,1,1,1,8,", 0), 0u) << rows[1];
    EXPECT_TRUE(fs::exists(cfg.out / "run_manifest.txt"));
    EXPECT_NE(log.str().find("pixel AU-PRO"), std::string::npos);
}

TEST(CliCommands, ScoreWritesCsvAndMaps) {
    const auto dir = irfad::testing::scratch_dir("cli_score");
    RunConfig cfg = perfect_run(dir, "score");
    cfg.write_maps = true;
    std::ostringstream log;
    run_command(cfg, log);
    const auto rows = lines(slurp(cfg.out / "scores.csv"));
    ASSERT_EQ(rows.size(), 9u);
    EXPECT_EQ(rows[0], "id,label,s,s_diff,s_nll");
    EXPECT_EQ(rows[1], "0,0,0,0,0");
    EXPECT_EQ(slurp(cfg.out / "maps" / "000005.hdr"), "height=2 width=2 dtype=float64 endian=little order=row-major\n");
    const auto map = read_file(cfg.out / "maps" / "000005.f64");
    ASSERT_EQ(map.size(), 32u);
    ByteReader r(map);
    EXPECT_EQ(r.get_f64(), 0.0);
    EXPECT_GT(r.get_f64(), 0.0);

    cfg.scorer.kind = ScorerKind::ddim;
    EXPECT_THROW(run_command(cfg, log), ConfigError);
    cfg.write_maps = false;
    run_command(cfg, log);
    EXPECT_EQ(lines(slurp(cfg.out / "scores.csv"))[0], "id,label,s");
}

TEST(CliCommands, BenchCountsEvaluations) {
    const auto dir = irfad::testing::scratch_dir("cli_bench");
    RunConfig cfg = perfect_run(dir, "bench");
    cfg.bench_repeats = 1;
    cfg.scorer.recon_steps = 10;
    std::ostringstream log;
    run_command(cfg, log);
    const auto rows = lines(slurp(cfg.out / "bench.csv"));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "scorer,auroc,ap,f1_max,nfe,samples_per_sec");
    const auto nfe = [](const std::string& row) {
        std::vector<std::string> f;
        std::istringstream in(row);
        for (std::string s; std::getline(in, s, ',');) f.push_back(s);
        return f.at(4);
    };
    EXPECT_EQ(rows[1].rfind("irf-mean,", 0), 0u);
    EXPECT_EQ(nfe(rows[1]), "8");
    EXPECT_EQ(nfe(rows[2]), "24");
    EXPECT_EQ(nfe(rows[3]), "80");
}

TEST(CliCommands, GenTrainScoreChain) {
    const auto dir = irfad::testing::scratch_dir("cli_chain");
    RunConfig gen;
    gen.command = "gen";
    gen.generator = "blobs";
    gen.blobs.n_train = 16;
    gen.blobs.n_test = 8;
    gen.blobs.dims = {2, 4, 4};
    gen.blobs.mask_height = 8;
    gen.blobs.mask_width = 8;
    gen.out = dir / "data";
    std::ostringstream log;
    run_command(gen, log);

    RunConfig tr;
    tr.command = "train";
    tr.dataset = dir / "data";
    tr.out = dir / "run";
    tr.hidden = {8};
    tr.time_dim = 4;
    tr.train.epochs = 2;
    tr.train.batch_size = 8;
    run_command(tr, log);
    const auto log_rows = lines(slurp(tr.out / "train_log.csv"));
    ASSERT_EQ(log_rows.size(), 3u);
    EXPECT_EQ(log_rows[0], "epoch,mean_loss,seconds");

    RunConfig sc;
    sc.command = "score";
    sc.dataset = dir / "data";
    sc.checkpoint = tr.out / "checkpoint.bin";
    sc.out = dir / "scores";
    sc.schedule.steps = 500;
    EXPECT_THROW(run_command(sc, log), CheckpointError);
    sc.schedule = {};
    run_command(sc, log);
    EXPECT_EQ(lines(slurp(sc.out / "scores.csv")).size(), 9u);
}

TEST(CliCommands, ToyIsDeterministic) {
    const auto dir = irfad::testing::scratch_dir("cli_toy");
    RunConfig cfg;
    cfg.command = "toy";
    cfg.seed = 3;
    cfg.hidden = {8, 8};
    cfg.time_dim = 4;
    cfg.train.epochs = 1;
    cfg.train.batch_size = 1000;
    std::ostringstream log;
    cfg.out = dir / "a";
    run_command(cfg, log);
    cfg.out = dir / "b";
    run_command(cfg, log);
    for (const char* f : {"checkpoint.bin", "trajectories.tsv"}) {
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    const auto traj = lines(slurp(dir / "a" / "trajectories.tsv"));
    EXPECT_EQ(traj.size(), 1 + 2 * 12000u);
    EXPECT_EQ(traj[0], "x0\tdelta_abs\tlabel\tinput_kind");
    const auto eval = lines(slurp(dir / "a" / "eval.csv"));
    ASSERT_EQ(eval.size(), 3u);
    EXPECT_EQ(eval[1].rfind("irf-mean,", 0), 0u);
    EXPECT_EQ(eval[2].rfind("irf-noisy,", 0), 0u);
}
