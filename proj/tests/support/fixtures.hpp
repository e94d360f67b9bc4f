#pragma once

#include "irfad/data.hpp"
#include "irfad/net.hpp"
#include "irfad/schedule.hpp"

#include <filesystem>
#include <string>
#include <unistd.h>

namespace irfad::testing {

/// Fresh, empty directory under the system temp dir, unique per process.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("irfad_test_" + std::to_string(::getpid())) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// eps_theta(x, t)_j = silu(x_j): one hidden layer of width d with identity
/// weights on x and zero weights on the time embedding.
inline NoisePredictor identity_silu_net(std::size_t d, const ScheduleParams& schedule = {}) {
    NetConfig cfg;
    cfg.input_dim = d;
    cfg.hidden = {d};
    cfg.time_dim = 2;
    Tensor w0({d + 2, d}, 0.0), b0({d}, 0.0), w1({d, d}, 0.0), b1({d}, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        w0.at(i, i) = 1.0;
        w1.at(i, i) = 1.0;
    }
    return NoisePredictor(cfg, schedule, 0, {w0, b0, w1, b1});
}

/// Pixel-annotated 1 x 2 x 2 maps with 2 x 2 masks. Normal samples are all
/// zero; abnormal sample k has value 5 at pixel k % 4 and that pixel marked.
/// With identity_silu_net every ranking metric is perfect.
inline DatasetSplits perfect_detector_data() {
    const MapDims dims{1, 2, 2};
    const Provenance prov{"fixture", 0, {}};
    Dataset train(Split::train, dims, std::vector<double>(4 * 4, 0.0), std::vector<Label>(4, Label::normal), prov,
                  MaskSet{2, 2, std::vector<std::uint8_t>(4 * 4, 0)});
    std::vector<double> values(8 * 4, 0.0);
    std::vector<Label> labels(8, Label::normal);
    std::vector<std::uint8_t> masks(8 * 4, 0);
    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t i = 4 + k;
        labels[i] = Label::abnormal;
        values[i * 4 + k] = 5.0;
        masks[i * 4 + k] = 1;
    }
    Dataset test(Split::test, dims, values, labels, prov, MaskSet{2, 2, masks});
    return {std::move(train), std::move(test)};
}

} // namespace irfad::testing
