#pragma once

#include "irfad/grad.hpp"
#include "irfad/schedule.hpp"
#include "irfad/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace irfad {

/// Counts noise-network evaluations, one per sample per call. Owned by the
/// caller's scoring context, never global, so concurrent runs count
/// independently.
class NfeCounter {
public:
    void add(std::size_t n) noexcept { m_count += n; }
    std::size_t count() const noexcept { return m_count; }

private:
    std::size_t m_count = 0;
};

struct NetConfig {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden{128, 128, 128};
    std::size_t time_dim = 32;

    bool operator==(const NetConfig&) const = default;
};

/// Sinusoidal embedding of step t: entries 2i and 2i+1 are sin(t f_i) and
/// cos(t f_i) with f_i = 10000^(-2i/m). Throws ParameterError for odd m or t < 1.
Tensor time_embedding(int t, std::size_t m);

/// The noise function eps_theta(x, t): an MLP over [x, time_embedding(t)]
/// with SiLU hidden layers and a linear head back to the input dimension.
/// Parameters are stored as W0, b0, W1, b1, ..., with W_l of shape
/// [fan_in x fan_out] so a layer is y = x W + b.
class NoisePredictor {
public:
    /// Hidden weights ~ N(0, 2 / fan_in), biases zero, output layer zero.
    static NoisePredictor create(const NetConfig& config, const ScheduleParams& schedule, std::uint64_t seed);

    /// For checkpoint loading; validates parameter shapes against the config.
    NoisePredictor(NetConfig config, ScheduleParams schedule, std::uint64_t seed, std::vector<Tensor> params);

    const NetConfig& config() const noexcept { return m_config; }
    const ScheduleParams& schedule() const noexcept { return m_schedule; }
    std::uint64_t seed() const noexcept { return m_seed; }
    std::size_t input_dim() const noexcept { return m_config.input_dim; }

    const std::vector<Tensor>& parameters() const noexcept { return m_params; }
    std::vector<Tensor>& mutable_parameters() noexcept { return m_params; }
    std::size_t parameter_count() const noexcept;

    /// Single sample; x may have any shape with input_dim entries and the
    /// result has the same shape. Adds 1 to nfe.
    Tensor predict_noise(const Tensor& x, int t, NfeCounter& nfe) const;

    /// Rows of x ([n x d]) evaluated at steps[i], or at steps[0] for every row
    /// when steps has one entry. Adds n to nfe. Row i of the result is bitwise
    /// equal to predict_noise on row i alone.
    Tensor predict_batch(const Tensor& x, std::span<const int> steps, NfeCounter& nfe) const;

    /// Same computation recorded on a tape, with parameter ids equal to their
    /// index in parameters().
    Var forward(Tape& tape, const Tensor& x, std::span<const int> steps) const;

private:
    Tensor assemble_input(const Tensor& x, std::span<const int> steps) const;

    NetConfig m_config;
    ScheduleParams m_schedule;
    std::uint64_t m_seed = 0;
    std::vector<Tensor> m_params;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const NoisePredictor& net, const std::filesystem::path& path);

/// Throws CheckpointError with kind checkpoint_version or checkpoint_corrupt.
NoisePredictor load_checkpoint(const std::filesystem::path& path);

/// As above, and additionally checkpoint_schedule when the stored schedule
/// differs from expected.
NoisePredictor load_checkpoint(const std::filesystem::path& path, const ScheduleParams& expected);

} // namespace irfad
