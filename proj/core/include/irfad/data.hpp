#pragma once

#include "irfad/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace irfad {

enum class Label : std::uint8_t { normal = 0, abnormal = 1 };

enum class Split { train, test };

/// Per-sample feature map shape (c, h, w). Toy data is (1, 1, 1).
struct MapDims {
    std::size_t channels = 1;
    std::size_t height = 1;
    std::size_t width = 1;

    std::size_t size() const noexcept { return channels * height * width; }
    bool operator==(const MapDims&) const = default;
};

struct Provenance {
    std::string generator;
    std::uint64_t seed = 0;
    /// Generator settings, in a fixed order, as written to the manifest.
    std::vector<std::pair<std::string, std::string>> params;

    bool operator==(const Provenance&) const = default;
};

/// Binary H x W ground-truth masks, one per sample, stored back to back.
struct MaskSet {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> values;

    bool operator==(const MaskSet&) const = default;
};

/// One split of samples with labels and optional pixel masks. Immutable.
/// Construction enforces: train splits are all normal; masks, when present,
/// cover every sample, are 0/1, and mark at least one pixel of every abnormal
/// sample.
class Dataset {
public:
    Dataset(Split split, MapDims dims, std::vector<double> values, std::vector<Label> labels, Provenance provenance,
            std::optional<MaskSet> masks = std::nullopt);

    Split split() const noexcept { return m_split; }
    const MapDims& dims() const noexcept { return m_dims; }
    std::size_t size() const noexcept { return m_labels.size(); }
    std::size_t sample_dim() const noexcept { return m_dims.size(); }

    std::span<const double> sample(std::size_t i) const;
    /// Sample i shaped (c, h, w).
    Tensor sample_tensor(std::size_t i) const;
    /// Rows [first, first + count) as an [count x d] matrix.
    Tensor batch(std::size_t first, std::size_t count) const;

    Label label(std::size_t i) const { return m_labels.at(i); }
    const std::vector<Label>& labels() const noexcept { return m_labels; }
    /// Labels as 0/1 bytes, the form the metrics take.
    std::vector<std::uint8_t> label_bytes() const;
    std::size_t count(Label l) const noexcept;

    bool has_masks() const noexcept { return m_masks.has_value(); }
    const MaskSet& masks() const;
    std::span<const std::uint8_t> mask(std::size_t i) const;

    const std::vector<double>& values() const noexcept { return m_values; }
    const Provenance& provenance() const noexcept { return m_provenance; }

    bool operator==(const Dataset&) const = default;

private:
    Split m_split;
    MapDims m_dims;
    std::vector<double> m_values;
    std::vector<Label> m_labels;
    Provenance m_provenance;
    std::optional<MaskSet> m_masks;
};

struct DatasetSplits {
    Dataset train;
    Dataset test;
};

/// One-dimensional toy data: train = 10,000 draws from N(2.5, 0.35^2); test =
/// 6,000 of those followed by 6,000 draws from
/// 0.5 N(1.5, 0.2^2) + 0.5 N(3.5, 0.22^2), the component chosen by a fair coin.
DatasetSplits gen_toy(std::uint64_t seed);

inline constexpr std::size_t kToyTrainCount = 10000;
inline constexpr std::size_t kToyTestPerClass = 6000;

/// Synthetic multi-channel feature maps with planted anomalies.
///
/// Normal maps: each channel is sum_{ky,kx < modes} a * cos(pi kx (j + 0.5) / w)
/// cos(pi ky (i + 0.5) / h) with a ~ N(0, mode_std^2), plus white noise
/// N(0, noise_std^2) per entry. Abnormal maps add a blob_size x blob_size
/// square at a uniform position, amplitude * (+/-1) per channel with random
/// signs. Masks are at (mask_height, mask_width); a mask pixel is set when its
/// corner-aligned nearest feature cell lies inside the square. The first
/// n_test - n_test * abnormal_fraction test samples are normal.
///
/// The field of sample i draws from its own substream and the blob from a
/// separate one, so changing the amplitude leaves every field untouched.
struct BlobConfig {
    std::size_t n_train = 1000;
    std::size_t n_test = 1000;
    MapDims dims{4, 8, 8};
    std::size_t mask_height = 32;
    std::size_t mask_width = 32;
    std::size_t blob_size = 2;
    double amplitude = 1.0;
    std::size_t modes = 2;
    double mode_std = 1.0;
    double noise_std = 0.1;
    double abnormal_fraction = 0.5;
};

DatasetSplits gen_blobs(const BlobConfig& config, std::uint64_t seed);

/// Feature-cell index nearest to full-resolution index `full` when `feature`
/// cells are stretched corner-to-corner over `full_size` pixels.
std::size_t nearest_feature_index(std::size_t full, std::size_t full_size, std::size_t feature_size) noexcept;

/// Writes a dataset directory:
///   manifest              plain-text key = value lines
///   train/samples.f64     n_train * d little-endian doubles
///   train/labels.u8       n_train bytes (0 normal, 1 abnormal)
///   test/samples.f64, test/labels.u8
///   masks/train.u8        n_train * H * W bytes (all zero), present iff pixel-annotated
///   masks/test.u8         n_test * H * W bytes, present iff pixel-annotated
void save_dataset(const DatasetSplits& data, const std::filesystem::path& dir);

/// Throws DataError on a missing, truncated, or inconsistent file.
DatasetSplits load_dataset(const std::filesystem::path& dir);

} // namespace irfad
