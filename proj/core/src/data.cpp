#include "irfad/data.hpp"

#include "irfad/binary_io.hpp"
#include "irfad/errors.hpp"
#include "irfad/rng.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace irfad {

Dataset::Dataset(Split split, MapDims dims, std::vector<double> values, std::vector<Label> labels,
                 Provenance provenance, std::optional<MaskSet> masks)
    : m_split(split),
      m_dims(dims),
      m_values(std::move(values)),
      m_labels(std::move(labels)),
      m_provenance(std::move(provenance)),
      m_masks(std::move(masks)) {
    if (m_dims.size() == 0) throw DataError("dataset dims must be positive");
    if (m_values.size() != m_labels.size() * m_dims.size()) {
        throw DataError("dataset has " + std::to_string(m_values.size()) + " values for " +
                        std::to_string(m_labels.size()) + " samples of size " + std::to_string(m_dims.size()));
    }
    for (double v : m_values) {
        if (!std::isfinite(v)) throw DataError("dataset contains non-finite values");
    }
    for (Label l : m_labels) {
        if (l != Label::normal && l != Label::abnormal) throw DataError("invalid label value");
        if (m_split == Split::train && l != Label::normal) throw DataError("train split contains an abnormal sample");
    }
    if (m_masks) {
        const std::size_t area = m_masks->height * m_masks->width;
        if (area == 0) throw DataError("mask dims must be positive");
        if (m_masks->values.size() != area * m_labels.size()) throw DataError("mask count does not match samples");
        for (std::size_t i = 0; i < m_labels.size(); ++i) {
            std::size_t positives = 0;
            for (std::size_t p = 0; p < area; ++p) {
                const std::uint8_t v = m_masks->values[i * area + p];
                if (v > 1) throw DataError("mask values must be 0 or 1");
                positives += v;
            }
            if (m_labels[i] == Label::abnormal && positives == 0) {
                throw DataError("abnormal sample " + std::to_string(i) + " has an empty mask");
            }
        }
    }
}

std::span<const double> Dataset::sample(std::size_t i) const {
    if (i >= size()) throw DataError("sample index out of range");
    return std::span(m_values).subspan(i * sample_dim(), sample_dim());
}

Tensor Dataset::sample_tensor(std::size_t i) const {
    auto s = sample(i);
    return Tensor({m_dims.channels, m_dims.height, m_dims.width}, std::vector<double>(s.begin(), s.end()));
}

Tensor Dataset::batch(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > size()) throw DataError("batch range out of bounds");
    const std::size_t d = sample_dim();
    auto begin = m_values.begin() + static_cast<std::ptrdiff_t>(first * d);
    return Tensor({count, d}, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * d)));
}

std::vector<std::uint8_t> Dataset::label_bytes() const {
    std::vector<std::uint8_t> out(m_labels.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(m_labels[i]);
    return out;
}

std::size_t Dataset::count(Label l) const noexcept {
    std::size_t n = 0;
    for (Label x : m_labels) n += (x == l);
    return n;
}

const MaskSet& Dataset::masks() const {
    if (!m_masks) throw DataError("dataset has no masks");
    return *m_masks;
}

std::span<const std::uint8_t> Dataset::mask(std::size_t i) const {
    const MaskSet& m = masks();
    const std::size_t area = m.height * m.width;
    if (i >= size()) throw DataError("mask index out of range");
    return std::span(m.values).subspan(i * area, area);
}

DatasetSplits gen_toy(std::uint64_t seed) {
    const CounterRng root(seed);
    Provenance prov{"toy", seed, {{"normal", "N(2.5,0.35^2)"}, {"abnormal", "0.5N(1.5,0.2^2)+0.5N(3.5,0.22^2)"}}};

    std::vector<double> train(kToyTrainCount);
    CounterRng train_rng = root.split(1);
    for (double& v : train) v = 2.5 + 0.35 * train_rng.normal();

    std::vector<double> test;
    std::vector<Label> labels;
    test.reserve(2 * kToyTestPerClass);
    CounterRng normal_rng = root.split(2);
    for (std::size_t i = 0; i < kToyTestPerClass; ++i) {
        test.push_back(2.5 + 0.35 * normal_rng.normal());
        labels.push_back(Label::normal);
    }
    CounterRng abnormal_rng = root.split(3);
    for (std::size_t i = 0; i < kToyTestPerClass; ++i) {
        const bool upper = abnormal_rng.uniform() < 0.5;
        const double z = abnormal_rng.normal();
        test.push_back(upper ? 3.5 + 0.22 * z : 1.5 + 0.2 * z);
        labels.push_back(Label::abnormal);
    }
    const MapDims dims{1, 1, 1};
    return DatasetSplits{
        Dataset(Split::train, dims, std::move(train), std::vector<Label>(kToyTrainCount, Label::normal), prov),
        Dataset(Split::test, dims, std::move(test), std::move(labels), prov),
    };
}

std::size_t nearest_feature_index(std::size_t full, std::size_t full_size, std::size_t feature_size) noexcept {
    if (full_size <= 1 || feature_size <= 1) return 0;
    // round(full * (feature_size - 1) / (full_size - 1)), half up, in integers.
    const std::size_t num = 2 * full * (feature_size - 1) + (full_size - 1);
    return num / (2 * (full_size - 1));
}

namespace {

void validate_blobs(const BlobConfig& c) {
    if (c.dims.size() == 0) throw ParameterError("blob dims must be positive");
    if (c.dims.size() > 512) throw ParameterError("blob feature maps are limited to c*h*w <= 512");
    if (c.blob_size == 0 || c.blob_size > c.dims.height || c.blob_size > c.dims.width) {
        throw ParameterError("blob_size must be in [1, min(h, w)]");
    }
    if (c.mask_height < c.dims.height || c.mask_width < c.dims.width) {
        throw ParameterError("mask resolution must be at least the feature resolution");
    }
    if (c.n_train == 0 || c.n_test == 0) throw ParameterError("blob splits must be non-empty");
    if (!(c.abnormal_fraction >= 0.0 && c.abnormal_fraction <= 1.0)) {
        throw ParameterError("abnormal_fraction must lie in [0, 1]");
    }
    if (c.modes == 0 || c.mode_std < 0.0 || c.noise_std < 0.0 || !std::isfinite(c.amplitude)) {
        throw ParameterError("invalid blob field parameters");
    }
}

void fill_field(const BlobConfig& c, CounterRng rng, std::span<double> out) {
    const std::size_t h = c.dims.height, w = c.dims.width;
    for (std::size_t ch = 0; ch < c.dims.channels; ++ch) {
        double* map = out.data() + ch * h * w;
        for (std::size_t p = 0; p < h * w; ++p) map[p] = 0.0;
        for (std::size_t ky = 0; ky < c.modes; ++ky) {
            for (std::size_t kx = 0; kx < c.modes; ++kx) {
                const double coef = c.mode_std * rng.normal();
                for (std::size_t i = 0; i < h; ++i) {
                    const double cy = std::cos(std::numbers::pi * static_cast<double>(ky) * (static_cast<double>(i) + 0.5) /
                                               static_cast<double>(h));
                    for (std::size_t j = 0; j < w; ++j) {
                        const double cx = std::cos(std::numbers::pi * static_cast<double>(kx) *
                                                   (static_cast<double>(j) + 0.5) / static_cast<double>(w));
                        map[i * w + j] += coef * cy * cx;
                    }
                }
            }
        }
        for (std::size_t p = 0; p < h * w; ++p) map[p] += c.noise_std * rng.normal();
    }
}

} // namespace

DatasetSplits gen_blobs(const BlobConfig& c, std::uint64_t seed) {
    validate_blobs(c);
    const CounterRng root(seed);
    const std::size_t d = c.dims.size();
    const std::size_t h = c.dims.height, w = c.dims.width;
    const std::size_t H = c.mask_height, W = c.mask_width;

    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    Provenance prov{"blobs",
                    seed,
                    {{"n_train", std::to_string(c.n_train)},
                     {"n_test", std::to_string(c.n_test)},
                     {"blob_size", std::to_string(c.blob_size)},
                     {"amplitude", fmt(c.amplitude)},
                     {"modes", std::to_string(c.modes)},
                     {"mode_std", fmt(c.mode_std)},
                     {"noise_std", fmt(c.noise_std)},
                     {"abnormal_fraction", fmt(c.abnormal_fraction)}}};

    std::vector<double> train(c.n_train * d);
    const CounterRng train_root = root.split(1);
    for (std::size_t i = 0; i < c.n_train; ++i) {
        fill_field(c, train_root.split(i).split(0), std::span(train).subspan(i * d, d));
    }

    const auto n_abnormal = static_cast<std::size_t>(std::llround(c.abnormal_fraction * static_cast<double>(c.n_test)));
    const std::size_t n_normal = c.n_test - n_abnormal;
    std::vector<double> test(c.n_test * d);
    std::vector<Label> labels(c.n_test, Label::normal);
    MaskSet masks{H, W, std::vector<std::uint8_t>(c.n_test * H * W, 0)};
    const CounterRng test_root = root.split(2);
    for (std::size_t i = 0; i < c.n_test; ++i) {
        auto sample = std::span(test).subspan(i * d, d);
        fill_field(c, test_root.split(i).split(0), sample);
        if (i < n_normal) continue;
        labels[i] = Label::abnormal;
        CounterRng blob = test_root.split(i).split(1);
        const std::size_t row0 = blob.below(h - c.blob_size + 1);
        const std::size_t col0 = blob.below(w - c.blob_size + 1);
        for (std::size_t ch = 0; ch < c.dims.channels; ++ch) {
            const double sign = blob.uniform() < 0.5 ? -1.0 : 1.0;
            for (std::size_t r = row0; r < row0 + c.blob_size; ++r) {
                for (std::size_t q = col0; q < col0 + c.blob_size; ++q) {
                    sample[ch * h * w + r * w + q] += sign * c.amplitude;
                }
            }
        }
        std::uint8_t* mask = &masks.values[i * H * W];
        for (std::size_t y = 0; y < H; ++y) {
            const std::size_t fy = nearest_feature_index(y, H, h);
            if (fy < row0 || fy >= row0 + c.blob_size) continue;
            for (std::size_t x = 0; x < W; ++x) {
                const std::size_t fx = nearest_feature_index(x, W, w);
                if (fx >= col0 && fx < col0 + c.blob_size) mask[y * W + x] = 1;
            }
        }
    }

    MaskSet train_masks{H, W, std::vector<std::uint8_t>(c.n_train * H * W, 0)};
    return DatasetSplits{
        Dataset(Split::train, c.dims, std::move(train), std::vector<Label>(c.n_train, Label::normal), prov,
                std::move(train_masks)),
        Dataset(Split::test, c.dims, std::move(test), std::move(labels), prov, std::move(masks)),
    };
}

namespace {

constexpr int kDatasetFormatVersion = 1;

std::vector<std::uint8_t> encode_values(const std::vector<double>& values) {
    ByteWriter w;
    w.put_f64s(values);
    return w.take();
}

std::vector<std::uint8_t> encode_labels(const Dataset& d) { return d.label_bytes(); }

using Manifest = std::vector<std::pair<std::string, std::string>>;

Manifest parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing dataset manifest " + path.string());
    Manifest kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) throw DataError("malformed manifest line: " + line);
        kv.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    }
    return kv;
}

const std::string* manifest_find(const Manifest& kv, const std::string& key) {
    for (const auto& [k, v] : kv) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::uint64_t manifest_uint(const Manifest& kv, const std::string& key) {
    const std::string* value = manifest_find(kv, key);
    if (!value) throw DataError("manifest is missing '" + key + "'");
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(*value, &pos);
        if (pos != value->size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw DataError("manifest value for '" + key + "' is not an unsigned integer");
    }
}

std::vector<std::uint8_t> read_exact(const std::filesystem::path& path, std::size_t bytes) {
    if (!std::filesystem::exists(path)) throw DataError("missing dataset file " + path.string());
    auto data = read_file(path);
    if (data.size() != bytes) {
        throw DataError(path.string() + " has " + std::to_string(data.size()) + " bytes, expected " +
                        std::to_string(bytes));
    }
    return data;
}

std::vector<double> decode_values(const std::vector<std::uint8_t>& bytes) {
    std::vector<double> out(bytes.size() / 8);
    ByteReader r(bytes);
    r.get_f64s(out);
    return out;
}

std::vector<Label> decode_labels(const std::vector<std::uint8_t>& bytes) {
    std::vector<Label> out;
    out.reserve(bytes.size());
    for (auto b : bytes) {
        if (b > 1) throw DataError("invalid label byte " + std::to_string(b));
        out.push_back(static_cast<Label>(b));
    }
    return out;
}

} // namespace

void save_dataset(const DatasetSplits& data, const std::filesystem::path& dir) {
    const Dataset& train = data.train;
    const Dataset& test = data.test;
    if (!(train.dims() == test.dims())) throw DataError("train and test dims differ");
    if (train.has_masks() != test.has_masks()) throw DataError("masks must be present on both splits or neither");

    std::ostringstream m;
    m << "format = irfad-dataset\n";
    m << "version = " << kDatasetFormatVersion << "\n";
    m << "generator = " << train.provenance().generator << "\n";
    m << "seed = " << train.provenance().seed << "\n";
    m << "channels = " << train.dims().channels << "\n";
    m << "height = " << train.dims().height << "\n";
    m << "width = " << train.dims().width << "\n";
    m << "n_train = " << train.size() << "\n";
    m << "n_test = " << test.size() << "\n";
    m << "pixel_annotated = " << (test.has_masks() ? 1 : 0) << "\n";
    if (test.has_masks()) {
        m << "mask_height = " << test.masks().height << "\n";
        m << "mask_width = " << test.masks().width << "\n";
    }
    for (const auto& [k, v] : train.provenance().params) m << "param." << k << " = " << v << "\n";

    write_file_atomic(dir / "train" / "samples.f64", encode_values(train.values()));
    write_file_atomic(dir / "train" / "labels.u8", encode_labels(train));
    write_file_atomic(dir / "test" / "samples.f64", encode_values(test.values()));
    write_file_atomic(dir / "test" / "labels.u8", encode_labels(test));
    if (test.has_masks()) {
        write_file_atomic(dir / "masks" / "train.u8", train.masks().values);
        write_file_atomic(dir / "masks" / "test.u8", test.masks().values);
    }
    // The manifest goes last: a directory with a manifest is complete.
    write_file_atomic(dir / "manifest", m.str());
}

DatasetSplits load_dataset(const std::filesystem::path& dir) {
    const auto kv = parse_manifest(dir / "manifest");
    const std::string* format = manifest_find(kv, "format");
    if (!format || *format != "irfad-dataset") throw DataError("not an irfad dataset manifest");
    if (manifest_uint(kv, "version") != kDatasetFormatVersion) throw DataError("unsupported dataset format version");

    Provenance prov;
    if (const std::string* g = manifest_find(kv, "generator")) prov.generator = *g;
    prov.seed = manifest_uint(kv, "seed");
    for (const auto& [k, v] : kv) {
        if (k.rfind("param.", 0) == 0) prov.params.emplace_back(k.substr(6), v);
    }

    const MapDims dims{manifest_uint(kv, "channels"), manifest_uint(kv, "height"), manifest_uint(kv, "width")};
    const std::size_t n_train = manifest_uint(kv, "n_train");
    const std::size_t n_test = manifest_uint(kv, "n_test");
    const bool annotated = manifest_uint(kv, "pixel_annotated") != 0;
    const std::size_t d = dims.size();

    auto train_values = decode_values(read_exact(dir / "train" / "samples.f64", 8 * n_train * d));
    auto train_labels = decode_labels(read_exact(dir / "train" / "labels.u8", n_train));
    auto test_values = decode_values(read_exact(dir / "test" / "samples.f64", 8 * n_test * d));
    auto test_labels = decode_labels(read_exact(dir / "test" / "labels.u8", n_test));

    std::optional<MaskSet> train_masks, test_masks;
    if (annotated) {
        const std::size_t H = manifest_uint(kv, "mask_height");
        const std::size_t W = manifest_uint(kv, "mask_width");
        train_masks = MaskSet{H, W, read_exact(dir / "masks" / "train.u8", n_train * H * W)};
        test_masks = MaskSet{H, W, read_exact(dir / "masks" / "test.u8", n_test * H * W)};
    }
    return DatasetSplits{
        Dataset(Split::train, dims, std::move(train_values), std::move(train_labels), prov, std::move(train_masks)),
        Dataset(Split::test, dims, std::move(test_values), std::move(test_labels), prov, std::move(test_masks)),
    };
}

} // namespace irfad
