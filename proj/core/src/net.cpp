#include "irfad/net.hpp"

#include "irfad/binary_io.hpp"
#include "irfad/errors.hpp"
#include "irfad/rng.hpp"
#include "kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace irfad {

namespace {

constexpr char kMagic[8] = {'I', 'R', 'F', 'D', 'C', 'K', 'P', 'T'};

std::vector<Tensor::Shape> parameter_shapes(const NetConfig& c) {
    std::vector<Tensor::Shape> shapes;
    std::size_t fan_in = c.input_dim + c.time_dim;
    for (std::size_t width : c.hidden) {
        shapes.push_back({fan_in, width});
        shapes.push_back({width});
        fan_in = width;
    }
    shapes.push_back({fan_in, c.input_dim});
    shapes.push_back({c.input_dim});
    return shapes;
}

void validate_config(const NetConfig& c) {
    if (c.input_dim == 0) throw ParameterError("net input_dim must be positive");
    if (c.time_dim == 0 || c.time_dim % 2 != 0) throw ParameterError("time embedding dim must be even and positive");
    for (auto w : c.hidden) {
        if (w == 0) throw ParameterError("hidden widths must be positive");
    }
}

} // namespace

Tensor time_embedding(int t, std::size_t m) {
    if (m == 0 || m % 2 != 0) throw ParameterError("time embedding dim must be even, got " + std::to_string(m));
    if (t < 1) throw ParameterError("time embedding needs t >= 1, got " + std::to_string(t));
    Tensor out({m});
    const std::size_t half = m / 2;
    const double log_base = std::log(10000.0);
    for (std::size_t i = 0; i < half; ++i) {
        const double freq = std::exp(-log_base * static_cast<double>(i) / static_cast<double>(half));
        const double arg = static_cast<double>(t) * freq;
        out[2 * i] = std::sin(arg);
        out[2 * i + 1] = std::cos(arg);
    }
    return out;
}

NoisePredictor NoisePredictor::create(const NetConfig& config, const ScheduleParams& schedule, std::uint64_t seed) {
    validate_config(config);
    const auto shapes = parameter_shapes(config);
    std::vector<Tensor> params;
    params.reserve(shapes.size());
    const CounterRng root(seed);
    const std::size_t last_weight = shapes.size() - 2;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        Tensor p(shapes[i], 0.0);
        if (shapes[i].size() == 2 && i != last_weight) {
            CounterRng rng = root.split(i);
            const double stddev = std::sqrt(2.0 / static_cast<double>(shapes[i][0]));
            for (double& v : p.data()) v = stddev * rng.normal();
        }
        params.push_back(std::move(p));
    }
    return NoisePredictor(config, schedule, seed, std::move(params));
}

NoisePredictor::NoisePredictor(NetConfig config, ScheduleParams schedule, std::uint64_t seed, std::vector<Tensor> params)
    : m_config(std::move(config)), m_schedule(schedule), m_seed(seed), m_params(std::move(params)) {
    validate_config(m_config);
    const auto shapes = parameter_shapes(m_config);
    if (shapes.size() != m_params.size()) throw ShapeError("parameter count does not match net config");
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (m_params[i].shape() != shapes[i]) {
            throw ShapeError("parameter " + std::to_string(i) + " has shape " + shape_string(m_params[i].shape()) +
                             ", expected " + shape_string(shapes[i]));
        }
        if (!m_params[i].all_finite()) throw NumericError("parameter " + std::to_string(i) + " is not finite");
    }
}

std::size_t NoisePredictor::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : m_params) n += p.size();
    return n;
}

Tensor NoisePredictor::assemble_input(const Tensor& x, std::span<const int> steps) const {
    if (x.rank() != 2 || x.dim(1) != m_config.input_dim) {
        throw ShapeError("net expects [n x " + std::to_string(m_config.input_dim) + "] input, got " +
                         shape_string(x.shape()));
    }
    const std::size_t n = x.dim(0);
    if (steps.size() != 1 && steps.size() != n) throw ShapeError("need one step per row or a single shared step");
    const std::size_t d = m_config.input_dim, m = m_config.time_dim;
    Tensor in({n, d + m});
    Tensor emb;
    for (std::size_t i = 0; i < n; ++i) {
        const int t = steps.size() == 1 ? steps[0] : steps[i];
        if (t < 1 || t > m_schedule.steps) {
            throw ParameterError("step " + std::to_string(t) + " outside [1, " + std::to_string(m_schedule.steps) + "]");
        }
        if (i == 0 || steps.size() != 1) emb = time_embedding(t, m);
        double* row = &in[i * (d + m)];
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = x[i * d + j];
            if (!std::isfinite(row[j])) throw NumericError("non-finite network input");
        }
        for (std::size_t j = 0; j < m; ++j) row[d + j] = emb[j];
    }
    return in;
}

Tensor NoisePredictor::predict_batch(const Tensor& x, std::span<const int> steps, NfeCounter& nfe) const {
    Tensor act = assemble_input(x, steps);
    const std::size_t n = x.dim(0);
    const std::size_t layers = m_params.size() / 2;
    for (std::size_t l = 0; l < layers; ++l) {
        const Tensor& w = m_params[2 * l];
        const Tensor& b = m_params[2 * l + 1];
        const std::size_t k = w.dim(0), m = w.dim(1);
        Tensor out({n, m});
        kernels::matmul(act.data().data(), w.data().data(), out.data().data(), n, k, m);
        const bool hidden = l + 1 < layers;
        for (std::size_t i = 0; i < n; ++i) {
            double* row = &out[i * m];
            for (std::size_t j = 0; j < m; ++j) {
                row[j] += b[j];
                if (hidden) row[j] = kernels::silu(row[j]);
            }
        }
        act = std::move(out);
    }
    nfe.add(n);
    return act;
}

Tensor NoisePredictor::predict_noise(const Tensor& x, int t, NfeCounter& nfe) const {
    if (x.size() != m_config.input_dim) {
        throw ShapeError("net expects " + std::to_string(m_config.input_dim) + " values, got " +
                         shape_string(x.shape()));
    }
    const int steps[1] = {t};
    Tensor out = predict_batch(x.reshaped({1, m_config.input_dim}), steps, nfe);
    return out.reshaped(x.shape());
}

Var NoisePredictor::forward(Tape& tape, const Tensor& x, std::span<const int> steps) const {
    Var act = tape.constant(assemble_input(x, steps));
    const std::size_t layers = m_params.size() / 2;
    for (std::size_t l = 0; l < layers; ++l) {
        Var w = tape.parameter(2 * l, m_params[2 * l]);
        Var b = tape.parameter(2 * l + 1, m_params[2 * l + 1]);
        act = tape.affine(act, w, b);
        if (l + 1 < layers) act = tape.silu(act);
    }
    return act;
}

void save_checkpoint(const NoisePredictor& net, const std::filesystem::path& path) {
    for (const auto& p : net.parameters()) {
        if (!p.all_finite()) throw NumericError("refusing to save non-finite parameters");
    }
    const NetConfig& c = net.config();
    ByteWriter w;
    w.put_bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), sizeof kMagic));
    w.put_u32(kCheckpointVersion);
    w.put_u32(static_cast<std::uint32_t>(c.input_dim));
    w.put_u32(static_cast<std::uint32_t>(c.time_dim));
    w.put_u32(static_cast<std::uint32_t>(c.hidden.size()));
    for (auto h : c.hidden) w.put_u32(static_cast<std::uint32_t>(h));
    w.put_u32(static_cast<std::uint32_t>(net.schedule().steps));
    w.put_f64(net.schedule().beta_start);
    w.put_f64(net.schedule().beta_end);
    w.put_u64(net.seed());
    w.put_u64(net.parameter_count());
    for (const auto& p : net.parameters()) w.put_f64s(p.data());
    w.put_u64(fnv1a64(w.bytes()));
    write_file_atomic(path, w.bytes());
}

NoisePredictor load_checkpoint(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    auto corrupt = [&](const std::string& why) {
        return CheckpointError(ErrorKind::checkpoint_corrupt, "corrupt checkpoint " + path.string() + ": " + why);
    };
    if (bytes.size() < sizeof kMagic + 4 ||
        !std::equal(std::begin(kMagic), std::end(kMagic), reinterpret_cast<const char*>(bytes.data()))) {
        throw corrupt("bad magic");
    }
    try {
        ByteReader r(bytes);
        r.get_bytes(sizeof kMagic);
        const std::uint32_t version = r.get_u32();
        if (version != kCheckpointVersion) {
            throw CheckpointError(ErrorKind::checkpoint_version, "checkpoint " + path.string() + " has format version " +
                                                                     std::to_string(version) + ", expected " +
                                                                     std::to_string(kCheckpointVersion));
        }
        NetConfig c;
        c.input_dim = r.get_u32();
        c.time_dim = r.get_u32();
        const std::uint32_t n_hidden = r.get_u32();
        if (n_hidden > 64) throw corrupt("implausible layer count");
        c.hidden.clear();
        for (std::uint32_t i = 0; i < n_hidden; ++i) c.hidden.push_back(r.get_u32());
        ScheduleParams s;
        s.steps = static_cast<int>(r.get_u32());
        s.beta_start = r.get_f64();
        s.beta_end = r.get_f64();
        const std::uint64_t seed = r.get_u64();
        const std::uint64_t count = r.get_u64();

        validate_config(c);
        std::vector<Tensor> params;
        std::uint64_t expected = 0;
        for (const auto& shape : parameter_shapes(c)) {
            params.emplace_back(shape);
            expected += params.back().size();
        }
        if (count != expected) throw corrupt("parameter count does not match layer shapes");
        if (r.remaining() != 8 * count + 8) throw corrupt("file size does not match header");
        for (auto& p : params) r.get_f64s(p.data());
        const std::size_t body = r.position();
        const std::uint64_t checksum = r.get_u64();
        if (checksum != fnv1a64(std::span(bytes.data(), body))) throw corrupt("checksum mismatch");
        return NoisePredictor(std::move(c), s, seed, std::move(params));
    } catch (const CheckpointError&) {
        throw;
    } catch (const Error& e) {
        throw corrupt(e.what());
    }
}

NoisePredictor load_checkpoint(const std::filesystem::path& path, const ScheduleParams& expected) {
    NoisePredictor net = load_checkpoint(path);
    if (!(net.schedule() == expected)) {
        const auto& s = net.schedule();
        throw CheckpointError(ErrorKind::checkpoint_schedule,
                              "checkpoint " + path.string() + " was trained with T=" + std::to_string(s.steps) +
                                  " beta=[" + std::to_string(s.beta_start) + ", " + std::to_string(s.beta_end) +
                                  "], config asks for T=" + std::to_string(expected.steps) + " beta=[" +
                                  std::to_string(expected.beta_start) + ", " + std::to_string(expected.beta_end) + "]");
    }
    return net;
}

} // namespace irfad
