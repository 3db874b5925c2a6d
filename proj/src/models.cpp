#include "foilforge/models.hpp"

#include "foilforge/binio.hpp"
#include "foilforge/error.hpp"
#include "foilforge/rng.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace foilforge::models {

using dataset::Dataset;
using dataset::Direction;
using dataset::Sample;
using dataset::SplitTag;
using nn::LayerKind;
using nn::LayerSpec;

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::dnn ? "dnn" : "cnn";
}

ModelKind parse_model_kind(std::string_view tag) {
    if (tag == "dnn") {
        return ModelKind::dnn;
    }
    if (tag == "cnn") {
        return ModelKind::cnn;
    }
    fail(ErrorCode::InvalidArgument, fmt::format("unknown model kind '{}' (expected dnn or cnn)", tag));
}

ModelSpec build_dnn(const CaseSpec& spec, std::span<const std::size_t> hidden) {
    std::vector<LayerSpec> layers;
    std::size_t width = dataset::dnn_input_width(spec);
    for (std::size_t h : hidden) {
        layers.push_back(LayerSpec::dense(width, h));
        layers.push_back(LayerSpec::relu());
        width = h;
    }
    layers.push_back(LayerSpec::dense(width, kOutputWidth));
    return {ModelKind::dnn, spec, nn::Network({dataset::dnn_input_width(spec)}, 0, std::move(layers))};
}

ModelSpec build_cnn(const CaseSpec& spec, const CnnLayout& layout) {
    std::vector<LayerSpec> layers;
    std::size_t channels = 1;
    std::size_t extent = layout.image;
    for (std::size_t c : layout.channels) {
        layers.push_back(LayerSpec::conv2d(channels, c, extent, extent));
        layers.push_back(LayerSpec::relu());
        extent -= 2;
        layers.push_back(LayerSpec::maxpool2d(c, extent, extent));
        extent /= 2;
        channels = c;
    }
    layers.push_back(LayerSpec::flatten());
    const std::size_t scalars = dataset::scalar_count(spec);
    layers.push_back(LayerSpec::concat_scalars(scalars));
    std::size_t width = channels * extent * extent + scalars;
    for (std::size_t h : layout.head) {
        layers.push_back(LayerSpec::dense(width, h));
        layers.push_back(LayerSpec::relu());
        width = h;
    }
    layers.push_back(LayerSpec::dense(width, layout.output));
    return {ModelKind::cnn, spec, nn::Network({1, layout.image, layout.image}, scalars, std::move(layers))};
}

void validate(const TrainConfig& config) {
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
        fail(ErrorCode::InvalidArgument, fmt::format("learning rate must be positive, got {:g}", config.learning_rate));
    }
    if (config.batch_size < 1 || config.batch_size > UINT32_MAX) {
        fail(ErrorCode::InvalidArgument, "batch size must be at least 1");
    }
    if (config.epochs < 1 || config.epochs > UINT32_MAX) {
        fail(ErrorCode::InvalidArgument, "epochs must be at least 1");
    }
}

Checkpoint initial_checkpoint(const ModelSpec& model, std::uint64_t seed) {
    Checkpoint c;
    c.model = model;
    c.params = nn::init_params(model.network, seed);
    c.seed = seed;
    c.config.seed = seed;
    return c;
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

// Row-major encoded rows for a fixed sample list.
struct EncodedSet {
    std::size_t count = 0;
    std::size_t input_size = 0;
    std::size_t scalar_size = 0;
    std::vector<double> inputs;
    std::vector<double> scalars;
    std::vector<double> targets;
};

EncodedSet encode_set(const ModelSpec& model, std::span<const Sample* const> samples) {
    EncodedSet set;
    set.count = samples.size();
    set.input_size = nn::element_count(model.network.input_shape());
    set.scalar_size = model.network.scalar_inputs();
    set.inputs.reserve(set.count * set.input_size);
    set.scalars.reserve(set.count * set.scalar_size);
    set.targets.reserve(set.count * kOutputWidth);
    const auto mode = model.kind == ModelKind::dnn ? dataset::EncodeMode::dnn : dataset::EncodeMode::cnn;
    for (const Sample* s : samples) {
        const auto pair = dataset::encode(*s, model.case_spec, mode);
        if (mode == dataset::EncodeMode::dnn) {
            set.inputs.insert(set.inputs.end(), pair.input.begin(), pair.input.end());
        } else {
            for (std::uint8_t px : pair.image) {
                set.inputs.push_back(px / 255.0);
            }
            set.scalars.insert(set.scalars.end(), pair.scalars.begin(), pair.scalars.end());
        }
        set.targets.insert(set.targets.end(), pair.target.begin(), pair.target.end());
    }
    if (set.inputs.size() != set.count * set.input_size || set.scalars.size() != set.count * set.scalar_size) {
        fail(ErrorCode::ShapeMismatch, "encoded sample width does not match the network input");
    }
    return set;
}

nn::Shape with_batch(std::size_t n, const nn::Shape& shape) {
    nn::Shape dims{n};
    dims.insert(dims.end(), shape.begin(), shape.end());
    return dims;
}

// Gathers rows `rows` of an encoded set into a network batch plus target tensor.
std::pair<nn::Batch, nn::Tensor> gather(const ModelSpec& model, const EncodedSet& set,
                                        std::span<const std::size_t> rows) {
    const std::size_t n = rows.size();
    nn::Batch b;
    b.input = nn::Tensor(with_batch(n, model.network.input_shape()));
    if (set.scalar_size) {
        b.scalars = nn::Tensor({n, set.scalar_size});
    }
    const std::size_t out_width = model.network.output_shape()[0];
    nn::Tensor target({n, out_width});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = rows[i];
        std::copy_n(set.inputs.data() + r * set.input_size, set.input_size, b.input.data.data() + i * set.input_size);
        std::copy_n(set.scalars.data() + r * set.scalar_size, set.scalar_size, b.scalars.data.data() + i * set.scalar_size);
        std::copy_n(set.targets.data() + r * kOutputWidth, std::min(out_width, kOutputWidth),
                    target.data.data() + i * out_width);
    }
    return {std::move(b), std::move(target)};
}

constexpr std::size_t kEvalChunk = 32;

// Mean squared error over every element of the set.
double set_mse(const ModelSpec& model, const nn::Parameters& params, const EncodedSet& set, unsigned threads) {
    if (set.count == 0) {
        return 0.0;
    }
    double sum = 0.0;
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < set.count; start += kEvalChunk) {
        rows.resize(std::min(kEvalChunk, set.count - start));
        std::iota(rows.begin(), rows.end(), start);
        auto [batch, target] = gather(model, set, rows);
        const auto out = nn::forward(model.network, params, batch, nullptr, {threads});
        sum += nn::mse(out, target).value * static_cast<double>(out.size());
    }
    return sum / static_cast<double>(set.count * model.network.output_shape()[0]);
}

std::vector<const Sample*> pointers(const Dataset& data, SplitTag tag) {
    std::vector<const Sample*> out;
    for (std::size_t i : data.indices(tag)) {
        out.push_back(&data.samples[i]);
    }
    return out;
}

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch) {
    return splitmix64(seed ^ splitmix64(0x5EED0000ULL + epoch));
}

} // namespace

nn::Batch encode_batch(const ModelSpec& model, std::span<const Sample* const> samples) {
    const EncodedSet set = encode_set(model, samples);
    std::vector<std::size_t> rows(set.count);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return gather(model, set, rows).first;
}

// ---------------------------------------------------------------------------
// Training

TrainResult train(const ModelSpec& model, const Dataset& data, const TrainConfig& config, const EpochCallback& on_epoch) {
    validate(config);
    if (!(data.case_spec == model.case_spec)) {
        fail(ErrorCode::CaseMismatch, fmt::format("dataset is case {} but the model is built for {}",
                                                  dataset::case_tag(data.case_spec.id), dataset::case_tag(model.case_spec.id)));
    }
    const auto train_samples = pointers(data, SplitTag::train);
    if (train_samples.empty()) {
        fail(ErrorCode::EmptyTrainSplit, "dataset has no training samples (run a split first)");
    }
    const EncodedSet train_set = encode_set(model, train_samples);
    const EncodedSet test_set = encode_set(model, pointers(data, SplitTag::test));

    TrainResult result;
    result.checkpoint = initial_checkpoint(model, config.seed);
    result.checkpoint.config = config;
    nn::Parameters& params = result.checkpoint.params;
    const nn::ComputeOptions compute{config.threads};

    result.initial_train_loss = set_mse(model, params, train_set, config.threads);
    nn::AdamState adam = nn::adam_init(model.network);
    std::vector<std::size_t> order(train_set.count);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(epoch_seed(config.seed, epoch));
        rng.shuffle(order);

        EpochRecord rec;
        try {
            double weighted = 0.0;
            for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
                const std::size_t n = std::min(config.batch_size, order.size() - start);
                auto [batch, target] = gather(model, train_set, std::span(order).subspan(start, n));
                nn::Cache cache;
                const auto out = nn::forward(model.network, params, batch, &cache, compute);
                const auto loss = nn::mse(out, target);
                if (!std::isfinite(loss.value)) {
                    fail(ErrorCode::NumericalDivergence, "non-finite training loss");
                }
                const auto grads = nn::backward(model.network, params, cache, loss.gradient, false, compute);
                nn::adam_step(params, grads.params, adam, config.learning_rate);
                weighted += loss.value * static_cast<double>(n);
            }
            rec.train_loss = weighted / static_cast<double>(order.size());
            rec.test_loss = set_mse(model, params, test_set, config.threads);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NumericalDivergence) {
                fail(ErrorCode::NumericalDivergence, fmt::format("training diverged in epoch {}: {}", epoch + 1, e.what()));
            }
            throw;
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.history.push_back(rec);
        if (on_epoch) {
            on_epoch(epoch, rec);
        }
    }
    result.checkpoint.train_loss = result.history.back().train_loss;
    result.checkpoint.test_loss = result.history.back().test_loss;
    return result;
}

// ---------------------------------------------------------------------------
// Prediction

std::vector<std::vector<double>> predict_raw(const Checkpoint& ckpt, std::span<const Sample* const> samples,
                                             unsigned threads) {
    const ModelSpec& model = ckpt.model;
    const EncodedSet set = encode_set(model, samples);
    const std::size_t width = model.network.output_shape()[0];
    std::vector<std::vector<double>> out;
    out.reserve(set.count);
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < set.count; start += kEvalChunk) {
        rows.resize(std::min(kEvalChunk, set.count - start));
        std::iota(rows.begin(), rows.end(), start);
        const auto batch = gather(model, set, rows).first;
        const auto y = nn::forward(model.network, ckpt.params, batch, nullptr, {threads});
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out.emplace_back(y.data.begin() + static_cast<std::ptrdiff_t>(i * width),
                             y.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
        }
    }
    return out;
}

geometry::Airfoil unpack_shape(std::span<const double> output, std::string name) {
    if (output.size() != 2 * geometry::kNodes) {
        fail(ErrorCode::ShapeMismatch, fmt::format("expected {} outputs, got {}", 2 * geometry::kNodes, output.size()));
    }
    geometry::Airfoil a;
    a.name = std::move(name);
    for (std::size_t i = 0; i < geometry::kNodes; ++i) {
        a.points[i] = {output[i], output[geometry::kNodes + i]};
    }
    return a;
}

panelflow::CpDistribution unpack_cp(std::span<const double> output, const panelflow::FlowCondition& condition) {
    if (output.size() != 2 * geometry::kStations) {
        fail(ErrorCode::ShapeMismatch, fmt::format("expected {} outputs, got {}", 2 * geometry::kStations, output.size()));
    }
    panelflow::CpDistribution cp;
    cp.condition = condition;
    std::copy_n(output.begin(), geometry::kStations, cp.cp_suction.begin());
    std::copy_n(output.begin() + geometry::kStations, geometry::kStations, cp.cp_pressure.begin());
    cp.cl = panelflow::pressure_jump_cl(cp);
    return cp;
}

geometry::Airfoil predict_shape(const Checkpoint& ckpt, const panelflow::CpDistribution& cp,
                                const panelflow::FlowCondition& condition) {
    if (ckpt.model.case_spec.direction != Direction::cp_to_shape) {
        fail(ErrorCode::CaseMismatch, fmt::format("case {} predicts Cp, not shapes", dataset::case_tag(ckpt.model.case_spec.id)));
    }
    Sample s;
    s.cp = cp;
    s.condition = condition;
    const Sample* ptr = &s;
    const auto out = predict_raw(ckpt, std::span(&ptr, 1));
    return unpack_shape(out.front(), "predicted");
}

panelflow::CpDistribution predict_cp(const Checkpoint& ckpt, const geometry::Airfoil& airfoil,
                                     const panelflow::FlowCondition& condition) {
    if (ckpt.model.case_spec.direction != Direction::shape_to_cp) {
        fail(ErrorCode::CaseMismatch, fmt::format("case {} predicts shapes, not Cp", dataset::case_tag(ckpt.model.case_spec.id)));
    }
    Sample s;
    s.airfoil = airfoil;
    s.condition = condition;
    const Sample* ptr = &s;
    const auto out = predict_raw(ckpt, std::span(&ptr, 1));
    return unpack_cp(out.front(), condition);
}

// ---------------------------------------------------------------------------
// Checkpoint files

namespace {

constexpr std::string_view kMagic = "AFNC";

// Input shape and scalar count implied by a layer table.
nn::Network network_from_table(const std::vector<LayerSpec>& layers) {
    if (layers.empty()) {
        fail(ErrorCode::SpecMismatch, "empty layer table");
    }
    nn::Shape input;
    const LayerSpec& first = layers.front();
    if (first.kind == LayerKind::dense) {
        input = {first.in};
    } else if (first.kind == LayerKind::conv2d) {
        input = {first.in, first.height, first.width};
    } else {
        fail(ErrorCode::SpecMismatch, fmt::format("layer table starts with {}", nn::to_string(first.kind)));
    }
    std::size_t scalars = 0;
    for (const auto& l : layers) {
        if (l.kind == LayerKind::concat_scalars) {
            scalars = l.scalars;
        }
    }
    try {
        return nn::Network(input, scalars, layers);
    } catch (const Error& e) {
        fail(ErrorCode::SpecMismatch, fmt::format("inconsistent layer table: {}", e.what()));
    }
}

void write_values(binio::Writer& w, const std::vector<double>& values) {
    for (double v : values) {
        w.f64(v);
    }
}

} // namespace

std::vector<std::uint8_t> serialize(const Checkpoint& ckpt) {
    binio::Writer w;
    w.raw(kMagic);
    w.u32(kCheckpointVersion);
    w.u8(static_cast<std::uint8_t>(ckpt.model.kind));
    w.u8(static_cast<std::uint8_t>(ckpt.model.case_spec.id));
    const auto& layers = ckpt.model.network.layers();
    w.u16(static_cast<std::uint16_t>(layers.size()));
    for (const auto& l : layers) {
        w.u8(static_cast<std::uint8_t>(l.kind));
        for (std::uint32_t e : l.extents()) {
            w.u32(e);
        }
    }
    w.u64(ckpt.seed);
    w.f64(ckpt.config.learning_rate);
    w.u32(static_cast<std::uint32_t>(ckpt.config.batch_size));
    w.u32(static_cast<std::uint32_t>(ckpt.config.epochs));
    w.f64(ckpt.train_loss);
    w.f64(ckpt.test_loss);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        write_values(w, ckpt.params.weights[i]);
        write_values(w, ckpt.params.biases[i]);
    }
    w.seal();
    return w.bytes();
}

Checkpoint deserialize(std::span<const std::uint8_t> bytes) {
    binio::Reader r(bytes);
    if (bytes.size() < kMagic.size() || r.raw(kMagic.size()) != kMagic) {
        fail(ErrorCode::BadMagic, "not a checkpoint file (magic AFNC expected)");
    }
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        fail(ErrorCode::VersionMismatch, fmt::format("checkpoint version {} (supported: {})", version, kCheckpointVersion));
    }
    const std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(ModelKind::cnn)) {
        fail(ErrorCode::SpecMismatch, fmt::format("unknown model kind tag {}", kind));
    }
    const std::uint8_t case_tag = r.u8();
    if (case_tag > static_cast<std::uint8_t>(dataset::CaseId::c5)) {
        fail(ErrorCode::SpecMismatch, fmt::format("unknown case tag {}", case_tag));
    }
    const std::uint16_t layer_count = r.u16();
    std::vector<LayerSpec> layers;
    for (std::uint16_t i = 0; i < layer_count; ++i) {
        const std::uint8_t k = r.u8();
        if (k > static_cast<std::uint8_t>(LayerKind::concat_scalars)) {
            fail(ErrorCode::SpecMismatch, fmt::format("layer {}: unknown kind tag {}", i, k));
        }
        const auto lk = static_cast<LayerKind>(k);
        std::vector<std::uint32_t> extents(LayerSpec::extent_count(lk));
        for (auto& e : extents) {
            e = r.u32();
        }
        layers.push_back(LayerSpec::from_extents(lk, extents));
    }

    Checkpoint c;
    c.model.kind = static_cast<ModelKind>(kind);
    c.model.case_spec = dataset::case_spec(static_cast<dataset::CaseId>(case_tag));
    c.model.network = network_from_table(layers);
    const auto& net = c.model.network;
    const bool dnn_ok = c.model.kind == ModelKind::dnn && net.scalar_inputs() == 0 &&
                        net.input_shape() == nn::Shape{dataset::dnn_input_width(c.model.case_spec)};
    const bool cnn_ok = c.model.kind == ModelKind::cnn && net.input_shape().size() == 3 &&
                        net.scalar_inputs() == dataset::scalar_count(c.model.case_spec);
    if (!dnn_ok && !cnn_ok) {
        fail(ErrorCode::SpecMismatch, fmt::format("layer table does not fit a {} model for case {}", to_string(c.model.kind),
                                                  dataset::case_tag(c.model.case_spec.id)));
    }

    c.seed = r.u64();
    c.config.seed = c.seed;
    c.config.learning_rate = r.f64();
    c.config.batch_size = r.u32();
    c.config.epochs = r.u32();
    c.train_loss = r.f64();
    c.test_loss = r.f64();

    const std::size_t expected = net.parameter_count() * 8;
    if (r.remaining() < expected + 4) {
        fail(ErrorCode::TruncatedFile, fmt::format("parameter block needs {} bytes, {} remain", expected + 4, r.remaining()));
    }
    if (r.remaining() > expected + 4) {
        fail(ErrorCode::SpecMismatch,
             fmt::format("layer table implies {} parameter bytes but the file holds {}", expected, r.remaining() - 4));
    }
    c.params = nn::zero_parameters(net);
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        for (double& v : c.params.weights[i]) {
            v = r.f64();
        }
        for (double& v : c.params.biases[i]) {
            v = r.f64();
        }
    }
    r.verify_seal();
    return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    binio::write_file_atomic(path, serialize(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
    return deserialize(binio::read_file(path));
}

} // namespace foilforge::models
