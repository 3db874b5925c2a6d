#include "foilforge/neuralcore.hpp"

#include "foilforge/error.hpp"
#include "foilforge/parallel.hpp"
#include "foilforge/rng.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace foilforge::nn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;

std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
    std::string out = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        out += (i ? ", " : "") + std::to_string(shape[i]);
    }
    return out + ")";
}

Tensor::Tensor(Shape shape, double fill) : dims(std::move(shape)), data(element_count(dims), fill) {}

std::string_view to_string(LayerKind kind) {
    switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::relu: return "relu";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool2d: return "maxpool2d";
    case LayerKind::flatten: return "flatten";
    case LayerKind::concat_scalars: return "concat_scalars";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// LayerSpec

namespace {
std::uint32_t u32(std::size_t v) {
    return static_cast<std::uint32_t>(v);
}
} // namespace

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out) {
    return {LayerKind::dense, u32(in), u32(out), 0, 0, 0};
}
LayerSpec LayerSpec::relu() {
    return {LayerKind::relu, 0, 0, 0, 0, 0};
}
LayerSpec LayerSpec::conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t height, std::size_t width) {
    return {LayerKind::conv2d, u32(in_channels), u32(out_channels), u32(height), u32(width), 0};
}
LayerSpec LayerSpec::maxpool2d(std::size_t channels, std::size_t height, std::size_t width) {
    return {LayerKind::maxpool2d, u32(channels), 0, u32(height), u32(width), 0};
}
LayerSpec LayerSpec::flatten() {
    return {LayerKind::flatten, 0, 0, 0, 0, 0};
}
LayerSpec LayerSpec::concat_scalars(std::size_t count) {
    return {LayerKind::concat_scalars, 0, 0, 0, 0, u32(count)};
}

std::size_t LayerSpec::weight_count() const {
    switch (kind) {
    case LayerKind::dense: return std::size_t{in} * out;
    case LayerKind::conv2d: return std::size_t{in} * out * 9;
    default: return 0;
    }
}

std::size_t LayerSpec::bias_count() const {
    return has_parameters() ? out : 0;
}

std::size_t LayerSpec::extent_count(LayerKind kind) {
    switch (kind) {
    case LayerKind::dense: return 2;
    case LayerKind::conv2d: return 4;
    case LayerKind::maxpool2d: return 3;
    case LayerKind::concat_scalars: return 1;
    case LayerKind::relu:
    case LayerKind::flatten: return 0;
    }
    fail(ErrorCode::SpecMismatch, fmt::format("unknown layer kind {}", static_cast<int>(kind)));
}

std::vector<std::uint32_t> LayerSpec::extents() const {
    switch (kind) {
    case LayerKind::dense: return {in, out};
    case LayerKind::conv2d: return {in, out, height, width};
    case LayerKind::maxpool2d: return {in, height, width};
    case LayerKind::concat_scalars: return {scalars};
    default: return {};
    }
}

LayerSpec LayerSpec::from_extents(LayerKind kind, std::span<const std::uint32_t> e) {
    if (e.size() != extent_count(kind)) {
        fail(ErrorCode::SpecMismatch, fmt::format("{} expects {} extents, got {}", to_string(kind), extent_count(kind), e.size()));
    }
    switch (kind) {
    case LayerKind::dense: return dense(e[0], e[1]);
    case LayerKind::conv2d: return conv2d(e[0], e[1], e[2], e[3]);
    case LayerKind::maxpool2d: return maxpool2d(e[0], e[1], e[2]);
    case LayerKind::concat_scalars: return concat_scalars(e[0]);
    case LayerKind::relu: return relu();
    case LayerKind::flatten: return flatten();
    }
    fail(ErrorCode::SpecMismatch, "unknown layer kind");
}

// ---------------------------------------------------------------------------
// Network

Network::Network(Shape input_shape, std::size_t scalar_inputs, std::vector<LayerSpec> layers)
    : layers_(std::move(layers)), scalar_inputs_(scalar_inputs) {
    shapes_.assign(1, std::move(input_shape));
    bool scalars_consumed = false;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const LayerSpec& l = layers_[i];
        const Shape& s = shapes_.back();
        auto mismatch = [&](const std::string& why) {
            fail(ErrorCode::ShapeMismatch,
                 fmt::format("layer {} ({}) on input {}: {}", i, to_string(l.kind), nn::to_string(s), why));
        };
        Shape next;
        switch (l.kind) {
        case LayerKind::dense:
            if (s.size() != 1 || s[0] != l.in || l.out == 0) {
                mismatch(fmt::format("expects a flat input of width {}", l.in));
            }
            next = {l.out};
            break;
        case LayerKind::relu:
            next = s;
            break;
        case LayerKind::conv2d:
            if (s.size() != 3 || s[0] != l.in || s[1] != l.height || s[2] != l.width || l.height < 3 || l.width < 3 ||
                l.out == 0) {
                mismatch(fmt::format("expects ({}, {}, {})", l.in, l.height, l.width));
            }
            next = {l.out, std::size_t{l.height} - 2, std::size_t{l.width} - 2};
            break;
        case LayerKind::maxpool2d:
            if (s.size() != 3 || s[0] != l.in || s[1] != l.height || s[2] != l.width || l.height < 2 || l.width < 2) {
                mismatch(fmt::format("expects ({}, {}, {})", l.in, l.height, l.width));
            }
            next = {l.in, std::size_t{l.height} / 2, std::size_t{l.width} / 2};
            break;
        case LayerKind::flatten:
            next = {element_count(s)};
            break;
        case LayerKind::concat_scalars:
            if (s.size() != 1 || l.scalars != scalar_inputs_ || scalars_consumed) {
                mismatch(fmt::format("expects a flat input and {} scalar inputs", l.scalars));
            }
            scalars_consumed = true;
            next = {s[0] + l.scalars};
            break;
        }
        shapes_.push_back(std::move(next));
    }
    if (scalar_inputs_ > 0 && !scalars_consumed) {
        fail(ErrorCode::ShapeMismatch, fmt::format("{} scalar inputs declared but no concat_scalars layer", scalar_inputs_));
    }
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) {
        n += l.weight_count() + l.bias_count();
    }
    return n;
}

bool Network::feeds_relu(std::size_t i) const {
    return i + 1 < layers_.size() && layers_[i + 1].kind == LayerKind::relu;
}

std::size_t Parameters::count() const {
    std::size_t n = 0;
    for (const auto& w : weights) {
        n += w.size();
    }
    for (const auto& b : biases) {
        n += b.size();
    }
    return n;
}

Parameters zero_parameters(const Network& net) {
    Parameters p;
    for (const auto& l : net.layers()) {
        p.weights.emplace_back(l.weight_count(), 0.0);
        p.biases.emplace_back(l.bias_count(), 0.0);
    }
    return p;
}

Parameters init_params(const Network& net, std::uint64_t seed) {
    Parameters p = zero_parameters(net);
    Rng rng(seed);
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const LayerSpec& l = net.layers()[i];
        if (!l.has_parameters()) {
            continue;
        }
        const double receptive = l.kind == LayerKind::conv2d ? 9.0 : 1.0;
        const double fan_in = l.in * receptive;
        const double fan_out = l.out * receptive;
        const double stddev = net.feeds_relu(i) ? std::sqrt(2.0 / fan_in) : std::sqrt(2.0 / (fan_in + fan_out));
        for (double& w : p.weights[i]) {
            w = stddev * rng.normal();
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Layer kernels

namespace {

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            fail(ErrorCode::NumericalDivergence, fmt::format("non-finite value in {}", what));
        }
    }
}

// cols[(c*9 + ky*3 + kx), (y*wo + x)] = in[c, y+ky, x+kx]
void im2col(const double* in, std::size_t channels, std::size_t h, std::size_t w, double* cols) {
    const std::size_t ho = h - 2;
    const std::size_t wo = w - 2;
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
                double* row = cols + ((c * 9 + ky * 3 + kx) * ho * wo);
                for (std::size_t y = 0; y < ho; ++y) {
                    const double* src = in + (c * h + y + ky) * w + kx;
                    std::copy(src, src + wo, row + y * wo);
                }
            }
        }
    }
}

void col2im(const double* cols, std::size_t channels, std::size_t h, std::size_t w, double* out) {
    const std::size_t ho = h - 2;
    const std::size_t wo = w - 2;
    std::fill(out, out + channels * h * w, 0.0);
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
                const double* row = cols + ((c * 9 + ky * 3 + kx) * ho * wo);
                for (std::size_t y = 0; y < ho; ++y) {
                    double* dst = out + (c * h + y + ky) * w + kx;
                    const double* src = row + y * wo;
                    for (std::size_t x = 0; x < wo; ++x) {
                        dst[x] += src[x];
                    }
                }
            }
        }
    }
}

Tensor dense_forward(const LayerSpec& l, const std::vector<double>& w, const std::vector<double>& b, const Tensor& x) {
    const auto batch = static_cast<Eigen::Index>(x.batch());
    Tensor y({x.batch(), l.out});
    ConstMatMap X(x.data.data(), batch, l.in);
    ConstMatMap W(w.data(), l.out, l.in);
    MatMap Y(y.data.data(), batch, l.out);
    Y.noalias() = X * W.transpose();
    Eigen::Map<const Eigen::RowVectorXd> B(b.data(), l.out);
    Y.rowwise() += B;
    return y;
}

Tensor conv_forward(const LayerSpec& l, const std::vector<double>& w, const std::vector<double>& b, const Tensor& x,
                    const ComputeOptions& options) {
    const std::size_t ho = l.height - 2;
    const std::size_t wo = l.width - 2;
    const std::size_t k = std::size_t{l.in} * 9;
    const std::size_t p = ho * wo;
    Tensor y({x.batch(), l.out, ho, wo});
    ConstMatMap W(w.data(), l.out, static_cast<Eigen::Index>(k));
    Eigen::Map<const Eigen::VectorXd> B(b.data(), l.out);
    parallel_for(x.batch(), options.threads, [&](std::size_t s) {
        std::vector<double> cols(k * p);
        im2col(x.sample(s).data(), l.in, l.height, l.width, cols.data());
        ConstMatMap C(cols.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p));
        MatMap Y(y.sample(s).data(), l.out, static_cast<Eigen::Index>(p));
        Y.noalias() = W * C;
        Y.colwise() += B;
    });
    return y;
}

Tensor maxpool_forward(const LayerSpec& l, const Tensor& x, std::vector<std::uint32_t>* argmax) {
    const std::size_t ho = l.height / 2;
    const std::size_t wo = l.width / 2;
    Tensor y({x.batch(), l.in, ho, wo});
    if (argmax) {
        argmax->resize(y.size());
    }
    const std::size_t in_size = x.sample_size();
    const std::size_t out_size = y.sample_size();
    for (std::size_t s = 0; s < x.batch(); ++s) {
        const double* in = x.data.data() + s * in_size;
        double* out = y.data.data() + s * out_size;
        for (std::size_t c = 0; c < l.in; ++c) {
            for (std::size_t i = 0; i < ho; ++i) {
                for (std::size_t j = 0; j < wo; ++j) {
                    std::size_t best = (c * l.height + 2 * i) * l.width + 2 * j;
                    for (std::size_t dy = 0; dy < 2; ++dy) {
                        for (std::size_t dx = 0; dx < 2; ++dx) {
                            const std::size_t idx = (c * l.height + 2 * i + dy) * l.width + 2 * j + dx;
                            if (in[idx] > in[best]) {
                                best = idx;
                            }
                        }
                    }
                    const std::size_t o = (c * ho + i) * wo + j;
                    out[o] = in[best];
                    if (argmax) {
                        (*argmax)[s * out_size + o] = static_cast<std::uint32_t>(best);
                    }
                }
            }
        }
    }
    return y;
}

} // namespace

Tensor forward(const Network& net, const Parameters& params, const Batch& batch, Cache* cache,
               const ComputeOptions& options) {
    const std::size_t n = batch.input.batch();
    Shape expected{n};
    expected.insert(expected.end(), net.input_shape().begin(), net.input_shape().end());
    if (batch.input.dims != expected) {
        fail(ErrorCode::ShapeMismatch,
             fmt::format("layer 0: input {} does not match network input {}", to_string(batch.input.dims), to_string(expected)));
    }
    if (net.scalar_inputs() > 0 && batch.scalars.dims != Shape{n, net.scalar_inputs()}) {
        fail(ErrorCode::ShapeMismatch, fmt::format("scalar sidecar {} does not match ({}, {})", to_string(batch.scalars.dims),
                                                   n, net.scalar_inputs()));
    }
    if (cache) {
        cache->batch = n;
        cache->layers.assign(net.layers().size(), {});
    }
    Tensor act = batch.input;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const LayerSpec& l = net.layers()[i];
        LayerCache* lc = cache ? &cache->layers[i] : nullptr;
        switch (l.kind) {
        case LayerKind::dense:
            if (lc) {
                lc->input = act.data;
            }
            act = dense_forward(l, params.weights[i], params.biases[i], act);
            break;
        case LayerKind::conv2d:
            if (lc) {
                lc->input = act.data;
            }
            act = conv_forward(l, params.weights[i], params.biases[i], act, options);
            break;
        case LayerKind::relu:
            if (lc) {
                lc->mask.resize(act.size());
            }
            for (std::size_t e = 0; e < act.size(); ++e) {
                const bool on = act.data[e] > 0.0;
                if (lc) {
                    lc->mask[e] = on;
                }
                if (!on) {
                    act.data[e] = 0.0;
                }
            }
            break;
        case LayerKind::maxpool2d:
            act = maxpool_forward(l, act, lc ? &lc->argmax : nullptr);
            break;
        case LayerKind::flatten:
            act.dims = {n, element_count(net.shape(i + 1))};
            break;
        case LayerKind::concat_scalars: {
            const std::size_t width = act.sample_size();
            Tensor joined({n, width + l.scalars});
            for (std::size_t s = 0; s < n; ++s) {
                std::copy_n(act.data.data() + s * width, width, joined.data.data() + s * (width + l.scalars));
                std::copy_n(batch.scalars.data.data() + s * l.scalars, l.scalars,
                            joined.data.data() + s * (width + l.scalars) + width);
            }
            act = std::move(joined);
            break;
        }
        }
    }
    check_finite(act.data, "network output");
    return act;
}

Gradients backward(const Network& net, const Parameters& params, const Cache& cache, const Tensor& grad_output,
                   bool want_input_gradients, const ComputeOptions& options) {
    const std::size_t n = cache.batch;
    if (cache.layers.size() != net.layers().size()) {
        fail(ErrorCode::ShapeMismatch, "cache does not belong to this network");
    }
    Shape out_dims{n};
    out_dims.insert(out_dims.end(), net.output_shape().begin(), net.output_shape().end());
    if (grad_output.dims != out_dims) {
        fail(ErrorCode::ShapeMismatch, fmt::format("output gradient {} does not match {}", to_string(grad_output.dims),
                                                   to_string(out_dims)));
    }
    Gradients g;
    g.params = zero_parameters(net);
    Tensor grad = grad_output;
    for (std::size_t i = net.layers().size(); i-- > 0;) {
        const LayerSpec& l = net.layers()[i];
        const LayerCache& lc = cache.layers[i];
        const bool need_dx = i > 0 || want_input_gradients;
        Shape in_dims{n};
        in_dims.insert(in_dims.end(), net.shape(i).begin(), net.shape(i).end());
        switch (l.kind) {
        case LayerKind::dense: {
            const auto batch = static_cast<Eigen::Index>(n);
            ConstMatMap X(lc.input.data(), batch, l.in);
            ConstMatMap dY(grad.data.data(), batch, l.out);
            ConstMatMap W(params.weights[i].data(), l.out, l.in);
            MatMap dW(g.params.weights[i].data(), l.out, l.in);
            dW.noalias() = dY.transpose() * X;
            auto& db = g.params.biases[i];
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t o = 0; o < l.out; ++o) {
                    db[o] += grad.data[s * l.out + o];
                }
            }
            if (need_dx) {
                Tensor dx(in_dims);
                MatMap dX(dx.data.data(), batch, l.in);
                dX.noalias() = dY * W;
                grad = std::move(dx);
            }
            break;
        }
        case LayerKind::conv2d: {
            const std::size_t ho = l.height - 2;
            const std::size_t wo = l.width - 2;
            const std::size_t k = std::size_t{l.in} * 9;
            const std::size_t p = ho * wo;
            const std::size_t in_size = std::size_t{l.in} * l.height * l.width;
            ConstMatMap W(params.weights[i].data(), l.out, static_cast<Eigen::Index>(k));
            Tensor dx = need_dx ? Tensor(in_dims) : Tensor();
            std::vector<std::vector<double>> dw_part(n);
            std::vector<std::vector<double>> db_part(n);
            parallel_for(n, options.threads, [&](std::size_t s) {
                std::vector<double> cols(k * p);
                im2col(lc.input.data() + s * in_size, l.in, l.height, l.width, cols.data());
                ConstMatMap C(cols.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p));
                ConstMatMap dY(grad.sample(s).data(), l.out, static_cast<Eigen::Index>(p));
                dw_part[s].resize(std::size_t{l.out} * k);
                MatMap dWs(dw_part[s].data(), l.out, static_cast<Eigen::Index>(k));
                dWs.noalias() = dY * C.transpose();
                db_part[s].resize(l.out);
                for (std::size_t o = 0; o < l.out; ++o) {
                    db_part[s][o] = dY.row(static_cast<Eigen::Index>(o)).sum();
                }
                if (need_dx) {
                    MatMap dC(cols.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p));
                    dC.noalias() = W.transpose() * dY;
                    col2im(cols.data(), l.in, l.height, l.width, dx.sample(s).data());
                }
            });
            auto& dw = g.params.weights[i];
            auto& db = g.params.biases[i];
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t e = 0; e < dw.size(); ++e) {
                    dw[e] += dw_part[s][e];
                }
                for (std::size_t o = 0; o < l.out; ++o) {
                    db[o] += db_part[s][o];
                }
            }
            if (need_dx) {
                grad = std::move(dx);
            }
            break;
        }
        case LayerKind::relu:
            for (std::size_t e = 0; e < grad.size(); ++e) {
                if (!lc.mask[e]) {
                    grad.data[e] = 0.0;
                }
            }
            break;
        case LayerKind::maxpool2d: {
            Tensor dx(in_dims);
            const std::size_t in_size = dx.sample_size();
            const std::size_t out_size = grad.sample_size();
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t o = 0; o < out_size; ++o) {
                    dx.data[s * in_size + lc.argmax[s * out_size + o]] += grad.data[s * out_size + o];
                }
            }
            grad = std::move(dx);
            break;
        }
        case LayerKind::flatten:
            grad.dims = in_dims;
            break;
        case LayerKind::concat_scalars: {
            const std::size_t width = net.shape(i)[0];
            Tensor dx(in_dims);
            g.scalars = Tensor({n, l.scalars});
            for (std::size_t s = 0; s < n; ++s) {
                const double* src = grad.data.data() + s * (width + l.scalars);
                std::copy_n(src, width, dx.data.data() + s * width);
                std::copy_n(src + width, l.scalars, g.scalars.data.data() + s * l.scalars);
            }
            grad = std::move(dx);
            break;
        }
        }
    }
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        check_finite(g.params.weights[i], "weight gradient");
        check_finite(g.params.biases[i], "bias gradient");
    }
    if (want_input_gradients) {
        g.input = std::move(grad);
    } else {
        g.scalars = Tensor();
    }
    return g;
}

Loss mse(const Tensor& pred, const Tensor& target) {
    if (pred.dims != target.dims) {
        fail(ErrorCode::ShapeMismatch,
             fmt::format("mse: prediction {} vs target {}", to_string(pred.dims), to_string(target.dims)));
    }
    Loss out;
    out.gradient = Tensor(pred.dims);
    const double count = static_cast<double>(pred.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        sum += d * d;
        out.gradient.data[i] = 2.0 * d / count;
    }
    out.value = pred.size() ? sum / count : 0.0;
    return out;
}

AdamState adam_init(const Network& net) {
    return {zero_parameters(net), zero_parameters(net), 0};
}

void adam_step(Parameters& params, const Parameters& grads, AdamState& state, double learning_rate,
               const AdamConfig& config) {
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                      std::vector<double>& v) {
        for (std::size_t e = 0; e < p.size(); ++e) {
            m[e] = config.beta1 * m[e] + (1.0 - config.beta1) * g[e];
            v[e] = config.beta2 * v[e] + (1.0 - config.beta2) * g[e] * g[e];
            const double m_hat = m[e] / c1;
            const double v_hat = v[e] / c2;
            p[e] -= learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    };
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        update(params.weights[i], grads.weights[i], state.m.weights[i], state.v.weights[i]);
        update(params.biases[i], grads.biases[i], state.m.biases[i], state.v.biases[i]);
    }
}

// ---------------------------------------------------------------------------

GradientCheck gradient_check(const Network& net, const Parameters& params, const Batch& batch, const Tensor& target,
                             double h, std::size_t max_probes_per_tensor) {
    Cache cache;
    const Tensor out = forward(net, params, batch, &cache);
    const Gradients g = backward(net, params, cache, mse(out, target).gradient, true);

    GradientCheck result;
    auto probe = [&](std::vector<double>& values, const std::vector<double>& analytic, auto&& loss_at,
                     const std::string& label) {
        const std::size_t count = values.size();
        const std::size_t stride = std::max<std::size_t>(1, count / std::max<std::size_t>(1, max_probes_per_tensor));
        for (std::size_t e = 0; e < count; e += stride) {
            const double saved = values[e];
            values[e] = saved + h;
            const double up = loss_at();
            values[e] = saved - h;
            const double down = loss_at();
            values[e] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double a = analytic[e];
            const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
            ++result.probes;
            if (rel > result.max_relative_error || result.worst.empty()) {
                result.max_relative_error = std::max(result.max_relative_error, rel);
                if (rel >= result.max_relative_error) {
                    result.worst = fmt::format("{}[{}]: analytic {:.10g}, numeric {:.10g}", label, e, a, numeric);
                }
            }
        }
    };

    Parameters p = params;
    Batch b = batch;
    auto loss = [&] { return mse(forward(net, p, b), target).value; };
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        if (!net.layers()[i].has_parameters()) {
            continue;
        }
        probe(p.weights[i], g.params.weights[i], loss, fmt::format("layer {} weight", i));
        probe(p.biases[i], g.params.biases[i], loss, fmt::format("layer {} bias", i));
    }
    probe(b.input.data, g.input.data, loss, "input");
    if (net.scalar_inputs() > 0) {
        probe(b.scalars.data, g.scalars.data, loss, "scalars");
    }
    return result;
}

} // namespace foilforge::nn
