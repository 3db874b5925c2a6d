#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace foilforge::nn {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

/// Dense row-major f64 array; the first dimension is the batch wherever a batch is implied.
struct Tensor {
    Shape dims;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    std::size_t batch() const { return dims.empty() ? 0 : dims.front(); }
    std::size_t sample_size() const { return batch() == 0 ? 0 : data.size() / batch(); }
    std::span<double> sample(std::size_t b) { return {data.data() + b * sample_size(), sample_size()}; }
    std::span<const double> sample(std::size_t b) const { return {data.data() + b * sample_size(), sample_size()}; }
};

enum class LayerKind : std::uint8_t { dense = 0, relu = 1, conv2d = 2, maxpool2d = 3, flatten = 4, concat_scalars = 5 };

std::string_view to_string(LayerKind kind);

/// One layer of a sequential network. Field use by kind:
///   dense          in, out: widths
///   conv2d         in, out: channel counts; height, width: input map extent. 3x3 kernel, stride 1, no padding.
///   maxpool2d      in: channels; height, width: input map extent. 2x2 window, stride 2 (floor).
///   concat_scalars scalars: number of sidecar values appended to a flat activation
///   relu, flatten  no extents
struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    std::uint32_t in = 0;
    std::uint32_t out = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t scalars = 0;

    static LayerSpec dense(std::size_t in, std::size_t out);
    static LayerSpec relu();
    static LayerSpec conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t height, std::size_t width);
    static LayerSpec maxpool2d(std::size_t channels, std::size_t height, std::size_t width);
    static LayerSpec flatten();
    static LayerSpec concat_scalars(std::size_t count);

    bool has_parameters() const { return kind == LayerKind::dense || kind == LayerKind::conv2d; }
    std::size_t weight_count() const;
    std::size_t bias_count() const;

    /// Extents as stored in checkpoints (length fixed per kind).
    std::vector<std::uint32_t> extents() const;
    static LayerSpec from_extents(LayerKind kind, std::span<const std::uint32_t> extents);
    static std::size_t extent_count(LayerKind kind);

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Validated sequential layer stack. Shapes exclude the batch dimension.
class Network {
public:
    Network() = default;
    /// Raises ShapeMismatch (naming the layer index) when the stack is inconsistent.
    Network(Shape input_shape, std::size_t scalar_inputs, std::vector<LayerSpec> layers);

    const std::vector<LayerSpec>& layers() const { return layers_; }
    const Shape& input_shape() const { return shapes_.front(); }
    const Shape& output_shape() const { return shapes_.back(); }
    /// shape(0) is the input, shape(i + 1) the output of layer i.
    const Shape& shape(std::size_t i) const { return shapes_.at(i); }
    std::size_t scalar_inputs() const { return scalar_inputs_; }
    std::size_t parameter_count() const;

    /// True when the parametric layer `i` feeds a ReLU (He init) rather than the linear output.
    bool feeds_relu(std::size_t i) const;

private:
    std::vector<LayerSpec> layers_;
    std::vector<Shape> shapes_{Shape{}};
    std::size_t scalar_inputs_ = 0;
};

/// Per-layer weights and biases; empty vectors for layers without parameters.
/// dense weights are [out][in]; conv2d weights are [out_c][in_c][3][3].
struct Parameters {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    std::size_t count() const;
    friend bool operator==(const Parameters&, const Parameters&) = default;
};

Parameters zero_parameters(const Network& net);

/// He-normal (variance 2/fan_in) for layers feeding a ReLU, Glorot-normal (variance
/// 2/(fan_in + fan_out)) for the linear output layer, zero biases. Draws come from
/// foilforge::Rng (mt19937_64 + Box-Muller), seeded by `seed`.
Parameters init_params(const Network& net, std::uint64_t seed);

struct Batch {
    Tensor input;   // [B, input_shape...]
    Tensor scalars; // [B, scalar_inputs]; empty when the network takes none
};

struct ComputeOptions {
    unsigned threads = 1; // 0 = hardware concurrency; results do not depend on it
};

struct LayerCache {
    std::vector<double> input;          // dense / conv2d input activations
    std::vector<std::uint8_t> mask;     // relu: input > 0
    std::vector<std::uint32_t> argmax;  // maxpool2d: flat input index per output element
};

struct Cache {
    std::size_t batch = 0;
    std::vector<LayerCache> layers;
};

/// Applies the layers in order. When `cache` is non-null it receives what backward needs.
/// Raises ShapeMismatch for bad input extents and NumericalDivergence on NaN/Inf output.
Tensor forward(const Network& net, const Parameters& params, const Batch& batch, Cache* cache = nullptr,
               const ComputeOptions& options = {});

struct Gradients {
    Parameters params;
    Tensor input;   // filled when requested
    Tensor scalars; // filled when requested
};

/// Exact reverse-mode gradients. Per-sample partial sums are reduced in sample order.
Gradients backward(const Network& net, const Parameters& params, const Cache& cache, const Tensor& grad_output,
                   bool want_input_gradients = false, const ComputeOptions& options = {});

struct Loss {
    double value = 0.0;
    Tensor gradient; // d value / d pred
};

/// Mean of squared differences over every element; gradient 2(pred - target)/count.
Loss mse(const Tensor& pred, const Tensor& target);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    Parameters m;
    Parameters v;
    std::uint64_t step = 0;
};

AdamState adam_init(const Network& net);

/// One bias-corrected Adam update; increments state.step.
void adam_step(Parameters& params, const Parameters& grads, AdamState& state, double learning_rate,
               const AdamConfig& config = {});

struct GradientCheck {
    double max_relative_error = 0.0;
    std::size_t probes = 0;
    std::string worst; // description of the worst probe
};

/// Compares backward() against central finite differences of the MSE loss for up to
/// `max_probes_per_tensor` entries of every weight, bias, input and scalar tensor.
/// Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradientCheck gradient_check(const Network& net, const Parameters& params, const Batch& batch, const Tensor& target,
                             double h = 1e-5, std::size_t max_probes_per_tensor = 64);

} // namespace foilforge::nn
