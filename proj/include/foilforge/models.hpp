#pragma once

#include "foilforge/dataset.hpp"
#include "foilforge/neuralcore.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace foilforge::models {

using dataset::CaseSpec;

enum class ModelKind : std::uint8_t { dnn = 0, cnn = 1 };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view tag);

inline constexpr std::size_t kOutputWidth = 250;
inline constexpr std::array<std::size_t, 4> kHiddenWidths{125, 250, 236, 375};
inline constexpr std::array<std::size_t, 3> kCnnHeadWidths{250, 236, 375};
inline constexpr std::array<std::size_t, 3> kCnnChannels{32, 64, 128};

struct ModelSpec {
    ModelKind kind = ModelKind::dnn;
    CaseSpec case_spec;
    nn::Network network;
};

/// Dense stack: input -> hidden widths (ReLU after each) -> linear 250.
ModelSpec build_dnn(const CaseSpec& spec, std::span<const std::size_t> hidden = kHiddenWidths);

struct CnnLayout {
    std::size_t image = dataset::kRasterSize;
    std::array<std::size_t, 3> channels = kCnnChannels;
    std::vector<std::size_t> head{kCnnHeadWidths.begin(), kCnnHeadWidths.end()};
    std::size_t output = kOutputWidth;
};

/// Three (conv 3x3 -> max-pool 2x2) blocks, flatten, append the case scalars, dense head
/// with ReLU, linear output. The default layout takes the 200 x 200 raster; smaller
/// layouts exist for gradient checks.
ModelSpec build_cnn(const CaseSpec& spec, const CnnLayout& layout = {});

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t batch_size = 32;
    std::size_t epochs = 500;
    std::uint64_t seed = 0;
    unsigned threads = 1; // does not change results
};

void validate(const TrainConfig& config);

struct Checkpoint {
    ModelSpec model;
    nn::Parameters params;
    std::uint64_t seed = 0;
    TrainConfig config; // threads is not stored
    double train_loss = 0.0;
    double test_loss = 0.0;
};

/// Freshly initialized checkpoint (init_params with `seed`).
Checkpoint initial_checkpoint(const ModelSpec& model, std::uint64_t seed);

struct EpochRecord {
    double train_loss = 0.0; // mean per-batch MSE weighted by batch size
    double test_loss = 0.0;  // MSE over the test split after the epoch; 0 when the split is empty
    double seconds = 0.0;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<EpochRecord> history;
    double initial_train_loss = 0.0; // untrained model over the training split
};

using EpochCallback = std::function<void(std::size_t epoch, const EpochRecord&)>;

/// Mini-batch Adam over the training split, reshuffled every epoch from (seed, epoch).
/// Raises CaseMismatch, EmptyTrainSplit, or NumericalDivergence naming the epoch.
TrainResult train(const ModelSpec& model, const dataset::Dataset& data, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Encoded network inputs for a list of samples.
nn::Batch encode_batch(const ModelSpec& model, std::span<const dataset::Sample* const> samples);

/// Raw 250-wide outputs, one row per sample.
std::vector<std::vector<double>> predict_raw(const Checkpoint& ckpt, std::span<const dataset::Sample* const> samples,
                                             unsigned threads = 1);

/// Unpacks 125 x then 125 y. The result is not validated.
geometry::Airfoil predict_shape(const Checkpoint& ckpt, const panelflow::CpDistribution& cp,
                                const panelflow::FlowCondition& condition);

/// Unpacks 125 suction then 125 pressure Cp values; cl is the pressure-jump integral.
panelflow::CpDistribution predict_cp(const Checkpoint& ckpt, const geometry::Airfoil& airfoil,
                                     const panelflow::FlowCondition& condition);

geometry::Airfoil unpack_shape(std::span<const double> output, std::string name);
panelflow::CpDistribution unpack_cp(std::span<const double> output, const panelflow::FlowCondition& condition);

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize(const Checkpoint& ckpt);
Checkpoint deserialize(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace foilforge::models
