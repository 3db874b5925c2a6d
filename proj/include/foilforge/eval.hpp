#pragma once

#include "foilforge/dataset.hpp"
#include "foilforge/models.hpp"

#include <span>
#include <string>
#include <vector>

namespace foilforge::eval {

/// e_i = 100 |pred_i - truth_i| / (max(truth) - min(truth)).
/// Raises ShapeMismatch for unequal or too-short inputs and ConstantTruth when the
/// truth range is below 1e-12.
std::vector<double> pct_error(std::span<const double> pred, std::span<const double> truth);

struct SignalError {
    std::string signal; // x, y, cp_suction or cp_pressure
    double mean_pct = 0.0;
    double max_pct = 0.0;
};

struct SampleError {
    std::string id;
    double mean_pct = 0.0; // over every point of both signals
    double max_pct = 0.0;
    double mse = 0.0;
    std::vector<SignalError> signals;
};

struct Aggregate {
    double overall_mean_pct = 0.0; // mean of per-sample means
    double overall_max_pct = 0.0;
    double test_mse = 0.0;
    double train_mse = 0.0;
};

struct ErrorReport {
    std::string case_tag;
    std::string model_kind;
    std::vector<SampleError> per_sample; // sorted by id
    Aggregate aggregate;
};

/// Predicts the test split (and the training split, for train_mse) and scores it.
/// Raises CaseMismatch or EmptyTestSplit.
ErrorReport evaluate(const models::Checkpoint& ckpt, const dataset::Dataset& data, unsigned threads = 1);

/// Scores given raw 250-wide predictions against `samples`; `predictions[i]` belongs to
/// `samples[i]`. train_mse is copied through.
ErrorReport evaluate_predictions(const dataset::CaseSpec& spec, std::string_view model_kind,
                                 std::span<const dataset::Sample* const> samples,
                                 std::span<const std::vector<double>> predictions, double train_mse = 0.0);

/// Pretty-printed JSON with fields case, model, aggregate{overall_mean_pct,
/// overall_max_pct, test_mse, train_mse} and per_sample[{id, mean_pct, max_pct, mse,
/// signals[{signal, mean_pct, max_pct}]}].
std::string to_json(const ErrorReport& report);

enum class PlotKind { shape, cp };

/// SVG 1.1 comparison: truth solid, prediction dashed, legend, fixed axes, and a
/// per-station percentage-error panel below. `prediction` is the raw 250-wide output.
std::string plot_comparison(const dataset::Sample& sample, std::span<const double> prediction, PlotKind kind);

} // namespace foilforge::eval
