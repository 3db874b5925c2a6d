#include "foilforge/eval.hpp"

#include "foilforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>
#include <numeric>

namespace foilforge::eval {

using dataset::Direction;
using dataset::Sample;

std::vector<double> pct_error(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size() || truth.size() < 2) {
        fail(ErrorCode::ShapeMismatch,
             fmt::format("pct_error needs equal lengths of at least 2 (got {} and {})", pred.size(), truth.size()));
    }
    const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end());
    const double range = *hi - *lo;
    if (!(range >= 1e-12)) {
        fail(ErrorCode::ConstantTruth, fmt::format("truth range {:g} is below 1e-12", range));
    }
    std::vector<double> e(truth.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = 100.0 * std::abs(pred[i] - truth[i]) / range;
    }
    return e;
}

namespace {

std::array<std::string_view, 2> signal_names(const dataset::CaseSpec& spec) {
    if (spec.direction == Direction::cp_to_shape) {
        return {"x", "y"};
    }
    return {"cp_suction", "cp_pressure"};
}

} // namespace

ErrorReport evaluate_predictions(const dataset::CaseSpec& spec, std::string_view model_kind,
                                 std::span<const Sample* const> samples, std::span<const std::vector<double>> predictions,
                                 double train_mse) {
    if (samples.size() != predictions.size()) {
        fail(ErrorCode::ShapeMismatch, fmt::format("{} samples but {} predictions", samples.size(), predictions.size()));
    }
    if (samples.empty()) {
        fail(ErrorCode::EmptyTestSplit, "nothing to evaluate");
    }
    ErrorReport report;
    report.case_tag = dataset::case_tag(spec.id);
    report.model_kind = model_kind;
    const auto names = signal_names(spec);
    constexpr std::size_t half = geometry::kNodes;

    double squared = 0.0;
    std::size_t elements = 0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto truth = dataset::target_vector(*samples[s], spec);
        const auto& pred = predictions[s];
        if (pred.size() != truth.size()) {
            fail(ErrorCode::ShapeMismatch, fmt::format("prediction {} has {} values, expected {}", s, pred.size(), truth.size()));
        }
        SampleError se;
        se.id = samples[s]->id;
        double sum_pct = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            const auto e = pct_error(std::span(pred).subspan(k * half, half), std::span(truth).subspan(k * half, half));
            SignalError sig;
            sig.signal = names[k];
            sig.max_pct = *std::max_element(e.begin(), e.end());
            const double total = std::accumulate(e.begin(), e.end(), 0.0);
            sig.mean_pct = total / static_cast<double>(e.size());
            sum_pct += total;
            se.max_pct = std::max(se.max_pct, sig.max_pct);
            se.signals.push_back(std::move(sig));
        }
        se.mean_pct = sum_pct / static_cast<double>(truth.size());
        double sq = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const double d = pred[i] - truth[i];
            sq += d * d;
        }
        se.mse = sq / static_cast<double>(truth.size());
        squared += sq;
        elements += truth.size();
        report.per_sample.push_back(std::move(se));
    }
    std::sort(report.per_sample.begin(), report.per_sample.end(),
              [](const SampleError& a, const SampleError& b) { return a.id < b.id; });

    double mean_sum = 0.0;
    for (const auto& se : report.per_sample) {
        mean_sum += se.mean_pct;
        report.aggregate.overall_max_pct = std::max(report.aggregate.overall_max_pct, se.max_pct);
    }
    report.aggregate.overall_mean_pct = mean_sum / static_cast<double>(report.per_sample.size());
    report.aggregate.test_mse = squared / static_cast<double>(elements);
    report.aggregate.train_mse = train_mse;
    return report;
}

ErrorReport evaluate(const models::Checkpoint& ckpt, const dataset::Dataset& data, unsigned threads) {
    if (!(ckpt.model.case_spec == data.case_spec)) {
        fail(ErrorCode::CaseMismatch, fmt::format("checkpoint is case {} but the dataset is {}",
                                                  dataset::case_tag(ckpt.model.case_spec.id), dataset::case_tag(data.case_spec.id)));
    }
    auto collect = [&](dataset::SplitTag tag) {
        std::vector<const Sample*> out;
        for (std::size_t i : data.indices(tag)) {
            out.push_back(&data.samples[i]);
        }
        return out;
    };
    const auto test = collect(dataset::SplitTag::test);
    if (test.empty()) {
        fail(ErrorCode::EmptyTestSplit, "dataset has no test samples");
    }
    const auto train = collect(dataset::SplitTag::train);
    double train_mse = 0.0;
    if (!train.empty()) {
        const auto pred = models::predict_raw(ckpt, train, threads);
        double sq = 0.0;
        std::size_t n = 0;
        for (std::size_t s = 0; s < train.size(); ++s) {
            const auto truth = dataset::target_vector(*train[s], data.case_spec);
            for (std::size_t i = 0; i < truth.size(); ++i) {
                const double d = pred[s][i] - truth[i];
                sq += d * d;
            }
            n += truth.size();
        }
        train_mse = sq / static_cast<double>(n);
    }
    const auto pred = models::predict_raw(ckpt, test, threads);
    return evaluate_predictions(data.case_spec, models::to_string(ckpt.model.kind), test, pred, train_mse);
}

std::string to_json(const ErrorReport& report) {
    nlohmann::ordered_json j;
    j["case"] = report.case_tag;
    j["model"] = report.model_kind;
    j["aggregate"] = {
        {"overall_mean_pct", report.aggregate.overall_mean_pct},
        {"overall_max_pct", report.aggregate.overall_max_pct},
        {"test_mse", report.aggregate.test_mse},
        {"train_mse", report.aggregate.train_mse},
    };
    auto& samples = j["per_sample"] = nlohmann::ordered_json::array();
    for (const auto& se : report.per_sample) {
        nlohmann::ordered_json s;
        s["id"] = se.id;
        s["mean_pct"] = se.mean_pct;
        s["max_pct"] = se.max_pct;
        s["mse"] = se.mse;
        auto& sig = s["signals"] = nlohmann::ordered_json::array();
        for (const auto& e : se.signals) {
            sig.push_back({{"signal", e.signal}, {"mean_pct", e.mean_pct}, {"max_pct", e.max_pct}});
        }
        samples.push_back(std::move(s));
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double kWidth = 640;
constexpr double kMainTop = 40;
constexpr double kMainHeight = 320;
constexpr double kErrTop = 420;
constexpr double kErrHeight = 140;
constexpr double kHeight = 600;
constexpr double kLeft = 70;
constexpr double kPlotWidth = 540;

struct Axis {
    double lo;
    double hi;
    double step;
    bool inverted = false; // hi drawn at the bottom
};

struct Panel {
    Axis x;
    Axis y;
    double top;
    double height;

    double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * kPlotWidth; }
    double py(double v) const {
        const double t = (v - y.lo) / (y.hi - y.lo);
        return y.inverted ? top + t * height : top + (1.0 - t) * height;
    }
};

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    std::string s = fmt::format("{:.2f}", v);
    return s == "-0.00" ? "0.00" : s;
}

std::string tick_label(double v, double step) {
    int digits = 0;
    while (digits < 4 && std::abs(step * std::pow(10.0, digits) - std::round(step * std::pow(10.0, digits))) > 1e-9) {
        ++digits;
    }
    std::string s = fmt::format("{:.{}f}", v, digits);
    if (s.find_first_not_of("-0.") == std::string::npos) {
        s = fmt::format("{:.{}f}", 0.0, digits);
    }
    return s;
}

std::string path_data(const Panel& p, std::span<const double> xs, std::span<const double> ys) {
    std::string d;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d += fmt::format("{}{},{}", i == 0 ? "M" : " L", num(p.px(xs[i])), num(p.py(ys[i])));
    }
    return d;
}

void draw_axes(std::string& svg, const Panel& p, std::string_view clip_id, std::string_view x_label,
               std::string_view y_label) {
    const double bottom = p.top + p.height;
    svg += fmt::format("<clipPath id=\"{}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>\n", clip_id,
                       num(kLeft), num(p.top), num(kPlotWidth), num(p.height));
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000\"/>\n", num(kLeft),
                       num(p.top), num(kPlotWidth), num(p.height));
    const auto count = [](const Axis& a) { return static_cast<int>(std::floor((a.hi - a.lo) / a.step + 1e-9)); };
    const double x0 = std::ceil(p.x.lo / p.x.step - 1e-9) * p.x.step;
    for (int i = 0; x0 + i * p.x.step <= p.x.hi + 1e-9; ++i) {
        const double v = x0 + i * p.x.step;
        const double x = p.px(v);
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000\"/>", num(x), num(bottom),
                           num(bottom + 5));
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(x), num(bottom + 18),
                           tick_label(v, p.x.step));
    }
    for (int i = 0; i <= count(p.y); ++i) {
        const double v = p.y.lo + i * p.y.step;
        const double y = p.py(v);
        svg += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#000\"/>", num(kLeft - 5), num(kLeft),
                           num(y));
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(kLeft - 8), num(y + 4),
                           tick_label(v, p.y.step));
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(kLeft + kPlotWidth / 2),
                       num(bottom + 34), x_label);
    svg += fmt::format("<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                       num(p.top + p.height / 2), y_label);
}

void draw_curve(std::string& svg, const Panel& p, std::string_view clip_id, std::span<const double> xs,
                std::span<const double> ys, std::string_view color, bool dashed) {
    svg += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} clip-path=\"url(#{})\"/>\n",
                       path_data(p, xs, ys), color, dashed ? " stroke-dasharray=\"6,4\"" : "", clip_id);
}

double nice_ceiling(double v) {
    static constexpr std::array<double, 4> kSteps{1.0, 2.0, 5.0, 10.0};
    if (!(v > 0.0) || !std::isfinite(v)) {
        return 1.0;
    }
    const double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double s : kSteps) {
        if (s * mag >= v) {
            return s * mag;
        }
    }
    return 10.0 * mag;
}

} // namespace

std::string plot_comparison(const Sample& sample, std::span<const double> prediction, PlotKind kind) {
    constexpr std::size_t n = geometry::kNodes;
    if (prediction.size() != 2 * n) {
        fail(ErrorCode::ShapeMismatch, fmt::format("plot needs {} predicted values, got {}", 2 * n, prediction.size()));
    }
    std::vector<double> truth;
    truth.reserve(2 * n);
    std::string title;
    if (kind == PlotKind::shape) {
        for (const auto& pt : sample.airfoil.points) {
            truth.push_back(pt.x);
        }
        for (const auto& pt : sample.airfoil.points) {
            truth.push_back(pt.y);
        }
        title = "True and predicted airfoil coordinates";
    } else {
        truth.insert(truth.end(), sample.cp.cp_suction.begin(), sample.cp.cp_suction.end());
        truth.insert(truth.end(), sample.cp.cp_pressure.begin(), sample.cp.cp_pressure.end());
        title = "True and predicted pressure coefficient";
    }

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
                       "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                       kWidth, kHeight, kWidth, kHeight);
    svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#fff\"/>\n", kWidth, kHeight);
    svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{} ({})</text>\n",
                       num(kWidth / 2), title, xml_escape(sample.id));

    const std::span<const double> t(truth);
    const auto first = [](std::span<const double> v) { return v.subspan(0, n); };
    const auto second = [](std::span<const double> v) { return v.subspan(n, n); };
    static constexpr std::array<std::string_view, 2> kColors{"#1f4e9c", "#c0392b"};

    if (kind == PlotKind::shape) {
        const Panel main{{-0.05, 1.05, 0.1}, {-0.3, 0.3, 0.1}, kMainTop, kMainHeight};
        draw_axes(svg, main, "main", "x/c", "y/c");
        draw_curve(svg, main, "main", first(t), second(t), "#000", false);
        draw_curve(svg, main, "main", first(prediction), second(prediction), kColors[1], true);
    } else {
        double lo = 0.0;
        double hi = 1.0;
        for (double v : truth) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        lo = std::max(-8.0, std::floor(lo));
        hi = std::min(2.0, std::ceil(hi));
        const Panel main{{-0.05, 1.05, 0.1}, {lo, hi, hi - lo > 5.0 ? 2.0 : 1.0, true}, kMainTop, kMainHeight};
        draw_axes(svg, main, "main", "x/c", "Cp");
        const auto& grid = panelflow::CpDistribution::stations().stations();
        const std::span<const double> xs(grid.data(), grid.size());
        for (std::size_t k = 0; k < 2; ++k) {
            draw_curve(svg, main, "main", xs, t.subspan(k * n, n), kColors[k], false);
            draw_curve(svg, main, "main", xs, prediction.subspan(k * n, n), kColors[k], true);
        }
    }

    // Legend
    const double lx = kLeft + kPlotWidth - 150;
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"140\" height=\"44\" fill=\"#fff\" stroke=\"#888\"/>\n", num(lx),
                       num(kMainTop + 8));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000\" stroke-width=\"1.5\"/>", num(lx + 8),
                       num(kMainTop + 22), num(lx + 40));
    svg += fmt::format("<text x=\"{}\" y=\"{}\">true</text>\n", num(lx + 48), num(kMainTop + 26));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000\" stroke-width=\"1.5\" "
                       "stroke-dasharray=\"6,4\"/>",
                       num(lx + 8), num(kMainTop + 40), num(lx + 40));
    svg += fmt::format("<text x=\"{}\" y=\"{}\">predicted</text>\n", num(lx + 48), num(kMainTop + 44));

    // Per-station percentage error
    std::array<std::vector<double>, 2> errors;
    double peak = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto tk = t.subspan(k * n, n);
        const auto [lo, hi] = std::minmax_element(tk.begin(), tk.end());
        const double range = std::max(*hi - *lo, 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            errors[k].push_back(100.0 * std::abs(prediction[k * n + i] - tk[i]) / range);
        }
        peak = std::max(peak, *std::max_element(errors[k].begin(), errors[k].end()));
    }
    const double top = nice_ceiling(peak);
    const Panel err{{0.0, static_cast<double>(n - 1), 20.0}, {0.0, top, top / 4.0}, kErrTop, kErrHeight};
    draw_axes(svg, err, "err", "station index", "error %");
    std::vector<double> idx(n);
    std::iota(idx.begin(), idx.end(), 0.0);
    const std::array<std::string_view, 2> labels =
        kind == PlotKind::shape ? std::array<std::string_view, 2>{"x", "y"}
                                : std::array<std::string_view, 2>{"suction", "pressure"};
    for (std::size_t k = 0; k < 2; ++k) {
        draw_curve(svg, err, "err", idx, errors[k], kColors[k], false);
        svg += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", num(kLeft + 10 + 90 * k), num(kErrTop - 6),
                           kColors[k], labels[k]);
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace foilforge::eval
