// foilforge command-line front end.

#include "foilforge/binio.hpp"
#include "foilforge/dataset.hpp"
#include "foilforge/error.hpp"
#include "foilforge/eval.hpp"
#include "foilforge/geometry.hpp"
#include "foilforge/log.hpp"
#include "foilforge/models.hpp"
#include "foilforge/panelflow.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>
#include <json.hpp>
#include <optional>

namespace fs = std::filesystem;
using namespace foilforge;
using nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumerical = 4;

void progress(std::string_view message) {
    log_note(message);
}

void print_summary(const ordered_json& j) {
    std::cout << j.dump() << std::endl;
}

std::string read_text(const std::string& path) {
    const auto bytes = binio::read_file(path);
    return {bytes.begin(), bytes.end()};
}

std::vector<fs::path> dat_files(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        fail(ErrorCode::FileIo, fmt::format("'{}' is not a directory", dir));
    }
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (entry.is_regular_file() && ext == ".dat") {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

geometry::Airfoil load_airfoil(const std::string& path) {
    return geometry::repanel(geometry::normalize(geometry::parse_dat(read_text(path))));
}

std::vector<const dataset::Sample*> split_samples(const dataset::Dataset& d, dataset::SplitTag tag) {
    std::vector<const dataset::Sample*> out;
    for (std::size_t i : d.indices(tag)) {
        out.push_back(&d.samples[i]);
    }
    return out;
}

const dataset::Sample& pick_sample(const dataset::Dataset& d, const std::optional<std::size_t>& index,
                                   const std::string& id) {
    if (!id.empty()) {
        for (const auto& s : d.samples) {
            if (s.id == id) {
                return s;
            }
        }
        fail(ErrorCode::InvalidArgument, fmt::format("no sample with id '{}'", id));
    }
    const std::size_t i = index.value_or(0);
    if (i >= d.samples.size()) {
        fail(ErrorCode::InvalidArgument, fmt::format("sample index {} out of range (dataset has {})", i, d.samples.size()));
    }
    return d.samples[i];
}

std::string cp_table(const panelflow::CpDistribution& cp) {
    std::string out = "# x cp_suction cp_pressure\n";
    const auto& grid = panelflow::CpDistribution::stations();
    for (std::size_t k = 0; k < geometry::kStations; ++k) {
        out += fmt::format("{:.9g} {:.9g} {:.9g}\n", grid[k], cp.cp_suction[k], cp.cp_pressure[k]);
    }
    return out;
}

ordered_json split_counts(const dataset::Dataset& d) {
    return {{"train", d.indices(dataset::SplitTag::train).size()},
            {"test", d.indices(dataset::SplitTag::test).size()},
            {"unassigned", d.indices(dataset::SplitTag::unassigned).size()}};
}

// ---------------------------------------------------------------------------

struct GenArgs {
    std::string airfoils;
    std::string case_tag;
    std::string out;
    std::string csv;
    std::string aoa;
    std::string re;
    double mach = 0.5;
    double cp_floor = -8.0;
    double split = 0.8;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

void run_gen(const GenArgs& a) {
    const auto spec = dataset::parse_case(a.case_tag);
    auto options = dataset::default_sweep(spec);
    if (!a.aoa.empty()) {
        options.aoa_grid = dataset::parse_value_list(a.aoa);
    }
    if (!a.re.empty()) {
        options.re_grid = dataset::parse_value_list(a.re);
    }
    options.mach = a.mach;
    options.cp_floor = a.cp_floor;
    options.threads = a.threads;

    std::vector<geometry::RawContour> corpus;
    std::size_t unreadable = 0;
    for (const auto& path : dat_files(a.airfoils)) {
        try {
            corpus.push_back(geometry::parse_dat(read_text(path.string())));
        } catch (const Error& e) {
            ++unreadable;
            progress(fmt::format("skipping {}: {}", path.filename().string(), e.what()));
        }
    }
    progress(fmt::format("gen: {} airfoils, {} AoA x {} Re, case {}", corpus.size(), options.aoa_grid.size(),
                         options.re_grid.size(), a.case_tag));
    dataset::SweepReport report;
    auto data = dataset::sweep_generate(corpus, spec, options, &report);
    data.seed = a.seed;
    if (a.split > 0.0 && data.samples.size() >= 5) {
        data = dataset::split(std::move(data), a.split, a.seed);
    }
    dataset::save_dataset(data, a.out);
    if (!a.csv.empty()) {
        binio::write_file_atomic(a.csv, dataset::to_csv(data));
    }
    print_summary({{"command", "gen"},
                   {"out", a.out},
                   {"case", a.case_tag},
                   {"airfoils", corpus.size()},
                   {"unreadable_files", unreadable},
                   {"attempted", report.attempted},
                   {"dropped", report.dropped.size()},
                   {"samples", data.samples.size()},
                   {"split", split_counts(data)}});
}

struct IngestArgs {
    std::string case_tag;
    std::string airfoil;
    std::vector<std::string> cp_files;
    std::vector<double> aoa;
    double re = 2e6;
    double mach = 0.5;
    std::string into;
    std::string out;
    double split = 0.0;
    std::uint64_t seed = 0;
};

void run_ingest(const IngestArgs& a) {
    const auto spec = dataset::parse_case(a.case_tag);
    if (a.cp_files.size() != a.aoa.size()) {
        fail(ErrorCode::InvalidArgument, fmt::format("{} --cp files but {} --aoa values", a.cp_files.size(), a.aoa.size()));
    }
    dataset::Dataset data;
    if (!a.into.empty()) {
        data = dataset::load_dataset(a.into);
        if (!(data.case_spec == spec)) {
            fail(ErrorCode::CaseMismatch, fmt::format("'{}' is case {}", a.into, dataset::case_tag(data.case_spec.id)));
        }
    } else {
        data.case_spec = spec;
    }
    const auto airfoil = load_airfoil(a.airfoil);
    for (std::size_t i = 0; i < a.cp_files.size(); ++i) {
        const panelflow::FlowCondition cond{a.aoa[i], a.re, a.mach};
        const auto frame = spec.rotation_protocol ? geometry::rotate(airfoil, cond.aoa_deg) : airfoil;
        data.samples.push_back(dataset::ingest_xfoil_cp(read_text(a.cp_files[i]), frame, cond));
        data.split.push_back(dataset::SplitTag::unassigned);
    }
    data.seed = a.seed;
    if (a.split > 0.0) {
        data = dataset::split(std::move(data), a.split, a.seed);
    }
    dataset::save_dataset(data, a.out);
    print_summary({{"command", "ingest"}, {"out", a.out}, {"added", a.cp_files.size()},
                   {"samples", data.samples.size()}, {"split", split_counts(data)}});
}

struct RasterArgs {
    std::string data;
    std::optional<std::size_t> index;
    std::string id;
    std::string content;
    std::string out;
};

void run_raster(const RasterArgs& a) {
    const auto data = dataset::load_dataset(a.data);
    const auto& sample = pick_sample(data, a.index, a.id);
    dataset::RasterContent content = data.case_spec.direction == dataset::Direction::cp_to_shape
                                         ? dataset::RasterContent::cp_curves
                                         : dataset::RasterContent::airfoil_outline;
    if (a.content == "cp") {
        content = dataset::RasterContent::cp_curves;
    } else if (a.content == "outline") {
        content = dataset::RasterContent::airfoil_outline;
    }
    const auto raster = dataset::rasterize(sample, content);
    binio::write_file_atomic(a.out, dataset::to_pgm(raster));
    const auto lit = std::count(raster.begin(), raster.end(), std::uint8_t{255});
    print_summary({{"command", "raster"}, {"out", a.out}, {"id", sample.id}, {"lit_pixels", lit}});
}

struct TrainArgs {
    std::string case_tag;
    std::string model;
    std::string data;
    std::string out;
    std::string history;
    models::TrainConfig config;
};

void run_train(const TrainArgs& a) {
    const auto spec = dataset::parse_case(a.case_tag);
    const auto kind = models::parse_model_kind(a.model);
    const auto data = dataset::load_dataset(a.data);
    const auto model = kind == models::ModelKind::dnn ? models::build_dnn(spec) : models::build_cnn(spec);
    progress(fmt::format("train: {} {} with {} parameters, {} train / {} test samples", a.model, a.case_tag,
                         model.network.parameter_count(), data.indices(dataset::SplitTag::train).size(),
                         data.indices(dataset::SplitTag::test).size()));
    const std::size_t every = std::max<std::size_t>(1, a.config.epochs / 20);
    const auto result = models::train(model, data, a.config, [&](std::size_t epoch, const models::EpochRecord& r) {
        if ((epoch + 1) % every == 0 || epoch == 0) {
            progress(fmt::format("epoch {}/{}: train {:.4e} test {:.4e} ({:.2f} s)", epoch + 1, a.config.epochs,
                                 r.train_loss, r.test_loss, r.seconds));
        }
    });
    models::save_checkpoint(result.checkpoint, a.out);
    if (!a.history.empty()) {
        std::string csv = "epoch,train_loss,test_loss\n";
        for (std::size_t e = 0; e < result.history.size(); ++e) {
            csv += fmt::format("{},{:.17g},{:.17g}\n", e + 1, result.history[e].train_loss, result.history[e].test_loss);
        }
        binio::write_file_atomic(a.history, csv);
    }
    print_summary({{"command", "train"},
                   {"out", a.out},
                   {"model", a.model},
                   {"case", a.case_tag},
                   {"parameters", model.network.parameter_count()},
                   {"config",
                    {{"learning_rate", a.config.learning_rate},
                     {"batch_size", a.config.batch_size},
                     {"epochs", a.config.epochs},
                     {"seed", a.config.seed},
                     {"loss", "mse"}}},
                   {"initial_train_loss", result.initial_train_loss},
                   {"train_loss", result.checkpoint.train_loss},
                   {"test_loss", result.checkpoint.test_loss}});
}

struct PredictArgs {
    std::string model;
    std::string data;
    std::optional<std::size_t> index;
    std::string id;
    std::string airfoil;
    double aoa = 0.0;
    double re = 2e6;
    double mach = 0.5;
    std::string out;
    std::string svg;
};

void run_predict(const PredictArgs& a) {
    const auto ckpt = models::load_checkpoint(a.model);
    const auto& spec = ckpt.model.case_spec;
    dataset::Sample sample;
    if (!a.airfoil.empty()) {
        // Build the input (and the reference for plotting) with the built-in solver.
        const auto airfoil = load_airfoil(a.airfoil);
        const panelflow::FlowCondition cond{a.aoa, a.re, a.mach};
        sample.condition = cond;
        if (spec.rotation_protocol) {
            sample.airfoil = geometry::rotate(airfoil, a.aoa);
            sample.cp = panelflow::solve_cp(sample.airfoil, {0.0, a.re, a.mach});
            sample.cp.condition = cond;
        } else {
            sample.airfoil = airfoil;
            sample.cp = panelflow::solve_cp(airfoil, cond);
        }
        sample.id = dataset::make_id(geometry::base_name(airfoil.name), cond, spec.rotation_protocol,
                                     dataset::Source::builtin_solver);
    } else if (!a.data.empty()) {
        const auto data = dataset::load_dataset(a.data);
        if (!(data.case_spec == spec)) {
            fail(ErrorCode::CaseMismatch, fmt::format("checkpoint is case {} but the dataset is {}",
                                                      dataset::case_tag(spec.id), dataset::case_tag(data.case_spec.id)));
        }
        sample = pick_sample(data, a.index, a.id);
    } else {
        fail(ErrorCode::InvalidArgument, "give --airfoil or --data");
    }

    const dataset::Sample* ptr = &sample;
    const auto raw = models::predict_raw(ckpt, std::span(&ptr, 1)).front();
    std::string text;
    eval::PlotKind kind;
    if (spec.direction == dataset::Direction::cp_to_shape) {
        const auto shape = models::unpack_shape(raw, "predicted " + sample.id);
        text = geometry::write_dat(shape);
        kind = eval::PlotKind::shape;
    } else {
        text = cp_table(models::unpack_cp(raw, sample.condition));
        kind = eval::PlotKind::cp;
    }
    if (a.out.empty()) {
        std::cout << text;
    } else {
        binio::write_file_atomic(a.out, text);
    }
    if (!a.svg.empty()) {
        binio::write_file_atomic(a.svg, eval::plot_comparison(sample, raw, kind));
    }
    const auto report = eval::evaluate_predictions(spec, models::to_string(ckpt.model.kind), std::span(&ptr, 1),
                                                   std::span(&raw, 1));
    ordered_json summary{{"command", "predict"}, {"id", sample.id}, {"mean_pct", report.aggregate.overall_mean_pct},
                         {"max_pct", report.aggregate.overall_max_pct}};
    if (!a.out.empty()) {
        print_summary(summary);
    } else {
        progress(summary.dump());
    }
}

struct EvalArgs {
    std::string model;
    std::string data;
    std::string out;
    std::string plots;
    std::size_t plot_count = 4;
    unsigned threads = 0;
};

void run_eval(const EvalArgs& a) {
    const auto ckpt = models::load_checkpoint(a.model);
    const auto data = dataset::load_dataset(a.data);
    const auto report = eval::evaluate(ckpt, data, a.threads);
    binio::write_file_atomic(a.out, eval::to_json(report));
    std::size_t plotted = 0;
    if (!a.plots.empty()) {
        fs::create_directories(a.plots);
        auto test = split_samples(data, dataset::SplitTag::test);
        std::sort(test.begin(), test.end(), [](const auto* x, const auto* y) { return x->id < y->id; });
        test.resize(std::min(test.size(), a.plot_count));
        const auto pred = models::predict_raw(ckpt, test, a.threads);
        const auto kind = data.case_spec.direction == dataset::Direction::cp_to_shape ? eval::PlotKind::shape
                                                                                     : eval::PlotKind::cp;
        for (std::size_t i = 0; i < test.size(); ++i) {
            const auto path = fs::path(a.plots) / fmt::format("sample_{:03d}.svg", i);
            binio::write_file_atomic(path.string(), eval::plot_comparison(*test[i], pred[i], kind));
            ++plotted;
        }
    }
    print_summary({{"command", "eval"},
                   {"out", a.out},
                   {"case", report.case_tag},
                   {"model", report.model_kind},
                   {"test_samples", report.per_sample.size()},
                   {"overall_mean_pct", report.aggregate.overall_mean_pct},
                   {"overall_max_pct", report.aggregate.overall_max_pct},
                   {"test_mse", report.aggregate.test_mse},
                   {"train_mse", report.aggregate.train_mse},
                   {"plots", plotted}});
}

void run_inspect(const std::string& path) {
    const auto bytes = binio::read_file(path);
    const std::string magic(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(4, bytes.size())));
    if (magic == "AFDS") {
        const auto d = dataset::deserialize(bytes);
        ordered_json j{{"file", path},
                       {"type", "dataset"},
                       {"version", dataset::kDatasetVersion},
                       {"case", dataset::case_tag(d.case_spec.id)},
                       {"seed", d.seed},
                       {"samples", d.samples.size()},
                       {"split", split_counts(d)}};
        auto& ids = j["first_ids"] = ordered_json::array();
        for (std::size_t i = 0; i < std::min<std::size_t>(5, d.samples.size()); ++i) {
            ids.push_back(d.samples[i].id);
        }
        std::cout << j.dump(2) << std::endl;
    } else if (magic == "AFNC") {
        const auto c = models::deserialize(bytes);
        const auto& net = c.model.network;
        ordered_json layers = ordered_json::array();
        for (std::size_t i = 0; i < net.layers().size(); ++i) {
            layers.push_back({{"kind", nn::to_string(net.layers()[i].kind)},
                              {"extents", net.layers()[i].extents()},
                              {"output", net.shape(i + 1)}});
        }
        ordered_json j{{"file", path},
                       {"type", "checkpoint"},
                       {"version", models::kCheckpointVersion},
                       {"model", models::to_string(c.model.kind)},
                       {"case", dataset::case_tag(c.model.case_spec.id)},
                       {"input", net.input_shape()},
                       {"scalar_inputs", net.scalar_inputs()},
                       {"output", net.output_shape()},
                       {"parameters", net.parameter_count()},
                       {"seed", c.seed},
                       {"learning_rate", c.config.learning_rate},
                       {"batch_size", c.config.batch_size},
                       {"epochs", c.config.epochs},
                       {"train_loss", c.train_loss},
                       {"test_loss", c.test_loss},
                       {"layers", layers}};
        std::cout << j.dump(2) << std::endl;
    } else {
        fail(ErrorCode::BadMagic, fmt::format("'{}' is neither a dataset (AFDS) nor a checkpoint (AFNC)", path));
    }
}

struct NacaArgs {
    std::string out;
    std::vector<std::string> codes;
    std::size_t points = 201;
};

// Default corpus: cambers 0-6 %, camber positions 20-60 %, thicknesses 8-21 %.
std::vector<std::string> default_naca_codes() {
    std::vector<std::string> codes;
    for (int t : {8, 10, 12, 15, 18, 21}) {
        codes.push_back(fmt::format("00{:02d}", t));
        for (int m = 1; m <= 6; ++m) {
            for (int p = 2; p <= 6; ++p) {
                codes.push_back(fmt::format("{}{}{:02d}", m, p, t));
            }
        }
    }
    std::sort(codes.begin(), codes.end());
    return codes;
}

void run_naca(const NacaArgs& a) {
    const auto codes = a.codes.empty() ? default_naca_codes() : a.codes;
    fs::create_directories(a.out);
    for (const auto& code : codes) {
        if (code.size() != 4 || !std::all_of(code.begin(), code.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            fail(ErrorCode::InvalidArgument, fmt::format("'{}' is not a NACA 4-digit code", code));
        }
        const double m = (code[0] - '0') / 100.0;
        const double p = (code[1] - '0') / 10.0;
        const double t = std::stoi(code.substr(2)) / 100.0;
        const auto contour = geometry::naca4(m, p, t, a.points, "NACA " + code);
        binio::write_file_atomic((fs::path(a.out) / ("naca" + code + ".dat")).string(), geometry::write_dat(contour));
    }
    print_summary({{"command", "naca"}, {"out", a.out}, {"airfoils", codes.size()}});
}

struct SolveArgs {
    std::string airfoil;
    double aoa = 0.0;
    double mach = 0.5;
    std::string out;
};

void run_solve(const SolveArgs& a) {
    const auto airfoil = load_airfoil(a.airfoil);
    const auto cp = panelflow::solve_cp(airfoil, {a.aoa, 2e6, a.mach});
    const std::string text = cp_table(cp);
    if (a.out.empty()) {
        std::cout << text;
    } else {
        binio::write_file_atomic(a.out, text);
        print_summary({{"command", "solve"}, {"airfoil", airfoil.name}, {"aoa", a.aoa}, {"mach", a.mach}, {"cl", cp.cl}});
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"foilforge: airfoil shape <-> pressure distribution surrogates"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    const std::string cases = "c1, c2a, c2b, c3, c4a, c4b, c5";

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen", "Generate a labelled dataset from a directory of Selig .dat files");
    cmd_gen->add_option("--airfoils", gen.airfoils, "Directory of .dat files")->required();
    cmd_gen->add_option("--case", gen.case_tag, "Case tag: " + cases)->required();
    cmd_gen->add_option("--out", gen.out, "Output dataset (.afds)")->required();
    cmd_gen->add_option("--seed", gen.seed, "Seed for the grouped train/test split")->required();
    cmd_gen->add_option("--aoa", gen.aoa, "AoA list in degrees, e.g. 0,1,2 or logspace:lo:hi:n (default 0..15)");
    cmd_gen->add_option("--re", gen.re, "Re list, e.g. 2e6 or logspace:1e4:9e6:27 (default per case)");
    cmd_gen->add_option("--mach", gen.mach, "Freestream Mach number in [0, 0.7)")->capture_default_str();
    cmd_gen->add_option("--cp-floor", gen.cp_floor, "Drop solves whose Cp falls below this value")->capture_default_str();
    cmd_gen->add_option("--split", gen.split, "Training fraction of airfoil groups; 0 leaves samples unassigned")
        ->capture_default_str();
    cmd_gen->add_option("--csv", gen.csv, "Also write a CSV export");
    cmd_gen->add_option("--threads", gen.threads, "Worker threads (0 = all cores); results do not depend on it");

    IngestArgs ingest;
    auto* cmd_ingest = app.add_subcommand("ingest", "Add externally computed two-column 'x Cp' files as samples");
    cmd_ingest->add_option("--case", ingest.case_tag, "Case tag: " + cases)->required();
    cmd_ingest->add_option("--airfoil", ingest.airfoil, "Selig .dat file of the airfoil")->required();
    cmd_ingest->add_option("--cp", ingest.cp_files, "Cp file (repeatable, paired with --aoa)")->required();
    cmd_ingest->add_option("--aoa", ingest.aoa, "AoA in degrees for each --cp file")->required();
    cmd_ingest->add_option("--re", ingest.re, "Reynolds number")->capture_default_str();
    cmd_ingest->add_option("--mach", ingest.mach, "Mach number")->capture_default_str();
    cmd_ingest->add_option("--into", ingest.into, "Existing dataset to extend");
    cmd_ingest->add_option("--out", ingest.out, "Output dataset (.afds)")->required();
    cmd_ingest->add_option("--split", ingest.split, "Re-split with this training fraction (0 = keep tags)");
    cmd_ingest->add_option("--seed", ingest.seed, "Seed for the split")->required();

    RasterArgs raster;
    auto* cmd_raster = app.add_subcommand("raster", "Render one sample as a 200x200 binary PGM");
    cmd_raster->add_option("--data", raster.data, "Dataset (.afds)")->required();
    cmd_raster->add_option("--index", raster.index, "Sample index (default 0)");
    cmd_raster->add_option("--id", raster.id, "Sample id (overrides --index)");
    cmd_raster->add_option("--content", raster.content, "cp or outline (default: the case's CNN input)")
        ->check(CLI::IsMember({"cp", "outline"}));
    cmd_raster->add_option("--out", raster.out, "Output .pgm")->required();

    TrainArgs train;
    auto* cmd_train = app.add_subcommand("train", "Train a DNN or CNN on a split dataset");
    cmd_train->add_option("--case", train.case_tag, "Case tag: " + cases)->required();
    cmd_train->add_option("--model", train.model, "dnn or cnn")->required()->check(CLI::IsMember({"dnn", "cnn"}));
    cmd_train->add_option("--data", train.data, "Dataset (.afds) with train/test tags")->required();
    cmd_train->add_option("--epochs", train.config.epochs, "Epochs")->capture_default_str();
    cmd_train->add_option("--batch", train.config.batch_size, "Mini-batch size")->capture_default_str();
    cmd_train->add_option("--lr", train.config.learning_rate, "Adam learning rate")->capture_default_str();
    cmd_train->add_option("--seed", train.config.seed, "Seed for initialization and batch order")->required();
    cmd_train->add_option("--threads", train.config.threads, "Worker threads (0 = all cores); results do not depend on it");
    cmd_train->add_option("--out", train.out, "Output checkpoint (.afnc)")->required();
    cmd_train->add_option("--history", train.history, "Write per-epoch losses as CSV");

    PredictArgs predict;
    auto* cmd_predict = app.add_subcommand("predict", "Run a checkpoint on one input");
    cmd_predict->add_option("--model", predict.model, "Checkpoint (.afnc)")->required();
    cmd_predict->add_option("--data", predict.data, "Dataset holding the input sample");
    cmd_predict->add_option("--index", predict.index, "Sample index in --data (default 0)");
    cmd_predict->add_option("--id", predict.id, "Sample id in --data");
    cmd_predict->add_option("--airfoil", predict.airfoil, "Selig .dat; the input is built with the panel solver");
    cmd_predict->add_option("--aoa", predict.aoa, "AoA for --airfoil")->capture_default_str();
    cmd_predict->add_option("--re", predict.re, "Re for --airfoil")->capture_default_str();
    cmd_predict->add_option("--mach", predict.mach, "Mach for --airfoil")->capture_default_str();
    cmd_predict->add_option("--out", predict.out, "Output text (Selig .dat or 'x cp_s cp_p' table); stdout if omitted");
    cmd_predict->add_option("--svg", predict.svg, "Comparison plot against the reference");

    EvalArgs ev;
    auto* cmd_eval = app.add_subcommand("eval", "Score a checkpoint on a dataset's test split");
    cmd_eval->add_option("--model", ev.model, "Checkpoint (.afnc)")->required();
    cmd_eval->add_option("--data", ev.data, "Dataset (.afds)")->required();
    cmd_eval->add_option("--out", ev.out, "JSON report")->required();
    cmd_eval->add_option("--plots", ev.plots, "Directory for SVG comparison plots");
    cmd_eval->add_option("--plot-count", ev.plot_count, "Number of test samples to plot")->capture_default_str();
    cmd_eval->add_option("--threads", ev.threads, "Worker threads (0 = all cores)");

    std::string inspect_path;
    auto* cmd_inspect = app.add_subcommand("inspect", "Print the header of a dataset or checkpoint as JSON");
    cmd_inspect->add_option("file", inspect_path, "Dataset (.afds) or checkpoint (.afnc)")->required();

    NacaArgs naca;
    auto* cmd_naca = app.add_subcommand("naca", "Write NACA 4-digit .dat files");
    cmd_naca->add_option("--out", naca.out, "Output directory")->required();
    cmd_naca->add_option("--code", naca.codes, "4-digit code (repeatable; default: the built-in family)");
    cmd_naca->add_option("--points", naca.points, "Points per surface")->capture_default_str();

    SolveArgs solve;
    auto* cmd_solve = app.add_subcommand("solve", "Panel-solve one airfoil and print Cp on the stations");
    cmd_solve->add_option("--airfoil", solve.airfoil, "Selig .dat file")->required();
    cmd_solve->add_option("--aoa", solve.aoa, "AoA in degrees")->capture_default_str();
    cmd_solve->add_option("--mach", solve.mach, "Mach number")->capture_default_str();
    cmd_solve->add_option("--out", solve.out, "Output table; stdout if omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*cmd_gen) {
            run_gen(gen);
        } else if (*cmd_ingest) {
            run_ingest(ingest);
        } else if (*cmd_raster) {
            run_raster(raster);
        } else if (*cmd_train) {
            run_train(train);
        } else if (*cmd_predict) {
            run_predict(predict);
        } else if (*cmd_eval) {
            run_eval(ev);
        } else if (*cmd_inspect) {
            run_inspect(inspect_path);
        } else if (*cmd_naca) {
            run_naca(naca);
        } else if (*cmd_solve) {
            run_solve(solve);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        if (e.code() == ErrorCode::InvalidArgument) {
            return kExitUsage;
        }
        return is_numerical(e.code()) ? kExitNumerical : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitInput;
    }
    return 0;
}
