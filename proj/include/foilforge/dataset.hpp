#pragma once

#include "foilforge/geometry.hpp"
#include "foilforge/panelflow.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace foilforge::dataset {

using panelflow::CpDistribution;
using panelflow::FlowCondition;

enum class CaseId : std::uint8_t { c1 = 0, c2a = 1, c2b = 2, c3 = 3, c4a = 4, c4b = 5, c5 = 6 };

enum class Direction : std::uint8_t { cp_to_shape, shape_to_cp };

struct CaseSpec {
    CaseId id = CaseId::c1;
    Direction direction = Direction::cp_to_shape;
    bool uses_re_input = false;
    bool rotation_protocol = false;

    friend bool operator==(const CaseSpec&, const CaseSpec&) = default;
};

CaseSpec case_spec(CaseId id);
/// Lowercase tags c1, c2a, c2b, c3, c4a, c4b, c5.
CaseSpec parse_case(std::string_view tag);
std::string_view case_tag(CaseId id);

enum class Source : std::uint8_t { builtin_solver = 0, ingested = 1 };
enum class SplitTag : std::uint8_t { unassigned = 0, train = 1, test = 2 };

struct Sample {
    geometry::Airfoil airfoil; // in the frame the case trains on (rotated for C2B/C4B)
    FlowCondition condition;
    CpDistribution cp;
    Source source = Source::builtin_solver;
    std::string id;
};

struct Dataset {
    CaseSpec case_spec;
    std::uint64_t seed = 0;
    std::vector<Sample> samples;
    std::vector<SplitTag> split; // parallel to samples

    std::vector<std::size_t> indices(SplitTag tag) const;
};

/// Airfoil name used for grouping: the name with any rotation annotation removed.
std::string_view group_name(const Sample& sample);

// ---------------------------------------------------------------------------
// Sweep

struct SweepOptions {
    std::vector<double> aoa_grid;
    std::vector<double> re_grid;
    double mach = 0.5;
    /// Solves whose corrected Cp drops below this anywhere are discarded. Near the
    /// Karman-Tsien pole the correction runs away to values in the thousands; the default
    /// matches the fixed Cp window of the rasterizer. -infinity keeps everything.
    double cp_floor = -8.0;
    unsigned threads = 0;
};

/// 0..15 degrees in 1-degree steps; 27 log-uniform Re in [1e4, 9e6] for Re-varying
/// cases, otherwise Re = 2e6; M = 0.5.
SweepOptions default_sweep(const CaseSpec& spec);

/// n values log-uniform between lo and hi inclusive.
std::vector<double> logspace(double lo, double hi, std::size_t n);

/// Parses "1e4,2e6" or "logspace:1e4:9e6:27".
std::vector<double> parse_value_list(std::string_view text);

struct SweepReport {
    std::size_t attempted = 0;
    std::vector<std::string> dropped; // one reason per failed airfoil or solve
};

/// Normalizes, repanels and solves every (airfoil, aoa, re) combination. Samples come
/// out sorted by (name, aoa, re) and unassigned to any split.
Dataset sweep_generate(std::span<const geometry::RawContour> corpus, const CaseSpec& spec, const SweepOptions& options,
                       SweepReport* report = nullptr);

/// Sample id: "<name>|aoa=<deg>|re=<re>|M=<mach>" with a "|rot" marker for rotated cases
/// and "|xfoil" for ingested data.
std::string make_id(std::string_view airfoil_name, const FlowCondition& condition, bool rotated, Source source);

// ---------------------------------------------------------------------------
// Encoding

enum class EncodeMode : std::uint8_t { dnn, cnn };

inline constexpr std::size_t kRasterSize = 200;
using Raster = std::vector<std::uint8_t>; // kRasterSize * kRasterSize, row-major, row 0 at the top

struct EncodedPair {
    std::vector<double> input;   // DNN: 251 or 252 values
    Raster image;                // CNN: 200 x 200 pixels in {0, 255}
    std::vector<double> scalars; // CNN sidecar: normalized aoa [, normalized re]
    std::vector<double> target;  // 250 values
};

double normalized_aoa(double aoa_deg);
double normalized_re(double re);

std::size_t dnn_input_width(const CaseSpec& spec);
std::size_t scalar_count(const CaseSpec& spec);

EncodedPair encode(const Sample& sample, const CaseSpec& spec, EncodeMode mode);

/// Target block [x(125), y(125)] or [cp_suction(125), cp_pressure(125)].
std::vector<double> target_vector(const Sample& sample, const CaseSpec& spec);

// ---------------------------------------------------------------------------
// Rasterization

enum class RasterContent : std::uint8_t { cp_curves, airfoil_outline };

/// Deterministic monochrome plot with 1-pixel Bresenham polylines.
/// cp_curves: x in [0, 1] -> columns, Cp in [-8, 2] -> rows (+2 on the top row).
/// airfoil_outline: x in [-0.05, 1.05], y in [-0.55, 0.55].
Raster rasterize(const Sample& sample, RasterContent content);

/// Row for a Cp value, clamped to the window.
int cp_row(double cp);
/// Column for a chord fraction in the Cp plot.
int cp_column(double x);
int outline_column(double x);
int outline_row(double y);

/// Binary PGM (P5), maxval 255.
std::string to_pgm(const Raster& raster);

// ---------------------------------------------------------------------------
// Ingestion of externally generated (viscous) Cp files

/// Parses two-column "x Cp" text (lines starting with '#' or a non-numeric token are
/// headers), splits at the minimum-x row and resamples both surfaces onto the stations.
Sample ingest_xfoil_cp(std::string_view cp_file, const geometry::Airfoil& airfoil, const FlowCondition& condition);

// ---------------------------------------------------------------------------
// Splitting and persistence

/// Grouped split: airfoil groups (by base name) are shuffled with `seed` and the first
/// round(ratio * groups) go to train. Every sample of one airfoil lands on one side.
Dataset split(Dataset dataset, double ratio, std::uint64_t seed);

inline constexpr std::uint32_t kDatasetVersion = 1;

std::vector<std::uint8_t> serialize(const Dataset& dataset);
Dataset deserialize(std::span<const std::uint8_t> bytes);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

/// One row per sample; columns documented in the header line.
std::string to_csv(const Dataset& dataset);

} // namespace foilforge::dataset
