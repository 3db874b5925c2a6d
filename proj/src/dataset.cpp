#include "foilforge/dataset.hpp"

#include "foilforge/binio.hpp"
#include "foilforge/error.hpp"
#include "foilforge/log.hpp"
#include "foilforge/parallel.hpp"
#include "foilforge/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <tuple>

namespace foilforge::dataset {

CaseSpec case_spec(CaseId id) {
    CaseSpec s;
    s.id = id;
    switch (id) {
    case CaseId::c1:
    case CaseId::c2a:
        break;
    case CaseId::c2b:
        s.rotation_protocol = true;
        break;
    case CaseId::c3:
        s.uses_re_input = true;
        break;
    case CaseId::c4a:
        s.direction = Direction::shape_to_cp;
        break;
    case CaseId::c4b:
        s.direction = Direction::shape_to_cp;
        s.rotation_protocol = true;
        break;
    case CaseId::c5:
        s.direction = Direction::shape_to_cp;
        s.uses_re_input = true;
        break;
    }
    return s;
}

namespace {
constexpr std::array<std::string_view, 7> kCaseTags{"c1", "c2a", "c2b", "c3", "c4a", "c4b", "c5"};
}

std::string_view case_tag(CaseId id) {
    return kCaseTags.at(static_cast<std::size_t>(id));
}

CaseSpec parse_case(std::string_view tag) {
    for (std::size_t i = 0; i < kCaseTags.size(); ++i) {
        if (kCaseTags[i] == tag) {
            return case_spec(static_cast<CaseId>(i));
        }
    }
    fail(ErrorCode::InvalidArgument, fmt::format("unknown case '{}' (expected c1, c2a, c2b, c3, c4a, c4b, c5)", tag));
}

std::vector<std::size_t> Dataset::indices(SplitTag tag) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split[i] == tag) {
            out.push_back(i);
        }
    }
    return out;
}

std::string_view group_name(const Sample& sample) {
    return geometry::base_name(sample.airfoil.name);
}

// ---------------------------------------------------------------------------

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    if (n == 1) {
        return {lo};
    }
    std::vector<double> out(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

namespace {

double parse_number(std::string_view token) {
    const auto first = token.find_first_not_of(" \t");
    token = first == std::string_view::npos ? std::string_view{} : token.substr(first, token.find_last_not_of(" \t") - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
        fail(ErrorCode::InvalidArgument, fmt::format("'{}' is not a number", token));
    }
    return v;
}

std::vector<std::string_view> split_on(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        out.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

} // namespace

std::vector<double> parse_value_list(std::string_view text) {
    if (text.starts_with("logspace:")) {
        const auto parts = split_on(text.substr(9), ':');
        if (parts.size() != 3) {
            fail(ErrorCode::InvalidArgument, fmt::format("expected logspace:LO:HI:N, got '{}'", text));
        }
        const double lo = parse_number(parts[0]);
        const double hi = parse_number(parts[1]);
        const double n = parse_number(parts[2]);
        if (!(lo > 0 && hi >= lo && n >= 1 && n == std::floor(n))) {
            fail(ErrorCode::InvalidArgument, fmt::format("invalid logspace '{}'", text));
        }
        return logspace(lo, hi, static_cast<std::size_t>(n));
    }
    std::vector<double> out;
    for (auto token : split_on(text, ',')) {
        out.push_back(parse_number(token));
    }
    return out;
}

SweepOptions default_sweep(const CaseSpec& spec) {
    SweepOptions o;
    for (int a = 0; a <= 15; ++a) {
        o.aoa_grid.push_back(a);
    }
    if (spec.id == CaseId::c1) {
        o.aoa_grid = {0.0};
    }
    o.re_grid = spec.uses_re_input ? logspace(1e4, 9e6, 27) : std::vector<double>{2e6};
    o.mach = 0.5;
    return o;
}

std::string make_id(std::string_view airfoil_name, const FlowCondition& c, bool rotated, Source source) {
    return fmt::format("{}{}|aoa={:g}|re={:.6g}|M={:g}{}", airfoil_name, rotated ? "|rot" : "", c.aoa_deg, c.re, c.mach,
                       source == Source::ingested ? "|xfoil" : "");
}

Dataset sweep_generate(std::span<const geometry::RawContour> corpus, const CaseSpec& spec, const SweepOptions& options,
                       SweepReport* report) {
    if (corpus.empty()) {
        fail(ErrorCode::EmptyCorpus, "no airfoils supplied");
    }
    if (options.aoa_grid.empty() || options.re_grid.empty()) {
        fail(ErrorCode::InvalidArgument, "empty AoA or Re grid");
    }
    for (double re : options.re_grid) {
        if (!(re >= 1e4 && re <= 9e6)) {
            fail(ErrorCode::InvalidArgument, fmt::format("Re {:g} outside [1e4, 9e6]", re));
        }
    }
    if (!(options.mach >= 0.0 && options.mach < 0.7)) {
        fail(ErrorCode::InvalidArgument, fmt::format("Mach {:g} outside [0, 0.7)", options.mach));
    }

    std::mutex drop_mutex;
    std::vector<std::string> dropped;
    auto drop = [&](std::string reason) {
        std::lock_guard lock(drop_mutex);
        dropped.push_back(std::move(reason));
    };

    // Geometry stage, one slot per corpus entry.
    std::vector<std::optional<geometry::Airfoil>> shapes(corpus.size());
    parallel_for(corpus.size(), options.threads, [&](std::size_t i) {
        try {
            shapes[i] = geometry::repanel(geometry::normalize(corpus[i]));
        } catch (const Error& e) {
            drop(fmt::format("{}: {}", corpus[i].name, e.what()));
        }
    });
    std::set<std::string> seen;
    for (const auto& shape : shapes) {
        if (shape && !seen.insert(shape->name).second) {
            fail(ErrorCode::InvalidArgument, fmt::format("duplicate airfoil name '{}'", shape->name));
        }
    }

    struct Job {
        std::size_t shape;
        double aoa;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (!shapes[i]) {
            continue;
        }
        for (double aoa : options.aoa_grid) {
            jobs.push_back({i, aoa});
        }
    }

    // The inviscid solve does not depend on Re: solve once per (airfoil, aoa) and
    // stamp every Re of the grid onto a copy.
    std::vector<std::vector<Sample>> results(jobs.size());
    parallel_for(jobs.size(), options.threads, [&](std::size_t j) {
        const Job& job = jobs[j];
        const geometry::Airfoil& base = *shapes[job.shape];
        const double re0 = options.re_grid.front();
        try {
            Sample s;
            s.source = Source::builtin_solver;
            if (spec.rotation_protocol) {
                s.airfoil = geometry::rotate(base, job.aoa);
                s.cp = panelflow::solve_cp(s.airfoil, {0.0, re0, options.mach});
            } else {
                s.airfoil = base;
                s.cp = panelflow::solve_cp(base, {job.aoa, re0, options.mach});
            }
            const double lowest = std::min(*std::min_element(s.cp.cp_suction.begin(), s.cp.cp_suction.end()),
                                           *std::min_element(s.cp.cp_pressure.begin(), s.cp.cp_pressure.end()));
            if (lowest < options.cp_floor) {
                drop(fmt::format("{} aoa={:g}: Cp min {:.4g} below the floor {:g}", base.name, job.aoa, lowest,
                                 options.cp_floor));
                return;
            }
            for (double re : options.re_grid) {
                Sample copy = s;
                copy.condition = {job.aoa, re, options.mach};
                copy.cp.condition = copy.condition;
                copy.id = make_id(base.name, copy.condition, spec.rotation_protocol, copy.source);
                results[j].push_back(std::move(copy));
            }
        } catch (const Error& e) {
            drop(fmt::format("{} aoa={:g}: {}", base.name, job.aoa, e.what()));
        }
    });

    Dataset out;
    out.case_spec = spec;
    for (auto& group : results) {
        for (auto& sample : group) {
            out.samples.push_back(std::move(sample));
        }
    }
    std::stable_sort(out.samples.begin(), out.samples.end(), [](const Sample& a, const Sample& b) {
        return std::tuple(group_name(a), a.condition.aoa_deg, a.condition.re) <
               std::tuple(group_name(b), b.condition.aoa_deg, b.condition.re);
    });
    out.split.assign(out.samples.size(), SplitTag::unassigned);

    std::sort(dropped.begin(), dropped.end());
    for (const auto& reason : dropped) {
        log_note("dropped: " + reason);
    }
    if (report) {
        report->attempted = jobs.size() * options.re_grid.size();
        report->dropped = dropped;
    }
    if (out.samples.empty()) {
        fail(ErrorCode::AllSamplesFailed, fmt::format("all {} solves failed", jobs.size()));
    }
    return out;
}

// ---------------------------------------------------------------------------

double normalized_aoa(double aoa_deg) {
    return aoa_deg / 15.0;
}

double normalized_re(double re) {
    return (std::log10(re) - 4.0) / (std::log10(9e6) - 4.0);
}

std::size_t scalar_count(const CaseSpec& spec) {
    return spec.uses_re_input ? 2 : 1;
}

std::size_t dnn_input_width(const CaseSpec& spec) {
    return 2 * geometry::kNodes + scalar_count(spec);
}

namespace {

void append_shape(std::vector<double>& out, const geometry::Airfoil& a) {
    for (const auto& p : a.points) {
        out.push_back(p.x);
    }
    for (const auto& p : a.points) {
        out.push_back(p.y);
    }
}

void append_cp(std::vector<double>& out, const CpDistribution& cp) {
    out.insert(out.end(), cp.cp_suction.begin(), cp.cp_suction.end());
    out.insert(out.end(), cp.cp_pressure.begin(), cp.cp_pressure.end());
}

std::vector<double> scalars_for(const Sample& s, const CaseSpec& spec) {
    std::vector<double> out{normalized_aoa(s.condition.aoa_deg)};
    if (spec.uses_re_input) {
        out.push_back(normalized_re(s.condition.re));
    }
    return out;
}

} // namespace

std::vector<double> target_vector(const Sample& sample, const CaseSpec& spec) {
    std::vector<double> t;
    t.reserve(2 * geometry::kNodes);
    if (spec.direction == Direction::cp_to_shape) {
        append_shape(t, sample.airfoil);
    } else {
        append_cp(t, sample.cp);
    }
    return t;
}

EncodedPair encode(const Sample& sample, const CaseSpec& spec, EncodeMode mode) {
    EncodedPair pair;
    pair.target = target_vector(sample, spec);
    const auto scalars = scalars_for(sample, spec);
    if (mode == EncodeMode::dnn) {
        pair.input.reserve(dnn_input_width(spec));
        if (spec.direction == Direction::cp_to_shape) {
            append_cp(pair.input, sample.cp);
        } else {
            append_shape(pair.input, sample.airfoil);
        }
        pair.input.insert(pair.input.end(), scalars.begin(), scalars.end());
    } else {
        pair.image = rasterize(sample, spec.direction == Direction::cp_to_shape ? RasterContent::cp_curves
                                                                               : RasterContent::airfoil_outline);
        pair.scalars = scalars;
    }
    return pair;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kLast = static_cast<int>(kRasterSize) - 1;

int to_pixel(double v) {
    return std::clamp(static_cast<int>(std::floor(v)), 0, kLast);
}

void plot_line(Raster& r, int x0, int y0, int x1, int y1) {
    const int dx = std::abs(x1 - x0);
    const int sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0);
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        r[static_cast<std::size_t>(y0) * kRasterSize + static_cast<std::size_t>(x0)] = 255;
        if (x0 == x1 && y0 == y1) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

template <typename Pixels>
void plot_polyline(Raster& r, const Pixels& pts) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        plot_line(r, pts[i].first, pts[i].second, pts[i + 1].first, pts[i + 1].second);
    }
    if (pts.size() == 1) {
        plot_line(r, pts[0].first, pts[0].second, pts[0].first, pts[0].second);
    }
}

} // namespace

int cp_row(double cp) {
    const double clamped = std::clamp(cp, -8.0, 2.0);
    return to_pixel(kLast * (2.0 - clamped) / 10.0);
}

int cp_column(double x) {
    return to_pixel(kLast * std::clamp(x, 0.0, 1.0));
}

int outline_column(double x) {
    return to_pixel(kLast * (x + 0.05) / 1.1);
}

int outline_row(double y) {
    return to_pixel(kLast * (0.55 - y) / 1.1);
}

Raster rasterize(const Sample& sample, RasterContent content) {
    Raster r(kRasterSize * kRasterSize, 0);
    using Pixel = std::pair<int, int>;
    if (content == RasterContent::cp_curves) {
        const auto& grid = CpDistribution::stations();
        for (const auto* curve : {&sample.cp.cp_suction, &sample.cp.cp_pressure}) {
            std::vector<Pixel> pts;
            for (std::size_t k = 0; k < geometry::kStations; ++k) {
                pts.emplace_back(cp_column(grid[k]), cp_row((*curve)[k]));
            }
            plot_polyline(r, pts);
        }
    } else {
        std::vector<Pixel> pts;
        for (const auto& p : sample.airfoil.points) {
            pts.emplace_back(outline_column(p.x), outline_row(p.y));
        }
        pts.push_back(pts.front());
        plot_polyline(r, pts);
    }
    return r;
}

std::string to_pgm(const Raster& raster) {
    std::string out = fmt::format("P5\n{} {}\n255\n", kRasterSize, kRasterSize);
    out.append(raster.begin(), raster.end());
    return out;
}

// ---------------------------------------------------------------------------

Sample ingest_xfoil_cp(std::string_view cp_file, const geometry::Airfoil& airfoil, const FlowCondition& condition) {
    std::vector<double> xs;
    std::vector<double> cps;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < cp_file.size()) {
        const auto end = cp_file.find('\n', pos);
        std::string_view line =
            cp_file.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? cp_file.size() : end + 1;
        ++line_no;

        std::vector<std::string_view> tokens;
        std::size_t cursor = 0;
        while (true) {
            const auto start = line.find_first_not_of(" \t\r", cursor);
            if (start == std::string_view::npos) {
                break;
            }
            const auto stop = std::min(line.find_first_of(" \t\r", start), line.size());
            tokens.push_back(line.substr(start, stop - start));
            cursor = stop;
        }
        if (tokens.empty() || tokens[0].front() == '#') {
            continue;
        }
        double x = 0.0;
        const auto [p0, e0] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), x);
        if (e0 != std::errc() || p0 != tokens[0].data() + tokens[0].size()) {
            if (xs.empty()) {
                continue; // header text ahead of the data block
            }
            throw Error(ErrorCode::MalformedLine, fmt::format("non-numeric x '{}'", tokens[0]), line_no);
        }
        double cp = 0.0;
        bool ok = tokens.size() == 2;
        if (ok) {
            const auto [p1, e1] = std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), cp);
            ok = e1 == std::errc() && p1 == tokens[1].data() + tokens[1].size();
        }
        if (!ok || !std::isfinite(x) || !std::isfinite(cp)) {
            throw Error(ErrorCode::MalformedLine, fmt::format("expected 'x Cp', got '{}'", line), line_no);
        }
        xs.push_back(x);
        cps.push_back(cp);
    }
    if (xs.size() < 40) {
        fail(ErrorCode::InsufficientPoints, fmt::format("{} Cp rows, at least 40 required", xs.size()));
    }
    const std::size_t le = static_cast<std::size_t>(std::min_element(xs.begin(), xs.end()) - xs.begin());
    std::vector<double> ux;
    std::vector<double> uc;
    for (std::size_t i = le + 1; i-- > 0;) {
        ux.push_back(xs[i]);
        uc.push_back(cps[i]);
    }
    const std::vector<double> lx(xs.begin() + static_cast<std::ptrdiff_t>(le), xs.end());
    const std::vector<double> lc(cps.begin() + static_cast<std::ptrdiff_t>(le), cps.end());

    Sample s;
    s.airfoil = airfoil;
    s.condition = condition;
    s.source = Source::ingested;
    s.cp.condition = condition;
    const auto& grid = CpDistribution::stations();
    for (std::size_t k = 0; k < geometry::kStations; ++k) {
        s.cp.cp_suction[k] = geometry::sample_polyline(ux, uc, grid[k]);
        s.cp.cp_pressure[k] = geometry::sample_polyline(lx, lc, grid[k]);
    }
    s.cp.cl = panelflow::pressure_jump_cl(s.cp);
    s.id = make_id(geometry::base_name(airfoil.name), condition, airfoil.name.find(geometry::kRotationTag) != std::string::npos,
                   Source::ingested);
    return s;
}

// ---------------------------------------------------------------------------

Dataset split(Dataset dataset, double ratio, std::uint64_t seed) {
    if (dataset.samples.size() < 5) {
        fail(ErrorCode::TooFewSamples, fmt::format("{} samples, at least 5 required to split", dataset.samples.size()));
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        fail(ErrorCode::InvalidArgument, fmt::format("split ratio {:g} outside (0, 1)", ratio));
    }
    std::vector<std::string> groups;
    {
        std::set<std::string_view> unique;
        for (const auto& s : dataset.samples) {
            unique.insert(group_name(s));
        }
        groups.assign(unique.begin(), unique.end());
    }
    Rng rng(seed);
    rng.shuffle(groups);
    std::size_t train_groups = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(groups.size()) + 0.5));
    if (groups.size() >= 2) {
        train_groups = std::clamp<std::size_t>(train_groups, 1, groups.size() - 1);
    }
    std::map<std::string_view, SplitTag> assignment;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        assignment[groups[g]] = g < train_groups ? SplitTag::train : SplitTag::test;
    }
    dataset.split.resize(dataset.samples.size());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        dataset.split[i] = assignment.at(group_name(dataset.samples[i]));
    }
    dataset.seed = seed;
    return dataset;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kDatasetMagic = "AFDS";
}

std::vector<std::uint8_t> serialize(const Dataset& d) {
    if (d.split.size() != d.samples.size()) {
        fail(ErrorCode::InvalidArgument, "split tags do not match sample count");
    }
    binio::Writer w;
    w.raw(kDatasetMagic);
    w.u32(kDatasetVersion);
    w.u8(static_cast<std::uint8_t>(d.case_spec.id));
    w.u64(d.seed);
    w.u64(d.samples.size());
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const Sample& s = d.samples[i];
        w.u32(static_cast<std::uint32_t>(s.id.size()));
        w.raw(s.id);
        w.u32(static_cast<std::uint32_t>(s.airfoil.name.size()));
        w.raw(s.airfoil.name);
        w.f64(s.condition.aoa_deg);
        w.f64(s.condition.re);
        w.f64(s.condition.mach);
        for (const auto& p : s.airfoil.points) {
            w.f64(p.x);
            w.f64(p.y);
        }
        for (double v : s.cp.cp_suction) {
            w.f64(v);
        }
        for (double v : s.cp.cp_pressure) {
            w.f64(v);
        }
        w.f64(s.cp.cl);
        w.u8(static_cast<std::uint8_t>(s.source));
        w.u8(static_cast<std::uint8_t>(d.split[i]));
    }
    w.seal();
    return w.bytes();
}

Dataset deserialize(std::span<const std::uint8_t> bytes) {
    binio::Reader r(bytes);
    if (r.remaining() < 4 || r.raw(4) != kDatasetMagic) {
        fail(ErrorCode::BadMagic, "not a dataset file (magic AFDS expected)");
    }
    const std::uint32_t version = r.u32();
    if (version != kDatasetVersion) {
        fail(ErrorCode::VersionMismatch, fmt::format("dataset version {} (supported: {})", version, kDatasetVersion));
    }
    Dataset d;
    const std::uint8_t tag = r.u8();
    if (tag >= kCaseTags.size()) {
        fail(ErrorCode::SpecMismatch, fmt::format("unknown case tag {}", tag));
    }
    d.case_spec = case_spec(static_cast<CaseId>(tag));
    d.seed = r.u64();
    const std::uint64_t count = r.u64();
    // smallest possible record: two empty strings plus the fixed block
    constexpr std::size_t kFixed = 4 + 4 + 3 * 8 + 250 * 8 + 250 * 8 + 8 + 2;
    if (count > r.remaining() / kFixed) {
        fail(ErrorCode::TruncatedFile, fmt::format("{} samples declared but file too short", count));
    }
    d.samples.reserve(count);
    d.split.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Sample s;
        s.id = r.raw(r.u32());
        s.airfoil.name = r.raw(r.u32());
        s.condition.aoa_deg = r.f64();
        s.condition.re = r.f64();
        s.condition.mach = r.f64();
        for (auto& p : s.airfoil.points) {
            p.x = r.f64();
            p.y = r.f64();
        }
        for (double& v : s.cp.cp_suction) {
            v = r.f64();
        }
        for (double& v : s.cp.cp_pressure) {
            v = r.f64();
        }
        s.cp.cl = r.f64();
        s.cp.condition = s.condition;
        const std::uint8_t source = r.u8();
        const std::uint8_t split_tag = r.u8();
        if (source > 1 || split_tag > 2) {
            fail(ErrorCode::SpecMismatch, fmt::format("sample {}: bad source/split tag", i));
        }
        s.source = static_cast<Source>(source);
        d.split.push_back(static_cast<SplitTag>(split_tag));
        d.samples.push_back(std::move(s));
    }
    r.verify_seal();
    return d;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    binio::write_file_atomic(path, serialize(dataset));
}

Dataset load_dataset(const std::string& path) {
    return deserialize(binio::read_file(path));
}

std::string to_csv(const Dataset& d) {
    std::string out = "id,airfoil,aoa,re,mach,source,split,cl";
    for (std::size_t k = 0; k < geometry::kNodes; ++k) {
        out += fmt::format(",x{}", k);
    }
    for (std::size_t k = 0; k < geometry::kNodes; ++k) {
        out += fmt::format(",y{}", k);
    }
    for (std::size_t k = 0; k < geometry::kStations; ++k) {
        out += fmt::format(",cps{}", k);
    }
    for (std::size_t k = 0; k < geometry::kStations; ++k) {
        out += fmt::format(",cpp{}", k);
    }
    out += '\n';
    static constexpr std::array<std::string_view, 3> kSplit{"none", "train", "test"};
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const Sample& s = d.samples[i];
        out += fmt::format("\"{}\",\"{}\",{:.17g},{:.17g},{:.17g},{},{},{:.17g}", s.id, s.airfoil.name, s.condition.aoa_deg,
                           s.condition.re, s.condition.mach, s.source == Source::ingested ? "ingested" : "builtin",
                           kSplit[static_cast<std::size_t>(d.split[i])], s.cp.cl);
        for (const auto& p : s.airfoil.points) {
            out += fmt::format(",{:.17g}", p.x);
        }
        for (const auto& p : s.airfoil.points) {
            out += fmt::format(",{:.17g}", p.y);
        }
        for (double v : s.cp.cp_suction) {
            out += fmt::format(",{:.17g}", v);
        }
        for (double v : s.cp.cp_pressure) {
            out += fmt::format(",{:.17g}", v);
        }
        out += '\n';
    }
    return out;
}

} // namespace foilforge::dataset
