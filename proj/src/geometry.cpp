#include "foilforge/geometry.hpp"

#include "foilforge/error.hpp"
#include "foilforge/log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace foilforge::geometry {

StationGrid::StationGrid() {
    for (std::size_t k = 0; k < kStations; ++k) {
        stations_[k] = 0.5 * (1.0 - std::cos(static_cast<double>(k) * std::numbers::pi / (kStations - 1)));
    }
    stations_.front() = 0.0;
    stations_.back() = 1.0;
}

const StationGrid& StationGrid::cosine() {
    static const StationGrid grid;
    return grid;
}

std::vector<double> cosine_fractions(std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        out[j] = 0.5 * (1.0 - std::cos(static_cast<double>(j) * std::numbers::pi / static_cast<double>(count - 1)));
    }
    out.front() = 0.0;
    out.back() = 1.0;
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

} // namespace

RawContour parse_dat(std::string_view text) {
    RawContour contour;
    std::size_t line_no = 0;
    bool have_name = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (!have_name) {
            contour.name = std::string(trim(line));
            have_name = true;
            continue;
        }
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        std::array<double, 2> values{};
        std::size_t count = 0;
        std::size_t cursor = 0;
        while (cursor < body.size()) {
            const auto start = body.find_first_not_of(" \t", cursor);
            if (start == std::string_view::npos) {
                break;
            }
            const auto stop = std::min(body.find_first_of(" \t", start), body.size());
            const std::string_view token = body.substr(start, stop - start);
            double value = 0.0;
            if (count >= 2 || !parse_double(token, value)) {
                throw Error(ErrorCode::MalformedLine, fmt::format("expected two numbers, got '{}'", body), line_no);
            }
            if (!std::isfinite(value)) {
                throw Error(ErrorCode::NonFinite, fmt::format("non-finite coordinate '{}'", token), line_no);
            }
            values[count++] = value;
            cursor = stop;
        }
        if (count != 2) {
            throw Error(ErrorCode::MalformedLine, fmt::format("expected two numbers, got '{}'", body), line_no);
        }
        contour.points.push_back({values[0], values[1]});
    }
    if (contour.points.size() < 20) {
        fail(ErrorCode::TooFewPoints,
             fmt::format("'{}' has {} points, at least 20 required", contour.name, contour.points.size()));
    }
    return contour;
}

std::string write_dat(std::string_view name, std::span<const Point> points) {
    std::string out(name);
    out += '\n';
    for (const auto& p : points) {
        out += fmt::format("{:.9g} {:.9g}\n", p.x, p.y);
    }
    return out;
}

std::size_t min_x_index(std::span<const Point> points) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].x < points[best].x) {
            best = i;
        }
    }
    return best;
}

double signed_area(std::span<const Point> points) {
    double twice = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& a = points[i];
        const auto& b = points[(i + 1) % points.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

RawContour normalize(const RawContour& contour) {
    if (contour.points.empty()) {
        fail(ErrorCode::InvalidContour, "empty contour");
    }
    const auto [lo, hi] = std::minmax_element(contour.points.begin(), contour.points.end(),
                                              [](const Point& a, const Point& b) { return a.x < b.x; });
    const double x0 = lo->x;
    const double chord = hi->x - lo->x;
    if (!(chord >= 1e-6)) {
        fail(ErrorCode::DegenerateChord, fmt::format("'{}' spans {:g} in x", contour.name, chord));
    }
    RawContour out;
    out.name = contour.name;
    out.points.reserve(contour.points.size());
    for (const auto& p : contour.points) {
        out.points.push_back({(p.x - x0) / chord, p.y / chord});
    }
    if (signed_area(out.points) < 0.0) {
        std::reverse(out.points.begin(), out.points.end());
        log_note(fmt::format("note: '{}' is stored lower-surface first; reordered to Selig", contour.name));
    }
    return out;
}

namespace {

int orientation(const Point& a, const Point& b, const Point& c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) {
        return true;
    }
    return (o1 == 0 && on_segment(p1, p2, q1)) || (o2 == 0 && on_segment(p1, p2, q2)) ||
           (o3 == 0 && on_segment(q1, q2, p1)) || (o4 == 0 && on_segment(q1, q2, p2));
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

} // namespace

bool has_self_intersection(std::span<const Point> points) {
    const std::size_t segments = points.size() < 2 ? 0 : points.size() - 1;
    const bool closed = points.size() > 2 && points.front() == points.back();
    for (std::size_t i = 0; i < segments; ++i) {
        for (std::size_t j = i + 2; j < segments; ++j) {
            if (closed && i == 0 && j == segments - 1) {
                continue;
            }
            if (segments_intersect(points[i], points[i + 1], points[j], points[j + 1])) {
                return true;
            }
        }
    }
    return false;
}

double max_distance_to_polyline(std::span<const Point> probe, std::span<const Point> path) {
    double worst = 0.0;
    for (const auto& p : probe) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            best = std::min(best, point_segment_distance(p, path[i], path[i + 1]));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double sample_polyline(std::span<const double> xs, std::span<const double> ys, double x) {
    const std::size_t n = xs.size();
    double lo = xs[0];
    std::size_t lo_index = 0;
    double hi = xs[0];
    std::size_t hi_index = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (xs[i] == x) {
            return ys[i];
        }
        if (i + 1 < n) {
            const double a = xs[i];
            const double b = xs[i + 1];
            if ((a < x && x < b) || (b < x && x < a)) {
                const double t = (x - a) / (b - a);
                return ys[i] + t * (ys[i + 1] - ys[i]);
            }
        }
        if (xs[i] < lo) {
            lo = xs[i];
            lo_index = i;
        }
        if (xs[i] > hi) {
            hi = xs[i];
            hi_index = i;
        }
    }
    return x < lo ? ys[lo_index] : ys[hi_index];
}

namespace {

struct Surface {
    std::vector<double> x;
    std::vector<double> y;
};

// Walks outward from the leading edge; returns the surface and its count of
// points that do not advance in x.
Surface surface_from(std::span<const Point> points, std::size_t le, int direction, std::size_t& violations) {
    Surface s;
    violations = 0;
    double running_max = -std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(le); i >= 0 && i < static_cast<std::ptrdiff_t>(points.size());
         i += direction) {
        const auto& p = points[static_cast<std::size_t>(i)];
        if (!s.x.empty() && p.x <= running_max) {
            ++violations;
        }
        running_max = std::max(running_max, p.x);
        s.x.push_back(p.x);
        s.y.push_back(p.y);
    }
    return s;
}

std::vector<Point> resample_surface(const Surface& s, std::span<const double> fractions) {
    const double x_le = s.x.front();
    const double x_end = *std::max_element(s.x.begin(), s.x.end());
    std::vector<Point> out(fractions.size());
    for (std::size_t j = 0; j < fractions.size(); ++j) {
        const double x = j + 1 == fractions.size() ? x_end : x_le + fractions[j] * (x_end - x_le);
        out[j] = {x, sample_polyline(s.x, s.y, x)};
    }
    out.front() = {s.x.front(), s.y.front()};
    return out;
}

} // namespace

namespace {

std::vector<Point> resample_with(const RawContour& contour, std::span<const double> fractions) {
    const auto& pts = contour.points;
    const std::size_t surface_nodes = fractions.size();
    if (pts.size() < 3 || surface_nodes < 2) {
        fail(ErrorCode::InvalidContour, fmt::format("'{}' is too small to resample", contour.name));
    }
    const std::size_t le = min_x_index(pts);
    if (le == 0 || le + 1 == pts.size()) {
        fail(ErrorCode::InvalidContour,
             fmt::format("'{}' has its minimum x at an endpoint; not a Selig loop", contour.name));
    }
    if (has_self_intersection(pts)) {
        fail(ErrorCode::SelfIntersecting, fmt::format("'{}' crosses itself", contour.name));
    }
    std::size_t upper_bad = 0;
    std::size_t lower_bad = 0;
    const Surface upper = surface_from(pts, le, -1, upper_bad);
    const Surface lower = surface_from(pts, le, +1, lower_bad);
    for (const auto& [bad, size, label] : {std::tuple{upper_bad, upper.x.size(), "upper"},
                                           std::tuple{lower_bad, lower.x.size(), "lower"}}) {
        if (static_cast<double>(bad) > 0.05 * static_cast<double>(size)) {
            fail(ErrorCode::NonMonotonicSurface,
                 fmt::format("'{}' {} surface: {} of {} points move backwards in x", contour.name, label, bad, size));
        }
        if (bad > 0) {
            log_note(fmt::format("warning: '{}' {} surface has {} non-monotonic points", contour.name, label, bad));
        }
    }
    const auto up = resample_surface(upper, fractions);
    const auto low = resample_surface(lower, fractions);

    std::vector<Point> loop(2 * surface_nodes - 1);
    const std::size_t mid = surface_nodes - 1;
    for (std::size_t j = 0; j < surface_nodes; ++j) {
        loop[mid - j] = up[j];
        loop[mid + j] = low[j];
    }
    return loop;
}

} // namespace

std::vector<Point> resample_contour(const RawContour& contour, std::size_t surface_nodes) {
    if (surface_nodes < 2) {
        fail(ErrorCode::InvalidArgument, "need at least two nodes per surface");
    }
    return resample_with(contour, cosine_fractions(surface_nodes));
}

Airfoil repanel(const RawContour& contour, const StationGrid& grid) {
    // Each surface takes the even-indexed stations of the grid.
    std::vector<double> fractions(kSurfaceNodes);
    for (std::size_t j = 0; j < kSurfaceNodes; ++j) {
        fractions[j] = grid[2 * j];
    }
    const auto loop = resample_with(contour, fractions);
    Airfoil airfoil;
    airfoil.name = contour.name;
    std::copy(loop.begin(), loop.end(), airfoil.points.begin());
    if (has_self_intersection(airfoil.points)) {
        fail(ErrorCode::SelfIntersecting, fmt::format("'{}' crosses itself after repaneling", contour.name));
    }
    validate(airfoil);
    return airfoil;
}

void validate(const Airfoil& airfoil) {
    const auto& p = airfoil.points;
    double lo = p[0].x;
    double hi = p[0].x;
    for (std::size_t i = 0; i < kNodes; ++i) {
        if (!std::isfinite(p[i].x) || !std::isfinite(p[i].y)) {
            fail(ErrorCode::InvalidAirfoil, fmt::format("'{}' node {} is not finite", airfoil.name, i));
        }
        lo = std::min(lo, p[i].x);
        hi = std::max(hi, p[i].x);
        if (i + 1 < kNodes && std::hypot(p[i + 1].x - p[i].x, p[i + 1].y - p[i].y) <= 1e-9) {
            fail(ErrorCode::InvalidAirfoil, fmt::format("'{}' nodes {} and {} coincide", airfoil.name, i, i + 1));
        }
    }
    if (lo < -1e-6 || lo > 0.02 || hi < 0.98 || hi > 1.0 + 1e-6) {
        fail(ErrorCode::InvalidAirfoil, fmt::format("'{}' spans x in [{:g}, {:g}], not unit chord", airfoil.name, lo, hi));
    }
    const double gap = std::hypot(p[0].x - p[kNodes - 1].x, p[0].y - p[kNodes - 1].y);
    if (gap > 0.02) {
        fail(ErrorCode::InvalidAirfoil, fmt::format("'{}' trailing-edge gap {:g} exceeds 0.02", airfoil.name, gap));
    }
}

Airfoil rotate(const Airfoil& airfoil, double aoa_deg) {
    if (!(aoa_deg >= -90.0 && aoa_deg <= 90.0)) {
        fail(ErrorCode::InvalidArgument, fmt::format("rotation angle {:g} outside [-90, 90]", aoa_deg));
    }
    if (aoa_deg == 0.0) {
        return airfoil;
    }
    const double phi = -aoa_deg * std::numbers::pi / 180.0;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    constexpr Point pivot{0.25, 0.0};
    Airfoil out;
    out.name = fmt::format("{}{}{:g}", base_name(airfoil.name), kRotationTag, aoa_deg);
    for (std::size_t i = 0; i < kNodes; ++i) {
        const double dx = airfoil.points[i].x - pivot.x;
        const double dy = airfoil.points[i].y - pivot.y;
        out.points[i] = {pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy};
    }
    return out;
}

std::string_view base_name(std::string_view name) {
    const auto at = name.find(kRotationTag);
    return at == std::string_view::npos ? name : name.substr(0, at);
}

Surfaces split_surfaces(const Airfoil& airfoil) {
    const std::size_t le = min_x_index(airfoil.points);
    Surfaces s;
    for (std::size_t i = le + 1; i-- > 0;) {
        s.upper.push_back(airfoil.points[i]);
    }
    for (std::size_t i = le; i < kNodes; ++i) {
        s.lower.push_back(airfoil.points[i]);
    }
    return s;
}

RawContour to_contour(const Airfoil& airfoil) {
    return {airfoil.name, {airfoil.points.begin(), airfoil.points.end()}};
}

double naca4_half_thickness(double t, double x) {
    return 5.0 * t * (0.2969 * std::sqrt(x) - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x - 0.1015 * x * x * x * x);
}

RawContour naca4(double m, double p, double t, std::size_t per_surface, std::string name) {
    const auto xs = cosine_fractions(per_surface);
    auto camber = [&](double x) -> std::pair<double, double> {
        if (m == 0.0 || p == 0.0) {
            return {0.0, 0.0};
        }
        if (x < p) {
            return {m / (p * p) * (2.0 * p * x - x * x), 2.0 * m / (p * p) * (p - x)};
        }
        return {m / ((1 - p) * (1 - p)) * (1.0 - 2.0 * p + 2.0 * p * x - x * x), 2.0 * m / ((1 - p) * (1 - p)) * (p - x)};
    };
    RawContour out;
    out.name = std::move(name);
    std::vector<Point> upper;
    std::vector<Point> lower;
    for (double x : xs) {
        const double yt = naca4_half_thickness(t, x);
        const auto [yc, slope] = camber(x);
        const double theta = std::atan(slope);
        upper.push_back({x - yt * std::sin(theta), yc + yt * std::cos(theta)});
        lower.push_back({x + yt * std::sin(theta), yc - yt * std::cos(theta)});
    }
    for (std::size_t i = upper.size(); i-- > 0;) {
        out.points.push_back(upper[i]);
    }
    for (std::size_t i = 1; i < lower.size(); ++i) {
        out.points.push_back(lower[i]);
    }
    return out;
}

} // namespace foilforge::geometry
