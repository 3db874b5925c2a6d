#include "foilforge/error.hpp"
#include "foilforge/geometry.hpp"
#include "support.hpp"

#include <cmath>
#include <doctest.h>
#include <fmt/format.h>
#include <numbers>

using namespace foilforge;
using namespace foilforge::geometry;

namespace {

std::string dat_text(const std::string& name, std::size_t rows) {
    std::string text = name + "\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(rows);
        text += fmt::format("{:.6f} {:.6f}\n", 0.5 + 0.5 * std::cos(th), 0.1 * std::sin(th));
    }
    return text;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

// Closed-form NACA 4-digit half thickness, written out independently of the library.
double half_thickness(double t, double x) {
    return 5.0 * t * (0.2969 * std::sqrt(x) - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x - 0.1015 * x * x * x * x);
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("parse_dat reads name and every coordinate pair") {
    const auto c = parse_dat(dat_text("NACA 0012", 131));
    CHECK(c.name == "NACA 0012");
    CHECK(c.points.size() == 131);
}

TEST_CASE("parse_dat skips blank and comment lines") {
    std::string text = dat_text("blanky", 30);
    text.insert(text.find('\n') + 1, "\n# comment\n\n");
    CHECK(parse_dat(text).points.size() == 30);
}

TEST_CASE("parse_dat reports the line of a malformed row") {
    std::string text = "bad\n1 0\n0.95 0.01\n0.92 0.02\n0.9 abc\n";
    text += dat_text("", 25).substr(1);
    try {
        parse_dat(text);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedLine);
        REQUIRE(e.line().has_value());
        CHECK(*e.line() == 5);
    }
}

TEST_CASE("parse_dat rejects short files and non-finite values") {
    CHECK(code_of([] { parse_dat(dat_text("short", 9)); }) == ErrorCode::TooFewPoints);
    std::string text = dat_text("nan", 30);
    text += "nan 0.1\n";
    CHECK(code_of([&] { parse_dat(text); }) == ErrorCode::NonFinite);
}

TEST_CASE("write_dat round trips through parse_dat") {
    const auto a = support::naca_airfoil(0.02, 0.4, 0.12, "NACA 2412");
    const auto back = parse_dat(write_dat(a));
    CHECK(back.name == "NACA 2412");
    REQUIRE(back.points.size() == kNodes);
    for (std::size_t i = 0; i < kNodes; ++i) {
        CHECK(std::abs(back.points[i].x - a.points[i].x) < 1e-8);
        CHECK(std::abs(back.points[i].y - a.points[i].y) < 1e-8);
    }
}

TEST_CASE("normalize leaves a unit contour alone and rescales millimetre data") {
    const auto unit = naca4(0.0, 0.0, 0.12, 60, "n");
    auto shifted = unit;
    // Move the minimum exactly to zero so the identity case is exact.
    const double x0 = unit.points[min_x_index(unit.points)].x;
    double x1 = x0;
    for (auto& p : shifted.points) {
        p.x -= x0;
        x1 = std::max(x1, p.x);
    }
    for (auto& p : shifted.points) {
        p.x /= x1;
        p.y /= x1;
    }
    const auto same = normalize(shifted);
    for (std::size_t i = 0; i < same.points.size(); ++i) {
        CHECK(same.points[i].x == doctest::Approx(shifted.points[i].x).epsilon(1e-15));
        CHECK(same.points[i].y == doctest::Approx(shifted.points[i].y).epsilon(1e-15));
    }

    auto mm = shifted;
    for (auto& p : mm.points) {
        p.x *= 100.0;
        p.y *= 100.0;
    }
    const auto scaled = normalize(mm);
    for (std::size_t i = 0; i < scaled.points.size(); ++i) {
        CHECK(std::abs(scaled.points[i].x - shifted.points[i].x) < 1e-14);
        CHECK(std::abs(scaled.points[i].y - shifted.points[i].y) < 1e-14);
    }
}

TEST_CASE("normalize rejects degenerate chords and reorders reversed files") {
    RawContour flat{"flat", std::vector<Point>(30, Point{0.5, 0.0})};
    for (std::size_t i = 0; i < flat.points.size(); ++i) {
        flat.points[i].y = static_cast<double>(i);
    }
    CHECK(code_of([&] { normalize(flat); }) == ErrorCode::DegenerateChord);

    support::QuietLog quiet;
    auto c = naca4(0.02, 0.4, 0.12, 50, "rev");
    const auto forward = normalize(c);
    std::reverse(c.points.begin(), c.points.end());
    const auto fixed = normalize(c);
    CHECK(signed_area(fixed.points) > 0.0);
    CHECK(fixed.points == forward.points);
}

TEST_CASE("station grid is cosine spaced with exact endpoints") {
    const auto& g = StationGrid::cosine();
    CHECK(g[0] == 0.0);
    CHECK(g[kStations - 1] == 1.0);
    for (std::size_t k = 1; k < kStations; ++k) {
        CHECK(g[k] > g[k - 1]);
        const double expected = (1.0 - std::cos(static_cast<double>(k) * std::numbers::pi / 124.0)) / 2.0;
        CHECK(std::abs(g[k] - expected) < 1e-15);
    }
    // Denser near the leading edge than at mid chord.
    CHECK(g[1] - g[0] < g[63] - g[62]);
}

TEST_CASE("repanel produces the canonical loop") {
    const auto a = support::naca_airfoil(0.04, 0.4, 0.15, "NACA 4415");
    CHECK(a.points.size() == kNodes);
    CHECK(min_x_index(a.points) == kLeadingEdge);
    CHECK(a.points[kLeadingEdge].x == 0.0);
    CHECK(signed_area(a.points) > 0.0);
    CHECK_NOTHROW(validate(a));
}

TEST_CASE("repanel is idempotent") {
    for (const auto& a : {support::naca_airfoil(0.0, 0.0, 0.12, "0012"), support::naca_airfoil(0.06, 0.3, 0.21, "6321")}) {
        const auto again = repanel(to_contour(a));
        for (std::size_t i = 0; i < kNodes; ++i) {
            CHECK(std::abs(again.points[i].x - a.points[i].x) <= 1e-12);
            CHECK(std::abs(again.points[i].y - a.points[i].y) <= 1e-12);
        }
    }
}

TEST_CASE("repanelled NACA 0012 keeps its 12 percent thickness") {
    const auto a = repanel(normalize(naca4(0.0, 0.0, 0.12, 201, "NACA 0012")));
    const auto s = split_surfaces(a);
    double thickness = 0.0;
    for (std::size_t j = 0; j < s.upper.size(); ++j) {
        thickness = std::max(thickness, s.upper[j].y - s.lower[j].y);
    }
    double oracle = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        oracle = std::max(oracle, 2.0 * half_thickness(0.12, i / 100000.0));
    }
    CHECK(std::abs(oracle - 0.12) < 1e-3);
    CHECK(std::abs(thickness - 0.12) < 1e-3);
}

TEST_CASE("figure-eight contours are rejected") {
    support::QuietLog quiet;
    RawContour eight{"eight", {}};
    for (int i = 0; i < 60; ++i) {
        const double th = 2.0 * std::numbers::pi * i / 60.0;
        eight.points.push_back({0.5 + 0.5 * std::cos(th), 0.2 * std::sin(2.0 * th)});
    }
    CHECK(code_of([&] { repanel(normalize(eight)); }) == ErrorCode::SelfIntersecting);
}

TEST_CASE("rotate: identity, inverse, and hand arithmetic") {
    const auto a = support::naca_airfoil(0.02, 0.4, 0.12, "NACA 2412");
    const auto zero = rotate(a, 0.0);
    CHECK(zero.points == a.points);
    CHECK(zero.name == a.name);

    const auto back = rotate(rotate(a, 7.0), -7.0);
    for (std::size_t i = 0; i < kNodes; ++i) {
        CHECK(std::abs(back.points[i].x - a.points[i].x) < 1e-12);
        CHECK(std::abs(back.points[i].y - a.points[i].y) < 1e-12);
    }
    CHECK(rotate(a, 7.0).name == "NACA 2412 @rot=7");
    CHECK(base_name(rotate(a, 7.0).name) == "NACA 2412");

    Airfoil probe = a;
    probe.points[0] = {1.25, 0.0};
    const auto r = rotate(probe, 90.0);
    CHECK(std::abs(r.points[0].x - 0.25) < 1e-12);
    CHECK(std::abs(r.points[0].y + 1.0) < 1e-12);

    CHECK(code_of([&] { rotate(a, 91.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("split_surfaces") {
    const auto sym = support::naca_airfoil(0.0, 0.0, 0.12, "NACA 0012");
    const auto s = split_surfaces(sym);
    CHECK(s.upper.size() == kSurfaceNodes);
    CHECK(s.lower.size() == kSurfaceNodes);
    for (std::size_t j = 0; j < kSurfaceNodes; ++j) {
        CHECK(std::abs(s.upper[j].x - s.lower[j].x) < 1e-6);
        CHECK(std::abs(s.upper[j].y + s.lower[j].y) < 1e-6);
        if (j > 0) {
            CHECK(s.upper[j].x > s.upper[j - 1].x);
            CHECK(s.lower[j].x > s.lower[j - 1].x);
        }
    }

    const auto cam = split_surfaces(support::naca_airfoil(0.05, 0.4, 0.10, "NACA 5410"));
    double up = 0.0;
    double lo = 0.0;
    for (std::size_t j = 0; j < kSurfaceNodes; ++j) {
        up += cam.upper[j].y;
        lo += cam.lower[j].y;
    }
    CHECK(up >= lo);
}

TEST_CASE("validate enforces the airfoil invariants") {
    auto a = support::naca_airfoil(0.0, 0.0, 0.12, "v");
    auto dup = a;
    dup.points[10] = dup.points[9];
    CHECK(code_of([&] { validate(dup); }) == ErrorCode::InvalidAirfoil);
    auto gap = a;
    gap.points[0].y += 0.05;
    CHECK(code_of([&] { validate(gap); }) == ErrorCode::InvalidAirfoil);
}

TEST_CASE("every corpus airfoil repanels within 1e-3 chord of its source") {
    const auto files = support::corpus_files();
    REQUIRE(files.size() >= 100);
    for (const auto& f : files) {
        const auto c = normalize(support::read_contour(f));
        const auto a = repanel(c);
        CHECK(a.points[kLeadingEdge].x <= 0.02);
        const auto loop = std::span<const Point>(a.points);
        CHECK_MESSAGE(max_distance_to_polyline(c.points, loop) < 1e-3, f.filename().string());
    }
}

} // TEST_SUITE
