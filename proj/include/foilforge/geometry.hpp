#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace foilforge::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline constexpr std::size_t kNodes = 125;
inline constexpr std::size_t kSurfaceNodes = 63;
inline constexpr std::size_t kLeadingEdge = 62;
inline constexpr std::size_t kStations = 125;

/// Fixed chordwise abscissae x_k = (1 - cos(k*pi/124)) / 2, clustered at both edges.
class StationGrid {
public:
    static const StationGrid& cosine();

    const std::array<double, kStations>& stations() const { return stations_; }
    double operator[](std::size_t k) const { return stations_[k]; }
    std::size_t size() const { return kStations; }

private:
    StationGrid();
    std::array<double, kStations> stations_{};
};

/// Cosine-spaced fractions (1 - cos(j*pi/(count-1))) / 2 for j in [0, count).
std::vector<double> cosine_fractions(std::size_t count);

/// Coordinates exactly as read from a Selig .DAT file.
struct RawContour {
    std::string name;
    std::vector<Point> points;
};

/// Canonical 125-node Selig loop at unit chord: TE -> upper -> LE (index 62) -> lower -> TE.
struct Airfoil {
    std::string name;
    std::array<Point, kNodes> points{};
};

RawContour parse_dat(std::string_view text);

/// Selig text with 9 significant digits per coordinate.
std::string write_dat(std::string_view name, std::span<const Point> points);
inline std::string write_dat(const Airfoil& airfoil) { return write_dat(airfoil.name, airfoil.points); }
inline std::string write_dat(const RawContour& contour) { return write_dat(contour.name, contour.points); }

RawContour normalize(const RawContour& contour);

Airfoil repanel(const RawContour& contour, const StationGrid& grid = StationGrid::cosine());

/// Resampling used by repanel with an arbitrary node count per surface; returns a
/// Selig loop of 2*surface_nodes - 1 points. Exposed for panel-refinement studies.
std::vector<Point> resample_contour(const RawContour& contour, std::size_t surface_nodes);

/// Rigid nose-up rotation by `aoa_deg` about the quarter chord (0.25, 0).
Airfoil rotate(const Airfoil& airfoil, double aoa_deg);

/// Name suffix added by rotate(); everything before it is the source airfoil name.
inline constexpr std::string_view kRotationTag = " @rot=";
std::string_view base_name(std::string_view name);

struct Surfaces {
    std::vector<Point> upper;
    std::vector<Point> lower;
};

/// Splits at the minimum-x node; both surfaces are returned leading-edge first.
Surfaces split_surfaces(const Airfoil& airfoil);

/// Throws InvalidAirfoil when any canonical-representation invariant is violated.
void validate(const Airfoil& airfoil);

RawContour to_contour(const Airfoil& airfoil);

/// Index of the smallest x, ties resolved to the smaller index.
std::size_t min_x_index(std::span<const Point> points);

/// Shoelace area; positive for counter-clockwise (Selig) loops.
double signed_area(std::span<const Point> points);

/// True when any two non-adjacent segments of the open polyline intersect or touch.
bool has_self_intersection(std::span<const Point> points);

/// Largest distance from any point in `probe` to the polyline through `path`.
double max_distance_to_polyline(std::span<const Point> probe, std::span<const Point> path);

/// Piecewise-linear lookup of y at abscissa `x` along (xs, ys) walked in order: the first
/// segment whose x-range brackets `x` wins. Values outside the covered range clamp to the
/// nearest end value.
double sample_polyline(std::span<const double> xs, std::span<const double> ys, double x);

/// Analytic NACA 4-digit section (m = max camber, p = camber position, t = thickness,
/// all as chord fractions), cosine-sampled with `per_surface` points per surface.
RawContour naca4(double m, double p, double t, std::size_t per_surface, std::string name);

/// Closed-form NACA 4-digit half thickness at chord fraction x.
double naca4_half_thickness(double t, double x);

} // namespace foilforge::geometry
