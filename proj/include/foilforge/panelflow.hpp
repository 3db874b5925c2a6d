#pragma once

#include "foilforge/geometry.hpp"

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

namespace foilforge::panelflow {

using geometry::Point;

struct FlowCondition {
    double aoa_deg = 0.0;
    double re = 2e6;
    double mach = 0.5;

    friend bool operator==(const FlowCondition&, const FlowCondition&) = default;
};

/// Suction (upper) and pressure (lower) Cp on the fixed cosine stations.
struct CpDistribution {
    std::array<double, geometry::kStations> cp_suction{};
    std::array<double, geometry::kStations> cp_pressure{};
    double cl = 0.0;
    FlowCondition condition;

    static const geometry::StationGrid& stations() { return geometry::StationGrid::cosine(); }
};

/// How the last row of the panel system closes the circulation.
enum class Closure {
    kutta,            // equal and opposite tangential velocity on the two trailing-edge panels
    zero_circulation, // vortex strength pinned to zero (closed bodies such as a cylinder)
};

/// Per-panel geometry plus the unit-strength induced velocities needed after the solve.
struct PanelGeometry {
    std::size_t panels = 0;
    std::vector<Point> midpoint;
    std::vector<Point> tangent;
    std::vector<Point> normal;
    std::vector<double> length;
    /// Tangential velocity at midpoint i induced by a unit source on panel j.
    Eigen::MatrixXd source_tangential;
    /// Tangential velocity at midpoint i induced by the unit vortex on all panels.
    Eigen::VectorXd vortex_tangential;
};

struct PanelSystem {
    Eigen::MatrixXd matrix; // (N+1) x (N+1): N tangency rows + closure row
    PanelGeometry geometry;
};

/// Builds the influence matrix for the loop through `nodes` (counter-clockwise, panels
/// between consecutive nodes, the loop left open between the last and first node).
PanelSystem assemble_system(std::span<const Point> nodes, Closure closure = Closure::kutta);

struct PanelSolution {
    std::vector<Point> midpoint;
    std::vector<double> tangential_velocity; // along each panel's tangent, freestream speed 1
    std::vector<double> cp0;                 // incompressible
    std::vector<double> source_strength;
    double vortex_strength = 0.0;
    double cl = 0.0; // Kutta-Joukowski, unit reference chord
};

/// Incompressible solve for a unit freestream at `freestream_deg` to the +x axis.
/// Raises SingularSystem when a factorization pivot falls below 1e-12.
PanelSolution solve_panels(std::span<const Point> nodes, double freestream_deg, Closure closure = Closure::kutta);

/// Full pipeline: panel solve, Karman-Tsien correction at condition.mach, then per-surface
/// interpolation onto the station grid. Surfaces split at the node farthest from the
/// trailing-edge midpoint; station abscissae are chord-line fractions in the body frame,
/// so a rigidly rotated airfoil maps to the same stations.
CpDistribution solve_cp(const geometry::Airfoil& airfoil, const FlowCondition& condition);

/// Chordwise trapezoidal integral of (cp_pressure - cp_suction) over the stations.
/// Used where no circulation is available (ingested or predicted Cp).
double pressure_jump_cl(const CpDistribution& cp);

/// Cp0 / (beta + M^2/(1+beta) * Cp0/2) with beta = sqrt(1 - M^2).
double karman_tsien(double cp0, double mach);

/// Chord-line fraction of each point relative to the leading edge `le` and trailing-edge midpoint.
struct ChordFrame {
    Point leading_edge;
    Point trailing_edge;
    std::size_t le_index = 0;

    double fraction(const Point& p) const;
};

ChordFrame chord_frame(std::span<const Point> nodes);

} // namespace foilforge::panelflow
