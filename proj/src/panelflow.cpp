#include "foilforge/panelflow.hpp"

#include "foilforge/error.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace foilforge::panelflow {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// Velocity at `p` induced by a unit-strength constant source distribution on the
// segment from a along t with length len, in global coordinates. For the panel's own
// midpoint the outward (right-hand normal) limit is taken: +1/2 along the normal.
Point source_velocity(const Point& p, const Point& a, const Point& t, const Point& n, double len,
                      bool self) {
    if (self) {
        return {0.5 * n.x, 0.5 * n.y};
    }
    // local frame: xl along t, yl along n (origin at a)
    const double rx = p.x - a.x;
    const double ry = p.y - a.y;
    const double xl = rx * t.x + ry * t.y;
    const double yl = rx * n.x + ry * n.y;
    const double r1sq = xl * xl + yl * yl;
    const double r2sq = (xl - len) * (xl - len) + yl * yl;
    const double ul = 0.5 * kInvTwoPi * std::log(r1sq / r2sq);
    const double vl = kInvTwoPi * std::atan2(yl * len, xl * (xl - len) + yl * yl);
    return {ul * t.x + vl * n.x, ul * t.y + vl * n.y};
}

double dot(const Point& a, const Point& b) {
    return a.x * b.x + a.y * b.y;
}

// Counter-clockwise rotation by 90 degrees: a constant vortex sheet induces the
// rotated velocity field of the same-strength source sheet.
Point rot90(const Point& v) {
    return {-v.y, v.x};
}

} // namespace

PanelSystem assemble_system(std::span<const Point> nodes, Closure closure) {
    if (nodes.size() < 4) {
        fail(ErrorCode::InvalidAirfoil, "panel loop needs at least three panels");
    }
    if (geometry::signed_area(nodes) <= 0.0) {
        fail(ErrorCode::InvalidAirfoil, "panel loop must be counter-clockwise (Selig order)");
    }
    const std::size_t n = nodes.size() - 1;
    PanelSystem sys;
    auto& g = sys.geometry;
    g.panels = n;
    g.midpoint.resize(n);
    g.tangent.resize(n);
    g.normal.resize(n);
    g.length.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Point& a = nodes[j];
        const Point& b = nodes[j + 1];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (!(len > 1e-12)) {
            fail(ErrorCode::SingularSystem, fmt::format("panel {} has zero length", j));
        }
        g.length[j] = len;
        g.tangent[j] = {(b.x - a.x) / len, (b.y - a.y) / len};
        g.normal[j] = {g.tangent[j].y, -g.tangent[j].x};
        g.midpoint[j] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    }

    sys.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
    g.source_tangential.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    g.vortex_tangential = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const auto N = static_cast<Eigen::Index>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double vortex_normal = 0.0;
        double vortex_tangent = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Point v = source_velocity(g.midpoint[i], nodes[j], g.tangent[j], g.normal[j],
                                            g.length[j], i == j);
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            sys.matrix(ii, jj) = dot(v, g.normal[i]);
            g.source_tangential(ii, jj) = dot(v, g.tangent[i]);
            const Point w = rot90(v);
            vortex_normal += dot(w, g.normal[i]);
            vortex_tangent += dot(w, g.tangent[i]);
        }
        sys.matrix(static_cast<Eigen::Index>(i), N) = vortex_normal;
        g.vortex_tangential(static_cast<Eigen::Index>(i)) = vortex_tangent;
    }
    if (closure == Closure::kutta) {
        // V_t(first panel) + V_t(last panel) = 0: the two trailing-edge panels run in
        // opposite directions, so equal speeds leaving the edge cancel.
        for (Eigen::Index j = 0; j < N; ++j) {
            sys.matrix(N, j) = g.source_tangential(0, j) + g.source_tangential(N - 1, j);
        }
        sys.matrix(N, N) = g.vortex_tangential(0) + g.vortex_tangential(N - 1);
    } else {
        sys.matrix(N, N) = 1.0;
    }
    return sys;
}

PanelSolution solve_panels(std::span<const Point> nodes, double freestream_deg, Closure closure) {
    const PanelSystem sys = assemble_system(nodes, closure);
    const auto& g = sys.geometry;
    const auto N = static_cast<Eigen::Index>(g.panels);
    const double alpha = freestream_deg * std::numbers::pi / 180.0;
    const Point vinf{std::cos(alpha), std::sin(alpha)};

    Eigen::VectorXd rhs(N + 1);
    for (Eigen::Index i = 0; i < N; ++i) {
        rhs(i) = -dot(vinf, g.normal[static_cast<std::size_t>(i)]);
    }
    rhs(N) = closure == Closure::kutta ? -(dot(vinf, g.tangent.front()) + dot(vinf, g.tangent.back())) : 0.0;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot >= 1e-12)) {
        fail(ErrorCode::SingularSystem, fmt::format("pivot {:g} below 1e-12", min_pivot));
    }
    const Eigen::VectorXd solution = lu.solve(rhs);

    PanelSolution out;
    out.midpoint = g.midpoint;
    out.source_strength.assign(solution.data(), solution.data() + N);
    out.vortex_strength = solution(N);
    const Eigen::VectorXd vt = g.source_tangential * solution.head(N) + out.vortex_strength * g.vortex_tangential;
    out.tangential_velocity.resize(g.panels);
    out.cp0.resize(g.panels);
    double perimeter = 0.0;
    for (std::size_t i = 0; i < g.panels; ++i) {
        const double v = vt(static_cast<Eigen::Index>(i)) + dot(vinf, g.tangent[i]);
        out.tangential_velocity[i] = v;
        out.cp0[i] = 1.0 - v * v;
        perimeter += g.length[i];
    }
    // Counter-clockwise circulation gamma * perimeter; lift = -rho * V * Gamma_ccw.
    out.cl = -2.0 * out.vortex_strength * perimeter;
    return out;
}

double karman_tsien(double cp0, double mach) {
    if (!(mach >= 0.0 && mach < 0.7)) {
        fail(ErrorCode::InvalidArgument, fmt::format("Mach {:g} outside [0, 0.7)", mach));
    }
    if (!std::isfinite(cp0)) {
        fail(ErrorCode::NonFinite, "non-finite Cp0");
    }
    if (mach == 0.0) {
        return cp0;
    }
    const double beta = std::sqrt(1.0 - mach * mach);
    const double denom = beta + (mach * mach / (1.0 + beta)) * cp0 / 2.0;
    if (std::abs(denom) < 1e-6) {
        fail(ErrorCode::PoleProximity, fmt::format("Karman-Tsien denominator {:g} at Cp0 = {:g}", denom, cp0));
    }
    return cp0 / denom;
}

double pressure_jump_cl(const CpDistribution& cp) {
    const auto& grid = CpDistribution::stations();
    double cl = 0.0;
    for (std::size_t k = 0; k + 1 < geometry::kStations; ++k) {
        const double jump0 = cp.cp_pressure[k] - cp.cp_suction[k];
        const double jump1 = cp.cp_pressure[k + 1] - cp.cp_suction[k + 1];
        cl += 0.5 * (jump0 + jump1) * (grid[k + 1] - grid[k]);
    }
    return cl;
}

double ChordFrame::fraction(const Point& p) const {
    const double cx = trailing_edge.x - leading_edge.x;
    const double cy = trailing_edge.y - leading_edge.y;
    return ((p.x - leading_edge.x) * cx + (p.y - leading_edge.y) * cy) / (cx * cx + cy * cy);
}

ChordFrame chord_frame(std::span<const Point> nodes) {
    ChordFrame f;
    f.trailing_edge = {0.5 * (nodes.front().x + nodes.back().x), 0.5 * (nodes.front().y + nodes.back().y)};
    double best = -1.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double d = std::hypot(nodes[i].x - f.trailing_edge.x, nodes[i].y - f.trailing_edge.y);
        if (d > best) {
            best = d;
            f.le_index = i;
        }
    }
    f.leading_edge = nodes[f.le_index];
    return f;
}

CpDistribution solve_cp(const geometry::Airfoil& airfoil, const FlowCondition& condition) {
    const std::span<const Point> nodes(airfoil.points);
    const PanelSolution sol = solve_panels(nodes, condition.aoa_deg, Closure::kutta);

    const double beta = std::sqrt(1.0 - condition.mach * condition.mach);
    std::vector<double> cp(sol.cp0.size());
    for (std::size_t i = 0; i < cp.size(); ++i) {
        // Past the pole the correction changes sign and is meaningless.
        const double denom = beta + (condition.mach * condition.mach / (1.0 + beta)) * sol.cp0[i] / 2.0;
        if (!(denom > 1e-6)) {
            fail(ErrorCode::NonFiniteResult,
                 fmt::format("'{}' at {:g} deg: Cp0 = {:g} beyond the Karman-Tsien pole at M = {:g}", airfoil.name,
                             condition.aoa_deg, sol.cp0[i], condition.mach));
        }
        cp[i] = karman_tsien(sol.cp0[i], condition.mach);
        if (!std::isfinite(cp[i])) {
            fail(ErrorCode::NonFiniteResult, fmt::format("'{}': non-finite Cp on panel {}", airfoil.name, i));
        }
    }

    const ChordFrame frame = chord_frame(nodes);
    const std::size_t le = frame.le_index;
    std::vector<double> su;
    std::vector<double> cu;
    for (std::size_t i = le; i-- > 0;) {
        su.push_back(frame.fraction(sol.midpoint[i]));
        cu.push_back(cp[i]);
    }
    std::vector<double> sl;
    std::vector<double> cl;
    for (std::size_t i = le; i < sol.midpoint.size(); ++i) {
        sl.push_back(frame.fraction(sol.midpoint[i]));
        cl.push_back(cp[i]);
    }
    if (su.size() < 2 || sl.size() < 2) {
        fail(ErrorCode::InvalidAirfoil, fmt::format("'{}': leading edge too close to the trailing edge", airfoil.name));
    }

    CpDistribution out;
    out.condition = condition;
    out.cl = sol.cl;
    const auto& grid = CpDistribution::stations();
    for (std::size_t k = 0; k < geometry::kStations; ++k) {
        out.cp_suction[k] = geometry::sample_polyline(su, cu, grid[k]);
        out.cp_pressure[k] = geometry::sample_polyline(sl, cl, grid[k]);
    }
    return out;
}

} // namespace foilforge::panelflow
