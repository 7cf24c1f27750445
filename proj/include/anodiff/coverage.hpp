#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"
#include "anodiff/sensing.hpp"

namespace anodiff {

/// Cell total below which a centroid falls back to the unweighted mean.
inline constexpr double kCentroidMassEpsilon = 1e-12;
/// Lloyd convergence threshold on the largest generator displacement.
inline constexpr double kLloydEpsilon = 1e-6;

/// Discrete Voronoi partition of the sensor mesh among the actuators.
struct Partition {
    std::vector<std::size_t> owner;               // per sensor
    std::vector<std::vector<std::size_t>> cells;  // per actuator, ascending sensor index
    std::vector<Point> centroids;                 // per actuator; filled by lloyd_step
};

namespace detail {

/// Nearest generator among `candidates` (ascending indices), ties to the lowest index.
inline std::size_t nearest_generator(Point q, std::span<const Point> generators,
                                     std::span<const std::size_t> candidates) {
    std::size_t best = candidates[0];
    double best_d = squared_distance(q, generators[best]);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
        const double d = squared_distance(q, generators[candidates[c]]);
        if (d < best_d) {
            best_d = d;
            best = candidates[c];
        }
    }
    return best;
}

}  // namespace detail

inline Partition assign_voronoi(const SensorMesh& mesh, std::span<const Point> actuators) {
    if (actuators.empty()) throw ConfigError("Voronoi partition needs at least one actuator");
    std::vector<std::size_t> all(actuators.size());
    for (std::size_t a = 0; a < all.size(); ++a) all[a] = a;

    Partition p;
    p.owner.resize(mesh.size());
    p.cells.resize(actuators.size());
    for (std::size_t s = 0; s < mesh.size(); ++s) {
        const std::size_t o = detail::nearest_generator(mesh.positions[s], actuators, all);
        p.owner[s] = o;
        p.cells[o].push_back(s);
    }
    return p;
}

/// Density-weighted centroid of a cell. Negative readings count as zero.
/// A cell with (near) zero mass yields its unweighted mean; an empty cell
/// yields `fallback`.
inline Point mass_centroid(std::span<const std::size_t> cell, const Measurement& density,
                           const SensorMesh& mesh, Point fallback) {
    if (cell.empty()) return fallback;
    double m = 0.0;
    double mx = 0.0;
    double my = 0.0;
    for (const std::size_t s : cell) {
        const double w = std::max(density.values[s], 0.0);
        m += w;
        mx += w * mesh.positions[s].x;
        my += w * mesh.positions[s].y;
    }
    if (m <= kCentroidMassEpsilon) {
        double sx = 0.0;
        double sy = 0.0;
        for (const std::size_t s : cell) {
            sx += mesh.positions[s].x;
            sy += mesh.positions[s].y;
        }
        const double n = static_cast<double>(cell.size());
        return {sx / n, sy / n};
    }
    return {mx / m, my / m};
}

/// Discrete form of sum_i int_{V_i} rho(q) |q - p_i|^2 dq: each sensor stands
/// for an area of mesh.cell_area.
inline double cvt_cost(const Partition& partition, const Measurement& density, const SensorMesh& mesh,
                       std::span<const Point> actuators) {
    double cost = 0.0;
    for (std::size_t s = 0; s < mesh.size(); ++s) {
        cost += density.values[s] * squared_distance(mesh.positions[s], actuators[partition.owner[s]]);
    }
    return cost * mesh.cell_area;
}

struct LloydResult {
    std::vector<Point> targets;
    Partition partition;
    double max_displacement = 0.0;
    bool converged = false;
};

/// One Lloyd iteration: partition, then move every generator to its cell's mass centroid.
inline LloydResult lloyd_step(std::span<const Point> actuators, const SensorMesh& mesh,
                              const Measurement& density) {
    LloydResult r;
    r.partition = assign_voronoi(mesh, actuators);
    r.targets.reserve(actuators.size());
    for (std::size_t a = 0; a < actuators.size(); ++a) {
        const Point c = mass_centroid(r.partition.cells[a], density, mesh, actuators[a]);
        r.targets.push_back(c);
        r.max_displacement = std::max(r.max_displacement, distance(c, actuators[a]));
    }
    r.partition.centroids = r.targets;
    r.converged = r.max_displacement < kLloydEpsilon;
    return r;
}

// ---------------------------------------------------------------------------
// Radius-limited cell construction
// ---------------------------------------------------------------------------

struct RadiusState {
    double radius = 0.1;
    std::size_t unchanged_count = 0;
    double delta_r = 0.05;
    double min_radius = 0.05;
    double max_radius = std::sqrt(2.0);  // domain diameter
};

struct LocalCell {
    std::vector<std::size_t> cell;  // ascending sensor indices
    RadiusState radius;
    std::size_t doublings = 0;
    double farthest = 0.0;  // d_i, largest sensor distance within the cell
};

/// Builds actuator `index`'s cell from the sensors and actuators it can see
/// within its detection radius, doubling the radius until it exceeds twice the
/// farthest owned sensor distance or reaches the domain diameter.
inline LocalCell local_cell(std::size_t index, std::span<const Point> actuators, const SensorMesh& mesh,
                            RadiusState state) {
    if (index >= actuators.size()) throw ConfigError("actuator index out of range");
    if (!(state.radius > 0.0)) throw ParameterError("detection radius must be positive");
    state.radius = std::min(state.radius, state.max_radius);
    const Point p = actuators[index];

    LocalCell out;
    std::vector<std::size_t> visible;
    for (;;) {
        const double r2 = state.radius * state.radius;
        visible.clear();
        for (std::size_t a = 0; a < actuators.size(); ++a) {
            if (squared_distance(actuators[a], p) <= r2) visible.push_back(a);
        }
        out.cell.clear();
        double farthest2 = 0.0;
        for (std::size_t s = 0; s < mesh.size(); ++s) {
            const double d2 = squared_distance(mesh.positions[s], p);
            if (d2 > r2) continue;
            if (detail::nearest_generator(mesh.positions[s], actuators, visible) == index) {
                out.cell.push_back(s);
                farthest2 = std::max(farthest2, d2);
            }
        }
        out.farthest = std::sqrt(farthest2);
        const bool settled = !out.cell.empty() && state.radius > 2.0 * out.farthest;
        if (settled || state.radius >= state.max_radius) break;
        state.radius = std::min(2.0 * state.radius, state.max_radius);
        ++out.doublings;
    }
    state.unchanged_count = out.doublings == 0 ? state.unchanged_count + 1 : 0;
    out.radius = state;
    return out;
}

/// After three consecutive updates without a change, shrink the radius by delta_r
/// (never below min_radius) and restart the count.
inline RadiusState update_radius(RadiusState state) {
    if (!(state.delta_r > 0.0)) throw ParameterError("radius decrement must be positive");
    if (state.unchanged_count >= 3) {
        state.radius = std::max(state.radius - state.delta_r, state.min_radius);
        state.unchanged_count = 0;
    }
    return state;
}

/// Lloyd step where every actuator builds its own cell with local_cell.
/// Radii are updated in place (local_cell followed by update_radius).
inline LloydResult distributed_lloyd_step(std::span<const Point> actuators, const SensorMesh& mesh,
                                          const Measurement& density, std::span<RadiusState> radii) {
    if (radii.size() != actuators.size()) throw ConfigError("one radius state per actuator required");
    LloydResult r;
    r.partition.owner.assign(mesh.size(), std::numeric_limits<std::size_t>::max());
    r.partition.cells.resize(actuators.size());
    for (std::size_t a = 0; a < actuators.size(); ++a) {
        LocalCell lc = local_cell(a, actuators, mesh, radii[a]);
        radii[a] = update_radius(lc.radius);
        for (const std::size_t s : lc.cell) r.partition.owner[s] = a;
        r.partition.cells[a] = std::move(lc.cell);
        const Point c = mass_centroid(r.partition.cells[a], density, mesh, actuators[a]);
        r.targets.push_back(c);
        r.max_displacement = std::max(r.max_displacement, distance(c, actuators[a]));
    }
    r.partition.centroids = r.targets;
    r.converged = r.max_displacement < kLloydEpsilon;
    return r;
}

}  // namespace anodiff
