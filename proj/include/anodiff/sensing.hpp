#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"

namespace anodiff {

/// Static sensors sitting on interior grid nodes.
struct SensorMesh {
    std::vector<Point> positions;
    std::vector<std::pair<std::size_t, std::size_t>> nodes;  // (i, j) per sensor
    double cell_area = 0.0;  // area represented by each sensor

    std::size_t size() const { return positions.size(); }
};

/// n_per_side x n_per_side sensors on interior nodes. With n_per_side = nx - 2
/// every interior node carries a sensor; smaller counts pick evenly strided,
/// centred nodes.
inline SensorMesh make_sensor_mesh(std::size_t n_per_side, const Grid2D& grid) {
    const std::size_t inner_x = grid.nx() - 2;
    const std::size_t inner_y = grid.ny() - 2;
    if (n_per_side == 0 || n_per_side > inner_x || n_per_side > inner_y) {
        throw ConfigError("sensor count per side " + std::to_string(n_per_side) +
                          " must be between 1 and the interior node count (" +
                          std::to_string(std::min(inner_x, inner_y)) + ")");
    }
    const auto pick = [n_per_side](std::size_t k, std::size_t inner) {
        return 1 + ((2 * k + 1) * inner) / (2 * n_per_side);
    };
    SensorMesh mesh;
    mesh.positions.reserve(n_per_side * n_per_side);
    mesh.nodes.reserve(n_per_side * n_per_side);
    for (std::size_t b = 0; b < n_per_side; ++b) {
        for (std::size_t a = 0; a < n_per_side; ++a) {
            const std::size_t i = pick(a, inner_x);
            const std::size_t j = pick(b, inner_y);
            mesh.nodes.emplace_back(i, j);
            mesh.positions.push_back(grid.node(i, j));
        }
    }
    mesh.cell_area = grid.domain().width() * grid.domain().height() /
                     static_cast<double>(n_per_side * n_per_side);
    if (n_per_side == inner_x && n_per_side == inner_y) mesh.cell_area = grid.cell_area();
    return mesh;
}

struct Measurement {
    double t = 0.0;
    std::vector<double> values;
};

/// Optional additive Gaussian measurement noise (off when sigma == 0).
struct NoiseModel {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

inline Measurement sample_measurements(const Field& field, const SensorMesh& mesh, double t) {
    Measurement m{t, {}};
    m.values.reserve(mesh.size());
    for (const auto& [i, j] : mesh.nodes) m.values.push_back(field(i, j));
    return m;
}

inline Measurement sample_measurements(const Field& field, const SensorMesh& mesh, double t,
                                       const NoiseModel& noise, std::mt19937_64& rng) {
    Measurement m = sample_measurements(field, mesh, t);
    if (noise.sigma > 0.0) {
        std::normal_distribution<double> dist(0.0, noise.sigma);
        for (double& v : m.values) v += dist(rng);
    }
    return m;
}

/// Plain sum of the sensor readings.
inline double aggregate_total(const Measurement& m) {
    return std::accumulate(m.values.begin(), m.values.end(), 0.0);
}

/// Index of the sensor closest to p (lowest index on ties).
inline std::size_t nearest_sensor(const SensorMesh& mesh, Point p) {
    std::size_t best = 0;
    double best_d = squared_distance(mesh.positions.at(0), p);
    for (std::size_t s = 1; s < mesh.size(); ++s) {
        const double d = squared_distance(mesh.positions[s], p);
        if (d < best_d) {
            best_d = d;
            best = s;
        }
    }
    return best;
}

}  // namespace anodiff
