#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"
#include "anodiff/sensing.hpp"

namespace anodiff {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct ActuatorState {
    std::size_t id = 0;
    Point p;
    Vec2 v;
    Point target;
};

/// Gains of p'' = -k_p (p - target) - k_v p'.
struct ControlGains {
    double k_p = 6.0;
    double k_v = 1.0;

    void validate() const {
        if (!(k_p > 0.0)) throw ParameterError("k_p must be positive");
        if (!(k_v >= 0.0)) throw ParameterError("k_v must be non-negative");
    }
};

/// Release law parameters: amplitude gamma * reading, capped at max_rate,
/// spread with a Gaussian kernel of width sigma.
struct SprayParams {
    double gamma = 1.0;
    double max_rate = 50.0;
    double sigma = 0.08;

    void validate() const {
        if (!(gamma > 0.0) || !(max_rate > 0.0) || !(sigma > 0.0)) {
            throw ParameterError("spray gamma, max_rate and sigma must all be positive");
        }
    }
};

inline Vec2 control_accel(const ActuatorState& s, const ControlGains& g) {
    return {-g.k_p * (s.p.x - s.target.x) - g.k_v * s.v.x, -g.k_p * (s.p.y - s.target.y) - g.k_v * s.v.y};
}

/// Semi-implicit Euler: velocity first (then capped at v_max), position with the
/// new velocity (then clamped to the domain, zeroing velocity on clamped axes).
/// Returns true when the speed cap was active.
inline bool integrate_actuator(ActuatorState& s, Vec2 accel, double dt, const Rect& domain, double v_max) {
    if (!(dt > 0.0)) throw ParameterError("actuator time step must be positive");
    s.v.x += accel.x * dt;
    s.v.y += accel.y * dt;
    bool capped = false;
    const double speed = std::hypot(s.v.x, s.v.y);
    if (speed > v_max) {
        const double k = v_max / speed;
        s.v.x *= k;
        s.v.y *= k;
        capped = true;
    }
    const Point moved{s.p.x + s.v.x * dt, s.p.y + s.v.y * dt};
    s.p = domain.clamp(moved);
    if (s.p.x != moved.x) s.v.x = 0.0;
    if (s.p.y != moved.y) s.v.y = 0.0;
    return capped;
}

/// Release amplitude of one actuator: gamma * reading at the nearest sensor, capped.
inline double release_amplitude(const ActuatorState& a, const Measurement& m, const SensorMesh& mesh,
                                const SprayParams& spray) {
    const double reading = std::max(m.values[nearest_sensor(mesh, a.p)], 0.0);
    return std::min(spray.gamma * reading, spray.max_rate);
}

/// f_c(x) = -sum_i A_i exp(-|x - p_i|^2 / (2 sigma^2)). `amplitudes`, when
/// non-empty, receives A_i per actuator.
inline Field release_field(std::span<const ActuatorState> actuators, const Measurement& m,
                           const SensorMesh& mesh, const SprayParams& spray, const Grid2D& grid,
                           std::vector<double>* amplitudes = nullptr) {
    Field out(grid);
    if (amplitudes) amplitudes->assign(actuators.size(), 0.0);
    const double inv2s2 = 1.0 / (2.0 * spray.sigma * spray.sigma);
    for (std::size_t a = 0; a < actuators.size(); ++a) {
        const double amp = release_amplitude(actuators[a], m, mesh, spray);
        if (amplitudes) (*amplitudes)[a] = amp;
        if (amp == 0.0) continue;
        const Point p = actuators[a].p;
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            for (std::size_t i = 0; i < grid.nx(); ++i) {
                out(i, j) -= amp * std::exp(-squared_distance(grid.node(i, j), p) * inv2s2);
            }
        }
    }
    return out;
}

}  // namespace anodiff
