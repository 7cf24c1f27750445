#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"
#include "anodiff/operators.hpp"
#include "anodiff/special.hpp"

namespace anodiff {

enum class Model { TimeFractional, SpaceFractional };

inline const char* model_name(Model m) {
    return m == Model::TimeFractional ? "time_fractional" : "space_fractional";
}

/// Orders, diffusion coefficients and time step of the governing equation.
/// Only the order belonging to `model` is used.
struct FractionalParams {
    Model model = Model::TimeFractional;
    double alpha = 1.0;
    double beta = 2.0;
    double k_alpha = 0.01;
    double k_beta = 0.01;
    double tau = 0.002;
    std::size_t memory_window = 0;  // 0: full L1 history

    void validate() const {
        if (!(tau > 0.0) || !std::isfinite(tau)) throw ParameterError("time step tau must be positive");
        if (model == Model::TimeFractional) {
            require_time_order(alpha);
            if (!(k_alpha > 0.0)) throw ParameterError("k_alpha must be positive");
        } else {
            require_space_order(beta);
            if (!(k_beta > 0.0)) throw ParameterError("k_beta must be positive");
        }
    }

    /// tau^alpha * Gamma(2 - alpha): the L1 step factor multiplying the right-hand side.
    double l1_step_factor() const { return std::pow(tau, alpha) * gamma_fn(2.0 - alpha); }
};

/// Point disturbance of strength amplitude * exp(-decay * t).
struct PointSource {
    Point position;
    double amplitude = 20.0;
    double decay = 1.0;

    double strength(double t) const { return amplitude * std::exp(-decay * t); }
};

/// Deposits the source strength on the nearest node, divided by the cell area,
/// so the injected mass rate does not depend on the grid.
inline void add_point_source(Field& out, const PointSource& src, double t) {
    const Grid2D& g = out.grid();
    if (!g.domain().contains(src.position)) {
        throw ParameterError("point source at (" + format_short(src.position.x) + ", " +
                             format_short(src.position.y) + ") lies outside the domain");
    }
    const auto [i, j] = g.nearest_node(src.position);
    out(i, j) += src.strength(t) / g.cell_area();
}

inline Field rasterize_point_source(const PointSource& src, const Grid2D& grid, double t) {
    Field out(grid);
    add_point_source(out, src, t);
    return out;
}

inline Field rasterize_sources(const std::vector<PointSource>& sources, const Grid2D& grid, double t) {
    Field out(grid);
    for (const auto& s : sources) add_point_source(out, s, t);
    return out;
}

/// Current time level plus whatever the scheme needs to advance it.
struct SolverState {
    double t = 0.0;
    std::size_t step_index = 0;
    Field field;
    std::optional<HistoryBuffer> history;  // time-fractional model only
    std::optional<L1Weights> l1;
    std::optional<RieszWeights> riesz_x;
    std::optional<RieszWeights> riesz_y;

    SolverState(Field initial, const FractionalParams& params, double t0 = 0.0)
        : t(t0), field(std::move(initial)) {
        params.validate();
        if (params.model == Model::TimeFractional) {
            history.emplace(params.tau, params.memory_window);
            history->push(field);
            l1.emplace(params.alpha, 2);
        } else {
            const Grid2D& g = field.grid();
            riesz_x.emplace(params.beta, g.nx() - 1);
            riesz_y.emplace(params.beta, g.ny() - 1);
        }
    }
};

namespace detail {

inline void finish_step(SolverState& state, Field next, double tau, bool clamp) {
    if (clamp) next.clamp_nonnegative();
    if (!next.all_finite()) throw BlowUpError(state.step_index + 1);
    state.field = std::move(next);
    state.step_index += 1;
    state.t += tau;
}

}  // namespace detail

/// One explicit L1 step of the time-fractional model:
///   rho^n = M^n + tau^alpha Gamma(2-alpha) [k lap(rho^{n-1}) + f_d + f_c],
/// with sources taken at the old level. At alpha = 1 this is forward Euler.
///
/// Dirichlet edges are reset afterwards; Neumann edges evolve through the
/// ghost-eliminated Laplacian.
inline void step_tfde(SolverState& state, const FractionalParams& params, const Field& f_d,
                      const Field& f_c, const BoundaryCondition& bc, bool clamp_nonnegative = false) {
    if (params.model != Model::TimeFractional || !state.history) {
        throw StateError("step_tfde called on a state that is not time-fractional");
    }
    auto& hist = *state.history;
    state.l1->extend(hist.size() + 1);

    Field next = caputo_l1_memory(hist, *state.l1);
    const Field lap = laplacian(state.field, bc);
    const double mu = params.l1_step_factor();
    auto out = next.values();
    const auto l = lap.values();
    const auto d = f_d.values();
    const auto c = f_c.values();
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += mu * (params.k_alpha * l[k] + d[k] + c[k]);
    }
    if (bc.is_dirichlet()) apply_boundary(next, bc);

    detail::finish_step(state, std::move(next), params.tau, clamp_nonnegative);
    hist.push(state.field);
}

/// One explicit Euler step of the space-fractional model with homogeneous
/// Dirichlet data (zero extension outside the domain).
inline void step_sfde(SolverState& state, const FractionalParams& params, const Field& f_d,
                      const Field& f_c, const BoundaryCondition& bc, bool clamp_nonnegative = false) {
    if (params.model != Model::SpaceFractional || !state.riesz_x) {
        throw StateError("step_sfde called on a state that is not space-fractional");
    }
    if (!bc.is_homogeneous_dirichlet()) {
        throw UnsupportedError("space-fractional model supports only homogeneous Dirichlet boundaries");
    }
    const Field rx = riesz_apply(state.field, *state.riesz_x, Axis::X);
    const Field ry = riesz_apply(state.field, *state.riesz_y, Axis::Y);

    Field next = state.field;
    auto out = next.values();
    const auto ax = rx.values();
    const auto ay = ry.values();
    const auto d = f_d.values();
    const auto c = f_c.values();
    const double tau = params.tau;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += tau * (params.k_beta * (ax[k] + ay[k]) + d[k] + c[k]);
    }
    apply_boundary(next, bc);
    detail::finish_step(state, std::move(next), tau, clamp_nonnegative);
}

inline void step(SolverState& state, const FractionalParams& params, const Field& f_d, const Field& f_c,
                 const BoundaryCondition& bc, bool clamp_nonnegative = false) {
    if (params.model == Model::TimeFractional) {
        step_tfde(state, params, f_d, f_c, bc, clamp_nonnegative);
    } else {
        step_sfde(state, params, f_d, f_c, bc, clamp_nonnegative);
    }
}

/// Outcome of the explicit-stability check: the scheme is stable when
/// quantity <= limit.
struct StabilityReport {
    double quantity = 0.0;
    double limit = 0.0;

    /// Unused fraction of the stability range, 1 - quantity / limit.
    double margin() const { return 1.0 - quantity / limit; }
};

/// Stability limit of the explicit L1 recursion for the worst (sign-alternating)
/// Fourier mode: tau^alpha Gamma(2-alpha) k |lambda|_max <= 4 eta(alpha - 1).
/// Equals 2 at alpha = 1 (forward Euler) and tends to 1 as alpha -> 0.
inline double l1_explicit_limit(double alpha) {
    require_time_order(alpha);
    return 4.0 * dirichlet_eta(alpha - 1.0);
}

inline StabilityReport stability_report(const FractionalParams& params, const Grid2D& grid) {
    params.validate();
    const double hx = grid.hx();
    const double hy = grid.hy();
    StabilityReport r;
    if (params.model == Model::TimeFractional) {
        // |lambda|_max of the 5-point Laplacian is bounded by 4/hx^2 + 4/hy^2.
        r.quantity = params.l1_step_factor() * params.k_alpha * (4.0 / (hx * hx) + 4.0 / (hy * hy));
        r.limit = l1_explicit_limit(params.alpha);
    } else {
        // Off-centre weights are negative and sum to -g_0, so |lambda|_max <= 2 g_0 / h^beta.
        const double g0 = RieszWeights(params.beta, 1)[0];
        const double b = params.beta;
        r.quantity = params.tau * params.k_beta * 2.0 * g0 * (std::pow(hx, -b) + std::pow(hy, -b));
        r.limit = 2.0;
    }
    return r;
}

/// Throws StabilityError when the explicit scheme would be unstable.
inline StabilityReport stability_guard(const FractionalParams& params, const Grid2D& grid) {
    const StabilityReport r = stability_report(params, grid);
    if (!(r.quantity <= r.limit)) {
        throw StabilityError("explicit " + std::string(model_name(params.model)) +
                                 " step is unstable: stability number " + format_short(r.quantity) +
                                 " exceeds limit " + format_short(r.limit),
                             r.quantity, r.limit);
    }
    return r;
}

}  // namespace anodiff
