#pragma once

// Manufactured-solution runs and refinement studies.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "anodiff/config.hpp"
#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"
#include "anodiff/manufactured.hpp"
#include "anodiff/solver.hpp"

namespace anodiff {

enum class VerificationCase {
    Appendix1,           // time-fractional, u = t^2 x(1-x) y(1-y), t_end 0.5
    Appendix2,           // space-fractional, same u, t_end 1
    SteadyBumpTfde,      // time-fractional, u = B(x)B(y) held fixed by its forcing
    SteadyBumpSfde,      // space-fractional counterpart
    SteadyParabolaSfde,  // space-fractional, u = x(1-x)y(1-y) held fixed
};

inline const char* case_name(VerificationCase c) {
    switch (c) {
        case VerificationCase::Appendix1: return "appendix1";
        case VerificationCase::Appendix2: return "appendix2";
        case VerificationCase::SteadyBumpTfde: return "bump-tfde";
        case VerificationCase::SteadyBumpSfde: return "bump-sfde";
        case VerificationCase::SteadyParabolaSfde: return "parabola-sfde";
    }
    return "unknown";
}

inline VerificationCase parse_case(const std::string& name) {
    for (const auto c : {VerificationCase::Appendix1, VerificationCase::Appendix2, VerificationCase::SteadyBumpTfde,
                         VerificationCase::SteadyBumpSfde, VerificationCase::SteadyParabolaSfde}) {
        if (name == case_name(c)) return c;
    }
    throw ConfigError("unknown verification case '" + name +
                      "' (expected appendix1, appendix2, bump-tfde, bump-sfde or parabola-sfde)");
}

inline bool is_time_fractional(VerificationCase c) {
    return c == VerificationCase::Appendix1 || c == VerificationCase::SteadyBumpTfde;
}

/// Resolution of one verification run. A negative t_end selects the case default.
struct VerificationSetup {
    std::size_t n_intervals = 20;
    double tau = 1.0 / 250.0;
    double t_end = -1.0;
};

inline double default_t_end(VerificationCase c) { return is_time_fractional(c) ? 0.5 : 1.0; }

struct ErrorReport {
    double max_error = 0.0;
    double l2_error = 0.0;                // sqrt(sum e^2 hx hy)
    std::vector<double> observed_orders;  // filled by convergence_study
};

struct VerificationResult {
    ErrorReport report;
    Field numerical;
    Field exact;
    double t = 0.0;
};

inline ErrorReport error_norms(const Field& numerical, const Field& exact) {
    numerical.require_same_grid(exact);
    const Grid2D& g = numerical.grid();
    ErrorReport r;
    double sum = 0.0;
    const auto a = numerical.values();
    const auto b = exact.values();
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double e = std::abs(a[k] - b[k]);
        r.max_error = std::max(r.max_error, e);
        sum += e * e;
    }
    r.l2_error = std::sqrt(sum * g.hx() * g.hy());
    return r;
}

/// Runs one manufactured-solution problem on the unit square with homogeneous
/// Dirichlet data and k = 0.01. Sources enter at the old time level, like every
/// other source in the solver. `order` is alpha or beta depending on the case.
inline VerificationResult run_verification(VerificationCase c, double order, VerificationSetup setup = {}) {
    namespace mf = manufactured;
    if (setup.n_intervals < 2) throw ConfigError("verification needs at least 2 intervals per side");
    const double t_end = setup.t_end < 0.0 ? default_t_end(c) : setup.t_end;
    const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / setup.tau));
    if (std::abs(static_cast<double>(steps) * setup.tau - t_end) > 1e-9 * std::max(1.0, t_end)) {
        throw ConfigError("verification t_end must be an integer multiple of tau");
    }

    FractionalParams params;
    params.tau = setup.tau;
    params.k_alpha = params.k_beta = mf::kDiffusion;
    if (is_time_fractional(c)) {
        params.model = Model::TimeFractional;
        params.alpha = order;
    } else {
        params.model = Model::SpaceFractional;
        params.beta = order;
    }
    const Grid2D grid = make_grid(setup.n_intervals + 1, setup.n_intervals + 1);
    stability_guard(params, grid);
    const BoundaryCondition bc = BoundaryCondition::dirichlet(0.0);

    const auto interior = [&](auto&& f) {
        return Field::from_function(grid, [&](double x, double y) {
            return (x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) ? f(x, y) : 0.0;
        });
    };
    const auto bump2 = [](double x, double y) { return mf::bump(x) * mf::bump(y); };
    const auto parabola2 = [](double x, double y) { return x * (1.0 - x) * y * (1.0 - y); };

    Field initial(grid);
    Field exact(grid);
    Field steady_forcing(grid);
    bool steady = true;
    switch (c) {
        case VerificationCase::Appendix1:
        case VerificationCase::Appendix2:
            steady = false;
            exact = Field::from_function(grid, [&](double x, double y) { return mf::exact_solution(x, y, t_end); });
            break;
        case VerificationCase::SteadyBumpTfde:
            initial = exact = Field::from_function(grid, bump2);
            steady_forcing = interior([](double x, double y) { return mf::steady_bump_forcing_tfde(x, y); });
            break;
        case VerificationCase::SteadyBumpSfde:
            initial = exact = Field::from_function(grid, bump2);
            steady_forcing = interior([&](double x, double y) { return mf::steady_bump_forcing_sfde(order, x, y); });
            break;
        case VerificationCase::SteadyParabolaSfde:
            initial = exact = Field::from_function(grid, parabola2);
            steady_forcing = interior([&](double x, double y) {
                return -mf::kDiffusion * (mf::riesz_of_parabola(order, x) * y * (1.0 - y) +
                                          x * (1.0 - x) * mf::riesz_of_parabola(order, y));
            });
            break;
    }

    SolverState state(initial, params);
    const Field zero(grid);
    for (std::size_t n = 0; n < steps; ++n) {
        if (steady) {
            step(state, params, steady_forcing, zero, bc);
            continue;
        }
        const double t = state.t;
        const Field f = c == VerificationCase::Appendix1
                            ? interior([&](double x, double y) { return mf::forcing_tfde(order, x, y, t); })
                            : interior([&](double x, double y) { return mf::forcing_sfde(order, x, y, t); });
        step(state, params, f, zero, bc);
    }

    VerificationResult out{error_norms(state.field, exact), state.field, exact, t_end};
    return out;
}

/// A verification run stored as a config file with a single [verification] section.
struct VerificationSpec {
    VerificationCase c = VerificationCase::Appendix1;
    double order = 0.7;
    VerificationSetup setup;
};

inline VerificationSpec verification_from_document(const ConfigDocument& doc) {
    ConfigReader cfg(doc);
    VerificationSpec v;
    v.c = parse_case(cfg.require_string("verification.case"));
    v.order = cfg.require_double("verification.order");
    v.setup.n_intervals = cfg.get_size("verification.n_intervals", 20);
    v.setup.tau = cfg.get_double("verification.tau", 1.0 / 250.0);
    v.setup.t_end = cfg.get_double("verification.t_end", default_t_end(v.c));
    cfg.reject_unknown();
    if (is_time_fractional(v.c)) {
        require_time_order(v.order);
    } else {
        require_space_order(v.order);
    }
    return v;
}

inline VerificationSpec load_verification_file(const std::string& path, const std::vector<std::string>& overrides = {}) {
    ConfigDocument doc = ConfigDocument::load_file(path);
    for (const auto& o : overrides) doc.apply_override(o);
    try {
        return verification_from_document(doc);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Refinement studies
// ---------------------------------------------------------------------------

enum class RefinementAxis { Space, Time };

struct RefinementLevel {
    std::size_t n_intervals;
    double tau;
};

struct ConvergenceLevel {
    RefinementLevel level;
    ErrorReport errors;
};

struct ConvergenceReport {
    VerificationCase c = VerificationCase::Appendix1;
    double order = 0.0;
    RefinementAxis axis = RefinementAxis::Space;
    std::vector<ConvergenceLevel> levels;
    std::vector<double> pairwise_orders;  // between consecutive levels, max norm
    double fitted_order = 0.0;            // least-squares slope of log(max error) vs log(step)
};

/// Least-squares slope of log(e) against log(s).
inline double log_log_slope(const std::vector<double>& s, const std::vector<double>& e) {
    if (s.size() != e.size() || s.size() < 2) throw ConfigError("slope fit needs matching series of length >= 2");
    double mx = 0.0;
    double my = 0.0;
    const double n = static_cast<double>(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(s[k] > 0.0) || !(e[k] > 0.0)) throw SingularityError("slope fit needs positive steps and errors");
        mx += std::log(s[k]);
        my += std::log(e[k]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double dx = std::log(s[k]) - mx;
        sxy += dx * (std::log(e[k]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw SingularityError("slope fit needs distinct steps");
    return sxy / sxx;
}

inline ConvergenceReport convergence_study(VerificationCase c, double order, RefinementAxis axis,
                                           const std::vector<RefinementLevel>& levels, double t_end = -1.0) {
    if (levels.size() < 3) throw ConfigError("a convergence study needs at least 3 refinement levels");
    ConvergenceReport rep;
    rep.c = c;
    rep.order = order;
    rep.axis = axis;
    std::vector<double> steps;
    std::vector<double> errs;
    for (const auto& lv : levels) {
        const VerificationResult r = run_verification(c, order, {lv.n_intervals, lv.tau, t_end});
        rep.levels.push_back({lv, r.report});
        steps.push_back(axis == RefinementAxis::Space ? 1.0 / static_cast<double>(lv.n_intervals) : lv.tau);
        errs.push_back(r.report.max_error);
    }
    for (std::size_t k = 1; k < steps.size(); ++k) {
        rep.pairwise_orders.push_back(std::log(errs[k] / errs[k - 1]) / std::log(steps[k] / steps[k - 1]));
    }
    rep.fitted_order = log_log_slope(steps, errs);
    return rep;
}

/// Temporal study for the time-fractional appendix problem. Its exact solution
/// is quadratic in x and y, so the 5-point Laplacian is exact and the coarse
/// h = 1/10 isolates the time error.
inline ConvergenceReport temporal_study(double alpha) {
    return convergence_study(VerificationCase::Appendix1, alpha, RefinementAxis::Time,
                             {{10, 1.0 / 50}, {10, 1.0 / 100}, {10, 1.0 / 200}, {10, 1.0 / 400}});
}

/// Spatial study for the time-fractional model on the steady bump (tau small
/// enough that the time error vanishes: the steady solution is a fixed point).
inline ConvergenceReport spatial_study_tfde(double alpha) {
    return convergence_study(VerificationCase::SteadyBumpTfde, alpha, RefinementAxis::Space,
                             {{10, 1.0 / 4000}, {20, 1.0 / 4000}, {40, 1.0 / 4000}}, 0.5);
}

/// Spatial study for the space-fractional model on the steady bump.
inline ConvergenceReport spatial_study_sfde(double beta, VerificationCase c = VerificationCase::SteadyBumpSfde) {
    return convergence_study(c, beta, RefinementAxis::Space,
                             {{10, 1.0 / 1000}, {20, 1.0 / 1000}, {40, 1.0 / 1000}, {80, 1.0 / 1000}}, 1.0);
}

}  // namespace anodiff
