#pragma once

// Closed-form solutions and forcings used to verify the solvers.

#include <array>
#include <cmath>
#include <utility>

#include "anodiff/error.hpp"
#include "anodiff/operators.hpp"
#include "anodiff/special.hpp"

namespace anodiff::manufactured {

inline constexpr double kDiffusion = 0.01;

/// u = t^2 x(1-x) y(1-y)
inline double exact_solution(double x, double y, double t) {
    return t * t * x * (1.0 - x) * y * (1.0 - y);
}

/// Forcing that makes exact_solution solve the time-fractional problem
///   D_t^alpha u = k lap(u) + f.
inline double forcing_tfde(double alpha, double x, double y, double t, double k = kDiffusion) {
    const double sx = x - x * x;
    const double sy = y - y * y;
    return 2.0 * std::pow(t, 2.0 - alpha) / gamma_fn(3.0 - alpha) * sx * sy + 2.0 * k * t * t * (sx + sy);
}

/// Left plus right Riemann-Liouville derivatives of x(1-x) on [0, 1]:
///   (x^{1-b} + (1-x)^{1-b}) / Gamma(2-b) - 2 (x^{2-b} + (1-x)^{2-b}) / Gamma(3-b).
inline double two_sided_rl_of_parabola(double beta, double x) {
    const double xr = 1.0 - x;
    return (std::pow(x, 1.0 - beta) + std::pow(xr, 1.0 - beta)) * reciprocal_gamma(2.0 - beta) -
           2.0 * (std::pow(x, 2.0 - beta) + std::pow(xr, 2.0 - beta)) * reciprocal_gamma(3.0 - beta);
}

/// Riesz derivative of x(1-x) on [0, 1] (zero outside), 0 < x < 1.
inline double riesz_of_parabola(double beta, double x) {
    return -riesz_coefficient(beta) * two_sided_rl_of_parabola(beta, x);
}

/// Forcing that makes exact_solution solve the space-fractional problem
///   u_t = k (R_x u + R_y u) + f,  R = Riesz derivative of order beta.
/// Only defined strictly inside the unit square.
inline double forcing_sfde(double beta, double x, double y, double t, double k = kDiffusion) {
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) {
        throw SingularityError("space-fractional forcing is singular on the boundary (x=" +
                               format_short(x) + ", y=" + format_short(y) + ")");
    }
    const double sx = x - x * x;
    const double sy = y - y * y;
    return 2.0 * t * sx * sy + k * t * t * riesz_coefficient(beta) *
                                   (sy * two_sided_rl_of_parabola(beta, x) +
                                    sx * two_sided_rl_of_parabola(beta, y));
}

// Smooth bump B(x) = (x - x^2)^3 = x^3 - 3x^4 + 3x^5 - x^6. Its zero extension
// is C^2, which keeps both centred schemes at their nominal second order up to
// the boundary.

inline double bump(double x) {
    const double s = x - x * x;
    return s * s * s;
}

inline double bump_second_derivative(double x) {
    return 6.0 * x - 36.0 * x * x + 60.0 * x * x * x - 30.0 * x * x * x * x;
}

/// Riesz derivative of B on [0, 1] built from D^b x^m = m!/Gamma(m+1-b) x^{m-b}.
inline double riesz_of_bump(double beta, double x) {
    constexpr std::array<std::pair<int, double>, 4> terms{{{3, 1.0}, {4, -3.0}, {5, 3.0}, {6, -1.0}}};
    const auto left = [&](double s) {
        double acc = 0.0;
        for (const auto& [m, a] : terms) {
            acc += a * std::tgamma(m + 1.0) * reciprocal_gamma(m + 1.0 - beta) * std::pow(s, m - beta);
        }
        return acc;
    };
    return -riesz_coefficient(beta) * (left(x) + left(1.0 - x));
}

/// Steady solution B(x)B(y) for the time-fractional model; returns the forcing
/// -k lap(B(x)B(y)) that holds it fixed.
inline double steady_bump_forcing_tfde(double x, double y, double k = kDiffusion) {
    return -k * (bump_second_derivative(x) * bump(y) + bump(x) * bump_second_derivative(y));
}

/// Same for the space-fractional model: -k (R_x + R_y)(B(x)B(y)).
inline double steady_bump_forcing_sfde(double beta, double x, double y, double k = kDiffusion) {
    return -k * (riesz_of_bump(beta, x) * bump(y) + bump(x) * riesz_of_bump(beta, y));
}

}  // namespace anodiff::manufactured
