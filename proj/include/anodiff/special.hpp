#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/zeta.hpp>

#include "anodiff/error.hpp"

namespace anodiff {

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

/// Gamma function; poles at 0, -1, -2, ... raise SingularityError.
inline double gamma_fn(double x) {
    if (is_nonpositive_integer(x)) {
        throw SingularityError("gamma function pole at " + std::to_string(x));
    }
    return std::tgamma(x);
}

/// 1/Gamma(x), which is entire: exactly 0 at the poles of Gamma.
inline double reciprocal_gamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

/// Dirichlet eta function, eta(s) = sum_{m>=1} (-1)^(m-1) m^(-s), analytically continued.
inline double dirichlet_eta(double s) {
    if (s == 1.0) return std::numbers::ln2;
    return (1.0 - std::pow(2.0, 1.0 - s)) * boost::math::zeta(s);
}

}  // namespace anodiff
