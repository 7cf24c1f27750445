#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"
#include "anodiff/special.hpp"

namespace anodiff {

inline void require_time_order(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("time order alpha must lie in (0, 1], got " + format_short(alpha));
    }
}

inline void require_space_order(double beta) {
    if (!(beta > 1.0 && beta <= 2.0)) {
        throw ParameterError("space order beta must lie in (1, 2], got " + format_short(beta));
    }
}

// ---------------------------------------------------------------------------
// Caputo derivative, L1 scheme
// ---------------------------------------------------------------------------

/// L1 coefficients b_j = (j+1)^(1-alpha) - j^(1-alpha).
class L1Weights {
public:
    L1Weights(double alpha, std::size_t n) : alpha_(alpha) {
        require_time_order(alpha);
        if (n == 0) throw ParameterError("L1 weight count must be at least 1");
        extend(n);
    }

    double alpha() const { return alpha_; }
    std::size_t size() const { return b_.size(); }
    double operator[](std::size_t j) const { return b_[j]; }
    const std::vector<double>& values() const { return b_; }

    /// Grows the table to at least n entries.
    void extend(std::size_t n) {
        const double p = 1.0 - alpha_;
        b_.reserve(n);
        for (std::size_t j = b_.size(); j < n; ++j) {
            if (j == 0) {
                b_.push_back(1.0);
            } else if (p == 0.0) {
                b_.push_back(0.0);
            } else {
                const double jd = static_cast<double>(j);
                b_.push_back(std::pow(jd + 1.0, p) - std::pow(jd, p));
            }
        }
    }

private:
    double alpha_;
    std::vector<double> b_;
};

inline L1Weights l1_weights(double alpha, std::size_t n) { return L1Weights(alpha, n); }

/// Past solution levels rho^0, rho^1, ... kept for the L1 memory sum.
///
/// With window == 0 every level is retained. With window W > 0 only the last
/// W + 1 levels are kept and the L1 sum is truncated (short-memory
/// approximation); this loses accuracy and is off by default.
class HistoryBuffer {
public:
    HistoryBuffer(double tau, std::size_t window = 0) : tau_(tau), window_(window) {
        if (!(tau > 0.0)) throw ParameterError("history time step must be positive");
    }

    void push(Field level) {
        if (!levels_.empty()) levels_.front().require_same_grid(level);
        levels_.push_back(std::move(level));
        ++pushed_;
        if (window_ > 0 && levels_.size() > window_ + 1) levels_.pop_front();
    }

    bool empty() const { return levels_.empty(); }
    double tau() const { return tau_; }
    std::size_t window() const { return window_; }
    /// Number of levels ever pushed (n when the buffer holds rho^0..rho^{n-1}).
    std::size_t levels_pushed() const { return pushed_; }
    /// Number of levels currently retained.
    std::size_t size() const { return levels_.size(); }

    /// Level rho^{pushed-1-back}, i.e. back == 0 is the latest level.
    const Field& from_latest(std::size_t back) const { return levels_[levels_.size() - 1 - back]; }
    const Field& latest() const { return levels_.back(); }
    const Field& oldest_retained() const { return levels_.front(); }

private:
    double tau_;
    std::size_t window_;
    std::size_t pushed_ = 0;
    std::deque<Field> levels_;
};

/// Known-history part of the L1 formula:
///   M^n = b_{n-1} rho^0 + sum_{j=1}^{n-1} (b_{j-1} - b_j) rho^{n-j},
/// with n = history.levels_pushed(). `weights` must hold at least history.size()
/// entries. A windowed history treats its oldest retained level as rho^0.
inline Field caputo_l1_memory(const HistoryBuffer& history, const L1Weights& weights) {
    if (history.empty()) throw StateError("L1 memory requested on an empty history");
    // Terms reach back `span` levels; the level beyond that carries the tail weight.
    const std::size_t span = history.size() - 1;
    if (weights.size() < span + 1) throw StateError("L1 weight table shorter than the history");

    Field out(history.latest().grid());
    auto acc = out.values();
    for (std::size_t j = 1; j <= span; ++j) {
        const double w = weights[j - 1] - weights[j];
        const auto level = history.from_latest(j - 1).values();
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * level[k];
    }
    const double tail = weights[span];
    const auto first = history.oldest_retained().values();
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += tail * first[k];
    return out;
}

inline Field caputo_l1_apply(const HistoryBuffer& history, double alpha) {
    if (history.empty()) throw StateError("L1 memory requested on an empty history");
    return caputo_l1_memory(history, L1Weights(alpha, history.size()));
}

// ---------------------------------------------------------------------------
// Five-point Laplacian
// ---------------------------------------------------------------------------

/// Second-order 5-point Laplacian.
///
/// Dirichlet: evaluated at interior nodes, boundary entries are 0.
/// Neumann: evaluated at every node; values outside the domain are eliminated
/// through the central-difference ghost relation of the flux condition, so the
/// trapezoid-weighted sum of the result vanishes for zero flux.
inline Field laplacian(const Field& field, const BoundaryCondition& bc) {
    const Grid2D& g = field.grid();
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    Field out(g);

    if (bc.kind == BoundaryCondition::Kind::Dirichlet) {
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                const double c = field(i, j);
                out(i, j) = (field(i - 1, j) - 2.0 * c + field(i + 1, j)) * ihx2 +
                            (field(i, j - 1) - 2.0 * c + field(i, j + 1)) * ihy2;
            }
        }
        return out;
    }

    // ghost = mirror + 2h (c1 + c2 * edge), on either side of either axis
    const auto ghost = [&](double mirror, double edge, double h) {
        return mirror + 2.0 * h * (bc.c1 + bc.c2 * edge);
    };
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const double c = field(i, j);
            const double left = i > 0 ? field(i - 1, j) : ghost(field(1, j), c, g.hx());
            const double right = i + 1 < nx ? field(i + 1, j) : ghost(field(nx - 2, j), c, g.hx());
            const double down = j > 0 ? field(i, j - 1) : ghost(field(i, 1), c, g.hy());
            const double up = j + 1 < ny ? field(i, j + 1) : ghost(field(i, ny - 2), c, g.hy());
            out(i, j) = (left - 2.0 * c + right) * ihx2 + (down - 2.0 * c + up) * ihy2;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Riesz derivative, fractional centred difference
// ---------------------------------------------------------------------------

/// Symmetric weights g_k = (-1)^k Gamma(beta+1) / (Gamma(beta/2-k+1) Gamma(beta/2+k+1)),
/// stored for k = 0..K (g_{-k} = g_k).
class RieszWeights {
public:
    RieszWeights(double beta, std::size_t K) : beta_(beta) {
        require_space_order(beta);
        if (K == 0) throw ParameterError("Riesz stencil half-width must be at least 1");
        const double half = 0.5 * beta;
        g_.reserve(K + 1);
        g_.push_back(gamma_fn(beta + 1.0) / std::pow(gamma_fn(half + 1.0), 2));
        for (std::size_t k = 0; k < K; ++k) {
            const double kd = static_cast<double>(k);
            g_.push_back(g_.back() * (kd - half) / (half + kd + 1.0));
        }
    }

    double beta() const { return beta_; }
    std::size_t half_width() const { return g_.size() - 1; }
    double operator[](long k) const { return g_[static_cast<std::size_t>(k < 0 ? -k : k)]; }
    const std::vector<double>& one_sided() const { return g_; }

private:
    double beta_;
    std::vector<double> g_;
};

inline RieszWeights riesz_weights(double beta, std::size_t K) { return RieszWeights(beta, K); }

enum class Axis { X, Y };

/// Riesz derivative of order beta along one axis:
///   out_i = -h^{-beta} sum_m g_{i-m} rho_m
/// over all grid nodes m on the line (the field is extended by zero outside
/// the domain). Boundary entries of the result are 0.
inline Field riesz_apply(const Field& field, const RieszWeights& w, Axis axis) {
    const Grid2D& g = field.grid();
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();
    const std::size_t n_line = axis == Axis::X ? nx : ny;
    if (w.half_width() + 1 < n_line) throw ParameterError("Riesz weight table narrower than the grid");
    const double h = axis == Axis::X ? g.hx() : g.hy();
    const double scale = -std::pow(h, -w.beta());
    const auto& gk = w.one_sided();

    Field out(g);
    std::vector<double> line(n_line);
    const std::size_t n_lines = axis == Axis::X ? ny : nx;
    for (std::size_t l = 1; l + 1 < n_lines; ++l) {
        for (std::size_t m = 0; m < n_line; ++m) line[m] = axis == Axis::X ? field(m, l) : field(l, m);
        for (std::size_t i = 1; i + 1 < n_line; ++i) {
            double s = 0.0;
            for (std::size_t m = 0; m < n_line; ++m) s += gk[i > m ? i - m : m - i] * line[m];
            (axis == Axis::X ? out(i, l) : out(l, i)) = scale * s;
        }
    }
    return out;
}

inline Field riesz_apply(const Field& field, double beta, Axis axis) {
    const Grid2D& g = field.grid();
    return riesz_apply(field, RieszWeights(beta, (axis == Axis::X ? g.nx() : g.ny()) - 1), axis);
}

/// c_beta = 1 / (2 cos(beta pi / 2)), the normalisation joining the left and
/// right Riemann-Liouville derivatives into the Riesz derivative.
inline double riesz_coefficient(double beta) {
    if (beta == 1.0) throw SingularityError("riesz coefficient is singular at beta = 1");
    require_space_order(beta);
    return 1.0 / (2.0 * std::cos(beta * std::numbers::pi / 2.0));
}

}  // namespace anodiff
