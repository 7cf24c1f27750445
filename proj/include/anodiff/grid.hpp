#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anodiff/error.hpp"

namespace anodiff {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(Point a, Point b) { return std::sqrt(squared_distance(a, b)); }

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rect {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double diameter() const { return std::hypot(width(), height()); }

    bool contains(Point p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }

    Point clamp(Point p) const {
        return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
    }

    static Rect unit_square() { return {}; }
};

/// Uniform grid of nodes. Node (i, j) sits at (x_min + i*hx, y_min + j*hy);
/// i runs along x, j along y, and storage is row-major in j.
class Grid2D {
public:
    Grid2D(std::size_t nx, std::size_t ny, Rect domain) : nx_(nx), ny_(ny), domain_(domain) {
        if (nx < 3 || ny < 3) {
            throw ConfigError("grid needs at least 3 nodes per axis, got " + std::to_string(nx) +
                              "x" + std::to_string(ny));
        }
        if (!(domain.width() > 0.0) || !(domain.height() > 0.0) || !std::isfinite(domain.width()) ||
            !std::isfinite(domain.height())) {
            throw ConfigError("grid domain is degenerate");
        }
        hx_ = domain.width() / static_cast<double>(nx - 1);
        hy_ = domain.height() / static_cast<double>(ny - 1);
    }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return nx_ * ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double cell_area() const { return hx_ * hy_; }
    const Rect& domain() const { return domain_; }

    double x(std::size_t i) const {
        return domain_.x_min + domain_.width() * static_cast<double>(i) / static_cast<double>(nx_ - 1);
    }
    double y(std::size_t j) const {
        return domain_.y_min + domain_.height() * static_cast<double>(j) / static_cast<double>(ny_ - 1);
    }
    Point node(std::size_t i, std::size_t j) const { return {x(i), y(j)}; }

    std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }

    bool is_boundary(std::size_t i, std::size_t j) const {
        return i == 0 || j == 0 || i + 1 == nx_ || j + 1 == ny_;
    }

    /// Nearest node to p (p is clamped to the domain first).
    std::pair<std::size_t, std::size_t> nearest_node(Point p) const {
        const Point q = domain_.clamp(p);
        const auto round_index = [](double v, std::size_t n) {
            const double r = std::floor(v + 0.5);
            return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n - 1)));
        };
        return {round_index((q.x - domain_.x_min) / hx_, nx_),
                round_index((q.y - domain_.y_min) / hy_, ny_)};
    }

    friend bool operator==(const Grid2D& a, const Grid2D& b) {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.domain_.x_min == b.domain_.x_min &&
               a.domain_.x_max == b.domain_.x_max && a.domain_.y_min == b.domain_.y_min &&
               a.domain_.y_max == b.domain_.y_max;
    }

private:
    std::size_t nx_;
    std::size_t ny_;
    Rect domain_;
    double hx_ = 0.0;
    double hy_ = 0.0;
};

inline Grid2D make_grid(std::size_t nx, std::size_t ny, Rect domain = Rect::unit_square()) {
    return Grid2D(nx, ny, domain);
}

/// Scalar density sampled at the grid nodes.
class Field {
public:
    explicit Field(const Grid2D& grid, double fill = 0.0) : grid_(grid), values_(grid.size(), fill) {}

    template <class F>
    static Field from_function(const Grid2D& grid, F&& f) {
        Field out(grid);
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            for (std::size_t i = 0; i < grid.nx(); ++i) {
                out(i, j) = f(grid.x(i), grid.y(j));
            }
        }
        return out;
    }

    const Grid2D& grid() const { return grid_; }

    double& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

    void clamp_nonnegative() {
        for (double& v : values_) v = std::max(v, 0.0);
    }

    Field& operator+=(const Field& other) {
        require_same_grid(other);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
        return *this;
    }

    Field& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }

    void require_same_grid(const Field& other) const {
        if (!(grid_ == other.grid_)) throw ConfigError("field grids do not match");
    }

    friend bool operator==(const Field& a, const Field& b) {
        return a.grid_ == b.grid_ && a.values_ == b.values_;
    }

private:
    Grid2D grid_;
    std::vector<double> values_;
};

inline double max_abs_difference(const Field& a, const Field& b) {
    a.require_same_grid(b);
    double m = 0.0;
    const auto va = a.values();
    const auto vb = b.values();
    for (std::size_t k = 0; k < va.size(); ++k) m = std::max(m, std::abs(va[k] - vb[k]));
    return m;
}

struct BoundaryCondition {
    enum class Kind { Dirichlet, Neumann };

    Kind kind = Kind::Dirichlet;
    double value = 0.0;  // Dirichlet rho = value
    double c1 = 0.0;     // Neumann d(rho)/dn = c1 + c2 * rho
    double c2 = 0.0;

    static BoundaryCondition dirichlet(double value) { return {Kind::Dirichlet, value, 0.0, 0.0}; }
    static BoundaryCondition neumann(double c1, double c2) { return {Kind::Neumann, 0.0, c1, c2}; }

    bool is_dirichlet() const { return kind == Kind::Dirichlet; }
    bool is_homogeneous_dirichlet() const { return kind == Kind::Dirichlet && value == 0.0; }
};

namespace detail {

// Edge value b such that the second-order one-sided outward derivative
// (3b - 4r1 + r2) / (2h) equals c1 + c2 * b, where r1, r2 are the first two
// nodes inward from the edge.
inline double neumann_edge_value(double r1, double r2, double h, double c1, double c2) {
    const double denom = 3.0 - 2.0 * h * c2;
    if (denom == 0.0) throw ParameterError("Neumann coefficient c2 makes the boundary stencil singular");
    return (2.0 * h * c1 + 4.0 * r1 - r2) / denom;
}

}  // namespace detail

/// Overwrites the boundary nodes of `field` according to `bc`.
inline void apply_boundary(Field& field, const BoundaryCondition& bc) {
    const Grid2D& g = field.grid();
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();
    if (bc.kind == BoundaryCondition::Kind::Dirichlet) {
        for (std::size_t i = 0; i < nx; ++i) {
            field(i, 0) = bc.value;
            field(i, ny - 1) = bc.value;
        }
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            field(0, j) = bc.value;
            field(nx - 1, j) = bc.value;
        }
        return;
    }
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        field(0, j) = detail::neumann_edge_value(field(1, j), field(2, j), g.hx(), bc.c1, bc.c2);
        field(nx - 1, j) =
            detail::neumann_edge_value(field(nx - 2, j), field(nx - 3, j), g.hx(), bc.c1, bc.c2);
    }
    for (std::size_t i = 0; i < nx; ++i) {
        field(i, 0) = detail::neumann_edge_value(field(i, 1), field(i, 2), g.hy(), bc.c1, bc.c2);
        field(i, ny - 1) =
            detail::neumann_edge_value(field(i, ny - 2), field(i, ny - 3), g.hy(), bc.c1, bc.c2);
    }
}

enum class MassMode {
    InteriorSum,  // plain sum over interior nodes (the sensor-sum metric)
    Trapezoid,    // composite trapezoid integral over the whole domain
};

inline double total_mass(const Field& field, MassMode mode = MassMode::InteriorSum) {
    const Grid2D& g = field.grid();
    double sum = 0.0;
    if (mode == MassMode::InteriorSum) {
        for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
            for (std::size_t i = 1; i + 1 < g.nx(); ++i) sum += field(i, j);
        }
        return sum;
    }
    for (std::size_t j = 0; j < g.ny(); ++j) {
        const double wy = (j == 0 || j + 1 == g.ny()) ? 0.5 : 1.0;
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double wx = (i == 0 || i + 1 == g.nx()) ? 0.5 : 1.0;
            sum += wx * wy * field(i, j);
        }
    }
    return sum * g.cell_area();
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Shortest text that reads back as the same double (labels, messages).
inline std::string format_short(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Snapshot CSV: a `# t=<t> nx=<nx> ny=<ny>` header, then ny rows (row j = y_j)
/// of nx comma-separated values at 17 significant digits.
inline void write_snapshot_csv(std::ostream& out, const Field& field, double t) {
    const Grid2D& g = field.grid();
    out << "# t=" << format_double(t) << " nx=" << g.nx() << " ny=" << g.ny() << '\n';
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            if (i) out << ',';
            out << format_double(field(i, j));
        }
        out << '\n';
    }
}

inline void write_snapshot_csv(const std::string& path, const Field& field, double t) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_snapshot_csv(out, field, t);
    if (!out) throw Error("failed writing " + path);
}

}  // namespace anodiff
