#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "anodiff/grid.hpp"

using namespace anodiff;

TEST(Grid, SpacingFromNodeCount) {
    const Grid2D g = make_grid(31, 31);
    EXPECT_DOUBLE_EQ(g.hx(), 1.0 / 30.0);
    EXPECT_DOUBLE_EQ(g.hy(), 1.0 / 30.0);
    EXPECT_NEAR(g.hx() * 30.0, 1.0, 1e-15);
}

TEST(Grid, AppendixStepSize) {
    const Grid2D g = make_grid(21, 21);
    EXPECT_DOUBLE_EQ(g.hx(), 1.0 / 20.0);
}

TEST(Grid, RejectsTooFewNodes) {
    EXPECT_THROW(make_grid(2, 5), ConfigError);
    EXPECT_THROW(make_grid(5, 2), ConfigError);
}

TEST(Grid, RejectsDegenerateDomain) {
    EXPECT_THROW(make_grid(5, 5, Rect{0.0, 0.0, 0.0, 1.0}), ConfigError);
    EXPECT_THROW(make_grid(5, 5, Rect{0.0, 1.0, 1.0, 1.0}), ConfigError);
}

TEST(Grid, NodesAreExact) {
    const Grid2D g = make_grid(31, 31);
    EXPECT_EQ(g.x(0), 0.0);
    EXPECT_EQ(g.x(30), 1.0);
    EXPECT_EQ(g.x(15), 0.5);
    EXPECT_EQ(g.x(24), 0.8);
    EXPECT_EQ(g.y(6), 0.2);
}

TEST(Grid, NonUnitDomain) {
    const Grid2D g = make_grid(11, 21, Rect{-1.0, 1.0, 2.0, 4.0});
    EXPECT_DOUBLE_EQ(g.hx(), 0.2);
    EXPECT_DOUBLE_EQ(g.hy(), 0.1);
    EXPECT_EQ(g.x(10), 1.0);
    EXPECT_EQ(g.y(0), 2.0);
}

TEST(Grid, NearestNode) {
    const Grid2D g = make_grid(31, 31);
    const auto [i, j] = g.nearest_node({0.8, 0.2});
    EXPECT_EQ(i, 24u);
    EXPECT_EQ(j, 6u);
    const auto [a, b] = g.nearest_node({-3.0, 7.0});
    EXPECT_EQ(a, 0u);
    EXPECT_EQ(b, 30u);
}

TEST(Field, ShapeAndFill) {
    const Grid2D g = make_grid(4, 3);
    Field f(g, 2.5);
    EXPECT_EQ(f.values().size(), 12u);
    EXPECT_EQ(f(3, 2), 2.5);
    f(1, 2) = 7.0;
    EXPECT_EQ(f.values()[g.index(1, 2)], 7.0);
}

TEST(Field, GridMismatchIsAnError) {
    Field a(make_grid(4, 4));
    const Field b(make_grid(5, 5));
    EXPECT_THROW(a += b, ConfigError);
}

TEST(Boundary, DirichletSetsAllEdges) {
    const Grid2D g = make_grid(7, 5);
    Field f = Field::from_function(g, [](double x, double y) { return 1.0 + x + y; });
    apply_boundary(f, BoundaryCondition::dirichlet(0.0));
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            if (g.is_boundary(i, j)) {
                EXPECT_EQ(f(i, j), 0.0);
            }
            else EXPECT_GT(f(i, j), 0.0);
        }
    }
}

TEST(Boundary, DirichletIsIdempotent) {
    const Grid2D g = make_grid(9, 9);
    Field f = Field::from_function(g, [](double x, double y) { return std::sin(7 * x) * std::cos(3 * y); });
    apply_boundary(f, BoundaryCondition::dirichlet(1.25));
    const Field once = f;
    apply_boundary(f, BoundaryCondition::dirichlet(1.25));
    EXPECT_EQ(f, once);
}

TEST(Boundary, NeumannKeepsConstantField) {
    const Grid2D g = make_grid(11, 11);
    Field f(g, 5.0);
    apply_boundary(f, BoundaryCondition::neumann(0.0, 0.0));
    EXPECT_EQ(f, Field(g, 5.0));
}

TEST(Boundary, NeumannZeroesOneSidedDerivativeOfLinearField) {
    const Grid2D g = make_grid(21, 21);
    Field f = Field::from_function(g, [](double x, double) { return x; });
    apply_boundary(f, BoundaryCondition::neumann(0.0, 0.0));
    const double h = g.hx();
    for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
        const double left = (3.0 * f(0, j) - 4.0 * f(1, j) + f(2, j)) / (2.0 * h);
        const double right = (3.0 * f(20, j) - 4.0 * f(19, j) + f(18, j)) / (2.0 * h);
        EXPECT_NEAR(left, 0.0, 1e-12);
        EXPECT_NEAR(right, 0.0, 1e-12);
    }
}

TEST(Boundary, NeumannRobinCoefficients) {
    const Grid2D g = make_grid(11, 11);
    Field f = Field::from_function(g, [](double x, double y) { return 1.0 + x * y; });
    const auto bc = BoundaryCondition::neumann(0.3, -0.7);
    apply_boundary(f, bc);
    const double h = g.hx();
    for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
        const double b = f(0, j);
        EXPECT_NEAR((3.0 * b - 4.0 * f(1, j) + f(2, j)) / (2.0 * h), 0.3 - 0.7 * b, 1e-12);
    }
}

TEST(Mass, ZeroField) { EXPECT_EQ(total_mass(Field(make_grid(31, 31))), 0.0); }

TEST(Mass, InteriorSumCountsInteriorNodes) {
    EXPECT_EQ(total_mass(Field(make_grid(31, 31), 1.0), MassMode::InteriorSum), 841.0);
}

TEST(Mass, TrapezoidExactForConstants) {
    EXPECT_NEAR(total_mass(Field(make_grid(31, 31), 1.0), MassMode::Trapezoid), 1.0, 1e-12);
    EXPECT_NEAR(total_mass(Field(make_grid(7, 13, Rect{0, 2, 0, 3}), 1.0), MassMode::Trapezoid), 6.0, 1e-12);
}

TEST(Mass, Linearity) {
    const Grid2D g = make_grid(17, 17);
    const Field a = Field::from_function(g, [](double x, double y) { return std::exp(x) * y; });
    const Field b = Field::from_function(g, [](double x, double y) { return std::cos(5 * x + y); });
    Field c = a;
    c *= 3.0;
    Field d = b;
    d *= -2.0;
    c += d;
    for (const auto mode : {MassMode::InteriorSum, MassMode::Trapezoid}) {
        const double lhs = total_mass(c, mode);
        const double rhs = 3.0 * total_mass(a, mode) - 2.0 * total_mass(b, mode);
        EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST(Snapshot, CsvFormat) {
    const Grid2D g = make_grid(3, 4);
    const Field f = Field::from_function(g, [](double x, double y) { return x + 10 * y; });
    std::ostringstream out;
    write_snapshot_csv(out, f, 1.5);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "# t=1.5 nx=3 ny=4");
    int rows = 0;
    std::string first_row;
    while (std::getline(in, line)) {
        if (rows == 0) first_row = line;
        ++rows;
    }
    EXPECT_EQ(rows, 4);
    EXPECT_EQ(first_row, "0,0.5,1");
}

TEST(Snapshot, SeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_short(0.1), "0.1");
}
