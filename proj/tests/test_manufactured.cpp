#include <gtest/gtest.h>

#include <cmath>

#include "anodiff/manufactured.hpp"
#include "anodiff/operators.hpp"

using namespace anodiff;
namespace mf = anodiff::manufactured;

TEST(ExactSolution, Values) {
    EXPECT_DOUBLE_EQ(mf::exact_solution(0.5, 0.5, 1.0), 0.0625);
    EXPECT_DOUBLE_EQ(mf::exact_solution(0.5, 0.5, 0.5), 0.015625);
    EXPECT_DOUBLE_EQ(mf::exact_solution(0.25, 0.5, 1.0), 0.046875);
    EXPECT_DOUBLE_EQ(mf::exact_solution(0.25, 0.25, 1.0), 0.03515625);
    EXPECT_EQ(mf::exact_solution(0.0, 0.3, 0.7), 0.0);
    EXPECT_EQ(mf::exact_solution(0.4, 0.3, 0.0), 0.0);
}

TEST(ForcingTfde, HighPrecisionOracle) {
    EXPECT_NEAR(mf::forcing_tfde(0.7, 0.5, 0.5, 0.5), 0.0460118340235350561, 1e-15);
}

TEST(ForcingTfde, IntegerOrderIsClassicalHeatForcing) {
    // alpha = 1: u_t - k lap u = 2t sx sy + 2k t^2 (sx + sy)
    const double x = 0.3;
    const double y = 0.8;
    const double t = 0.6;
    const double sx = x - x * x;
    const double sy = y - y * y;
    EXPECT_NEAR(mf::forcing_tfde(1.0, x, y, t), 2 * t * sx * sy + 2 * 0.01 * t * t * (sx + sy), 1e-15);
}

TEST(ForcingTfde, ZeroAtInitialTime) { EXPECT_EQ(mf::forcing_tfde(0.6, 0.2, 0.9, 0.0), 0.0); }

TEST(ForcingSfde, HighPrecisionOracles) {
    EXPECT_NEAR(mf::forcing_sfde(1.5, 0.5, 0.5, 1.0), 0.130641895835477563, 1e-14);
    EXPECT_NEAR(mf::forcing_sfde(1.7, 0.3, 0.6, 0.7), 0.0735495910731195231, 1e-14);
}

TEST(ForcingSfde, DiffusionArgumentScalesSpatialTerm) {
    EXPECT_NEAR(mf::forcing_sfde(1.5, 0.5, 0.5, 1.0, 0.02), 0.136283791670955126, 1e-14);
}

TEST(ForcingSfde, SymmetricInXAndY) {
    EXPECT_NEAR(mf::forcing_sfde(1.3, 0.2, 0.7, 0.5), mf::forcing_sfde(1.3, 0.7, 0.2, 0.5), 1e-15);
    EXPECT_NEAR(mf::forcing_sfde(1.3, 0.2, 0.7, 0.5), mf::forcing_sfde(1.3, 0.8, 0.3, 0.5), 1e-14);
}

TEST(ForcingSfde, BoundaryIsSingular) {
    EXPECT_THROW(mf::forcing_sfde(1.5, 0.0, 0.5, 1.0), SingularityError);
    EXPECT_THROW(mf::forcing_sfde(1.5, 0.5, 1.0, 1.0), SingularityError);
}

TEST(RieszOfParabola, Oracle) {
    EXPECT_NEAR(mf::riesz_of_parabola(1.7, 0.3), -1.31857987135354425, 1e-13);
}

TEST(RieszOfParabola, OrderTwoIsSecondDerivative) {
    for (const double x : {0.1, 0.37, 0.5, 0.92}) EXPECT_NEAR(mf::riesz_of_parabola(2.0, x), -2.0, 1e-12);
}

TEST(Bump, SecondDerivativeMatchesFiniteDifference) {
    const double h = 1e-4;
    for (const double x : {0.15, 0.5, 0.77}) {
        const double fd = (mf::bump(x - h) - 2 * mf::bump(x) + mf::bump(x + h)) / (h * h);
        EXPECT_NEAR(mf::bump_second_derivative(x), fd, 1e-6);
    }
}

TEST(Bump, RieszAtOrderTwoIsSecondDerivative) {
    for (const double x : {0.05, 0.3, 0.5, 0.81}) {
        EXPECT_NEAR(mf::riesz_of_bump(2.0, x), mf::bump_second_derivative(x), 1e-12);
    }
}

TEST(Bump, RieszMatchesFineGridOperator) {
    const double beta = 1.5;
    const std::size_t n = 800;
    const Grid2D g = make_grid(n + 1, 3);
    const Field f = Field::from_function(g, [](double x, double) { return mf::bump(x); });
    const Field r = riesz_apply(f, beta, Axis::X);
    for (const std::size_t i : {100u, 400u, 650u}) {
        EXPECT_NEAR(r(i, 1), mf::riesz_of_bump(beta, g.x(i)), 1e-4);
    }
}

TEST(SteadyForcing, TfdeCancelsLaplacian) {
    const double x = 0.3;
    const double y = 0.6;
    const double lap = mf::bump_second_derivative(x) * mf::bump(y) + mf::bump(x) * mf::bump_second_derivative(y);
    EXPECT_NEAR(mf::steady_bump_forcing_tfde(x, y) + 0.01 * lap, 0.0, 1e-18);
}

TEST(SteadyForcing, SfdeMatchesTfdeAtOrderTwo) {
    EXPECT_NEAR(mf::steady_bump_forcing_sfde(2.0, 0.2, 0.45), mf::steady_bump_forcing_tfde(0.2, 0.45), 1e-15);
}
