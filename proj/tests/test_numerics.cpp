#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "swipt/numerics.hpp"

using namespace swipt;
using namespace swipt::numerics;

namespace {

// Independent I0 reference: the power series summed in long double.
long double series_i0(long double z) {
    long double term = 1.0L, sum = 1.0L;
    const long double q = z * z / 4.0L;
    for (int m = 1; m < 400; ++m) {
        term *= q / (static_cast<long double>(m) * m);
        sum += term;
        if (term < sum * 1e-21L) break;
    }
    return sum;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST(BesselI0, KnownValues) {
    EXPECT_EQ(bessel_i0(0.0), 1.0);
    EXPECT_NEAR(bessel_i0(1.0), 1.2660658777520084, 1e-15);
    EXPECT_EQ(bessel_i0(-2.0), bessel_i0(2.0));
}

TEST(BesselI0, MatchesSeriesOnZeroToThirty) {
    for (int k = 0; k <= 300; ++k) {
        const double z = 0.1 * k;
        EXPECT_LE(rel(bessel_i0(z), static_cast<double>(series_i0(z))), 1e-12) << "z=" << z;
    }
}

TEST(BesselI0, LogMatchesValue) {
    for (int k = 0; k <= 300; ++k) {
        const double z = 0.1 * k;
        EXPECT_LE(rel(std::exp(log_bessel_i0(z)), bessel_i0(z)), 1e-12) << "z=" << z;
    }
    EXPECT_EQ(log_bessel_i0(0.0), 0.0);
    EXPECT_NEAR(log_bessel_i0(1.0), std::log(1.2660658777520084), 1e-15);
}

TEST(BesselI0, LargeArgumentAsymptotics) {
    const double z = 1000.0;
    const double leading = z - 0.5 * std::log(2.0 * std::numbers::pi * z);
    // The next correction is ln(1 + 1/(8z)) ~ 1.25e-4, so compare with it included.
    EXPECT_LE(rel(log_bessel_i0(z), leading + std::log1p(1.0 / (8.0 * z) + 9.0 / (128.0 * z * z))), 1e-9);
    EXPECT_TRUE(std::isfinite(log_bessel_i0(1e6)));
    EXPECT_THROW(bessel_i0(701.0), OverflowError);
    EXPECT_NO_THROW(bessel_i0(700.0));
}

TEST(BesselI0, BranchesAgreeAtCrossover) {
    // Series in long double against the asymptotic branch just above the switch.
    for (double z : {15.0001, 20.0, 30.0})
        EXPECT_LE(rel(bessel_i0(z), static_cast<double>(series_i0(z))), 1e-12) << "z=" << z;
}

TEST(LogSumExp, Examples) {
    const std::vector<double> half{0.5, 0.5}, ones{1.0, 1.0};
    EXPECT_NEAR(log_sum_exp(std::vector<double>{0, 0}, half), 0.0, 1e-16);
    EXPECT_NEAR(log_sum_exp(std::vector<double>{1000, 1000}, ones), 1000.0 + std::log(2.0), 1e-12);
    EXPECT_NEAR(log_sum_exp(std::vector<double>{0, std::log(3.0)}, ones), std::log(4.0), 1e-15);
}

TEST(LogSumExp, Errors) {
    EXPECT_THROW(log_sum_exp(std::vector<double>{1, 2}, std::vector<double>{0, 0}), DomainError);
    EXPECT_THROW(log_sum_exp(std::vector<double>{1}, std::vector<double>{-1}), DomainError);
    EXPECT_THROW(log_sum_exp(std::vector<double>{}, std::vector<double>{}), DomainError);
}

TEST(LogSumExp, ShiftInvariance) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> v(-50, 50), w(0, 1), shift(-500, 500);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> values(6), weights(6);
        for (int i = 0; i < 6; ++i) {
            values[i] = v(rng);
            weights[i] = w(rng);
        }
        const double c = shift(rng);
        std::vector<double> shifted = values;
        for (double& x : shifted) x += c;
        EXPECT_NEAR(log_sum_exp(shifted, weights), log_sum_exp(values, weights) + c, 1e-11);
    }
}

TEST(Bisect, Examples) {
    EXPECT_NEAR(bisect([](double x) { return x - 2.0; }, 0.0, 10.0, 1e-12), 2.0, 1e-12);
    EXPECT_NEAR(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(bisect([](double x) { return std::exp(x) - 5.0; }, 0.0, 3.0, 1e-12), std::log(5.0), 1e-12);
    EXPECT_THROW(bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), DomainError);
}

TEST(Bisect, IndependentOfBracket) {
    auto f = [](double x) { return std::tanh(x - 0.3); };
    const double a = bisect(f, -1.0, 1.0, 1e-13);
    const double b = bisect(f, -100.0, 50.0, 1e-13);
    EXPECT_NEAR(a, b, 1e-12);
}

TEST(QuadratureGrid, Invariants) {
    EXPECT_THROW(QuadratureGrid(1.0, 0.0, 5), DomainError);
    EXPECT_THROW(QuadratureGrid(0.0, 1.0, 2), DomainError);
    const QuadratureGrid g(-1.0, 3.0, 9);
    EXPECT_DOUBLE_EQ(g.step(), 0.5);
    EXPECT_EQ(g.node(8), 3.0);
    std::vector<double> lin(g.count());
    for (std::size_t k = 0; k < g.count(); ++k) lin[k] = 2.0 * g.node(k) + 1.0;
    EXPECT_NEAR(g.integrate(lin), 12.0, 1e-14);  // trapezoid is exact for affine functions
    const auto h = QuadratureGrid::with_max_step(0.0, 1.0, 0.3);
    EXPECT_LE(h.step(), 0.3);
}
