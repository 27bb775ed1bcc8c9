#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "swipt/rectenna.hpp"

using namespace swipt;

namespace {

const CircuitParams circuit{};  // reference values: 50 ohm, 100 uA, 1.5, 25.85 mV, 10 kohm

long double series_i0(long double z) {
    long double term = 1.0L, sum = 1.0L;
    for (int m = 1; m < 400; ++m) {
        term *= z * z / 4.0L / (static_cast<long double>(m) * m);
        sum += term;
        if (term < sum * 1e-21L) break;
    }
    return sum;
}

// Direct plug-in of the diode relation, written out from the circuit values.
long double e_req_direct(long double p) {
    const long double i_s = 100e-6L, r_l = 10e3L, eta = 1.5L, v_t = 25.85e-3L;
    const long double v = std::sqrt(r_l * p);
    return (1.0L + std::sqrt(p) / (i_s * std::sqrt(r_l))) * std::exp(v / (eta * v_t));
}

// Gain that makes the I0 argument equal to `z` at amplitude x.
double gain_for(double z, double x) { return z / (std::numbers::sqrt2 * circuit.b() * x); }

}  // namespace

TEST(CircuitParams, DerivedConstantAndChecks) {
    EXPECT_NEAR(circuit.b(), std::sqrt(50.0) / (1.5 * 25.85e-3), 1e-12);
    CircuitParams bad = circuit;
    bad.r_l = 0.0;
    EXPECT_THROW(bad.validate(), DomainError);
    CircuitParams odd = circuit;
    odd.eta = 2.5;
    EXPECT_NO_THROW(odd.validate());
    EXPECT_EQ(odd.warnings().size(), 1u);
    EXPECT_TRUE(circuit.warnings().empty());
}

TEST(EReq, ZeroPowerIsOne) { EXPECT_EQ(rectenna::e_req_from_power(circuit, 0.0), 1.0); }

TEST(EReq, ThreeMicrowattPlugIn) {
    const double e = rectenna::e_req_from_power(circuit, 3e-6);
    EXPECT_NEAR(e, static_cast<double>(e_req_direct(3e-6L)), 1e-12 * e);
    EXPECT_NEAR(e, 102.17, 0.01);
}

TEST(EReq, MonotoneAndLogForm) {
    EXPECT_LT(rectenna::e_req_from_power(circuit, 2e-6), rectenna::e_req_from_power(circuit, 3e-6));
    EXPECT_THROW(rectenna::e_req_from_power(circuit, -1.0), DomainError);
    // 1 W needs v = 100 V, far beyond double range for E_req itself.
    EXPECT_THROW(rectenna::e_req_from_power(circuit, 1.0), OverflowError);
    EXPECT_TRUE(std::isfinite(rectenna::log_e_req_from_power(circuit, 1.0)));
}

TEST(HarvestedPower, RoundTrip) {
    EXPECT_EQ(rectenna::harvested_power(circuit, 1.0), 0.0);
    for (double uw : {0.1, 1.0, 3.0, 10.0, 100.0, 1000.0}) {
        const double p = uw * 1e-6;
        EXPECT_NEAR(rectenna::harvested_power(circuit, rectenna::e_req_from_power(circuit, p)), p, 1e-12 * p);
    }
    // And in the other direction over the metric.
    for (double m : {1.0001, 1.5, 102.0, 1e5}) {
        const double p = rectenna::harvested_power(circuit, m);
        EXPECT_NEAR(rectenna::e_req_from_power(circuit, p), m, 1e-10 * m);
    }
    EXPECT_LT(rectenna::harvested_power(circuit, 102.0), rectenna::harvested_power(circuit, 103.0));
    EXPECT_THROW(rectenna::harvested_power(circuit, 0.5), DomainError);
}

TEST(EhMetric, Examples) {
    const double h = gain_for(2.0, 1.0);
    const double i0 = static_cast<double>(series_i0(2.0L));
    EXPECT_EQ(rectenna::eh_metric(circuit, h, InputDistribution::point_mass(0.0)), 1.0);
    EXPECT_NEAR(rectenna::eh_metric(circuit, h, InputDistribution({-1.0, 1.0}, {0.5, 0.5})), i0, 1e-13 * i0);
    EXPECT_NEAR(rectenna::eh_metric(circuit, h, InputDistribution({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25})),
                0.5 * (1.0 + i0), 1e-13 * i0);
}

TEST(EhMetric, LinearInMassesAndAtLeastOne) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::vector<double> amps{-3.0, -1.0, 0.0, 0.5, 2.0, 3.0};
    const double h = gain_for(4.0, 3.0);
    auto random_dist = [&] {
        std::vector<double> p(amps.size());
        double s = 0;
        for (double& x : p) s += (x = u(rng));
        for (double& x : p) x /= s;
        return InputDistribution(amps, p);
    };
    for (int t = 0; t < 100; ++t) {
        const auto f1 = random_dist(), f2 = random_dist();
        const double a = u(rng);
        std::vector<double> mix(amps.size());
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * f1.masses[i] + (1 - a) * f2.masses[i];
        double s = 0;
        for (double x : mix) s += x;
        for (double& x : mix) x /= s;
        const double lhs = rectenna::eh_metric(circuit, h, InputDistribution(amps, mix));
        const double rhs = a * rectenna::eh_metric(circuit, h, f1) + (1 - a) * rectenna::eh_metric(circuit, h, f2);
        EXPECT_NEAR(lhs, rhs, 1e-13 * rhs);
        EXPECT_GE(rectenna::eh_metric(circuit, h, f1), 1.0);
    }
}

TEST(MgfOracle, PeriodAverage) {
    const double h = gain_for(1.0, 1.0);
    EXPECT_NEAR(rectenna::mgf_time_average_oracle(circuit, h, 1.0, 4096), 1.2660658777520084, 1e-10);
    EXPECT_EQ(rectenna::mgf_time_average_oracle(circuit, h, 0.0, 64), 1.0);
    EXPECT_NEAR(rectenna::mgf_time_average_oracle(circuit, h, -0.7, 256),
                rectenna::mgf_time_average_oracle(circuit, h, 0.7, 256), 1e-14);
    EXPECT_THROW(rectenna::mgf_time_average_oracle(circuit, h, 1.0, 32), DomainError);
}

TEST(MaxFeasibleMetric, ClosedFormCases) {
    const double a = 2.0, h = gain_for(3.0, a);
    const double peak = static_cast<double>(series_i0(3.0L));
    EXPECT_NEAR(rectenna::max_feasible_metric(circuit, h, a, 5.0), peak, 1e-12 * peak);
    EXPECT_NEAR(rectenna::max_feasible_metric(circuit, h, a, a * a / 2), 0.5 * (1 + peak), 1e-12 * peak);
    EXPECT_NEAR(rectenna::max_feasible_metric(circuit, 1e-12, a, 1.0), 1.0, 1e-15);
}

TEST(MaxFeasibleMetric, BruteForceOverTwoLevelMixtures) {
    // Any optimum can be taken on two power levels w1 <= s2 <= w2 (the metric
    // is a function of w = x^2 and the constraint is linear in w).
    const double a = 2.0, s2 = a * a / 2, h = gain_for(3.0, a);
    auto g = [&](double w) { return std::exp(numerics::log_bessel_i0(std::numbers::sqrt2 * circuit.b() * h * std::sqrt(w))); };
    double best = g(s2);
    const int n = 400;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const double w1 = s2 * i / n, w2 = s2 + (a * a - s2) * j / n;
            if (w2 <= w1) continue;
            const double q = (s2 - w1) / (w2 - w1);
            best = std::max(best, (1 - q) * g(w1) + q * g(w2));
        }
    EXPECT_NEAR(rectenna::max_feasible_metric(circuit, h, a, s2), best, 1e-12 * best);
}

TEST(EhBudget, FromPower) {
    const auto b0 = EhBudget::from_power(circuit, 0.0);
    EXPECT_EQ(b0.e_req, 1.0);
    EXPECT_EQ(b0.log_e_req, 0.0);
    const auto b = EhBudget::from_power(circuit, 3e-6, 5.0);
    EXPECT_NEAR(b.e_req, rectenna::e_req_from_power(circuit, 3e-6), 1e-12);
    EXPECT_THROW(EhBudget::from_power(circuit, 1e-6, -1.0), DomainError);
}
