#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "swipt/certificate.hpp"

using namespace swipt;

namespace {

ProblemSpec unit_spec(double a, double sigma_x2, double z_at_a, int grid) {
    ProblemSpec s;
    s.a = a;
    s.sigma_x2 = sigma_x2;
    s.grid_points = grid;
    s.channel.h_i_override = 1.0;
    s.channel.sigma_n2 = 1.0;
    s.channel.h_e_override = z_at_a / (std::numbers::sqrt2 * s.circuit.b() * a);
    return s;
}

// Rebuilds the derived fields of a solution after its masses were edited.
Solution with_distribution(Solution s, const ProblemSpec& spec, InputDistribution f) {
    s.distribution = f;
    s.achieved_ap = f.second_moment();
    s.log_achieved_metric = rectenna::log_eh_metric(spec.circuit, spec.channel.h_e(), f);
    s.achieved_metric = std::exp(s.log_achieved_metric);
    s.rate = channel::mutual_information(f, spec.channel.h_i(), spec.channel.sigma_n2);
    s.mass_points = solver::extract_mass_points(f);
    return s;
}

}  // namespace

TEST(ELim, Examples) {
    const CircuitParams c;
    EXPECT_EQ(certificate::e_lim(c, 1e-3, 0.0), 1.0);
    // z = B^2 h^2 sigma^2 = 2 gives exp(1) I0(1).
    const double h = 1.0 / c.b();
    EXPECT_NEAR(certificate::e_lim(c, h, 2.0), std::exp(1.0) * 1.2660658777520084, 1e-14);
    EXPECT_THROW(certificate::e_lim(c, 0.0, 1.0), DomainError);
}

TEST(ELim, MatchesGaussianExpectation) {
    const CircuitParams c;
    const double h = 0.7 / c.b();
    for (double s2 : {0.5, 1.0, 3.0}) {
        // E[I0(sqrt(2) B h X)], X ~ N(0, s2), by trapezoid over +-14 sigma.
        const int n = 40001;
        const double sd = std::sqrt(s2), lo = -14 * sd, step = 28 * sd / (n - 1);
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const double x = lo + k * step;
            const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
            acc += w * step * std::exp(-0.5 * x * x / s2) / std::sqrt(2 * std::numbers::pi * s2) *
                   numerics::bessel_i0(std::numbers::sqrt2 * c.b() * h * x);
        }
        EXPECT_NEAR(certificate::e_lim(c, h, s2), acc, 1e-10 * acc) << "s2=" << s2;
    }
    double prev = 0.0;
    for (double s2 : {0.1, 0.5, 1.0, 2.0, 8.0}) {
        const double v = certificate::e_lim(c, h, s2);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(KktCheck, PassesOnSolvedProblems) {
    ProblemSpec free = unit_spec(2.0, 1.0, 3.0, 41);
    const Solution s0 = solver::dual_solve(free);
    const auto r0 = certificate::kkt_check(s0, free);
    EXPECT_TRUE(r0.pass) << r0.max_violation << " " << r0.max_support_residual;
    EXPECT_NEAR(r0.recomputed_rate, s0.rate, 1e-6);

    ProblemSpec eh = free;
    const double ceiling = rectenna::max_feasible_metric(eh.circuit, eh.channel.h_e(), eh.a, eh.sigma_x2);
    eh.set_e_req(0.5 * (s0.achieved_metric + ceiling));
    const Solution s1 = solver::dual_solve(eh);
    ASSERT_GT(s1.multipliers.lambda2, 0.0);
    const auto r1 = certificate::kkt_check(s1, eh);
    EXPECT_TRUE(r1.pass) << r1.max_violation << " " << r1.max_support_residual;
}

TEST(KktCheck, FailsWhenMassLeaksOffSupport) {
    ProblemSpec s = unit_spec(1.0, 1.0, 1.0, 21);
    const Solution sol = solver::dual_solve(s);
    ASSERT_TRUE(certificate::kkt_check(sol, s).pass);
    // Move 1% of the mass to the origin, which is not a support point.
    auto f = sol.distribution;
    const std::size_t mid = f.size() / 2;
    ASSERT_LT(f.masses[mid], 1e-6);
    for (double& p : f.masses) p *= 0.99;
    f.masses[mid] += 0.01;
    const auto r = certificate::kkt_check(with_distribution(sol, s, f), s);
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.max_support_residual, 1e-3);
}

TEST(KktCheck, FailsForSingleAtomWhenBinaryIsOptimal) {
    ProblemSpec s = unit_spec(1.0, 1.0, 1.0, 21);
    Solution fake = with_distribution(Solution{}, s, InputDistribution::point_mass(0.0));
    const auto r = certificate::kkt_check(fake, s);
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.max_violation, 0.1);
    EXPECT_NEAR(std::fabs(r.worst_probe_amplitude), 1.0, 1e-12);
}

TEST(KktCheck, UnboundedMultipliersFail) {
    ProblemSpec s = unit_spec(1.0, 1.0, 1.0, 21);
    Solution sol = solver::dual_solve(s);
    sol.multipliers.lambda2 = std::numeric_limits<double>::infinity();
    const auto r = certificate::kkt_check(sol, s);
    EXPECT_FALSE(r.pass);
    EXPECT_FALSE(r.note.empty());
}

TEST(KktCheck, GaussianOptimumHasFlatPhi) {
    solver::UnboundedSpec u;
    u.sigma_x2 = 2.0;
    u.channel.h_i_override = 1.0;
    u.channel.sigma_n2 = 1.0;
    u.channel.h_e_override = 1e-3;
    const Solution g = solver::no_pp_solve(u);
    ASSERT_TRUE(g.continuous_gaussian);
    ProblemSpec probe_spec;
    probe_spec.a = 6.0;
    probe_spec.sigma_x2 = u.sigma_x2;
    probe_spec.channel = u.channel;
    probe_spec.grid_points = 61;
    const auto r = certificate::kkt_check(g, probe_spec);
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.max_support_residual, 1e-6);
}

TEST(SupportStability, LowSnrIsBinary) {
    const ProblemSpec s = unit_spec(1.0, 1.0, 1.0, 21);
    const auto levels = certificate::support_count_stability(s, 3);
    ASSERT_EQ(levels.size(), 3u);
    for (const auto& l : levels) {
        EXPECT_EQ(l.clusters, 2u) << "grid " << l.grid_points;
        EXPECT_LT(l.mass_outside, 1e-4);
    }
    EXPECT_EQ(levels[1].grid_points, 41);
    EXPECT_NEAR(levels[0].rate, levels[2].rate, 1e-6);  // both grids contain +-1
    EXPECT_THROW(certificate::support_count_stability(s, 1), DomainError);
}

TEST(SupportStability, ReferenceScenarioGridRefinement) {
    ProblemSpec s;  // reference circuit and channel, A = 13 V
    s.a = 13.0;
    s.sigma_x2 = 20.0;
    s.grid_points = 201;
    s.set_e_req(1.0);
    const auto levels = certificate::support_count_stability(s, 2);
    EXPECT_LE(std::fabs(levels[1].rate - levels[0].rate), 1e-4);
    EXPECT_EQ(levels[0].clusters, levels[1].clusters);
}
