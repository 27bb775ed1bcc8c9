#ifndef SWIPT_CERTIFICATE_HPP
#define SWIPT_CERTIFICATE_HPP

// Independent optimality check for a candidate solution. For an optimal F0
// with rate C and multipliers (lambda1, lambda2),
//
//     Phi(x) = C - i(x; F0) + lambda1 (x^2 - sigma_x2) - lambda2 (I0(.) / E_req - 1)
//
// is >= 0 on [-A, A] and vanishes on the support of F0. The output density
// and i(x; F0) are rebuilt here on a finer quadrature than the solver uses;
// nothing from the solver's kernel is reused.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "swipt/channel.hpp"
#include "swipt/numerics.hpp"
#include "swipt/rectenna.hpp"
#include "swipt/solver.hpp"

namespace swipt {

struct KktReport {
    double max_violation = 0.0;           // bits, max(0, -min Phi) over the probe grid
    double max_support_residual = 0.0;    // bits, max |Phi| over mass points
    double worst_probe_amplitude = 0.0;   // V, argmin of Phi
    std::pair<double, double> slackness;  // lambda1 g1 and lambda2 g2, in bits
    double recomputed_rate = 0.0;         // bits, on the certificate quadrature
    double tol = 1e-3;
    double slack_tol = 1e-6;
    bool pass = false;
    std::string note;
};

namespace certificate {

inline constexpr double probe_step = 0.01;      // normalized output units
inline constexpr double probe_coverage = 12.0;  // standard deviations
inline constexpr double default_tol = 1e-3;     // bits

/// E_lim = exp(z/2) I0(z/2), z = B^2 h_e^2 sigma_x2.
inline double e_lim(const CircuitParams& c, double h_e, double sigma_x2) {
    if (!(h_e > 0.0) || !(sigma_x2 >= 0.0)) throw DomainError("e_lim: arguments must be positive");
    return std::exp(solver::log_e_lim(c, h_e, sigma_x2));
}

/// Uniform probe grid on [-a, a] that is `density` times finer than the solve grid.
inline std::vector<double> probe_grid(const ProblemSpec& spec, int density = 4) {
    const auto n = static_cast<std::size_t>(density) * static_cast<std::size_t>(spec.grid_points - 1) + 1;
    return numerics::linspace(-spec.a, spec.a, n);
}

namespace detail {

inline void finalize(KktReport& r) {
    r.pass = r.max_violation <= r.tol && r.max_support_residual <= r.tol &&
             std::fabs(r.slackness.first) <= r.slack_tol &&
             std::fabs(r.slackness.second) <= r.slack_tol;
}

}  // namespace detail

/// Checks the optimality conditions for `sol` on the amplitudes in `probe`.
inline KktReport kkt_check(const Solution& sol, const ProblemSpec& spec,
                           const std::vector<double>& probe, double tol = default_tol) {
    if (probe.size() < 2) throw DomainError("kkt_check: probe grid needs at least two points");
    KktReport r;
    r.tol = tol;
    const double h_i = spec.channel.h_i();
    const double h_e = spec.channel.h_e();
    const double sn2 = spec.channel.sigma_n2;
    const double l1 = sol.multipliers.lambda1;
    const double l2 = sol.multipliers.lambda2;

    if (!std::isfinite(l1) || !std::isfinite(l2)) {
        r.note = "multipliers unbounded: E_req sits at the feasibility ceiling";
        r.max_violation = std::numeric_limits<double>::infinity();
        return r;
    }

    const double ap_slack = sol.achieved_ap - spec.sigma_x2;
    const double eh_slack = 1.0 - std::exp(sol.log_achieved_metric - spec.log_e_req);
    r.slackness = {l1 * ap_slack, l2 * eh_slack};

    auto penalty = [&](double x) {
        double p = l1 * (x * x - spec.sigma_x2);
        if (l2 != 0.0) {
            const double rel = std::exp(numerics::log_bessel_i0(rectenna::bessel_argument(spec.circuit, h_e, x)) -
                                        spec.log_e_req);
            p -= l2 * (rel - 1.0);
        }
        return p;
    };

    if (sol.continuous_gaussian) {
        // Every point is a point of increase, so Phi must vanish everywhere.
        double lo = 0.0, hi = 0.0;
        for (double x : probe) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double span = std::sqrt(1.0 + spec.sigma_x2 * h_i * h_i / sn2);
        const double m = std::max(std::fabs(lo), std::fabs(hi)) * h_i / std::sqrt(sn2);
        const auto grid = numerics::QuadratureGrid::with_max_step(-(m + probe_coverage * span),
                                                                  m + probe_coverage * span, probe_step);
        const auto dens = channel::gaussian_output_log_density(spec.sigma_x2, h_i, sn2, grid);
        r.recomputed_rate = channel::shannon_capacity(spec.sigma_x2, h_i, sn2);
        double worst = std::numeric_limits<double>::infinity();
        for (double x : probe) {
            const double phi = r.recomputed_rate - channel::marginal_information_density(x, dens, h_i, sn2) +
                               penalty(x);
            if (phi < worst) {
                worst = phi;
                r.worst_probe_amplitude = x;
            }
            r.max_support_residual = std::max(r.max_support_residual, std::fabs(phi));
        }
        r.max_violation = std::max(0.0, -worst);
        detail::finalize(r);
        return r;
    }

    const auto& dist = sol.distribution;
    std::vector<double> span_amps = probe;
    span_amps.insert(span_amps.end(), dist.amplitudes.begin(), dist.amplitudes.end());
    const auto grid = channel::output_grid(span_amps, h_i, sn2, probe_step, probe_coverage);
    const auto dens = channel::output_log_density(dist, h_i, sn2, grid);
    r.recomputed_rate = channel::mutual_information(dist, dens, h_i, sn2);

    auto phi = [&](double x) {
        return r.recomputed_rate - channel::marginal_information_density(x, dens, h_i, sn2) + penalty(x);
    };

    double worst = std::numeric_limits<double>::infinity();
    for (double x : probe) {
        const double v = phi(x);
        if (v < worst) {
            worst = v;
            r.worst_probe_amplitude = x;
        }
    }
    r.max_violation = std::max(0.0, -worst);
    for (const auto& mp : solver::extract_mass_points(dist))
        r.max_support_residual = std::max(r.max_support_residual, std::fabs(phi(mp.amplitude)));
    detail::finalize(r);
    return r;
}

inline KktReport kkt_check(const Solution& sol, const ProblemSpec& spec, double tol = default_tol) {
    return kkt_check(sol, spec, probe_grid(spec), tol);
}

/// One level of a grid-refinement study.
struct SupportLevel {
    int grid_points = 0;
    std::size_t clusters = 0;
    double mass_outside = 0.0;  // probability not assigned to any cluster
    double rate = 0.0;
};

/// Solves `spec` at grid_points, 2 grid_points - 1, 4 grid_points - 3, ...
/// (each grid contains the previous one) and records the cluster structure.
inline std::vector<SupportLevel> support_count_stability(const ProblemSpec& spec, int refinements,
                                                         const Tolerances& tol = {}) {
    if (refinements < 2) throw DomainError("support_count_stability: need at least two levels");
    std::vector<SupportLevel> out;
    ProblemSpec level = spec;
    for (int k = 0; k < refinements; ++k) {
        const Solution s = solver::dual_solve(level, tol);
        SupportLevel l;
        l.grid_points = level.grid_points;
        l.clusters = s.mass_points.size();
        double inside = 0.0;
        for (const auto& mp : s.mass_points) inside += mp.probability;
        l.mass_outside = std::max(0.0, 1.0 - inside);
        l.rate = s.rate;
        out.push_back(l);
        level.grid_points = 2 * level.grid_points - 1;
    }
    return out;
}

/// Count-only view of support_count_stability.
inline std::vector<std::size_t> cluster_counts(const std::vector<SupportLevel>& levels) {
    std::vector<std::size_t> out;
    for (const auto& l : levels) out.push_back(l.clusters);
    return out;
}

}  // namespace certificate
}  // namespace swipt

#endif  // SWIPT_CERTIFICATE_HPP
