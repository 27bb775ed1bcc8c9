#ifndef SWIPT_VERIFY_HPP
#define SWIPT_VERIFY_HPP

// Built-in oracle suite: each check compares a library routine with an
// independent evaluation of the same quantity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "swipt/certificate.hpp"
#include "swipt/channel.hpp"
#include "swipt/numerics.hpp"
#include "swipt/rectenna.hpp"

namespace swipt::verify {

struct Options {
    bool tight = false;              // every tolerance divided by 10
    double bessel_fault = 0.0;       // relative error injected into I0 (test hook)
};

struct OracleResult {
    std::string name;
    double error = 0.0;
    double tol = 0.0;
    bool pass = false;
};

namespace detail {

inline OracleResult judge(std::string name, double error, double tol) {
    return {std::move(name), error, tol, error <= tol};
}

}  // namespace detail

/// I0 from the library against the carrier-period average of the MGF.
inline OracleResult bessel_period_average(const Options& opt) {
    const CircuitParams c;
    const ChannelParams ch;
    const double h_e = ch.h_e();
    double worst = 0.0;
    for (double x : numerics::linspace(-13.0, 13.0, 50)) {
        const double lib = numerics::bessel_i0(rectenna::bessel_argument(c, h_e, x)) * (1.0 + opt.bessel_fault);
        const double avg = rectenna::mgf_time_average_oracle(c, h_e, x, 8192);
        worst = std::max(worst, std::fabs(lib - avg) / avg);
    }
    // Larger arguments exercise both Bessel branches.
    for (double z : numerics::linspace(0.0, 40.0, 41)) {
        const double lib = numerics::bessel_i0(z) * (1.0 + opt.bessel_fault);
        double avg = 0.0;
        for (int k = 0; k < 8192; ++k) avg += std::exp(z * std::cos(2.0 * std::numbers::pi * k / 8192));
        avg /= 8192;
        worst = std::max(worst, std::fabs(lib - avg) / avg);
    }
    return detail::judge("bessel_period_average", worst, opt.tight ? 1e-9 : 1e-8);
}

/// p -> E_req -> p through the diode relation.
inline OracleResult eh_round_trip(const Options& opt) {
    const CircuitParams c;
    double worst = 0.0;
    for (double uw : {0.0, 0.1, 1.0, 3.0, 10.0, 100.0, 1000.0}) {
        const double p = uw * 1e-6;
        const double back = rectenna::harvested_power_from_log_metric(c, rectenna::log_e_req_from_power(c, p));
        worst = std::max(worst, p == 0.0 ? back : std::fabs(back - p) / p);
    }
    return detail::judge("eh_round_trip", worst, opt.tight ? 1e-11 : 1e-10);
}

/// Closed-form E_lim against trapezoidal quadrature of E[I0] under N(0, sigma_x2).
inline OracleResult e_lim_quadrature(const Options& opt) {
    const CircuitParams c;
    double worst = 0.0;
    const double k = std::numbers::sqrt2 * c.b();
    for (double h_e : {ChannelParams{}.h_e(), 1e-3, 3e-3})
        for (double s2 : {0.5, 5.0, 20.0, 80.0}) {
            const double sd = std::sqrt(s2);
            // Integrand exp(ln I0(k h x) - x^2 / 2 s2) peaks near k h s2, well inside +-(kh s2 + 14 sd).
            const double reach = k * h_e * s2 + 14.0 * sd;
            const numerics::QuadratureGrid g(-reach, reach, 40001);
            std::vector<double> f(g.count());
            for (std::size_t i = 0; i < g.count(); ++i) {
                const double x = g.node(i);
                f[i] = std::exp(numerics::log_bessel_i0(k * h_e * x) - 0.5 * x * x / s2) /
                       std::sqrt(2.0 * std::numbers::pi * s2);
            }
            const double quad = g.integrate(f);
            const double closed = certificate::e_lim(c, h_e, s2);
            worst = std::max(worst, std::fabs(quad - closed) / closed);
        }
    return detail::judge("e_lim_quadrature", worst, opt.tight ? 1e-9 : 1e-8);
}

/// The certificate applied to the Gaussian optimum without a peak limit must
/// vanish identically at the closed-form lambda1.
inline OracleResult gaussian_certificate(const Options& opt) {
    ProblemSpec spec;
    spec.channel.h_i_override = 1.0;
    spec.channel.sigma_n2 = 1.0;
    spec.sigma_x2 = 1.0;
    spec.a = 3.0;
    solver::UnboundedSpec u;
    u.sigma_x2 = spec.sigma_x2;
    u.channel = spec.channel;
    const Solution sol = solver::no_pp_solve(u);
    const auto report = certificate::kkt_check(sol, spec, numerics::linspace(-3.0, 3.0, 61));
    return detail::judge("gaussian_certificate", report.max_support_residual, opt.tight ? 1e-7 : 1e-6);
}

inline std::vector<OracleResult> run_all(const Options& opt = {}) {
    return {bessel_period_average(opt), eh_round_trip(opt), e_lim_quadrature(opt), gaussian_certificate(opt)};
}

}  // namespace swipt::verify

#endif  // SWIPT_VERIFY_HPP
