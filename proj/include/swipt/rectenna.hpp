#ifndef SWIPT_RECTENNA_HPP
#define SWIPT_RECTENNA_HPP

// Single-diode rectenna with a large smoothing capacitor. The DC output
// voltage v satisfies
//
//     E[ I0(sqrt(2) B h_E X) ] = (1 + v / (i_s R_L)) exp(v / (eta V_T)),
//     B = sqrt(R_ant) / (eta V_T),
//
// and the load power is v^2 / R_L. Impedance matching is assumed perfect.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "swipt/distribution.hpp"
#include "swipt/numerics.hpp"

namespace swipt {

struct CircuitParams {
    double r_ant = 50.0;     // ohm
    double i_s = 100e-6;     // A
    double eta = 1.5;        // ideality factor
    double v_t = 25.85e-3;   // V
    double r_l = 10e3;       // ohm

    double b() const noexcept { return std::sqrt(r_ant) / (eta * v_t); }

    void validate() const {
        if (!(r_ant > 0.0 && i_s > 0.0 && eta > 0.0 && v_t > 0.0 && r_l > 0.0))
            throw DomainError("CircuitParams: all fields must be strictly positive");
    }

    /// Non-fatal remarks about unusual but legal parameter values.
    std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        if (eta < 1.0 || eta > 2.0)
            out.push_back("ideality factor eta=" + std::to_string(eta) + " outside the usual [1, 2]");
        return out;
    }
};

namespace rectenna {

/// ln E_req for a required load power; never overflows.
inline double log_e_req_from_power(const CircuitParams& c, double p_req) {
    if (!(p_req >= 0.0)) throw DomainError("e_req_from_power: p_req must be >= 0");
    const double v = std::sqrt(c.r_l * p_req);
    return std::log1p(std::sqrt(p_req) / (c.i_s * std::sqrt(c.r_l))) + v / (c.eta * c.v_t);
}

inline double e_req_from_power(const CircuitParams& c, double p_req) {
    const double log_e = log_e_req_from_power(c, p_req);
    if (log_e > std::log(std::numeric_limits<double>::max()))
        throw OverflowError("e_req_from_power: E_req overflows double, use log_e_req_from_power");
    return std::exp(log_e);
}

/// Argument of I0 for transmit amplitude x.
inline double bessel_argument(const CircuitParams& c, double h_e, double x) noexcept {
    return std::numbers::sqrt2 * c.b() * h_e * x;
}

/// ln E[I0(sqrt(2) B h_e X)].
inline double log_eh_metric(const CircuitParams& c, double h_e, const InputDistribution& dist) {
    std::vector<double> logs(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i)
        logs[i] = numerics::log_bessel_i0(bessel_argument(c, h_e, dist.amplitudes[i]));
    return numerics::log_sum_exp(logs, dist.masses);
}

inline double eh_metric(const CircuitParams& c, double h_e, const InputDistribution& dist) {
    return std::exp(log_eh_metric(c, h_e, dist));
}

/// Period average of exp(sqrt(2) B h_e x cos(theta)) by the periodic trapezoidal rule.
inline double mgf_time_average_oracle(const CircuitParams& c, double h_e, double x, int samples) {
    if (samples < 64) throw DomainError("mgf_time_average_oracle: need at least 64 samples");
    const double z = bessel_argument(c, h_e, x);
    double sum = 0.0;
    for (int k = 0; k < samples; ++k)
        sum += std::exp(z * std::cos(2.0 * std::numbers::pi * k / samples));
    return sum / samples;
}

/// DC output voltage for a given ln(EH metric). Bisection on the log of the
/// diode relation, which is strictly increasing in v.
inline double output_voltage_from_log_metric(const CircuitParams& c, double log_metric) {
    if (!(log_metric >= 0.0)) {
        if (log_metric > -1e-15) return 0.0;
        throw DomainError("harvested_power: EH metric must be >= 1");
    }
    if (log_metric == 0.0) return 0.0;
    const double nvt = c.eta * c.v_t;
    const double isrl = c.i_s * c.r_l;
    // Each factor alone bounds the root: exp(v/nvt) <= m and 1 + v/isrl <= m.
    double v_hi = nvt * log_metric;
    if (log_metric < 700.0) v_hi = std::min(v_hi, isrl * std::expm1(log_metric));
    auto f = [&](double v) { return std::log1p(v / isrl) + v / nvt - log_metric; };
    return numerics::bisect(f, 0.0, v_hi, 1e-15 * v_hi);
}

inline double harvested_power_from_log_metric(const CircuitParams& c, double log_metric) {
    const double v = output_voltage_from_log_metric(c, log_metric);
    return v * v / c.r_l;
}

inline double harvested_power(const CircuitParams& c, double eh_metric_value) {
    if (!(eh_metric_value >= 1.0)) throw DomainError("harvested_power: EH metric must be >= 1");
    return harvested_power_from_log_metric(c, std::log(eh_metric_value));
}

/// Largest E[I0(sqrt(2) B h_e X)] over |X| <= a and E[X^2] <= sigma_x2.
/// I0(sqrt(2) B h_e sqrt(w)) is convex increasing in w = x^2, so the optimum
/// splits mass between 0 and +-a with the power constraint tight.
inline double log_max_feasible_metric(const CircuitParams& c, double h_e, double a, double sigma_x2) {
    if (!(a > 0.0) || !(sigma_x2 > 0.0))
        throw DomainError("max_feasible_metric: a and sigma_x2 must be positive");
    const double log_peak = numerics::log_bessel_i0(bessel_argument(c, h_e, a));
    const double q = sigma_x2 / (a * a);
    if (q >= 1.0) return log_peak;
    // ln((1 - q) + q I0)
    const std::vector<double> v{0.0, log_peak};
    const std::vector<double> w{1.0 - q, q};
    return numerics::log_sum_exp(v, w);
}

inline double max_feasible_metric(const CircuitParams& c, double h_e, double a, double sigma_x2) {
    return std::exp(log_max_feasible_metric(c, h_e, a, sigma_x2));
}

}  // namespace rectenna

/// Required load power and the matching EH-metric threshold.
struct EhBudget {
    double p_req = 0.0;               // W
    double e_req = 1.0;
    double log_e_req = 0.0;
    std::optional<double> a_r;        // V, receiver peak-amplitude limit

    static EhBudget from_power(const CircuitParams& c, double p_req,
                               std::optional<double> a_r = std::nullopt) {
        if (a_r && !(*a_r > 0.0)) throw DomainError("EhBudget: a_r must be positive");
        EhBudget b;
        b.p_req = p_req;
        b.log_e_req = rectenna::log_e_req_from_power(c, p_req);
        b.e_req = b.log_e_req < 709.0 ? std::exp(b.log_e_req)
                                      : std::numeric_limits<double>::infinity();
        b.a_r = a_r;
        return b;
    }
};

}  // namespace swipt

#endif  // SWIPT_RECTENNA_HPP
