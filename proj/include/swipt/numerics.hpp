#ifndef SWIPT_NUMERICS_HPP
#define SWIPT_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swipt {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a quantity cannot be represented in double precision; the
/// caller is expected to switch to the corresponding log-domain routine.
class OverflowError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

namespace numerics {

inline constexpr double ln2 = std::numbers::ln2;
inline constexpr double log2e = std::numbers::log2e;

/// Uniform trapezoidal grid on [lower, upper] with `count` nodes.
class QuadratureGrid {
public:
    QuadratureGrid(double lower, double upper, std::size_t count)
        : lower_(lower), upper_(upper), count_(count) {
        if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
            throw DomainError("QuadratureGrid: require finite lower < upper");
        if (count < 3) throw DomainError("QuadratureGrid: need at least 3 nodes");
        step_ = (upper - lower) / static_cast<double>(count - 1);
    }

    /// Smallest grid on [lower, upper] whose spacing does not exceed max_step.
    static QuadratureGrid with_max_step(double lower, double upper, double max_step) {
        if (!(max_step > 0.0)) throw DomainError("QuadratureGrid: max_step must be positive");
        const auto intervals = static_cast<std::size_t>(std::ceil((upper - lower) / max_step));
        return {lower, upper, std::max<std::size_t>(intervals, 2) + 1};
    }

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    std::size_t count() const noexcept { return count_; }
    double step() const noexcept { return step_; }

    double node(std::size_t k) const noexcept {
        return k + 1 == count_ ? upper_ : lower_ + step_ * static_cast<double>(k);
    }

    double weight(std::size_t k) const noexcept {
        return (k == 0 || k + 1 == count_) ? 0.5 * step_ : step_;
    }

    std::vector<double> nodes() const {
        std::vector<double> out(count_);
        for (std::size_t k = 0; k < count_; ++k) out[k] = node(k);
        return out;
    }

    /// Trapezoidal integral of samples taken at the nodes.
    double integrate(std::span<const double> samples) const {
        if (samples.size() != count_) throw DomainError("QuadratureGrid: sample count mismatch");
        double sum = 0.0;
        for (std::size_t k = 0; k < count_; ++k) sum += weight(k) * samples[k];
        return sum;
    }

private:
    double lower_;
    double upper_;
    std::size_t count_;
    double step_;
};

namespace detail {

inline constexpr double bessel_series_limit = 15.0;

// Sum of (z^2/4)^m / (m!)^2; all terms positive so no cancellation.
inline double bessel_i0_series(double z) {
    const double q = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 500; ++m) {
        term *= q / (static_cast<double>(m) * static_cast<double>(m));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// 1 + 1/(8z) + 9/(128 z^2) + ... truncated at the smallest term.
inline double bessel_i0_asymptotic_factor(double z) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * odd * odd / (8.0 * k * z);
        if (next > term) break;
        term = next;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

}  // namespace detail

/// Modified Bessel function of the first kind, order zero.
/// Throws OverflowError for |z| > 700; use log_bessel_i0 there.
inline double bessel_i0(double z) {
    if (!std::isfinite(z)) throw DomainError("bessel_i0: argument must be finite");
    const double a = std::fabs(z);
    if (a > 700.0)
        throw OverflowError("bessel_i0: |z| > 700 overflows, use log_bessel_i0");
    if (a <= detail::bessel_series_limit) return detail::bessel_i0_series(a);
    return std::exp(a) / std::sqrt(2.0 * std::numbers::pi * a) *
           detail::bessel_i0_asymptotic_factor(a);
}

/// ln I0(z), finite for every finite z.
inline double log_bessel_i0(double z) {
    if (!std::isfinite(z)) throw DomainError("log_bessel_i0: argument must be finite");
    const double a = std::fabs(z);
    if (a <= detail::bessel_series_limit) return std::log(detail::bessel_i0_series(a));
    return a - 0.5 * std::log(2.0 * std::numbers::pi * a) +
           std::log(detail::bessel_i0_asymptotic_factor(a));
}

/// ln sum_i w_i exp(v_i) with the max shifted out. Zero weights are skipped.
inline double log_sum_exp(std::span<const double> values, std::span<const double> weights) {
    if (values.empty() || values.size() != weights.size())
        throw DomainError("log_sum_exp: lists must be non-empty and of equal length");
    double vmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] < 0.0 || std::isnan(weights[i]))
            throw DomainError("log_sum_exp: weights must be non-negative");
        if (weights[i] > 0.0) vmax = std::max(vmax, values[i]);
    }
    if (vmax == -std::numeric_limits<double>::infinity())
        throw DomainError("log_sum_exp: all weights are zero");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (weights[i] > 0.0) sum += weights[i] * std::exp(values[i] - vmax);
    return vmax + std::log(sum);
}

/// Root of f on [lo, hi] by bisection. f(lo) and f(hi) must differ in sign.
/// Stops once the bracket is narrower than tol or can no longer be split.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 2000) {
    if (!(tol > 0.0)) throw DomainError("bisect: tol must be positive");
    if (lo > hi) std::swap(lo, hi);
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw DomainError("bisect: no sign change on [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

/// ln of the standard normal density.
inline double log_std_normal_pdf(double u) noexcept {
    return -0.5 * u * u - 0.5 * std::log(2.0 * std::numbers::pi);
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k)
        out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

}  // namespace numerics
}  // namespace swipt

#endif  // SWIPT_NUMERICS_HPP
