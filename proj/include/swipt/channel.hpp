#ifndef SWIPT_CHANNEL_HPP
#define SWIPT_CHANNEL_HPP

// Real AWGN information channel Y = h_I X + N, N ~ N(0, sigma_n^2).
//
// Information quantities are computed on the normalized output u = y / sigma_n
// with conditional means mu = x h_I / sigma_n. Raw gains are ~1e-6 and the
// noise power ~1e-11 W, so working in raw units would lose most of the
// dynamic range. Mutual information only depends on these ratios.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "swipt/distribution.hpp"
#include "swipt/numerics.hpp"

namespace swipt {

inline constexpr double speed_of_light = 299792458.0;  // m/s

enum class Receiver { Information, Energy };

struct ChannelParams {
    double f_c = 2.45e9;       // Hz
    double alpha = 2.5;        // path-loss exponent
    double d_i = 500.0;        // m
    double d_e = 70.0;         // m
    double sigma_n2 = 1e-11;   // W (-80 dBm)
    std::optional<double> h_i_override;
    std::optional<double> h_e_override;

    void validate() const {
        if (!(sigma_n2 > 0.0)) throw DomainError("ChannelParams: sigma_n2 must be positive");
        if (!(alpha > 0.0)) throw DomainError("ChannelParams: alpha must be positive");
        if (!(d_i > 0.0 && d_e > 0.0 && f_c > 0.0))
            throw DomainError("ChannelParams: distances and carrier must be positive");
        if (h_i_override && !(*h_i_override > 0.0)) throw DomainError("ChannelParams: h_i must be positive");
        if (h_e_override && !(*h_e_override > 0.0)) throw DomainError("ChannelParams: h_e must be positive");
    }

    double h_i() const;
    double h_e() const;
};

namespace channel {

/// Amplitude gain h_r with h_r^2 = (c / (4 pi d_r f_c))^alpha.
inline double path_loss_gain(const ChannelParams& params, Receiver which) {
    const double d = which == Receiver::Information ? params.d_i : params.d_e;
    const double ratio = speed_of_light / (4.0 * std::numbers::pi * d * params.f_c);
    return std::pow(ratio, 0.5 * params.alpha);
}

inline double shannon_capacity(double sigma_x2, double h_i, double sigma_n2) {
    if (sigma_x2 < 0.0 || !(sigma_n2 > 0.0)) throw DomainError("shannon_capacity: invalid arguments");
    return 0.5 * std::log2(1.0 + sigma_x2 * h_i * h_i / sigma_n2);
}

inline double normalized_mean(double x, double h_i, double sigma_n2) {
    return x * h_i / std::sqrt(sigma_n2);
}

/// Output density ln p(u; F) sampled on a normalized-output grid.
struct OutputDensity {
    numerics::QuadratureGrid grid;
    std::vector<double> log_density;

    double normalization() const {
        std::vector<double> p(log_density.size());
        std::transform(log_density.begin(), log_density.end(), p.begin(),
                       [](double l) { return std::exp(l); });
        return grid.integrate(p);
    }
};

inline constexpr double default_coverage = 10.0;  // standard deviations
inline constexpr double default_step = 0.02;      // normalized units
inline constexpr double minimum_coverage = 8.0;

/// Grid spanning [mu_min - coverage, mu_max + coverage] for the given amplitudes.
inline numerics::QuadratureGrid output_grid(std::span<const double> amplitudes, double h_i,
                                            double sigma_n2, double step = default_step,
                                            double coverage = default_coverage) {
    double lo = 0.0, hi = 0.0;
    for (double x : amplitudes) {
        const double mu = normalized_mean(x, h_i, sigma_n2);
        lo = std::min(lo, mu);
        hi = std::max(hi, mu);
    }
    return numerics::QuadratureGrid::with_max_step(lo - coverage, hi + coverage, step);
}

/// ln p(u; F) = ln sum_i p_i phi(u - mu_i) at every grid node.
inline OutputDensity output_log_density(const InputDistribution& dist, double h_i, double sigma_n2,
                                        const numerics::QuadratureGrid& grid) {
    std::vector<double> mu(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        mu[i] = normalized_mean(dist.amplitudes[i], h_i, sigma_n2);
        if (dist.masses[i] > 0.0 &&
            (mu[i] - minimum_coverage < grid.lower() || mu[i] + minimum_coverage > grid.upper()))
            throw DomainError("output_log_density: grid does not cover the support");
    }
    OutputDensity out{grid, std::vector<double>(grid.count())};
    std::vector<double> comp(dist.size());
    for (std::size_t k = 0; k < grid.count(); ++k) {
        const double u = grid.node(k);
        for (std::size_t i = 0; i < dist.size(); ++i) comp[i] = numerics::log_std_normal_pdf(u - mu[i]);
        out.log_density[k] = numerics::log_sum_exp(comp, dist.masses);
    }
    return out;
}

/// Output density of a zero-mean Gaussian input with power sigma_x2.
inline OutputDensity gaussian_output_log_density(double sigma_x2, double h_i, double sigma_n2,
                                                 const numerics::QuadratureGrid& grid) {
    const double var = 1.0 + sigma_x2 * h_i * h_i / sigma_n2;
    OutputDensity out{grid, std::vector<double>(grid.count())};
    for (std::size_t k = 0; k < grid.count(); ++k) {
        const double u = grid.node(k);
        out.log_density[k] = -0.5 * u * u / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
    }
    return out;
}

/// Differential entropy of the unit-variance noise, in bits.
inline double noise_entropy_bits() {
    return 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e);
}

/// i(x; F) = -h(N) - int phi(u - mu_x) log2 p(u; F) du, in bits.
inline double marginal_information_density(double x, const OutputDensity& dens, double h_i,
                                           double sigma_n2) {
    const double mu = normalized_mean(x, h_i, sigma_n2);
    const auto& g = dens.grid;
    if (mu - minimum_coverage < g.lower() || mu + minimum_coverage > g.upper())
        throw DomainError("marginal_information_density: density grid does not cover x");
    double acc = 0.0;
    for (std::size_t k = 0; k < g.count(); ++k) {
        const double d = g.node(k) - mu;
        acc += g.weight(k) * std::exp(numerics::log_std_normal_pdf(d)) * dens.log_density[k];
    }
    return -noise_entropy_bits() - numerics::log2e * acc;
}

inline double mutual_information(const InputDistribution& dist, const OutputDensity& dens,
                                  double h_i, double sigma_n2) {
    double total = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i)
        if (dist.masses[i] > 0.0)
            total += dist.masses[i] * marginal_information_density(dist.amplitudes[i], dens, h_i, sigma_n2);
    return total;
}

/// Convenience: I(F) on the default output grid.
inline double mutual_information(const InputDistribution& dist, double h_i, double sigma_n2) {
    const auto grid = output_grid(dist.amplitudes, h_i, sigma_n2);
    return mutual_information(dist, output_log_density(dist, h_i, sigma_n2, grid), h_i, sigma_n2);
}

/// Precomputed conditional-density kernel for a fixed amplitude grid. Used by
/// the solver, which needs i(x_j; F) for every grid point at every iteration
/// and, for Newton steps, the Hessian of I(F) in the masses.
class DiscreteChannel {
public:
    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    DiscreteChannel(std::vector<double> amplitudes, double h_i, double sigma_n2,
                    double step = default_step, double coverage = default_coverage)
        : amplitudes_(std::move(amplitudes)),
          grid_(output_grid(amplitudes_, h_i, sigma_n2, step, coverage)) {
        const auto m = static_cast<Eigen::Index>(amplitudes_.size());
        const auto n = static_cast<Eigen::Index>(grid_.count());
        mu_.resize(amplitudes_.size());
        kernel_.resize(m, n);
        for (Eigen::Index j = 0; j < m; ++j) {
            mu_[j] = normalized_mean(amplitudes_[j], h_i, sigma_n2);
            for (Eigen::Index k = 0; k < n; ++k)
                kernel_(j, k) = std::exp(numerics::log_std_normal_pdf(grid_.node(k) - mu_[j]));
        }
        weights_.resize(n);
        for (Eigen::Index k = 0; k < n; ++k) weights_[k] = grid_.weight(k);
        row_mass_ = kernel_ * weights_;
    }

    std::size_t size() const noexcept { return amplitudes_.size(); }
    const std::vector<double>& amplitudes() const noexcept { return amplitudes_; }
    const numerics::QuadratureGrid& grid() const noexcept { return grid_; }

    /// Quadrature mass of each conditional density (1 up to truncation).
    const Eigen::VectorXd& row_mass() const noexcept { return row_mass_; }

    /// Fills info[j] = i(x_j; F) in bits for masses F on the amplitude grid.
    void information_densities(std::span<const double> masses, std::span<double> info) {
        const Eigen::Map<const Eigen::VectorXd> p(masses.data(), static_cast<Eigen::Index>(masses.size()));
        density_.noalias() = kernel_.transpose() * p;
        log2_density_.resize(density_.size());
        for (Eigen::Index k = 0; k < density_.size(); ++k) {
            log2_density_[k] = density_[k] > tiny_density
                                   ? std::log2(density_[k])
                                   : numerics::log2e * log_density_at(static_cast<std::size_t>(k), masses);
        }
        const Eigen::VectorXd weighted = weights_.cwiseProduct(log2_density_);
        Eigen::Map<Eigen::VectorXd> out(info.data(), static_cast<Eigen::Index>(info.size()));
        out.noalias() = -kernel_ * weighted;
        out.array() -= noise_entropy_bits();
    }

    /// Hessian of -I(F) in bits, log2(e) sum_n w_n K_jn K_kn / p_n, at the masses
    /// passed to the last information_densities call.
    void information_hessian(Eigen::MatrixXd& hessian) const {
        Matrix scaled = kernel_;
        for (Eigen::Index k = 0; k < density_.size(); ++k) {
            if (density_[k] > tiny_density) {
                scaled.col(k) *= std::sqrt(weights_[k] / density_[k]);
            } else {
                // exp(log K + (log w - log p) / 2), stays finite when p underflows
                const double half = 0.5 * (std::log(weights_[k]) - numerics::ln2 * log2_density_[k]);
                for (Eigen::Index j = 0; j < scaled.rows(); ++j)
                    scaled(j, k) = std::exp(numerics::log_std_normal_pdf(grid_.node(static_cast<std::size_t>(k)) -
                                                                         mu_[static_cast<std::size_t>(j)]) + half);
            }
        }
        hessian.setZero(scaled.rows(), scaled.rows());
        hessian.selfadjointView<Eigen::Lower>().rankUpdate(scaled, numerics::log2e);
        hessian.triangularView<Eigen::StrictlyUpper>() = hessian.transpose();
    }

private:
    static constexpr double tiny_density = 1e-280;

    double log_density_at(std::size_t k, std::span<const double> masses) const {
        std::vector<double> comp(size());
        for (std::size_t j = 0; j < size(); ++j)
            comp[j] = numerics::log_std_normal_pdf(grid_.node(k) - mu_[j]);
        return numerics::log_sum_exp(comp, masses);
    }

    std::vector<double> amplitudes_;
    numerics::QuadratureGrid grid_;
    std::vector<double> mu_;
    Matrix kernel_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd row_mass_;
    Eigen::VectorXd density_;
    Eigen::VectorXd log2_density_;
};

}  // namespace channel

inline double ChannelParams::h_i() const {
    return h_i_override ? *h_i_override : channel::path_loss_gain(*this, Receiver::Information);
}

inline double ChannelParams::h_e() const {
    return h_e_override ? *h_e_override : channel::path_loss_gain(*this, Receiver::Energy);
}

}  // namespace swipt

#endif  // SWIPT_CHANNEL_HPP
