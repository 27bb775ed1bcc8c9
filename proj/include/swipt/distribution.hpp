#ifndef SWIPT_DISTRIBUTION_HPP
#define SWIPT_DISTRIBUTION_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "swipt/numerics.hpp"

namespace swipt {

/// Probability masses on an increasing amplitude grid (volts).
struct InputDistribution {
    std::vector<double> amplitudes;
    std::vector<double> masses;

    InputDistribution() = default;
    InputDistribution(std::vector<double> amps, std::vector<double> probs)
        : amplitudes(std::move(amps)), masses(std::move(probs)) {
        validate();
    }

    static InputDistribution point_mass(double x) { return {{x}, {1.0}}; }

    static InputDistribution uniform(std::vector<double> amps) {
        const double p = 1.0 / static_cast<double>(amps.size());
        std::vector<double> probs(amps.size(), p);
        return {std::move(amps), std::move(probs)};
    }

    std::size_t size() const noexcept { return amplitudes.size(); }

    double peak() const noexcept {
        double m = 0.0;
        for (double x : amplitudes) m = std::max(m, std::fabs(x));
        return m;
    }

    double second_moment() const noexcept {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += masses[i] * amplitudes[i] * amplitudes[i];
        return s;
    }

    void validate() const {
        if (amplitudes.empty() || amplitudes.size() != masses.size())
            throw DomainError("InputDistribution: amplitudes and masses must be non-empty, equal length");
        double total = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            if (!std::isfinite(amplitudes[i]))
                throw DomainError("InputDistribution: non-finite amplitude");
            if (i > 0 && !(amplitudes[i] > amplitudes[i - 1]))
                throw DomainError("InputDistribution: amplitudes must be strictly increasing");
            if (!(masses[i] >= 0.0))
                throw DomainError("InputDistribution: negative mass at index " + std::to_string(i));
            total += masses[i];
        }
        if (std::fabs(total - 1.0) > 1e-12)
            throw DomainError("InputDistribution: masses sum to " + std::to_string(total));
    }
};

}  // namespace swipt

#endif  // SWIPT_DISTRIBUTION_HPP
