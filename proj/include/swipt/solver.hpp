#ifndef SWIPT_SOLVER_HPP
#define SWIPT_SOLVER_HPP

// Capacity of the AWGN channel under average-power, peak-amplitude and
// energy-harvesting constraints, on a fixed amplitude grid:
//
//     maximize   I(F)
//     subject to E[X^2] <= sigma_x2,  E[I0(sqrt(2) B h_E X)] >= E_req,  |X| <= A.
//
// Multiplier conventions (both reported >= 0):
//   lambda1  bits per watt, multiplies E[X^2] - sigma_x2;
//   lambda2  bits, multiplies the relative EH slack 1 - E[I0(.)] / E_req.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swipt/channel.hpp"
#include "swipt/distribution.hpp"
#include "swipt/numerics.hpp"
#include "swipt/rectenna.hpp"

namespace swipt {

struct ProblemSpec {
    double a = 13.0;              // effective peak amplitude, V
    double sigma_x2 = 1.0;        // average-power budget, W
    double e_req = 1.0;
    double log_e_req = 0.0;
    CircuitParams circuit;
    ChannelParams channel;
    int grid_points = 201;

    /// A = min(A_T, A_R / (sqrt(2) h_E)).
    static double effective_peak(double a_t, double a_r, double h_e) {
        return std::min(a_t, a_r / (std::numbers::sqrt2 * h_e));
    }

    void set_required_power(double p_req) {
        log_e_req = rectenna::log_e_req_from_power(circuit, p_req);
        e_req = log_e_req < 709.0 ? std::exp(log_e_req) : std::numeric_limits<double>::infinity();
    }

    void set_e_req(double e) {
        if (!(e >= 1.0)) throw DomainError("ProblemSpec: e_req must be >= 1");
        e_req = e;
        log_e_req = std::log(e);
    }

    void validate() const {
        if (!(a > 0.0)) throw DomainError("ProblemSpec: a must be positive");
        if (!(sigma_x2 > 0.0)) throw DomainError("ProblemSpec: sigma_x2 must be positive");
        if (!(log_e_req >= 0.0)) throw DomainError("ProblemSpec: e_req must be >= 1");
        if (grid_points < 3 || grid_points % 2 == 0)
            throw DomainError("ProblemSpec: grid_points must be odd and >= 3");
        circuit.validate();
        channel.validate();
    }

    /// Uniform grid on [-a, a]; the centre node is exactly zero.
    std::vector<double> amplitude_grid() const {
        auto g = numerics::linspace(-a, a, static_cast<std::size_t>(grid_points));
        g[g.size() / 2] = 0.0;
        for (std::size_t i = 0; i < g.size() / 2; ++i) g[g.size() - 1 - i] = -g[i];
        return g;
    }
};

struct Multipliers {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

struct Tolerances {
    double gap = 1e-5;            // bits
    double constraint = 1e-7;     // relative
    double slack = 1e-6;
    int max_inner = 20000;        // Blahut-Arimoto iterations
    int max_newton = 400;         // interior-point iterations
    int max_dual = 500;           // multiplier-update iterations per step
    double truncation = 1e-4;     // bits, radius-doubling test without a peak limit
};

struct MassPoint {
    double amplitude = 0.0;
    double probability = 0.0;
};

struct Solution {
    InputDistribution distribution;
    double rate = 0.0;                 // bits per channel use
    Multipliers multipliers;
    double achieved_ap = 0.0;          // W
    double achieved_metric = 1.0;
    double log_achieved_metric = 0.0;
    double p_out = 0.0;                // W
    double kkt_residual = 0.0;         // bits
    double dual_gap = 0.0;             // bits
    int iterations = 0;
    std::vector<MassPoint> mass_points;
    bool continuous_gaussian = false;  // optimum is the zero-mean Gaussian (no peak limit)
    bool at_ceiling = false;           // E_req equals the largest achievable metric
};

class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, double log_ceiling, double log_e_req)
        : Error(what), log_ceiling_(log_ceiling), log_e_req_(log_e_req) {}
    double log_ceiling() const noexcept { return log_ceiling_; }
    double log_e_req() const noexcept { return log_e_req_; }

private:
    double log_ceiling_;
    double log_e_req_;
};

class NonConvergentError : public Error {
public:
    NonConvergentError(const std::string& what, InputDistribution best, double residual_gap,
                       std::optional<Solution> partial = std::nullopt)
        : Error(what), best_(std::move(best)), gap_(residual_gap), partial_(std::move(partial)) {}
    const InputDistribution& best() const noexcept { return best_; }
    double residual_gap() const noexcept { return gap_; }
    const std::optional<Solution>& partial() const noexcept { return partial_; }

private:
    InputDistribution best_;
    double gap_;
    std::optional<Solution> partial_;
};

namespace solver {

inline constexpr double default_mass_threshold = 1e-6;

/// Drops masses below threshold and merges runs of adjacent grid points into
/// clusters located at their probability-weighted centroid.
inline std::vector<MassPoint> extract_mass_points(const InputDistribution& dist,
                                                  double threshold = default_mass_threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw DomainError("extract_mass_points: threshold must lie in (0, 1)");
    std::vector<MassPoint> out;
    bool open = false;
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = 0; i <= dist.size(); ++i) {
        const bool keep = i < dist.size() && dist.masses[i] >= threshold;
        if (keep) {
            mass += dist.masses[i];
            moment += dist.masses[i] * dist.amplitudes[i];
            open = true;
        } else if (open) {
            out.push_back({moment / mass, mass});
            mass = moment = 0.0;
            open = false;
        }
    }
    return out;
}

namespace detail {

// Per-grid-point constraint features. With f1 = x^2/sigma_x2 - 1 and
// f2 = I0/E_req - 1, feasibility reads E[f1] <= 0 and E[f2] >= 0.
struct Features {
    std::vector<double> f1;
    std::vector<double> f2;
    std::vector<double> log_i0;
};

inline Features make_features(std::span<const double> amps, double sigma_x2, double log_e_req,
                              const CircuitParams& c, double h_e) {
    Features f;
    f.f1.resize(amps.size());
    f.f2.resize(amps.size());
    f.log_i0.resize(amps.size());
    for (std::size_t j = 0; j < amps.size(); ++j) {
        f.f1[j] = amps[j] * amps[j] / sigma_x2 - 1.0;
        f.log_i0[j] = numerics::log_bessel_i0(rectenna::bessel_argument(c, h_e, amps[j]));
        f.f2[j] = std::expm1(std::min(f.log_i0[j] - log_e_req, 700.0));
    }
    return f;
}

// Exponential tilt q_j ∝ 2^(base_j - l1 f1_j + l2 f2_j) and its first two moments.
struct Tilt {
    double log2_partition = 0.0;
    double m1 = 0.0, m2 = 0.0;
    double v11 = 0.0, v22 = 0.0, v12 = 0.0;
};

class TiltSolver {
public:
    TiltSolver(std::span<const double> base, const Features& feat)
        : base_(base), feat_(feat), w_(base.size()) {}

    Tilt evaluate(double l1, double l2) {
        const std::size_t n = base_.size();
        double emax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (base_[j] == -std::numeric_limits<double>::infinity()) continue;
            emax = std::max(emax, exponent(j, l1, l2));
        }
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            w_[j] = base_[j] == -std::numeric_limits<double>::infinity()
                        ? 0.0
                        : std::exp2(exponent(j, l1, l2) - emax);
            z += w_[j];
        }
        Tilt t;
        t.log2_partition = emax + std::log2(z);
        for (std::size_t j = 0; j < n; ++j) {
            w_[j] /= z;
            t.m1 += w_[j] * feat_.f1[j];
            t.m2 += w_[j] * feat_.f2[j];
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double d1 = feat_.f1[j] - t.m1, d2 = feat_.f2[j] - t.m2;
            t.v11 += w_[j] * d1 * d1;
            t.v22 += w_[j] * d2 * d2;
            t.v12 += w_[j] * d1 * d2;
        }
        return t;
    }

    const std::vector<double>& weights() const noexcept { return w_; }

    // Minimizes log2 Z(l1, l2) over l1, l2 >= 0. The minimizer's tilt satisfies
    // both constraints with complementary slackness.
    std::pair<double, double> solve(double l1_start, double l2_start, int max_iter) {
        double l1 = std::max(0.0, l1_start);
        auto inner = [&](double l2) {
            l1 = root(
                [&](double x) {
                    const Tilt t = evaluate(x, l2);
                    return std::pair{-t.m1, numerics::ln2 * t.v11};
                },
                l1, tol1, max_iter);
            return l1;
        };
        const double l2 = root(
            [&](double y) {
                inner(y);
                const Tilt t = evaluate(l1, y);
                double slope = t.v22;
                if (l1 > 0.0 && t.v11 > 0.0) slope -= t.v12 * t.v12 / t.v11;
                return std::pair{t.m2, numerics::ln2 * std::max(slope, 0.0)};
            },
            std::max(0.0, l2_start), tol2, max_iter);
        inner(l2);
        return {l1, l2};
    }

    static constexpr double tol1 = 1e-13;
    static constexpr double tol2 = 1e-13;
    static constexpr double cap = 1e200;

private:
    double exponent(std::size_t j, double l1, double l2) const {
        return base_[j] - l1 * feat_.f1[j] + l2 * feat_.f2[j];
    }

    // Smallest x >= 0 with g(x) >= 0 for a non-decreasing g, via Newton steps
    // kept inside a bracket. Returns 0 when g(0) >= 0.
    template <class G>
    static double root(G&& g, double start, double tol, int max_iter) {
        auto [g0, d0] = g(0.0);
        if (g0 >= 0.0) return 0.0;
        if (g0 > -tol) return 0.0;
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        double x = start > 0.0 ? start : (d0 > 0.0 ? -g0 / d0 : 1.0);
        for (int it = 0; it < max_iter; ++it) {
            auto [gx, dx] = g(x);
            if (std::fabs(gx) <= tol) return x;
            if (gx < 0.0) lo = x; else hi = x;
            if (std::isfinite(hi) && hi - lo <= 1e-15 * hi) return hi;
            double next = dx > 0.0 ? x - gx / dx : std::numeric_limits<double>::quiet_NaN();
            if (!(next > lo && next < hi)) {
                if (std::isfinite(hi)) next = 0.5 * (lo + hi);
                else next = std::max(2.0 * x, x + 1.0);
            }
            if (next > cap) return cap;
            x = next;
        }
        return x;
    }

    std::span<const double> base_;
    const Features& feat_;
    std::vector<double> w_;
};

// Largest achievable ln E[I0] on a grid subject to the average-power budget;
// optimal distributions use at most two grid points (mirrored when possible).
struct GridCeiling {
    double log_metric = -std::numeric_limits<double>::infinity();
    std::vector<double> masses;
};

inline GridCeiling grid_ceiling(std::span<const double> amps, std::span<const double> log_i0,
                                double sigma_x2) {
    const std::size_t m = amps.size();
    const double lmax = *std::max_element(log_i0.begin(), log_i0.end());
    GridCeiling best;
    double best_value = -1.0;
    std::size_t bj = m, bk = m;
    double btheta = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double sj = amps[j] * amps[j];
        if (sj > sigma_x2) continue;
        const double wj = std::exp(log_i0[j] - lmax);
        if (wj > best_value) {
            best_value = wj;
            bj = j;
            bk = m;
        }
        for (std::size_t k = 0; k < m; ++k) {
            const double sk = amps[k] * amps[k];
            if (sk <= sigma_x2) continue;
            const double theta = (sigma_x2 - sj) / (sk - sj);
            const double v = (1.0 - theta) * wj + theta * std::exp(log_i0[k] - lmax);
            if (v > best_value) {
                best_value = v;
                bj = j;
                bk = k;
                btheta = theta;
            }
        }
    }
    if (bj == m) return best;
    best.log_metric = lmax + std::log(best_value);
    best.masses.assign(m, 0.0);
    auto place = [&](std::size_t idx, double p) {
        auto mirror = std::find(amps.begin(), amps.end(), -amps[idx]);
        if (amps[idx] != 0.0 && mirror != amps.end()) {
            best.masses[idx] += 0.5 * p;
            best.masses[static_cast<std::size_t>(mirror - amps.begin())] += 0.5 * p;
        } else {
            best.masses[idx] += p;
        }
    };
    if (bk == m) {
        place(bj, 1.0);
    } else {
        place(bj, 1.0 - btheta);
        place(bk, btheta);
    }
    return best;
}

// Primal-dual interior-point method for
//
//     minimize -I(p)  s.t.  sum p = 1,  p >= 0,  c_k' p <= 0  (k = AP, EH rows),
//
// following the standard infeasible-equality primal-dual scheme: Newton steps
// on the perturbed KKT system, a fraction-to-boundary rule, and backtracking
// on the residual norm. The dense reduced system is solved by LDLT.
struct InteriorPointResult {
    std::vector<double> masses;
    std::vector<double> row_multipliers;
    std::vector<double> row_slacks;
    int iterations = 0;
    bool converged = false;
    double surrogate_gap = 0.0;
    double dual_residual = 0.0;
};

class InteriorPoint {
public:
    InteriorPoint(channel::DiscreteChannel& ch, std::vector<Eigen::VectorXd> rows)
        : ch_(ch), rows_(std::move(rows)), m_(static_cast<Eigen::Index>(ch.size())) {}

    InteriorPointResult run(const std::vector<double>& start, int max_iter, double tol) {
        const Eigen::Index m = m_;
        const std::size_t nrows = rows_.size();
        const double n_ineq = static_cast<double>(m) + static_cast<double>(nrows);
        Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(start.data(), m);
        Eigen::VectorXd up = p.cwiseInverse() / n_ineq;
        Eigen::VectorXd ur(nrows);
        for (std::size_t k = 0; k < nrows; ++k) ur[k] = 1.0 / (n_ineq * slack(k, p));
        double nu = 0.0;

        InteriorPointResult res;
        Eigen::VectorXd grad(m), dp(m), dup(m), rhs(m), y1(m), y2(m);
        Eigen::VectorXd dur(nrows);
        Eigen::MatrixXd hess;
        for (int it = 0; it < max_iter; ++it) {
            res.iterations = it;
            gradient(p, grad);
            double eta = up.dot(p);
            for (std::size_t k = 0; k < nrows; ++k) eta += ur[k] * slack(k, p);
            const double t = mu * n_ineq / eta;

            Eigen::VectorXd r_dual = dual_residual(grad, up, ur, nu);
            const double r_pri = p.sum() - 1.0;
            res.surrogate_gap = eta;
            res.dual_residual = r_dual.lpNorm<Eigen::Infinity>();
            if (eta <= tol && res.dual_residual <= 1e-7 && std::fabs(r_pri) <= 1e-12) {
                res.converged = true;
                break;
            }

            ch_.information_hessian(hess);
            hess.diagonal() += up.cwiseQuotient(p);
            rhs = -r_dual - (up.cwiseProduct(p).array() - 1.0 / t).matrix().cwiseQuotient(p);
            std::vector<double> sl(nrows), rc(nrows);
            for (std::size_t k = 0; k < nrows; ++k) {
                sl[k] = slack(k, p);
                rc[k] = ur[k] * sl[k] - 1.0 / t;
                hess.selfadjointView<Eigen::Lower>().rankUpdate(rows_[k], ur[k] / sl[k]);
                rhs += (rc[k] / sl[k]) * rows_[k];
            }
            hess.triangularView<Eigen::StrictlyUpper>() = hess.transpose();
            hess.diagonal().array() += 1e-14 * hess.diagonal().maxCoeff();
            Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            y1 = ldlt.solve(rhs);
            y2 = ldlt.solve(Eigen::VectorXd::Ones(m));
            const double dnu = (y1.sum() + r_pri) / y2.sum();
            dp = y1 - dnu * y2;
            dup = (-(up.cwiseProduct(p).array() - 1.0 / t).matrix() - up.cwiseProduct(dp)).cwiseQuotient(p);
            for (std::size_t k = 0; k < nrows; ++k)
                dur[k] = (-rc[k] + ur[k] * rows_[k].dot(dp)) / sl[k];

            double s = 1.0;
            for (Eigen::Index j = 0; j < m; ++j)
                if (dup[j] < 0.0) s = std::min(s, -up[j] / dup[j]);
            for (std::size_t k = 0; k < nrows; ++k)
                if (dur[k] < 0.0) s = std::min(s, -ur[k] / dur[k]);
            s *= 0.99;
            auto strictly_feasible = [&](const Eigen::VectorXd& q) {
                if (q.minCoeff() <= 0.0) return false;
                for (std::size_t k = 0; k < nrows; ++k)
                    if (slack(k, q) <= 0.0) return false;
                return true;
            };
            while (!strictly_feasible(p + s * dp) && s > 1e-300) s *= 0.5;

            const double r0 = residual_norm(r_dual, up, ur, p, t, r_pri);
            Eigen::VectorXd pn, upn, urn;
            bool accepted = false;
            for (int ls = 0; ls < 40 && !accepted; ++ls) {
                pn = p + s * dp;
                upn = up + s * dup;
                urn = ur + s * dur;
                gradient(pn, grad);
                const Eigen::VectorXd rd = dual_residual(grad, upn, urn, nu + s * dnu);
                accepted = residual_norm(rd, upn, urn, pn, t, pn.sum() - 1.0) <= (1.0 - 0.01 * s) * r0;
                if (!accepted) s *= 0.5;
            }
            // No decrease: the residual is at its rounding floor. The caller
            // judges the result by the duality gap.
            if (!accepted) break;
            p = pn;
            up = upn;
            ur = urn;
            nu += s * dnu;
        }
        gradient(p, grad);  // leaves the channel state at the final masses
        res.masses.assign(p.data(), p.data() + m);
        res.row_multipliers.assign(ur.data(), ur.data() + nrows);
        res.row_slacks.resize(nrows);
        for (std::size_t k = 0; k < nrows; ++k) res.row_slacks[k] = slack(k, p);
        return res;
    }

private:
    static constexpr double mu = 10.0;

    double slack(std::size_t k, const Eigen::VectorXd& p) const { return -rows_[k].dot(p); }

    void gradient(const Eigen::VectorXd& p, Eigen::VectorXd& grad) {
        info_.resize(static_cast<std::size_t>(m_));
        ch_.information_densities(std::span<const double>(p.data(), static_cast<std::size_t>(m_)), info_);
        for (Eigen::Index j = 0; j < m_; ++j)
            grad[j] = -(info_[static_cast<std::size_t>(j)] - numerics::log2e * ch_.row_mass()[j]);
    }

    Eigen::VectorXd dual_residual(const Eigen::VectorXd& grad, const Eigen::VectorXd& up,
                                  const Eigen::VectorXd& ur, double nu) const {
        Eigen::VectorXd r = grad - up;
        r.array() += nu;
        for (std::size_t k = 0; k < rows_.size(); ++k) r += ur[k] * rows_[k];
        return r;
    }

    double residual_norm(const Eigen::VectorXd& r_dual, const Eigen::VectorXd& up,
                         const Eigen::VectorXd& ur, const Eigen::VectorXd& p, double t,
                         double r_pri) const {
        double sq = r_dual.squaredNorm() + r_pri * r_pri;
        sq += (up.cwiseProduct(p).array() - 1.0 / t).matrix().squaredNorm();
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const double rc = ur[k] * slack(k, p) - 1.0 / t;
            sq += rc * rc;
        }
        return std::sqrt(sq);
    }

    channel::DiscreteChannel& ch_;
    std::vector<Eigen::VectorXd> rows_;
    Eigen::Index m_;
    std::vector<double> info_;
};

// For fixed masses, max_j [i(x_j) - l1 f1_j + l2 f2_j] bounds the grid capacity
// from above for every l1, l2 >= 0. The bound is convex and piecewise linear
// in (l1, l2); this minimizes it by nested ternary search over the rows that
// are in use, starting from brackets around the given multipliers.
struct BoundFit {
    double l1 = 0.0;
    double l2 = 0.0;
    double bound = 0.0;
};

inline BoundFit tighten_bound(std::span<const double> info, const Features& feat, double l1, double l2,
                              bool fit1, bool fit2) {
    auto upper = [&](double a, double b) {
        double u = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < info.size(); ++j)
            if (std::isfinite(info[j])) u = std::max(u, info[j] - a * feat.f1[j] + b * feat.f2[j]);
        return u;
    };
    auto minimize = [](auto&& f, double lo, double hi, double& best) {
        for (int it = 0; it < 100 && hi > lo; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (f(m1) <= f(m2)) hi = m2; else lo = m1;
        }
        const double x = 0.5 * (lo + hi);
        best = f(x);
        return x;
    };
    auto best_l1 = [&](double b, double& value) {
        if (!fit1) {
            value = upper(l1, b);
            return l1;
        }
        return minimize([&](double a) { return upper(a, b); }, 0.0, 2.0 * l1 + 1e-12, value);
    };
    BoundFit fit{l1, l2, upper(l1, l2)};
    double v = 0.0;
    if (fit2) {
        fit.l2 = minimize([&](double b) { double w; best_l1(b, w); return w; }, 0.0, 2.0 * l2 + 1e-12, v);
    }
    fit.l1 = best_l1(fit.l2, v);
    if (v < fit.bound) return {fit.l1, fit.l2, v};
    return {l1, l2, fit.bound};
}

// Strictly feasible full-support start: the exponential tilt of the uniform
// distribution meeting both constraints with a margin.
inline std::vector<double> interior_start(std::span<const double> amps, const Features& feat,
                                          bool ap_row, bool eh_row, double sigma_x2,
                                          double log_e_req, int max_iter) {
    const std::size_t m = amps.size();
    std::vector<double> base(m, 0.0);
    for (double d1 : {0.05, 5e-3, 5e-4, 5e-5, 5e-6}) {
        Features shifted = feat;
        double d2 = 0.0;
        if (eh_row) {
            const auto c = grid_ceiling(amps, feat.log_i0, ap_row ? sigma_x2 * (1.0 - d1) : 1e300);
            d2 = 0.5 * std::expm1(c.log_metric - log_e_req);
            if (!(d2 > 0.0)) continue;
        }
        for (std::size_t j = 0; j < m; ++j) {
            shifted.f1[j] = ap_row ? feat.f1[j] + d1 : -1.0;
            shifted.f2[j] = eh_row ? feat.f2[j] - d2 : 1.0;
        }
        TiltSolver tilt(base, shifted);
        const auto [l1, l2] = tilt.solve(0.0, 0.0, max_iter);
        const Tilt t = tilt.evaluate(l1, l2);
        // Slack left in each true constraint.
        const double s1 = ap_row ? d1 - t.m1 : 1.0;
        const double s2 = eh_row ? d2 + t.m2 : 1.0;
        if (!(s1 > 0.0 && s2 > 0.0)) continue;
        // Blend in a little uniform mass so that no weight underflows, spending
        // at most half of each slack.
        double u1 = 0.0, u2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            u1 += feat.f1[j] / static_cast<double>(m);
            u2 += feat.f2[j] / static_cast<double>(m);
        }
        double eps = 0.5;
        if (ap_row && u1 > 0.0) eps = std::min(eps, 0.5 * s1 / (u1 + s1));
        if (eh_row && u2 < 0.0) eps = std::min(eps, 0.5 * s2 / (s2 - u2));
        std::vector<double> p = tilt.weights();
        for (double& x : p) x = (1.0 - eps) * x + eps / static_cast<double>(m);
        if (*std::min_element(p.begin(), p.end()) > 0.0) return p;
    }
    throw InfeasibleError("no strictly feasible distribution on the grid", 0.0, log_e_req);
}

}  // namespace detail

/// Warm-start data carried between neighbouring solves.
struct WarmStart {
    std::optional<InputDistribution> distribution;
    std::optional<Multipliers> multipliers;
};

/// Maximizes the Lagrangian I(F) - lambda1 g1(F) - lambda2 g2(F) for fixed
/// multipliers by Blahut-Arimoto with input costs. Returns the maximizer and
/// its Lagrangian value.
inline std::pair<InputDistribution, double> inner_maximize(const ProblemSpec& spec,
                                                           const Multipliers& mult,
                                                           const InputDistribution& init,
                                                           double tol, int max_iter) {
    spec.validate();
    if (mult.lambda1 < 0.0 || mult.lambda2 < 0.0)
        throw DomainError("inner_maximize: multipliers must be non-negative");
    for (double p : init.masses)
        if (!(p > 0.0)) throw DomainError("inner_maximize: initial masses must be positive");
    init.validate();
    const auto& amps = init.amplitudes;
    const auto feat = detail::make_features(amps, spec.sigma_x2, spec.log_e_req, spec.circuit,
                                            spec.channel.h_e());
    channel::DiscreteChannel ch(amps, spec.channel.h_i(), spec.channel.sigma_n2);
    const double l1 = mult.lambda1 * spec.sigma_x2;
    std::vector<double> p = init.masses, info(amps.size()), cost(amps.size());
    double gap = std::numeric_limits<double>::infinity();
    double value = 0.0;
    for (int it = 0; it <= max_iter; ++it) {
        ch.information_densities(p, info);
        double upper = -std::numeric_limits<double>::infinity();
        value = 0.0;
        for (std::size_t j = 0; j < amps.size(); ++j) {
            cost[j] = info[j] - l1 * feat.f1[j] + mult.lambda2 * feat.f2[j];
            value += p[j] * cost[j];
            upper = std::max(upper, cost[j]);
        }
        gap = upper - value;
        if (gap <= tol) return {InputDistribution(amps, p), value};
        if (it == max_iter) break;
        double z = 0.0;
        for (std::size_t j = 0; j < amps.size(); ++j) {
            p[j] *= std::exp2(cost[j] - upper);
            z += p[j];
        }
        for (double& x : p) x /= z;
    }
    throw NonConvergentError("inner_maximize: gap " + std::to_string(gap) + " after " +
                                 std::to_string(max_iter) + " iterations",
                             InputDistribution(amps, p), gap);
}

/// Solves the constrained problem on an explicit amplitude grid.
///
/// The masses come from a primal-dual interior-point method started at a
/// strictly feasible tilt of the uniform distribution; the row multipliers of
/// that method are (lambda1 sigma_x2, lambda2). The returned gap is the
/// Blahut-Arimoto bound max_j [i(x_j;F) - l1 f1_j + l2 f2_j] - I(F), which
/// upper-bounds the distance to the grid capacity for any feasible F.
inline Solution solve_on_grid(const ProblemSpec& spec, std::vector<double> amps,
                              const Tolerances& tol = {}, const WarmStart& warm = {}) {
    spec.validate();
    const double h_e = spec.channel.h_e();
    const double h_i = spec.channel.h_i();
    const auto feat = detail::make_features(amps, spec.sigma_x2, spec.log_e_req, spec.circuit, h_e);
    const std::size_t m = amps.size();

    double min_power = std::numeric_limits<double>::infinity();
    for (double x : amps) min_power = std::min(min_power, x * x);
    if (min_power > spec.sigma_x2)
        throw InfeasibleError("average-power budget below the smallest symbol energy",
                              -std::numeric_limits<double>::infinity(), spec.log_e_req);
    const auto ceiling = detail::grid_ceiling(amps, feat.log_i0, spec.sigma_x2);
    if (ceiling.log_metric < spec.log_e_req * (1.0 - 1e-12) - 1e-15)
        throw InfeasibleError("E_req=" + std::to_string(spec.e_req) +
                                  " exceeds the largest feasible EH metric " +
                                  std::to_string(std::exp(ceiling.log_metric)),
                              ceiling.log_metric, spec.log_e_req);

    channel::DiscreteChannel ch(amps, h_i, spec.channel.sigma_n2);
    std::vector<double> info(m);

    bool fit1 = false, fit2 = false;  // multipliers refined against the final masses
    auto finish = [&](std::vector<double> p, double l1, double l2, int iterations) {
        Solution s;
        double total = 0.0;
        for (double& x : p) {
            x = std::max(x, 0.0);
            total += x;
        }
        for (double& x : p) x /= total;
        ch.information_densities(p, info);
        if (fit1 || fit2) {
            const auto fit = detail::tighten_bound(info, feat, l1, l2, fit1, fit2);
            l1 = fit.l1;
            l2 = fit.l2;
        }
        double rate = 0.0, upper = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) rate += p[j] * info[j];
        double support_dev = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double c = info[j] - l1 * feat.f1[j] + l2 * feat.f2[j];
            if (std::isfinite(c)) upper = std::max(upper, c);
            if (p[j] >= default_mass_threshold && std::isfinite(c))
                support_dev = std::max(support_dev, std::fabs(rate - c));
        }
        s.distribution = InputDistribution(amps, std::move(p));
        s.rate = rate;
        s.multipliers = {l1 / spec.sigma_x2, l2};
        s.achieved_ap = s.distribution.second_moment();
        s.log_achieved_metric = rectenna::log_eh_metric(spec.circuit, h_e, s.distribution);
        s.achieved_metric = std::exp(s.log_achieved_metric);
        s.p_out = rectenna::harvested_power_from_log_metric(spec.circuit,
                                                            std::max(0.0, s.log_achieved_metric));
        s.dual_gap = std::isfinite(upper) ? std::max(upper - rate, 0.0) : 0.0;
        s.kkt_residual = std::max(support_dev, s.dual_gap);
        s.iterations = iterations;
        s.mass_points = extract_mass_points(s.distribution);
        return s;
    };

    if (spec.log_e_req > 0.0 &&
        ceiling.log_metric - spec.log_e_req <= 1e-12 * std::max(1.0, spec.log_e_req)) {
        // Only one distribution is feasible; the multipliers are unbounded.
        auto s = finish(ceiling.masses, std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity(), 0);
        s.dual_gap = 0.0;
        s.kkt_residual = 0.0;
        s.at_ceiling = true;
        return s;
    }

    // Rows that can never bind are left out: the power row when every symbol
    // fits the budget, the EH row when every symbol meets the threshold.
    const bool ap_row = *std::max_element(feat.f1.begin(), feat.f1.end()) > 0.0;
    const bool eh_row = *std::min_element(feat.f2.begin(), feat.f2.end()) < 0.0;
    // Rows are scaled to unit max-norm; near the ceiling the EH features are
    // tiny next to the power features and the Newton system degrades otherwise.
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> row_scale;
    auto add_row = [&](const std::vector<double>& f, double sign) {
        Eigen::VectorXd r = sign * Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(m));
        row_scale.push_back(r.lpNorm<Eigen::Infinity>());
        rows.push_back(r / row_scale.back());
    };
    if (ap_row) add_row(feat.f1, 1.0);
    if (eh_row) add_row(feat.f2, -1.0);

    std::vector<double> start =
        detail::interior_start(amps, feat, ap_row, eh_row, spec.sigma_x2, spec.log_e_req, tol.max_dual);
    if (warm.distribution && warm.distribution->amplitudes == amps) {
        std::vector<double> mixed(m);
        for (std::size_t j = 0; j < m; ++j) mixed[j] = 0.5 * (start[j] + warm.distribution->masses[j]);
        bool strict = true;
        for (const auto& r : rows) strict = strict && -r.dot(Eigen::Map<const Eigen::VectorXd>(mixed.data(), static_cast<Eigen::Index>(m))) > 0.0;
        if (strict) start = std::move(mixed);
    }

    detail::InteriorPoint ipm(ch, rows);
    // The barrier leaves about eta / m of mass on every off-support point; a
    // deep target keeps that total far below the clustering threshold.
    const auto res = ipm.run(start, tol.max_newton, 1e-6 * tol.gap);

    double l1 = 0.0, l2 = 0.0;
    std::size_t k = 0;
    auto settle = [&](std::size_t row) {
        // A row whose slack is clearly positive is inactive: report an exact zero.
        return res.row_slacks[row] > 1e-6 ? 0.0 : res.row_multipliers[row] / row_scale[row];
    };
    if (ap_row) l1 = settle(k++);
    if (eh_row) l2 = settle(k++);
    fit1 = l1 > 0.0;
    fit2 = l2 > 0.0;

    Solution s = finish(res.masses, l1, l2, res.iterations);
    if (s.dual_gap > tol.gap)
        throw NonConvergentError("solver: duality gap " + std::to_string(s.dual_gap) + " bits after " +
                                     std::to_string(res.iterations) + " interior-point iterations",
                                 s.distribution, s.dual_gap, s);
    return s;
}

/// Solves the discretized problem on the uniform grid of the spec.
inline Solution dual_solve(const ProblemSpec& spec, const Tolerances& tol = {},
                           const WarmStart& warm = {}) {
    spec.validate();
    const double ceiling = rectenna::log_max_feasible_metric(spec.circuit, spec.channel.h_e(),
                                                             spec.a, spec.sigma_x2);
    if (ceiling < spec.log_e_req * (1.0 - 1e-12) - 1e-15)
        throw InfeasibleError("E_req=" + std::to_string(spec.e_req) +
                                  " exceeds max_feasible_metric=" + std::to_string(std::exp(ceiling)),
                              ceiling, spec.log_e_req);
    return solve_on_grid(spec, spec.amplitude_grid(), tol, warm);
}

/// Best rate for M-ary ASK, x_k = 2 A k / (M - 1) - A.
inline Solution ask_rate(const ProblemSpec& spec, int m, const Tolerances& tol = {}) {
    if (m < 2) throw DomainError("ask_rate: alphabet size must be >= 2");
    auto amps = numerics::linspace(-spec.a, spec.a, static_cast<std::size_t>(m));
    if (m % 2 == 1) amps[amps.size() / 2] = 0.0;
    for (std::size_t i = 0; i < amps.size() / 2; ++i) amps[amps.size() - 1 - i] = -amps[i];
    return solve_on_grid(spec, std::move(amps), tol);
}

/// Problem without a peak-amplitude limit.
struct UnboundedSpec {
    double sigma_x2 = 1.0;
    double e_req = 1.0;
    double log_e_req = 0.0;
    CircuitParams circuit;
    ChannelParams channel;
    int grid_points = 201;
};

/// Threshold below which the EH constraint is inactive for a Gaussian input:
/// E_lim = exp(z/2) I0(z/2), z = B^2 h_e^2 sigma_x2.
inline double log_e_lim(const CircuitParams& c, double h_e, double sigma_x2) {
    if (!(sigma_x2 >= 0.0)) throw DomainError("e_lim: sigma_x2 must be non-negative");
    const double b = c.b();
    const double half = 0.5 * b * b * h_e * h_e * sigma_x2;
    return half + numerics::log_bessel_i0(half);
}

inline Solution no_pp_solve(const UnboundedSpec& spec, const Tolerances& tol = {}) {
    if (!(spec.sigma_x2 > 0.0)) throw DomainError("no_pp_solve: sigma_x2 must be positive");
    const double h_e = spec.channel.h_e();
    const double h_i = spec.channel.h_i();
    const double log_lim = log_e_lim(spec.circuit, h_e, spec.sigma_x2);
    if (spec.log_e_req <= log_lim) {
        Solution s;
        s.continuous_gaussian = true;
        s.rate = channel::shannon_capacity(spec.sigma_x2, h_i, spec.channel.sigma_n2);
        const double snr_gain = h_i * h_i / spec.channel.sigma_n2;
        s.multipliers = {0.5 * numerics::log2e * snr_gain / (1.0 + spec.sigma_x2 * snr_gain), 0.0};
        s.achieved_ap = spec.sigma_x2;
        s.log_achieved_metric = log_lim;
        s.achieved_metric = std::exp(log_lim);
        s.p_out = rectenna::harvested_power_from_log_metric(spec.circuit, log_lim);
        return s;
    }
    ProblemSpec p;
    p.sigma_x2 = spec.sigma_x2;
    p.e_req = spec.e_req;
    p.log_e_req = spec.log_e_req;
    p.circuit = spec.circuit;
    p.channel = spec.channel;
    p.grid_points = spec.grid_points;
    p.a = 8.0 * std::sqrt(spec.sigma_x2);
    std::optional<Solution> prev;
    for (int level = 0; level < 3; ++level) {
        Solution s;
        try {
            s = dual_solve(p, tol);
        } catch (const NonConvergentError& e) {
            throw NonConvergentError("no_pp_solve: truncated problem at radius " + std::to_string(p.a) +
                                         " V did not converge (" + e.what() + ")",
                                     e.best(), e.residual_gap(), prev);
        }
        if (prev && std::fabs(s.rate - prev->rate) <= tol.truncation) return s;
        prev = std::move(s);
        p.a *= 2.0;
        p.grid_points = 2 * p.grid_points - 1;
    }
    throw NonConvergentError("no_pp_solve: rate still moving after doubling the truncation radius twice",
                             prev->distribution, prev->dual_gap, prev);
}

}  // namespace solver
}  // namespace swipt

#endif  // SWIPT_SOLVER_HPP
