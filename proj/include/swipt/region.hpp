#ifndef SWIPT_REGION_HPP
#define SWIPT_REGION_HPP

// Rate-energy region and capacity-versus-power sweeps, plus their CSV form.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "swipt/certificate.hpp"
#include "swipt/channel.hpp"
#include "swipt/rectenna.hpp"
#include "swipt/solver.hpp"

namespace swipt {

enum class PointStatus { Solved, Infeasible, Failed };

inline const char* to_string(PointStatus s) {
    switch (s) {
        case PointStatus::Solved: return "solved";
        case PointStatus::Infeasible: return "infeasible";
        case PointStatus::Failed: return "failed";
    }
    return "failed";
}

inline PointStatus parse_status(const std::string& s) {
    if (s == "solved") return PointStatus::Solved;
    if (s == "infeasible") return PointStatus::Infeasible;
    if (s == "failed") return PointStatus::Failed;
    throw DomainError("unknown point status '" + s + "'");
}

struct RegionPoint {
    double p_req = 0.0;     // W
    double e_req = 1.0;
    double rate = std::numeric_limits<double>::quiet_NaN();   // bits
    double p_out = std::numeric_limits<double>::quiet_NaN();  // W
    double lambda1 = std::numeric_limits<double>::quiet_NaN();
    double lambda2 = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_mass_points = 0;
    PointStatus status = PointStatus::Failed;
    std::optional<double> solve_seconds;
    std::optional<Solution> solution;  // kept for certification, not serialized
    std::string message;
};

enum class SweepVariable { RequiredPower, AveragePower, PeakAmplitude };

struct SweepSpec {
    ProblemSpec base;
    SweepVariable variable = SweepVariable::RequiredPower;
    std::vector<double> values;  // W for powers, V for amplitudes; strictly increasing
    double p_req = 0.0;          // W, fixed EH requirement for the other sweeps
    bool shannon = true;
    bool smith = true;
    std::vector<int> ask_sizes;
    bool cold_start = false;     // independent solves, spread over threads
    bool record_time = false;
    Tolerances tol;

    void validate() const {
        base.validate();
        if (values.empty()) throw DomainError("SweepSpec: sweep list is empty");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1])) throw DomainError("SweepSpec: sweep list must be strictly increasing");
        for (int m : ask_sizes)
            if (m < 2) throw DomainError("SweepSpec: ASK sizes must be >= 2");
    }
};

namespace region {

/// Harvested power when the input is the zero-mean Gaussian at sigma_x2.
inline double p_lim(const ProblemSpec& spec) {
    return rectenna::harvested_power_from_log_metric(
        spec.circuit, solver::log_e_lim(spec.circuit, spec.channel.h_e(), spec.sigma_x2));
}

/// Largest harvestable power under the spec's peak and average-power limits.
inline double p_ceiling(const ProblemSpec& spec) {
    return rectenna::harvested_power_from_log_metric(
        spec.circuit,
        rectenna::log_max_feasible_metric(spec.circuit, spec.channel.h_e(), spec.a, spec.sigma_x2));
}

/// k / count * p_ceiling for k = 0 .. count - 1.
inline std::vector<double> default_p_req_sweep(const ProblemSpec& spec, int count = 20) {
    const double top = p_ceiling(spec);
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(top * k / count);
    return out;
}

namespace detail {

inline RegionPoint solve_point(const ProblemSpec& spec, double p_req, const Tolerances& tol,
                               const solver::WarmStart& warm, bool record_time) {
    RegionPoint pt;
    pt.p_req = p_req;
    pt.e_req = spec.e_req;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Solution s = solver::dual_solve(spec, tol, warm);
        pt.rate = s.rate;
        pt.p_out = s.p_out;
        pt.lambda1 = s.multipliers.lambda1;
        pt.lambda2 = s.multipliers.lambda2;
        pt.n_mass_points = s.mass_points.size();
        pt.status = PointStatus::Solved;
        pt.solution = std::move(s);
    } catch (const InfeasibleError& e) {
        pt.status = PointStatus::Infeasible;
        pt.message = e.what();
    } catch (const NonConvergentError& e) {
        pt.status = PointStatus::Failed;
        pt.message = e.what();
    }
    if (record_time)
        pt.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return pt;
}

// Runs job(i) for i in [0, n) on up to hardware_concurrency threads. Results
// land in caller-owned slots, so ordering never depends on completion order.
template <class Job>
void parallel_for(std::size_t n, Job&& job) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) job(i);
        });
    for (auto& t : pool) t.join();
}

inline ProblemSpec with_value(const SweepSpec& sweep, double v) {
    ProblemSpec s = sweep.base;
    switch (sweep.variable) {
        case SweepVariable::RequiredPower: s.set_required_power(v); break;
        case SweepVariable::AveragePower: s.sigma_x2 = v; s.set_required_power(sweep.p_req); break;
        case SweepVariable::PeakAmplitude: s.a = v; s.set_required_power(sweep.p_req); break;
    }
    return s;
}

}  // namespace detail

/// One solve per swept value. The serial pass warm-starts each point from the
/// previous solution; cold_start makes every point independent.
inline std::vector<RegionPoint> sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<RegionPoint> out(spec.values.size());
    const double fixed_p = spec.variable == SweepVariable::RequiredPower ? 0.0 : spec.p_req;
    auto p_of = [&](std::size_t i) {
        return spec.variable == SweepVariable::RequiredPower ? spec.values[i] : fixed_p;
    };
    if (spec.cold_start) {
        detail::parallel_for(out.size(), [&](std::size_t i) {
            out[i] = detail::solve_point(detail::with_value(spec, spec.values[i]), p_of(i), spec.tol, {},
                                         spec.record_time);
        });
        return out;
    }
    solver::WarmStart warm;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = detail::solve_point(detail::with_value(spec, spec.values[i]), p_of(i), spec.tol, warm,
                                     spec.record_time);
        // Warm starts only carry over when the amplitude grid is unchanged.
        if (out[i].solution && spec.variable != SweepVariable::PeakAmplitude) {
            warm.distribution = out[i].solution->distribution;
            warm.multipliers = out[i].solution->multipliers;
        }
    }
    return out;
}

inline std::vector<RegionPoint> rate_energy_region(const SweepSpec& spec) {
    if (spec.variable != SweepVariable::RequiredPower)
        throw DomainError("rate_energy_region: sweep variable must be the required power");
    return sweep(spec);
}

/// Capacity-versus-power row: the EH-constrained point plus its baselines.
struct ApPoint {
    double sigma_x2 = 0.0;
    RegionPoint point;
    double shannon = std::numeric_limits<double>::quiet_NaN();
    double smith = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<int, double>> ask;  // (M, rate); NaN when infeasible
};

inline std::vector<ApPoint> capacity_vs_ap(const SweepSpec& spec) {
    if (spec.variable != SweepVariable::AveragePower)
        throw DomainError("capacity_vs_ap: sweep variable must be the average power");
    const auto points = sweep(spec);
    std::vector<ApPoint> out(points.size());
    detail::parallel_for(out.size(), [&](std::size_t i) {
        ApPoint& r = out[i];
        r.sigma_x2 = spec.values[i];
        r.point = points[i];
        ProblemSpec s = detail::with_value(spec, spec.values[i]);
        if (spec.shannon)
            r.shannon = channel::shannon_capacity(s.sigma_x2, s.channel.h_i(), s.channel.sigma_n2);
        if (spec.smith) {
            ProblemSpec free = s;
            free.set_e_req(1.0);
            try {
                r.smith = solver::dual_solve(free, spec.tol).rate;
            } catch (const Error&) {
            }
        }
        for (int m : spec.ask_sizes) {
            double rate = std::numeric_limits<double>::quiet_NaN();
            try {
                rate = solver::ask_rate(s, m, spec.tol).rate;
            } catch (const Error&) {
            }
            r.ask.emplace_back(m, rate);
        }
    });
    return out;
}

inline constexpr const char* csv_header =
    "p_req_w,e_req,rate_bits,p_out_w,lambda1,lambda2,n_mass_points,status,solve_seconds";

namespace detail {

inline std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

inline std::string row(const RegionPoint& p) {
    const bool solved = p.status == PointStatus::Solved;
    std::string r = fmt(p.p_req) + "," + fmt(p.e_req) + ",";
    r += (solved ? fmt(p.rate) : "") + ",";
    r += (solved ? fmt(p.p_out) : "") + ",";
    r += (solved ? fmt(p.lambda1) : "") + ",";
    r += (solved ? fmt(p.lambda2) : "") + ",";
    r += (solved ? std::to_string(p.n_mass_points) : "") + ",";
    r += std::string(to_string(p.status)) + ",";
    if (p.solve_seconds) r += fmt(*p.solve_seconds);
    return r;
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_number(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DomainError("CSV: bad number '" + s + "'");
    return v;
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace detail

inline std::string to_csv(const std::vector<RegionPoint>& points) {
    std::string out = std::string(csv_header) + "\n";
    for (const auto& p : points) out += detail::row(p) + "\n";
    return out;
}

inline void emit_csv(const std::vector<RegionPoint>& points, const std::string& path) {
    if (points.empty()) throw DomainError("emit_csv: no points");
    detail::write_file(path, to_csv(points));
}

/// Inverse of to_csv for the numeric fields and status.
inline std::vector<RegionPoint> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw DomainError("CSV: unexpected header");
    std::vector<RegionPoint> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = detail::split(line);
        if (c.size() != 9) throw DomainError("CSV: expected 9 fields, got " + std::to_string(c.size()));
        RegionPoint p;
        p.p_req = detail::parse_number(c[0]);
        p.e_req = detail::parse_number(c[1]);
        p.rate = detail::parse_number(c[2]);
        p.p_out = detail::parse_number(c[3]);
        p.lambda1 = detail::parse_number(c[4]);
        p.lambda2 = detail::parse_number(c[5]);
        p.n_mass_points = c[6].empty() ? 0 : static_cast<std::size_t>(std::stoul(c[6]));
        p.status = parse_status(c[7]);
        if (!c[8].empty()) p.solve_seconds = detail::parse_number(c[8]);
        out.push_back(std::move(p));
    }
    return out;
}

inline std::string ap_csv_header(const std::vector<int>& ask_sizes) {
    std::string h = "sigma_x2_w," + std::string(csv_header) + ",shannon_bits,smith_bits";
    for (int m : ask_sizes) h += ",ask" + std::to_string(m) + "_bits";
    return h;
}

inline std::string to_csv(const std::vector<ApPoint>& rows, const std::vector<int>& ask_sizes) {
    std::string out = ap_csv_header(ask_sizes) + "\n";
    for (const auto& r : rows) {
        out += detail::fmt(r.sigma_x2) + "," + detail::row(r.point) + "," + detail::fmt(r.shannon) + "," +
               detail::fmt(r.smith);
        for (const auto& [m, rate] : r.ask) out += "," + detail::fmt(rate);
        out += "\n";
    }
    return out;
}

inline void emit_csv(const std::vector<ApPoint>& rows, const std::vector<int>& ask_sizes,
                     const std::string& path) {
    if (rows.empty()) throw DomainError("emit_csv: no points");
    detail::write_file(path, to_csv(rows, ask_sizes));
}

}  // namespace region
}  // namespace swipt

#endif  // SWIPT_REGION_HPP
