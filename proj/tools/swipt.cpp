// Command-line front end.
//
// Exit codes: 0 success, 1 scenario or usage error, 2 certificate failure or
// non-convergence, 3 infeasible problem.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "swipt/swipt.hpp"

namespace {

using nlohmann::json;
using namespace swipt;

enum Exit { ok = 0, usage = 1, uncertified = 2, infeasible = 3 };

struct Flags {
    std::optional<int> grid;
    std::optional<std::string> out;
    bool cold_start = false;
    bool timing = false;
};

Scenario load_scenario(const std::string& path, const Flags& f) {
    Scenario s = scenario::load(path);
    if (f.grid) {
        if (*f.grid < 3 || *f.grid % 2 == 0) throw ScenarioError("--grid must be odd and >= 3");
        s.grid_points = *f.grid;
    }
    if (f.out) s.output_directory = *f.out;
    return s;
}

std::filesystem::path output_dir(const Scenario& s) {
    std::filesystem::path d(s.output_directory);
    std::filesystem::create_directories(d);
    return d;
}

void write_json(const std::filesystem::path& p, const json& j) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot open '" + p.string() + "' for writing");
    f << j.dump(2) << "\n";
}

json to_json(const KktReport& r) {
    return {{"pass", r.pass},
            {"max_violation_bits", r.max_violation},
            {"max_support_residual_bits", r.max_support_residual},
            {"worst_probe_amplitude_v", r.worst_probe_amplitude},
            {"slackness_ap_bits", r.slackness.first},
            {"slackness_eh_bits", r.slackness.second},
            {"recomputed_rate_bits", r.recomputed_rate},
            {"tol_bits", r.tol},
            {"slack_tol", r.slack_tol},
            {"note", r.note}};
}

json to_json(const Solution& s, const ProblemSpec& spec, double p_req) {
    json pts = json::array();
    for (const auto& m : s.mass_points) pts.push_back({{"amplitude_v", m.amplitude}, {"probability", m.probability}});
    return {{"problem",
             {{"a_v", spec.a},
              {"sigma_x2_w", spec.sigma_x2},
              {"p_req_w", p_req},
              {"e_req", spec.e_req},
              {"h_i", spec.channel.h_i()},
              {"h_e", spec.channel.h_e()},
              {"grid_points", spec.grid_points}}},
            {"rate_bits", s.rate},
            {"lambda1_bits_per_w", s.multipliers.lambda1},
            {"lambda2_bits", s.multipliers.lambda2},
            {"achieved_ap_w", s.achieved_ap},
            {"achieved_metric", s.achieved_metric},
            {"p_out_w", s.p_out},
            {"dual_gap_bits", s.dual_gap},
            {"kkt_residual_bits", s.kkt_residual},
            {"iterations", s.iterations},
            {"at_ceiling", s.at_ceiling},
            {"mass_points", pts},
            {"distribution", {{"amplitudes_v", s.distribution.amplitudes}, {"masses", s.distribution.masses}}}};
}

void print_report(const Solution& s, const KktReport& r) {
    std::printf("rate            %.9f bits\n", s.rate);
    std::printf("lambda1         %.6e bits/W\n", s.multipliers.lambda1);
    std::printf("lambda2         %.6e bits\n", s.multipliers.lambda2);
    std::printf("E[X^2]          %.6e W\n", s.achieved_ap);
    std::printf("EH metric       %.12f\n", s.achieved_metric);
    std::printf("p_out           %.6e W\n", s.p_out);
    std::printf("dual gap        %.3e bits\n", s.dual_gap);
    std::printf("mass points     %zu\n", s.mass_points.size());
    for (const auto& m : s.mass_points) std::printf("  x = %+.6f V  p = %.6e\n", m.amplitude, m.probability);
    std::printf("certificate     %s (violation %.3e, support %.3e, slack %.1e / %.1e)\n", r.pass ? "pass" : "FAIL",
                r.max_violation, r.max_support_residual, r.slackness.first, r.slackness.second);
    if (!r.note.empty()) std::printf("  %s\n", r.note.c_str());
}

int cmd_solve(const std::string& file, const Flags& f) {
    const Scenario sc = load_scenario(file, f);
    const ProblemSpec spec = sc.problem();
    const auto t0 = std::chrono::steady_clock::now();
    Solution s;
    try {
        s = solver::dual_solve(spec, sc.tol);
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return infeasible;
    } catch (const NonConvergentError& e) {
        std::fprintf(stderr, "not converged: %s\n", e.what());
        return uncertified;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const KktReport r = certificate::kkt_check(s, spec);
    const auto dir = output_dir(sc);
    json sol = to_json(s, spec, sc.required_power());
    if (f.timing) sol["solve_seconds"] = seconds;
    write_json(dir / "solution.json", sol);
    write_json(dir / "certificate.json", to_json(r));
    print_report(s, r);
    return r.pass ? ok : uncertified;
}

std::string a_label(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
}

int cmd_region(const std::string& file, const Flags& f) {
    const Scenario sc = load_scenario(file, f);
    std::vector<double> peaks = sc.a_list;
    if (peaks.empty()) peaks.push_back(sc.peak());

    // One p_req list shared by every peak value so rows line up; the default
    // reaches towards the ceiling of the smallest peak.
    std::vector<double> p_list = sc.p_req_list;
    if (p_list.empty()) p_list = region::default_p_req_sweep(sc.problem(peaks.front()), sc.region_points);

    const auto dir = output_dir(sc);
    json meta = json::array();
    bool all_certified = true, any_solved = false;
    for (double a : peaks) {
        SweepSpec sw;
        sw.base = sc.problem(a);
        sw.values = p_list;
        sw.cold_start = f.cold_start;
        sw.record_time = f.timing;
        sw.tol = sc.tol;
        const auto points = region::rate_energy_region(sw);
        const std::string name = peaks.size() == 1 ? "region.csv" : "region_a" + a_label(a) + ".csv";
        region::emit_csv(points, (dir / name).string());

        json certs = json::array();
        for (const auto& p : points) {
            if (p.status == PointStatus::Failed) all_certified = false;
            if (!p.solution) {
                certs.push_back({{"p_req_w", p.p_req}, {"status", to_string(p.status)}, {"message", p.message}});
                continue;
            }
            any_solved = true;
            ProblemSpec spec = sw.base;
            spec.set_required_power(p.p_req);
            const KktReport r = certificate::kkt_check(*p.solution, spec);
            all_certified = all_certified && r.pass;
            json c = to_json(r);
            c["p_req_w"] = p.p_req;
            c["status"] = to_string(p.status);
            certs.push_back(c);
        }
        meta.push_back({{"a_v", a},
                        {"csv", name},
                        {"p_lim_w", region::p_lim(sw.base)},
                        {"p_ceiling_w", region::p_ceiling(sw.base)},
                        {"certificates", certs}});
        std::printf("%s: %zu points, p_lim %.6e W, p_ceiling %.6e W\n", name.c_str(), points.size(),
                    region::p_lim(sw.base), region::p_ceiling(sw.base));
    }
    write_json(dir / "region_meta.json", meta);
    if (!any_solved) return infeasible;
    return all_certified ? ok : uncertified;
}

int cmd_sweep_ap(const std::string& file, const Flags& f) {
    const Scenario sc = load_scenario(file, f);
    SweepSpec sw;
    sw.base = sc.problem();
    sw.variable = SweepVariable::AveragePower;
    sw.values = sc.sigma_x2_list.empty() ? std::vector<double>{sc.sigma_x2} : sc.sigma_x2_list;
    sw.p_req = sc.required_power();
    sw.ask_sizes = sc.ask_sizes;
    sw.cold_start = f.cold_start;
    sw.record_time = f.timing;
    sw.tol = sc.tol;
    const auto rows = region::capacity_vs_ap(sw);
    const auto dir = output_dir(sc);
    region::emit_csv(rows, sc.ask_sizes, (dir / "capacity_vs_ap.csv").string());
    bool any_solved = false, any_failed = false;
    for (const auto& r : rows) {
        any_solved = any_solved || r.point.status == PointStatus::Solved;
        any_failed = any_failed || r.point.status == PointStatus::Failed;
        std::printf("sigma_x2 %-10g %-10s rate %s\n", r.sigma_x2, to_string(r.point.status),
                    r.point.status == PointStatus::Solved ? std::to_string(r.point.rate).c_str() : "-");
    }
    if (!any_solved) return infeasible;
    return any_failed ? uncertified : ok;
}

int cmd_verify(bool tight, double fault) {
    verify::Options opt;
    opt.tight = tight;
    opt.bessel_fault = fault;
    bool all = true;
    for (const auto& r : verify::run_all(opt)) {
        std::printf("%-24s %s  error %.3e  tol %.1e\n", r.name.c_str(), r.pass ? "pass" : "FAIL", r.error, r.tol);
        all = all && r.pass;
    }
    return all ? ok : uncertified;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity and rate-energy region of an AWGN SWIPT link with a nonlinear rectenna"};
    app.require_subcommand(1);

    Flags flags;
    std::string file;
    bool tight = false;
    double fault = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", file, "scenario file (JSON)")->required();
        sub->add_option("--grid", flags.grid, "amplitude grid points (odd)");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_flag("--cold-start", flags.cold_start, "solve sweep points independently");
        sub->add_flag("--timing", flags.timing, "record wall-clock solve times");
    };
    auto* solve = app.add_subcommand("solve", "solve one scenario and certify the result");
    add_common(solve);
    auto* region = app.add_subcommand("region", "rate-energy region over required power");
    add_common(region);
    auto* sweep_ap = app.add_subcommand("sweep-ap", "capacity versus average-power budget");
    add_common(sweep_ap);
    auto* verify = app.add_subcommand("verify", "run the built-in oracle suite");
    verify->add_flag("--tight", tight, "tighten every oracle tolerance tenfold");
    verify->add_option("--inject-bessel-fault", fault, "relative error added to I0 (self-test)")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*solve) return cmd_solve(file, flags);
        if (*region) return cmd_region(file, flags);
        if (*sweep_ap) return cmd_sweep_ap(file, flags);
        if (*verify) return cmd_verify(tight, fault);
    } catch (const ScenarioError& e) {
        std::fprintf(stderr, "scenario error: %s\n", e.what());
        return usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return uncertified;
    }
    return usage;
}
