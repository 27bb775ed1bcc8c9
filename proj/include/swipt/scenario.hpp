#ifndef SWIPT_SCENARIO_HPP
#define SWIPT_SCENARIO_HPP

// Scenario files: JSON objects whose field names carry their units
// (sigma_n2_dbm, p_req_uw, ...). Values are converted to SI at parse time.
// Unknown keys are rejected with the line they appear on.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swipt/solver.hpp"

namespace swipt {

class ScenarioError : public Error {
public:
    using Error::Error;
};

struct Scenario {
    CircuitParams circuit;
    ChannelParams channel;
    std::optional<double> a;                     // V
    std::optional<double> a_t, a_r;              // V
    std::vector<double> a_list;                  // V, region dominance study
    double sigma_x2 = 20.0;                      // W
    std::vector<double> sigma_x2_list;           // W
    std::optional<double> p_req;                 // W
    std::vector<double> p_req_list;              // W
    int region_points = 20;
    std::vector<int> ask_sizes{2, 4, 8};
    int grid_points = 201;
    Tolerances tol;
    std::string output_directory = "out";

    /// Effective peak amplitude used by the solver.
    double peak() const {
        if (a_t && a_r) return ProblemSpec::effective_peak(*a_t, *a_r, channel.h_e());
        return a.value_or(13.0);
    }

    double required_power() const { return p_req.value_or(3e-6); }

    ProblemSpec problem(std::optional<double> peak_override = std::nullopt) const {
        ProblemSpec s;
        s.circuit = circuit;
        s.channel = channel;
        s.a = peak_override.value_or(peak());
        s.sigma_x2 = sigma_x2;
        s.grid_points = grid_points;
        s.set_required_power(required_power());
        return s;
    }
};

namespace scenario {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

namespace detail {

using json = nlohmann::json;

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first `"key"` followed by a colon at or after `from`.
inline std::size_t line_of_key(const std::string& text, const std::string& key, std::size_t from = 0) {
    const std::string quoted = "\"" + key + "\"";
    for (std::size_t pos = text.find(quoted, from); pos != std::string::npos; pos = text.find(quoted, pos + 1)) {
        std::size_t k = pos + quoted.size();
        while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
        if (k < text.size() && text[k] == ':') return line_of_offset(text, pos);
    }
    return 0;
}

class Reader {
public:
    Reader(const std::string& text, const json& obj, std::string path)
        : text_(text), obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) fail("expected an object", path_);
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) fail("field must be a number", key);
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail("field must be finite", key);
        return d;
    }

    int integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) fail("field must be an integer", key);
        return v.get<int>();
    }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) fail("field must be a string", key);
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = at(key);
        if (!v.is_array() || v.empty()) fail("field must be a non-empty array of numbers", key);
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail("array entries must be numbers", key);
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& key) {
        const json& v = at(key);
        if (!v.is_array()) fail("field must be an array of integers", key);
        std::vector<int> out;
        for (const auto& e : v) {
            if (!e.is_number_integer()) fail("array entries must be integers", key);
            out.push_back(e.get<int>());
        }
        return out;
    }

    Reader child(const std::string& key) {
        const json& v = at(key);
        if (!v.is_object()) fail("field must be an object", key);
        return Reader(text_, v, path_.empty() ? key : path_ + "." + key);
    }

    /// Rejects keys that were never read.
    void finish() const {
        for (const auto& [k, v] : obj_.items())
            if (!seen_.count(k)) fail("unknown key", k);
    }

    [[noreturn]] void fail(const std::string& what, const std::string& key) const {
        const std::string name = path_.empty() || key == path_ ? key : path_ + "." + key;
        const std::size_t line = line_of_key(text_, key);
        throw ScenarioError((line ? "line " + std::to_string(line) + ": " : std::string()) + what + " '" +
                            name + "'");
    }

private:
    const json& at(const std::string& key) {
        seen_.insert(key);
        return obj_.at(key);
    }

    const std::string& text_;
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class T>
void positive(Reader& r, const std::string& key, T value) {
    if (!(value > 0)) r.fail("field must be positive", key);
}

}  // namespace detail

/// Parses scenario text. Every field is optional; missing fields keep the
/// defaults of the reference scenario.
inline Scenario parse(const std::string& text) {
    using detail::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("line " + std::to_string(detail::line_of_offset(text, e.byte ? e.byte - 1 : 0)) +
                            ": malformed JSON (" + e.what() + ")");
    }
    Scenario s;
    detail::Reader top(text, root, "");

    if (top.has("circuit")) {
        auto r = top.child("circuit");
        if (r.has("r_ant_ohm")) detail::positive(r, "r_ant_ohm", s.circuit.r_ant = r.number("r_ant_ohm"));
        if (r.has("i_s_ua")) detail::positive(r, "i_s_ua", s.circuit.i_s = r.number("i_s_ua") * 1e-6);
        if (r.has("eta")) detail::positive(r, "eta", s.circuit.eta = r.number("eta"));
        if (r.has("v_t_mv")) detail::positive(r, "v_t_mv", s.circuit.v_t = r.number("v_t_mv") * 1e-3);
        if (r.has("r_l_kohm")) detail::positive(r, "r_l_kohm", s.circuit.r_l = r.number("r_l_kohm") * 1e3);
        r.finish();
    }
    if (top.has("channel")) {
        auto r = top.child("channel");
        if (r.has("f_c_ghz")) detail::positive(r, "f_c_ghz", s.channel.f_c = r.number("f_c_ghz") * 1e9);
        if (r.has("alpha")) detail::positive(r, "alpha", s.channel.alpha = r.number("alpha"));
        if (r.has("d_i_m")) detail::positive(r, "d_i_m", s.channel.d_i = r.number("d_i_m"));
        if (r.has("d_e_m")) detail::positive(r, "d_e_m", s.channel.d_e = r.number("d_e_m"));
        if (r.has("sigma_n2_dbm")) s.channel.sigma_n2 = dbm_to_watts(r.number("sigma_n2_dbm"));
        if (r.has("h_i")) detail::positive(r, "h_i", *(s.channel.h_i_override = r.number("h_i")));
        if (r.has("h_e")) detail::positive(r, "h_e", *(s.channel.h_e_override = r.number("h_e")));
        r.finish();
    }
    if (top.has("problem")) {
        auto r = top.child("problem");
        const int peak_forms = int(r.has("a_v")) + int(r.has("a_t_v") || r.has("a_r_v")) + int(r.has("a_v_list"));
        if (peak_forms > 1) r.fail("give only one of a_v, a_t_v/a_r_v, a_v_list", "problem");
        if (r.has("a_t_v") != r.has("a_r_v")) r.fail("a_t_v and a_r_v must be given together", "problem");
        if (r.has("a_v")) detail::positive(r, "a_v", *(s.a = r.number("a_v")));
        if (r.has("a_t_v")) {
            detail::positive(r, "a_t_v", *(s.a_t = r.number("a_t_v")));
            detail::positive(r, "a_r_v", *(s.a_r = r.number("a_r_v")));
        }
        if (r.has("a_v_list")) {
            s.a_list = r.numbers("a_v_list");
            for (double v : s.a_list) detail::positive(r, "a_v_list", v);
        }
        if (r.has("sigma_x2_w")) detail::positive(r, "sigma_x2_w", s.sigma_x2 = r.number("sigma_x2_w"));
        if (r.has("sigma_x2_w_list")) {
            s.sigma_x2_list = r.numbers("sigma_x2_w_list");
            for (double v : s.sigma_x2_list) detail::positive(r, "sigma_x2_w_list", v);
        }
        if (r.has("p_req_uw") && r.has("p_req_uw_list"))
            r.fail("give only one of p_req_uw, p_req_uw_list", "problem");
        if (r.has("p_req_uw")) {
            const double p = r.number("p_req_uw");
            if (p < 0.0) r.fail("field must be non-negative", "p_req_uw");
            s.p_req = p * 1e-6;
        }
        if (r.has("p_req_uw_list")) {
            for (double p : r.numbers("p_req_uw_list")) {
                if (p < 0.0) r.fail("entries must be non-negative", "p_req_uw_list");
                s.p_req_list.push_back(p * 1e-6);
            }
        }
        r.finish();
    }
    if (top.has("solver")) {
        auto r = top.child("solver");
        if (r.has("grid_points")) {
            s.grid_points = r.integer("grid_points");
            if (s.grid_points < 3 || s.grid_points % 2 == 0) r.fail("must be odd and >= 3", "grid_points");
        }
        if (r.has("tolerances")) {
            auto t = r.child("tolerances");
            if (t.has("gap_bits")) detail::positive(t, "gap_bits", s.tol.gap = t.number("gap_bits"));
            if (t.has("constraint")) detail::positive(t, "constraint", s.tol.constraint = t.number("constraint"));
            if (t.has("slack")) detail::positive(t, "slack", s.tol.slack = t.number("slack"));
            if (t.has("max_inner")) detail::positive(t, "max_inner", s.tol.max_inner = t.integer("max_inner"));
            if (t.has("max_dual")) detail::positive(t, "max_dual", s.tol.max_dual = t.integer("max_dual"));
            if (t.has("max_newton")) detail::positive(t, "max_newton", s.tol.max_newton = t.integer("max_newton"));
            if (t.has("truncation_bits"))
                detail::positive(t, "truncation_bits", s.tol.truncation = t.number("truncation_bits"));
            t.finish();
        }
        r.finish();
    }
    if (top.has("region")) {
        auto r = top.child("region");
        if (r.has("points")) detail::positive(r, "points", s.region_points = r.integer("points"));
        if (r.has("ask_sizes")) {
            s.ask_sizes = r.integers("ask_sizes");
            for (int m : s.ask_sizes)
                if (m < 2) r.fail("entries must be >= 2", "ask_sizes");
        }
        r.finish();
    }
    if (top.has("outputs")) {
        auto r = top.child("outputs");
        if (r.has("directory")) s.output_directory = r.string("directory");
        r.finish();
    }
    top.finish();

    auto increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1])) return false;
        return true;
    };
    if (!increasing(s.a_list)) throw ScenarioError("problem.a_v_list must be strictly increasing");
    if (!increasing(s.sigma_x2_list)) throw ScenarioError("problem.sigma_x2_w_list must be strictly increasing");
    if (!increasing(s.p_req_list)) throw ScenarioError("problem.p_req_uw_list must be strictly increasing");
    try {
        s.channel.validate();
        s.circuit.validate();
    } catch (const DomainError& e) {
        throw ScenarioError(e.what());
    }
    return s;
}

inline Scenario load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ScenarioError("cannot read scenario file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

}  // namespace scenario
}  // namespace swipt

#endif  // SWIPT_SCENARIO_HPP
