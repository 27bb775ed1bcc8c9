#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "swipt/scenario.hpp"

using namespace swipt;

namespace {

std::string error_of(const std::string& text) {
    try {
        scenario::parse(text);
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Scenario, ReferenceFileMatchesDefaults) {
    const Scenario file = scenario::load(std::string(SWIPT_SOURCE_DIR) + "/scenarios/section4.json");
    const Scenario empty = scenario::parse("{}");
    const ProblemSpec a = file.problem(), b = empty.problem();
    EXPECT_DOUBLE_EQ(a.a, b.a);
    EXPECT_DOUBLE_EQ(a.sigma_x2, b.sigma_x2);
    EXPECT_DOUBLE_EQ(a.log_e_req, b.log_e_req);
    EXPECT_DOUBLE_EQ(a.circuit.b(), b.circuit.b());
    EXPECT_DOUBLE_EQ(a.circuit.r_l, b.circuit.r_l);
    EXPECT_DOUBLE_EQ(a.circuit.i_s, b.circuit.i_s);
    EXPECT_DOUBLE_EQ(a.channel.h_i(), b.channel.h_i());
    EXPECT_DOUBLE_EQ(a.channel.h_e(), b.channel.h_e());
    EXPECT_DOUBLE_EQ(a.channel.sigma_n2, b.channel.sigma_n2);
    EXPECT_EQ(a.grid_points, b.grid_points);
    EXPECT_EQ(file.output_directory, "out/section4");

    EXPECT_DOUBLE_EQ(b.a, 13.0);
    EXPECT_DOUBLE_EQ(b.sigma_x2, 20.0);
    EXPECT_NEAR(b.e_req, 102.17, 0.01);
}

TEST(Scenario, UnitConversions) {
    const Scenario s = scenario::parse(R"({
        "circuit": {"i_s_ua": 50, "v_t_mv": 26, "r_l_kohm": 2},
        "channel": {"f_c_ghz": 1, "sigma_n2_dbm": -70, "h_e": 0.01},
        "problem": {"p_req_uw": 1.5}
    })");
    EXPECT_DOUBLE_EQ(s.circuit.i_s, 50e-6);
    EXPECT_DOUBLE_EQ(s.circuit.v_t, 26e-3);
    EXPECT_DOUBLE_EQ(s.circuit.r_l, 2e3);
    EXPECT_DOUBLE_EQ(s.channel.f_c, 1e9);
    EXPECT_NEAR(s.channel.sigma_n2, 1e-10, 1e-24);
    EXPECT_EQ(s.channel.h_e(), 0.01);
    EXPECT_DOUBLE_EQ(s.required_power(), 1.5e-6);
    EXPECT_DOUBLE_EQ(scenario::dbm_to_watts(30.0), 1.0);
}

TEST(Scenario, UnknownKeyReportsLine) {
    const std::string msg = error_of("{\n  \"problem\": {\n    \"a_v\": 13,\n    \"sigma_x2_watts\": 20\n  }\n}");
    EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("problem.sigma_x2_watts"), std::string::npos) << msg;
    EXPECT_NE(error_of(R"({"extra": 1})").find("unknown key 'extra'"), std::string::npos);
}

TEST(Scenario, MalformedJsonReportsLine) {
    const std::string msg = error_of("{\n  \"problem\": {\n    \"a_v\": ,\n  }\n}");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("malformed"), std::string::npos) << msg;
}

TEST(Scenario, PeakForms) {
    EXPECT_FALSE(error_of(R"({"problem": {"a_v": 13, "a_t_v": 1, "a_r_v": 2}})").empty());
    EXPECT_FALSE(error_of(R"({"problem": {"a_t_v": 1}})").empty());
    EXPECT_FALSE(error_of(R"({"problem": {"a_v": -1}})").empty());
    EXPECT_FALSE(error_of(R"({"problem": {"a_v_list": [13, 7]}})").empty());

    const Scenario split = scenario::parse(R"({"channel": {"h_e": 0.5}, "problem": {"a_t_v": 10, "a_r_v": 2}})");
    EXPECT_DOUBLE_EQ(split.peak(), 2.0 / (std::sqrt(2.0) * 0.5));
    const Scenario tx = scenario::parse(R"({"channel": {"h_e": 0.5}, "problem": {"a_t_v": 1, "a_r_v": 200}})");
    EXPECT_DOUBLE_EQ(tx.peak(), 1.0);
}

TEST(Scenario, TypeAndRangeErrors) {
    EXPECT_FALSE(error_of(R"({"solver": {"grid_points": 200}})").empty());
    EXPECT_FALSE(error_of(R"({"solver": {"grid_points": 20.5}})").empty());
    EXPECT_FALSE(error_of(R"({"problem": {"sigma_x2_w": "big"}})").empty());
    EXPECT_FALSE(error_of(R"({"problem": {"p_req_uw": -1}})").empty());
    EXPECT_FALSE(error_of(R"({"problem": {"p_req_uw": 1, "p_req_uw_list": [1, 2]}})").empty());
    EXPECT_FALSE(error_of(R"({"region": {"ask_sizes": [1, 2]}})").empty());
    EXPECT_FALSE(error_of(R"({"solver": {"tolerances": {"gap": 1e-5}}})").empty());
    EXPECT_THROW(scenario::load("/nonexistent/scenario.json"), ScenarioError);
}

TEST(Scenario, ListsAndSolverSettings) {
    const Scenario s = scenario::parse(R"({
        "problem": {"a_v_list": [7, 13], "sigma_x2_w_list": [10, 20], "p_req_uw_list": [0, 1, 2]},
        "solver": {"grid_points": 101, "tolerances": {"gap_bits": 1e-6, "max_inner": 50}},
        "region": {"points": 8, "ask_sizes": [2, 16]}
    })");
    EXPECT_EQ(s.a_list, (std::vector<double>{7, 13}));
    EXPECT_EQ(s.sigma_x2_list, (std::vector<double>{10, 20}));
    ASSERT_EQ(s.p_req_list.size(), 3u);
    EXPECT_DOUBLE_EQ(s.p_req_list[2], 2e-6);
    EXPECT_EQ(s.grid_points, 101);
    EXPECT_DOUBLE_EQ(s.tol.gap, 1e-6);
    EXPECT_EQ(s.tol.max_inner, 50);
    EXPECT_EQ(s.region_points, 8);
    EXPECT_EQ(s.ask_sizes, (std::vector<int>{2, 16}));
    EXPECT_DOUBLE_EQ(s.problem(7.0).a, 7.0);
}
