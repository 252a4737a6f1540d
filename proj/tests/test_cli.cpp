#include "tracegrowth/config.hpp"
#include "tracegrowth/error.hpp"
#include "tracegrowth/expr.hpp"
#include "tracegrowth/report.hpp"
#include "tracegrowth/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tracegrowth;
using namespace tracegrowth::cli;

namespace {

template <class F>
void expect_code(ErrorCode code, F&& f) {
    try {
        f();
        ADD_FAILURE() << "no exception";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

double eval(const std::string& text, std::vector<double> at = {}) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < at.size(); ++i) names.push_back("u" + std::to_string(i + 1));
    return expr::Expression::parse(text, names)(at);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Expr, Precedence) {
    EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
    EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
    EXPECT_DOUBLE_EQ(eval("-2^2"), -4.0);
    EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
    EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
    EXPECT_DOUBLE_EQ(eval("2 - -3"), 5.0);
}

TEST(Expr, FunctionsAndVariables) {
    EXPECT_NEAR(eval("sin(pi/6) + cos(0)"), 1.5, 1e-15);
    EXPECT_NEAR(eval("exp(log(3))"), 3.0, 1e-14);
    EXPECT_NEAR(eval("u1^2 + sqrt(u2)", {3.0, 16.0}), 13.0, 1e-14);
    EXPECT_NEAR(eval("cosh(u1)^2 - sinh(u1)^2", {0.7}), 1.0, 1e-14);
    EXPECT_NEAR(eval("abs(-2) * tanh(0)"), 0.0, 0.0);
    auto e = expr::Expression::parse("u2 * 2", {"u1", "u2"});
    EXPECT_TRUE(e.uses("u2"));
    EXPECT_FALSE(e.uses("u1"));
}

TEST(Expr, Errors) {
    expect_code(ErrorCode::InvalidConfig, [] { eval("1 +"); });
    expect_code(ErrorCode::InvalidConfig, [] { eval("foo(1)"); });
    expect_code(ErrorCode::InvalidConfig, [] { eval("u3", {1.0}); });
    expect_code(ErrorCode::InvalidConfig, [] { eval("(1"); });
}

TEST(Config, SectionsFlatten) {
    const Config c = Config::from_string("scenario = plane\n[run]\nmu_max = 2.5\n; note\n[checks]\nlist = a, b ,c\n");
    EXPECT_EQ(c.get("scenario"), "plane");
    EXPECT_DOUBLE_EQ(c.number("run.mu_max"), 2.5);
    EXPECT_EQ(c.list("checks.list"), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(c.integer("run.resolution", 77), 77);
    EXPECT_TRUE(c.unused().empty());
}

TEST(Config, ErrorsNameTheKey) {
    const Config c = Config::from_string("[run]\nmu_max = abc\n");
    try {
        c.number("run.mu_max");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
        EXPECT_NE(std::string(e.what()).find("run.mu_max"), std::string::npos);
    }
    try {
        c.get("chart.name");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("chart.name"), std::string::npos);
    }
}

TEST(Config, HashIsOrderIndependentAndValueSensitive) {
    const Config a = Config::from_string("[x]\na = 1\nb = 2\n");
    const Config b = Config::from_string("[x]\nb = 2\na = 1\n");
    const Config c = Config::from_string("[x]\na = 1\nb = 3\n");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, UnusedKeysRejected) {
    Config c = builtin_scenario("graph_foliation");
    c.set("chart.typo", "1");
    expect_code(ErrorCode::InvalidConfig, [&] { run_scenario(c); });
}

TEST(Config, BadValuesRejectedBeforeWork) {
    Config c;
    c.set("scenario", "catenoid");
    c.set("checks.theorems", "no_such_theorem");
    expect_code(ErrorCode::InvalidConfig, [&] { run_scenario(c); });
    Config d;
    d.set("scenario", "nope");
    expect_code(ErrorCode::InvalidConfig, [&] { run_scenario(d); });
    Config e;
    e.set("scenario", "plane");
    e.set("field.preset", "wobbly");
    expect_code(ErrorCode::InvalidConfig, [&] { run_scenario(e); });
}

TEST(Scenario, BuiltinsResolve) {
    const auto names = builtin_scenarios();
    for (const char* n : {"plane", "cylinder_newton", "catenoid", "helicoid", "h2_totally_geodesic", "h2_lambda_exp",
                          "plane_foliation", "graph_foliation"}) {
        EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
        const Config c = builtin_scenario(n);
        const auto chart = build_chart(c);
        EXPECT_NO_THROW(build_field(c, chart)) << n;
        EXPECT_NO_THROW(build_profile(c)) << n;
    }
}

TEST(Scenario, UserKeysOverridePresets) {
    Config user;
    user.set("scenario", "catenoid");
    user.set("run.mu_max", "3");
    const Config merged = resolve(user);
    EXPECT_DOUBLE_EQ(merged.number("run.mu_max"), 3.0);
    EXPECT_EQ(merged.get("chart.name"), "catenoid");
}

TEST(Scenario, EmptyTheoremListGivesOnlyIdentities) {
    Config c;
    c.set("chart.name", "catenoid");
    c.set("checks.identities", "flat_radial, newton_divergence");
    const Report r = run_scenario(c);
    ASSERT_EQ(r.checks.size(), 2u);
    for (const auto& k : r.checks) EXPECT_EQ(k.name.rfind("identity.", 0), 0u) << k.name;
    EXPECT_TRUE(r.all_passed());
    EXPECT_TRUE(r.curves.empty());
}

TEST(Scenario, CustomChartMatchesBuiltinPlane) {
    Config c;
    c.set("chart.name", "custom");
    c.set("chart.ambient_dim", "3");
    c.set("chart.lower", "-6, -6");
    c.set("chart.upper", "6, 6");
    c.set("chart.base", "0, 0");
    c.set("chart.x1", "u1");
    c.set("chart.x2", "u2");
    c.set("chart.x3", "0");
    c.set("run.mu_max", "4");
    c.set("run.resolution", "64");
    c.set("checks.growth", "1");
    const Report r = run_scenario(c);
    const CheckResult* g = r.find("growth");
    ASSERT_NE(g, nullptr);
    // f = 2 * area for the identity field on a 2-plane
    EXPECT_NEAR(g->metric("f_at_mu_max") / (2.0 * M_PI * 16.0), 1.0, 0.05);
}

TEST(Scenario, MissingHypothesisReportedAsFailedTheorem) {
    // trace_bound needs the radial bound, which fails on the cylinder
    Config c = builtin_scenario("cylinder_newton");
    c.set("checks.theorems", "trace_bound");
    c.set("checks.identities", "");
    c.set("run.resolution", "64");
    c.set("run.mu_max", "4");
    const Report r = run_scenario(c);
    const CheckResult* t = r.find("theorem.trace_bound");
    ASSERT_NE(t, nullptr);
    EXPECT_FALSE(t->verdict);
    EXPECT_NE(t->detail.find("HypothesisViolated"), std::string::npos);
    const CheckResult* h = r.find("hypothesis.radial_bound");
    ASSERT_NE(h, nullptr);
    EXPECT_FALSE(h->verdict);
}

TEST(Scenario, DeterministicAndOverridable) {
    Config c = builtin_scenario("graph_foliation");
    RunOverrides o;
    o.resolution = 64;
    o.seed = 9;
    const std::string a = to_json_text(run_scenario(c, o));
    const std::string b = to_json_text(run_scenario(c, o));
    EXPECT_EQ(a, b);
    const Report r = run_scenario(c, o);
    EXPECT_EQ(r.resolution, 64);
    EXPECT_EQ(r.seed, 9u);
    EXPECT_NE(r.config_hash, run_scenario(c).config_hash);
}

TEST(Verify, SymopSuiteOnIdentity) {
    const std::vector<symop::SymOp> ops{symop::SymOp(Eigen::MatrixXd::Identity(4, 4))};
    for (const auto& c : symop_suite(ops)) {
        EXPECT_TRUE(c.verdict) << c.name;
        EXPECT_LE(c.metrics.front().value, 1e-15) << c.name;
    }
}

TEST(Verify, DeterministicJson) {
    VerifyOptions o;
    o.count = 100;
    o.semidefinite_count = 20;
    o.field_points = 5;
    o.seed = 3;
    const Report a = verify_identities(o);
    EXPECT_EQ(to_json_text(a), to_json_text(verify_identities(o)));
    EXPECT_TRUE(a.all_passed());
    o.seed = 4;
    EXPECT_NE(to_json_text(a), to_json_text(verify_identities(o)));
    o.dims = {1};
    expect_code(ErrorCode::InvalidConfig, [&] { verify_identities(o); });
}

TEST(Report, JsonRoundTrip) {
    Report r;
    r.kind = "scenario";
    r.scenario = "demo";
    r.config_hash = "0123456789abcdef";
    r.resolution = 64;
    r.mu_max = 2.5;
    r.seed = 7;
    r.checks.push_back({"a", true, {{"x", 1.25}, {"inf", INFINITY}}, "", 0.5});
    r.checks.push_back({"b", false, {}, "why not", 0.0});
    r.curve_files = {"demo_curve.csv"};
    const std::string text = to_json_text(r);
    const Report back = report_from_json_text(text);
    EXPECT_EQ(to_json_text(back), text);
    EXPECT_FALSE(back.all_passed());
    EXPECT_TRUE(std::isinf(back.find("a")->metric("inf")));
    EXPECT_EQ(back.find("b")->detail, "why not");
    EXPECT_EQ(text.find("runtime"), std::string::npos);
    expect_code(ErrorCode::InvalidConfig, [] { report_from_json_text("{not json"); });
}

TEST(Report, OutputsWritten) {
    const auto dir = std::filesystem::temp_directory_path() / "tracegrowth_cli_test";
    std::filesystem::remove_all(dir);
    Report r;
    r.kind = "scenario";
    r.scenario = "demo";
    CurveTable t;
    t.name = "curve";
    t.rows = {{0.0, 0.0, 1.0, 0.0, NAN, NAN}, {0.5, 1.5, 2.0, 1.0, 0.25, 0.75}};
    r.curves.push_back(t);
    write_outputs(r, dir.string(), "demo");
    ASSERT_EQ(r.curve_files, std::vector<std::string>{"demo_curve.csv"});
    const std::string csv = slurp(dir / "demo_curve.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "mu,f,F,G,bound,margin");
    EXPECT_NE(csv.find("0.5,1.5,2,1,0.25,0.75"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "demo.json"));
    EXPECT_NE(slurp(dir / "demo.txt").find("demo"), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(Profile, CurveColumns) {
    Config c;
    c.set("profile.curvature", "spherical");
    c.set("profile.c", "1");
    c.set("profile.t_max", "4");
    const Report r = run_profile(c);
    ASSERT_EQ(r.curves.size(), 1u);
    EXPECT_EQ(r.curves[0].columns, (std::vector<std::string>{"t", "h", "dh", "gap"}));
    for (const auto& row : r.curves[0].rows) EXPECT_NEAR(row[1], std::sin(row[0]), 1e-7);
    EXPECT_NEAR(r.checks[0].metric("r0"), M_PI, 1e-6);
}
