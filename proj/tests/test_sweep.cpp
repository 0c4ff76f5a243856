#include "arobust/errors.hpp"
#include "arobust/sweep.hpp"
#include "arobust/verification.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace arobust;

namespace {

Config small_config() {
    Config c;
    c.numerics.time_steps = 100;
    return c;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST(Sweep, InvalidPointIsReportedNotDropped) {
    SweepSpec spec;
    spec.param = "eta";
    spec.values = {0.3, 0.05, 0.2};
    spec.quantity = Quantity::PiQ0;
    const auto res = run_sweep(small_config(), spec);
    ASSERT_EQ(res.rows.size(), 3u);
    EXPECT_EQ(res.rows[0].value, 0.05);
    EXPECT_EQ(res.rows[0].status, "skipped:eta<=theta");
    EXPECT_TRUE(std::isnan(res.rows[0].quantity));
    EXPECT_EQ(res.rows[1].status, "ok");
    EXPECT_EQ(res.rows[2].status, "ok");

    std::ostringstream out;
    write_sweep_csv(out, res);
    const auto rows = lines(out.str());
    EXPECT_EQ(rows[0], "eta,pi_q0,status");
    EXPECT_EQ(rows[1], "0.050000000000000003,nan,skipped:eta<=theta");
}

TEST(Sweep, NumericalFailureIsSkipped) {
    SweepSpec spec;
    spec.param = "hP";
    spec.values = {0.0, 0.002};
    spec.quantity = Quantity::PiP0;
    const auto res = run_sweep(small_config(), spec);
    EXPECT_EQ(res.rows[0].status, "skipped:numerical");
    EXPECT_EQ(res.rows[1].status, "ok");
}

TEST(Sweep, SpecValidation) {
    EXPECT_THROW(SweepSpec::linear("alpha", 0.5, 1.0, 1, Quantity::PiQ0), ValidationError);
    auto bad = SweepSpec::linear("nonsense", 0.0, 1.0, 3, Quantity::PiQ0);
    EXPECT_THROW(run_sweep(small_config(), bad), ValidationError);
    EXPECT_THROW(parse_quantity("pi_x"), ValidationError);
    EXPECT_EQ(parse_quantity("B0_0"), Quantity::B0_0);
    EXPECT_EQ(quantity_name(Quantity::PiS0), "pi_s0");
    const auto lin = SweepSpec::linear("alpha", 0.5, 1.0, 6, Quantity::PiQ0);
    EXPECT_EQ(lin.values.front(), 0.5);
    EXPECT_EQ(lin.values.back(), 1.0);
    EXPECT_NEAR(lin.values[1], 0.6, 1e-15);
}

TEST(Sweep, DescendingRangeComesOutSorted) {
    const auto spec = SweepSpec::linear("gamma", 2.0, 0.5, 4, Quantity::PiQ0);
    const auto res = run_sweep(small_config(), spec);
    for (std::size_t i = 1; i < res.rows.size(); ++i) EXPECT_LT(res.rows[i - 1].value, res.rows[i].value);
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
    const auto spec = SweepSpec::linear("beta3", 0.01, 0.5, 7, Quantity::B0_0);
    std::ostringstream a;
    std::ostringstream b;
    write_sweep_csv(a, run_sweep(small_config(), spec, 1));
    write_sweep_csv(b, run_sweep(small_config(), spec, 3));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, TimeAxisAndOverride) {
    auto spec = SweepSpec::linear("t", 0.0, 10.0, 5, Quantity::PiS0);
    const auto res = run_sweep(small_config(), spec);
    const ModelParams p;
    for (const auto& row : res.rows) EXPECT_NEAR(row.quantity, pi_s_star(row.value, p), 1e-14);

    auto at_five = SweepSpec::linear("mu", 0.08, 0.12, 2, Quantity::PiS0, 5.0);
    auto r2 = run_sweep(small_config(), at_five);
    ModelParams q;
    q.mu = 0.12;
    EXPECT_NEAR(r2.rows[1].quantity, pi_s_star(5.0, q), 1e-14);

    spec.t = 1.0;
    EXPECT_THROW(run_sweep(small_config(), spec), ValidationError);
}

TEST(SolutionCsv, LayoutAndColumns) {
    const auto cfg = small_config();
    const auto sol = solve_config(cfg);
    std::ostringstream out;
    write_solution_csv(out, sol);
    const auto rows = lines(out.str());
    ASSERT_EQ(rows.size(), 102u);
    EXPECT_EQ(rows[0], "t,pi_q,pi_s,pi_p,B1,B0,b1_lo,b1_hi,b0_lo,b0_hi");
    EXPECT_EQ(rows.back().substr(0, 3), "10,");
    EXPECT_NE(rows.back().find(",36,0,0,0,0,0,0"), std::string::npos) << rows.back();

    std::ostringstream again;
    write_solution_csv(again, solve_config(cfg));
    EXPECT_EQ(out.str(), again.str());
}

TEST(Monotone, DetectsViolations) {
    SweepResult r;
    r.param = "x";
    r.rows = {{0.0, 1.0, "ok"}, {1.0, 2.0, "ok"}, {2.0, 1.5, "ok"}};
    EXPECT_FALSE(check_monotone(r, +1, true, "up").pass);
    r.rows[2].quantity = 2.0;
    EXPECT_FALSE(check_monotone(r, +1, true, "up").pass);
    EXPECT_TRUE(check_monotone(r, +1, false, "up").pass);
    r.rows[2].status = "skipped:numerical";
    EXPECT_FALSE(check_monotone(r, +1, false, "up").pass);
}

TEST(Verification, ZeroAmbiguityHasNegligibleDistortion) {
    Config cfg = small_config();
    cfg.model.beta1 = cfg.model.beta2 = cfg.model.beta3 = 1e-8;
    const auto m = build_measure(cfg.claims, 64);
    const auto sol = solve_equilibrium(cfg.model, m, cfg.numerics);
    EXPECT_LT(max_abs_distortion(sol, cfg.model, m), 1e-6);
}

TEST(Verification, TooFewPathsAborts) {
    Config cfg = small_config();
    cfg.numerics.mc_paths = 99;
    std::ostringstream log;
    try {
        run_verification(cfg, log);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "paths-too-few");
        EXPECT_NE(std::string(e.what()).find("paths too few"), std::string::npos);
    }
}

TEST(Verification, DeterministicChecksPassWithoutSimulation) {
    std::ostringstream log;
    VerifyOptions opt;
    opt.monte_carlo = false;
    const auto rep = run_verification(small_config(), log, opt);
    EXPECT_TRUE(rep.passed()) << log.str();
    EXPECT_GT(rep.checks.size(), 10u);
}
