// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "arobust/config.hpp"
#include "arobust/errors.hpp"
#include "arobust/levy.hpp"
#include "arobust/simulator.hpp"
#include "arobust/solver.hpp"
#include "arobust/sweep.hpp"
#include "arobust/verification.hpp"

#include <boost/random/uniform_real_distribution.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace arobust;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << title << ": " << detail << std::endl;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct MonteCarloRuns {
    TerminalSample lo_post, hi_post, lo_pre, hi_pre;
    double seconds_post = 0.0;
    double seconds_pre = 0.0;
};

}  // namespace

int main() {
    const ModelParams p;
    const NumericsConfig num_cfg;
    const auto measure = build_measure(ClaimModelSpec{}, num_cfg.quad_nodes);
    const auto sol = solve_equilibrium(p, measure, num_cfg);
    const double m1 = measure.moment(1);
    const double m2 = measure.moment(2);

    // 1. small-beta3 limit of the reinsurance root
    {
        const auto t0 = Clock::now();
        ModelParams q = p;
        q.beta3 = 1e-8;
        double worst = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double t = q.T * i / 10.0;
            const double limit = q.eta * m1 * std::exp(-q.r * (q.T - t)) / (q.gamma * m2);
            worst = std::max(worst, std::fabs(solve_pi_q_star(t, q, measure) / limit - 1.0));
        }
        const double secs = seconds_since(t0);
        report(1, "small-beta3 reinsurance limit", worst <= 1e-4 && secs < 1.0,
               "max rel err " + num(worst) + " at 11 times (limit 1e-4), " + num(secs, 3) + " s (limit 1 s)");
    }

    // 2. root residual on the grid and a unique sign change
    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (Eigen::Index k = 0; k < sol.grid.size(); ++k) {
            const double t = sol.grid[k];
            const double scale = p.eta * std::exp(p.r * (p.T - t)) * m1;
            worst = std::max(worst, std::fabs(reinsurance_foc(t, sol.pi_q[k], p, measure)) / scale);
        }
        std::vector<int> changes;
        for (const double t : {0.0, 5.0, 10.0}) {
            const double top = 4.0 * interpolate(sol.grid, sol.pi_q, t);
            int n = 0;
            double prev = reinsurance_foc(t, 0.0, p, measure);
            for (int i = 1; i <= 10000; ++i) {
                const double f = reinsurance_foc(t, top * i / 10000.0, p, measure);
                if ((f > 0) != (prev > 0)) ++n;
                prev = f;
            }
            changes.push_back(n);
        }
        const double secs = seconds_since(t0);
        const bool unique = changes == std::vector<int>{1, 1, 1};
        report(2, "reinsurance root correctness", worst <= 1e-9 && unique && secs < 10.0,
               "max |F|/scale " + num(worst) + " over " + std::to_string(sol.grid.size()) +
                   " grid times (limit 1e-9), sign changes on 10^4-point scans at t=0,5,10: " +
                   std::to_string(changes[0]) + "," + std::to_string(changes[1]) + "," + std::to_string(changes[2]) +
                   ", " + num(secs, 3) + " s");
    }

    // 3. strategies from the post-default and pre-default branches coincide
    {
        const auto post = post_default_coeffs(p, measure, tabulate_strategy(p, measure, num_cfg));
        const auto pre = pre_default_system(p, measure, tabulate_strategy(p, measure, num_cfg));
        double worst = 0.0;
        for (Eigen::Index k = 0; k < post.grid.size(); ++k) {
            worst = std::max(worst, std::fabs(post.pi_q[k] - pre.pi_q[k]) / std::fabs(pre.pi_q[k]));
            worst = std::max(worst, std::fabs(post.pi_s[k] - pre.pi_s[k]) / std::fabs(pre.pi_s[k]));
        }
        report(3, "pre/post-default strategy identity", worst <= 2.3e-16,
               "max rel difference " + num(worst) + " over " + std::to_string(post.grid.size()) + " grid points");
    }

    // 4. terminal values by hand: pi_s(T) = [(mu-r) - sigma1 sigma2 rho (gamma + (2a-1) beta1)] / (sigma2^2 D)
    //    = (0.05 + 0.05 * 1.1) / (0.04 * 2) and pi_p(T) = (delta - zeta hP) / (gamma zeta^2 hP) = 0.009 / 0.00025
    {
        const double s_hand = (0.05 + 0.05 * 1.1) / (0.04 * 2.0);
        const double p_hand = 0.009 / 0.00025;
        const auto n = sol.grid.size() - 1;
        const double es = std::fabs(sol.pi_s[n] - s_hand);
        const double ep = std::fabs(sol.pi_p[n] - p_hand);
        report(4, "hand-evaluated terminal closed forms", es <= 1e-12 && ep <= 1e-12 && s_hand == 1.3125,
               "pi_s(T) = " + num(sol.pi_s[n], 17) + " vs 1.3125 (err " + num(es) + "), pi_p(T) = " +
                   num(sol.pi_p[n], 17) + " vs (delta - zeta hP)/(gamma zeta^2 hP) = 36 (err " + num(ep) +
                   "); limit 1e-12");
    }

    // 5. Monte Carlo robust value at (0, x0, h)
    const auto strat = sol.strategy();
    const auto dist = distortions(sol, p);
    MonteCarloRuns mc;
    {
        SimulationSettings sim;
        sim.n_paths = 200000;
        sim.dt = 1e-3;
        sim.seed = 42;
        sim.x0 = 1.0;
        auto t0 = Clock::now();
        sim.h0 = DefaultState::PostDefault;
        mc.lo_post = simulate_terminal(strat, &dist, Distortion::Lo, p, measure, sim);
        mc.hi_post = simulate_terminal(strat, &dist, Distortion::Hi, p, measure, sim);
        mc.seconds_post = seconds_since(t0);
        t0 = Clock::now();
        sim.h0 = DefaultState::PreDefault;
        mc.lo_pre = simulate_terminal(strat, &dist, Distortion::Lo, p, measure, sim);
        mc.hi_pre = simulate_terminal(strat, &dist, Distortion::Hi, p, measure, sim);
        mc.seconds_pre = seconds_since(t0);

        const double pen_lo = penalty_integral(dist, Distortion::Lo, 0.0, measure);
        const double pen_hi = penalty_integral(dist, Distortion::Hi, 0.0, measure);
        const double E0 = std::exp(p.r * p.T);
        std::string detail;
        bool pass = true;
        for (const bool post : {true, false}) {
            const auto jl = summarize_terminal(post ? mc.lo_post.wealth : mc.lo_pre.wealth, p.gamma, pen_lo, 1.0);
            const auto jh = summarize_terminal(post ? mc.hi_post.wealth : mc.hi_pre.wealth, p.gamma, pen_hi, -1.0);
            const double value = p.alpha * jl.j_value + p.alpha_hat() * jh.j_value;
            const double se = std::hypot(p.alpha * jl.std_error, p.alpha_hat() * jh.std_error);
            const double target = E0 * 1.0 + (post ? sol.coeffs.B1[0] : sol.coeffs.B0[0]);
            const double z = std::fabs(value - target) / se;
            const double secs = post ? mc.seconds_post : mc.seconds_pre;
            pass = pass && z <= 3.0 && secs < 120.0;
            detail += std::string(post ? "h=1: " : "; h=0: ") + num(value, 7) + " vs " + num(target, 7) +
                      " (|diff|/SE " + num(z, 3) + ", " + num(secs, 3) + " s)";
        }
        report(5, "Monte Carlo robust value", pass, detail + "; limits 3 SE and 120 s");
    }

    // 6. lo intercepts equal distorted terminal means
    {
        const double E0 = std::exp(p.r * p.T);
        std::string detail;
        bool pass = true;
        for (const bool post : {true, false}) {
            const auto est = summarize_terminal(post ? mc.lo_post.wealth : mc.lo_pre.wealth, p.gamma, 0.0, 0.0);
            const double target = E0 + (post ? sol.coeffs.b1_lo[0] : sol.coeffs.b0_lo[0]);
            const double z = std::fabs(est.mean - target) / est.mean_std_error;
            pass = pass && z <= 3.0;
            detail += std::string(post ? "post-default: " : "; pre-default: ") + num(est.mean, 7) + " vs " +
                      num(target, 7) + " (|diff|/SE " + num(z, 3) + ")";
        }
        report(6, "lo-measure intercept oracle", pass, detail + "; limit 3 SE");
    }

    // 7. distortion identities at random points
    {
        RandomStream rng(20240607);
        boost::random::uniform_real_distribution<double> ut(0.0, p.T);
        boost::random::uniform_real_distribution<double> uz(measure.support_lower(), measure.support_upper());
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double t = ut(rng);
            const double z = uz(rng);
            worst = std::max(worst, std::fabs(dist.phi1_hi(t) + dist.phi1_lo(t)));
            worst = std::max(worst, std::fabs(dist.phi2_hi(t) + dist.phi2_lo(t)));
            worst = std::max(worst, std::fabs((1.0 - dist.phi3_lo(t, z)) * (1.0 - dist.phi3_hi(t, z)) - 1.0));
        }
        report(7, "distortion identities", worst <= 1e-12,
               "max deviation " + num(worst) + " at 10^4 random (t, z) (limit 1e-12)");
    }

    // 8. directional suite over 20-point sweeps
    {
        const auto t0 = Clock::now();
        const Config base;
        struct Case {
            const char* label;
            const char* param;
            double lo, hi;
            Quantity q;
            int dir;
            bool strict;
            std::vector<std::pair<std::string, double>> overrides;
        };
        const std::vector<Case> cases = {
            {"pi_q~alpha", "alpha", 0.5, 1.0, Quantity::PiQ0, -1, true, {}},
            {"pi_q~beta3", "beta3", 0.01, 0.5, Quantity::PiQ0, -1, true, {}},
            {"pi_q~gamma", "gamma", 0.1, 2.0, Quantity::PiQ0, -1, true, {}},
            {"pi_q~t", "t", 0.0, 10.0, Quantity::PiQ0, +1, true, {}},
            {"pi_s~mu", "mu", 0.06, 0.3, Quantity::PiS0, +1, true, {}},
            {"pi_s~sigma2", "sigma2", 0.1, 0.5, Quantity::PiS0, -1, true, {}},
            {"pi_s~t|mu>r", "t", 0.0, 10.0, Quantity::PiS0, +1, true, {{"mu", 0.1}}},
            {"pi_s~t|mu<r", "t", 0.0, 10.0, Quantity::PiS0, -1, true, {{"mu", 0.03}}},
            {"pi_s~sigma1|rho<0", "sigma1", 0.1, 1.0, Quantity::PiS0, +1, true, {{"rho", -0.5}}},
            {"pi_s~sigma1|rho>0", "sigma1", 0.1, 1.0, Quantity::PiS0, -1, true, {{"rho", 0.5}}},
            {"pi_p~delta", "delta", 0.001, 0.05, Quantity::PiP0, +1, true, {}},
            {"pi_p~zeta", "zeta", 0.1, 1.0, Quantity::PiP0, -1, true, {}},
            {"pi_p~alpha", "alpha", 0.5, 1.0, Quantity::PiP0, +1, false, {}},
            {"pi_p~hP", "hP", 0.001, 0.02, Quantity::PiP0, -1, true, {}},
        };
        int ok = 0;
        std::string failed;
        for (const auto& c : cases) {
            Config cfg = base;
            for (const auto& [k, v] : c.overrides) set_value(cfg, k, v);
            const auto res = run_sweep(cfg, SweepSpec::linear(c.param, c.lo, c.hi, 20, c.q));
            if (check_monotone(res, c.dir, c.strict, c.label).pass) {
                ++ok;
            } else {
                failed += std::string(" ") + c.label;
            }
        }
        const double secs = seconds_since(t0);
        report(8, "directional suite", ok == static_cast<int>(cases.size()) && secs < 60.0,
               std::to_string(ok) + "/" + std::to_string(cases.size()) + " columns monotone" +
                   (failed.empty() ? "" : " (failed:" + failed + ")") +
                   ", pi_p~alpha is weak within 1e-10 relative, " + num(secs, 3) + " s (limit 60 s)");
    }

    // 9. convergence order, quadrature stability, default frequency
    {
        auto b0_at = [&](int M) {
            NumericsConfig n = num_cfg;
            n.time_steps = M;
            n.root_tol = 1e-15;
            return solve_equilibrium(p, measure, n).coeffs;
        };
        const auto c10 = b0_at(10);
        const auto c20 = b0_at(20);
        const auto c40 = b0_at(40);
        double order = 1e9;
        for (auto member : {&ValueCoefficients::B1, &ValueCoefficients::B0, &ValueCoefficients::b0_lo,
                            &ValueCoefficients::b0_hi}) {
            const double a = (c10.*member)[0] - (c20.*member)[0];
            const double b = (c20.*member)[0] - (c40.*member)[0];
            order = std::min(order, std::log2(std::fabs(a / b)));
        }
        const auto fine = build_measure(ClaimModelSpec{}, 2 * num_cfg.quad_nodes);
        double drift = 0.0;
        for (int k = 0; k <= 2; ++k) drift = std::max(drift, std::fabs(fine.moment(k) - measure.moment(k)));

        double hits = 0.0;
        for (const auto d : mc.lo_pre.defaulted) hits += d;
        const double n = static_cast<double>(mc.lo_pre.defaulted.size());
        const double expected = 1.0 - std::exp(-p.hP * p.T);
        const double z = std::fabs(hits / n - expected) / std::sqrt(expected * (1 - expected) / n);
        report(9, "numerical order checks", order >= 3.5 && drift <= 1e-12 && z <= 3.0,
               "observed RK4 order " + num(order, 3) + " (limit 3.5), moment change under node doubling " +
                   num(drift) + " (limit 1e-12), default frequency " + num(hits / n, 5) + " vs " +
                   num(expected, 5) + " (|diff|/SE " + num(z, 3) + ")");
    }

    // 10. byte-identical CSVs from repeated runs
    {
        namespace fs = std::filesystem;
        const fs::path dir = fs::path(AROBUST_WORK_DIR) / "acceptance_determinism";
        fs::create_directories(dir);
        const std::string cli = AROBUST_CLI;
        const std::string cfg = std::string(AROBUST_SOURCE_DIR) + "/configs/base.cfg";
        bool same = true;
        std::string detail;
        for (int run = 0; run < 2; ++run) {
            const std::string tag = std::to_string(run);
            const std::string solve = cli + " solve --config " + cfg + " --out " + (dir / ("solve" + tag + ".csv")).string();
            const std::string sweep = cli + " --threads " + std::to_string(run + 1) + " sweep --config " + cfg +
                                      " --param beta3 --from 0.01 --to 0.5 --points 8 --quantity pi_q0 --out " +
                                      (dir / ("sweep" + tag + ".csv")).string();
            if (std::system(solve.c_str()) != 0 || std::system(sweep.c_str()) != 0) same = false;
            SimulationSettings sim;
            sim.n_paths = 50;
            sim.dt = 0.01;
            sim.seed = 42;
            sim.threads = run + 1;
            std::ofstream out(dir / ("paths" + tag + ".csv"), std::ios::binary);
            write_paths_csv(out, simulate_wealth(strat, &dist, Distortion::Lo, p, measure, sim));
        }
        for (const char* stem : {"solve", "sweep", "paths"}) {
            const auto a = slurp(dir / (std::string(stem) + "0.csv"));
            const auto b = slurp(dir / (std::string(stem) + "1.csv"));
            const bool eq = !a.empty() && a == b;
            same = same && eq;
            detail += std::string(detail.empty() ? "" : ", ") + stem + (eq ? " identical" : " DIFFER") + " (" +
                      std::to_string(a.size()) + " bytes)";
        }
        report(10, "determinism", same, detail + "; second runs use a different thread count");
    }

    std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : "acceptance: all 10 criteria pass")
              << std::endl;
    return failures ? 1 : 0;
}
