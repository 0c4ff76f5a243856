#include "arobust/verification.hpp"

#include "arobust/errors.hpp"
#include "arobust/simulator.hpp"

#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace arobust {

namespace {

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

CheckResult within_se(const std::string& name, double estimate, double target, double se, double k = 3.0) {
    const double z = (estimate - target) / se;
    CheckResult out;
    out.name = name;
    out.pass = std::isfinite(z) && std::fabs(z) <= k;
    out.detail = "estimate " + fmt(estimate, 8) + " vs " + fmt(target, 8) + ", |diff|/SE = " + fmt(std::fabs(z), 3) +
                 " (limit " + fmt(k, 2) + ")";
    return out;
}

CheckResult terminal_check(const EquilibriumSolution& sol, const ModelParams& p) {
    const auto last = sol.grid.size() - 1;
    const double s_expected = ((p.mu - p.r) - p.sigma1 * p.sigma2 * p.rho * (p.gamma + (2 * p.alpha - 1) * p.beta1)) /
                              (p.sigma2 * p.sigma2 *
                               (p.gamma + (2 * p.alpha - 1) * (p.beta1 * p.rho * p.rho +
                                                               p.beta2 * (1 - p.rho * p.rho))));
    const double b_expected = (p.delta - p.zeta * p.hP) / (p.gamma * p.zeta * p.zeta * p.hP);
    const double es = std::fabs(sol.pi_s[last] - s_expected) / std::max(1.0, std::fabs(s_expected));
    const double eb = std::fabs(sol.pi_p[last] - b_expected) / std::max(1.0, std::fabs(b_expected));
    const auto& c = sol.coeffs;
    const double ez = std::max({std::fabs(c.B1[last]), std::fabs(c.B0[last]), std::fabs(c.b1_lo[last]),
                                std::fabs(c.b1_hi[last]), std::fabs(c.b0_lo[last]), std::fabs(c.b0_hi[last])});
    CheckResult out;
    out.name = "terminal values";
    out.pass = es <= 1e-12 && eb <= 1e-12 && ez == 0.0;
    out.detail = "pi_s(T) = " + fmt(sol.pi_s[last], 17) + ", pi_p(T) = " + fmt(sol.pi_p[last], 17) +
                 ", rel err " + fmt(std::max(es, eb), 3) + " (limit 1e-12), max |intercept(T)| = " + fmt(ez, 3);
    return out;
}

CheckResult root_check(const EquilibriumSolution& sol, const ModelParams& p, const ClaimMeasure& measure,
                       const NumericsConfig& num) {
    const double tol = std::max(num.root_tol, 1e-9);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < sol.grid.size(); ++k) {
        const double t = sol.grid[k];
        const double scale = p.eta * p.growth(t) * measure.moment(1);
        worst = std::max(worst, std::fabs(reinsurance_foc(t, sol.pi_q[k], p, measure, num.exp_cap)) / scale);
    }
    // one sign change on a fine scan at three times
    int bad_scans = 0;
    for (const double t : {0.0, 0.5 * p.T, p.T}) {
        const double top = 4.0 * std::max(1e-3, interpolate(sol.grid, sol.pi_q, t));
        int changes = 0;
        double prev = reinsurance_foc(t, 0.0, p, measure, num.exp_cap);
        for (int i = 1; i <= 2000; ++i) {
            const double f = reinsurance_foc(t, top * i / 2000.0, p, measure, num.exp_cap);
            if ((f > 0) != (prev > 0)) ++changes;
            prev = f;
        }
        if (changes != 1) ++bad_scans;
    }
    CheckResult out;
    out.name = "reinsurance root";
    out.pass = worst <= tol && bad_scans == 0;
    out.detail = "max |F|/scale = " + fmt(worst, 3) + " (limit " + fmt(tol, 3) + "), scans without a unique sign change: " +
                 std::to_string(bad_scans);
    return out;
}

CheckResult identity_check(const DistortionFunctions& dist, const ModelParams& p, const ClaimMeasure& measure,
                           std::uint64_t seed) {
    RandomStream rng(stream_key(seed, 7, 0));
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
    CheckResult out;
    out.name = "distortion identities";
    out.pass = worst <= 1e-12;
    out.detail = "max deviation " + fmt(worst, 3) + " over 10000 points (limit 1e-12)";
    return out;
}

void emit(std::ostream& log, const CheckResult& c) {
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n' << std::flush;
}

}  // namespace

CheckResult check_monotone(const SweepResult& result, int direction, bool strict, const std::string& label) {
    CheckResult out;
    out.name = label;
    int skipped = 0;
    int violations = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        if (result.rows[i].status != "ok") ++skipped;
        if (i == 0) continue;
        const double a = result.rows[i - 1].quantity;
        const double b = result.rows[i].quantity;
        const double step = direction * (b - a);
        const double slack = strict ? 0.0 : 1e-10 * std::max({1.0, std::fabs(a), std::fabs(b)});
        const bool ok = strict ? step > 0.0 : step >= -slack;
        if (!ok) {
            ++violations;
            worst = std::min(worst, step);
        }
    }
    out.pass = skipped == 0 && violations == 0 && result.rows.size() >= 2;
    out.detail = std::string(direction > 0 ? "increasing" : "decreasing") + (strict ? "" : " (weak)") + " in " +
                 result.param + " over " + std::to_string(result.rows.size()) + " points, " +
                 std::to_string(violations) + " violations, " + std::to_string(skipped) + " skipped";
    if (violations) out.detail += ", worst step " + fmt(worst, 3);
    return out;
}

CheckResult check_monotone_case(const Config& base, const MonotoneCase& c, int points) {
    Config cfg = base;
    for (const auto& [key, value] : c.overrides) set_value(cfg, key, value);
    const auto spec = SweepSpec::linear(c.param, c.lo, c.hi, points, c.quantity);
    return check_monotone(run_sweep(cfg, spec), c.direction, c.strict, c.label);
}

std::vector<MonotoneCase> standard_monotone_cases(const Config& base) {
    const auto& p = base.model;
    std::vector<MonotoneCase> out;
    out.push_back({"pi_q vs alpha", "alpha", 0.5, 1.0, Quantity::PiQ0, -1, true, {}});
    out.push_back({"pi_q vs beta3", "beta3", 0.01, 0.5, Quantity::PiQ0, -1, true, {}});
    out.push_back({"pi_q vs gamma", "gamma", 0.1, 2.0, Quantity::PiQ0, -1, true, {}});
    out.push_back({"pi_q vs t", "t", 0.0, p.T, Quantity::PiQ0, +1, true, {}});
    out.push_back({"pi_s vs mu", "mu", p.r + 0.01, p.r + 0.25, Quantity::PiS0, +1, true, {}});
    out.push_back({"pi_s vs sigma2", "sigma2", 0.1, 0.5, Quantity::PiS0, -1, true, {{"rho", -0.5}}});
    out.push_back({"pi_s vs t (mu>r)", "t", 0.0, p.T, Quantity::PiS0, +1, true, {{"mu", p.r + 0.05}}});
    out.push_back({"pi_s vs t (mu<r)", "t", 0.0, p.T, Quantity::PiS0, -1, true, {{"mu", p.r - 0.02}}});
    out.push_back({"pi_s vs sigma1 (rho<0)", "sigma1", 0.1, 1.0, Quantity::PiS0, +1, true, {{"rho", -0.5}}});
    out.push_back({"pi_s vs sigma1 (rho>0)", "sigma1", 0.1, 1.0, Quantity::PiS0, -1, true, {{"rho", 0.5}}});
    out.push_back({"pi_p vs delta", "delta", p.zeta * p.hP, 0.05, Quantity::PiP0, +1, true, {}});
    out.push_back({"pi_p vs zeta", "zeta", 0.1, 1.0, Quantity::PiP0, -1, true, {}});
    out.push_back({"pi_p vs alpha", "alpha", 0.5, 1.0, Quantity::PiP0, +1, false, {}});
    const double hp_max = p.zeta > 0 ? p.delta / p.zeta : 0.02;
    out.push_back({"pi_p vs hP", "hP", 0.05 * hp_max, hp_max, Quantity::PiP0, -1, true, {}});
    return out;
}

double max_abs_distortion(const EquilibriumSolution& sol, const ModelParams& p, const ClaimMeasure& measure) {
    const auto dist = distortions(sol, p);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < sol.grid.size(); ++k) {
        const double t = sol.grid[k];
        worst = std::max({worst, std::fabs(dist.phi1_lo(t)), std::fabs(dist.phi2_lo(t))});
        for (Eigen::Index i = 0; i < measure.nodes().size(); ++i) {
            worst = std::max(worst, std::fabs(dist.phi3_lo(t, measure.nodes()[i])));
        }
    }
    return worst;
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

VerificationReport run_verification(const Config& config, std::ostream& log, const VerifyOptions& options) {
    config.validate();
    if (options.monte_carlo && config.numerics.mc_paths < 100) {
        throw ValidationError("paths-too-few", "paths too few: verification needs mc_paths >= 100");
    }
    const auto& p = config.model;
    const auto& num = config.numerics;
    const auto measure = build_measure(config.claims, num.quad_nodes);
    const auto sol = solve_equilibrium(p, measure, num);
    const auto dist = distortions(sol, p, num.exp_cap);

    VerificationReport report;
    auto add = [&](CheckResult c) {
        emit(log, c);
        report.checks.push_back(std::move(c));
    };

    report.max_abs_phi = max_abs_distortion(sol, p, measure);
    log << "INFO max |phi| = " << fmt(report.max_abs_phi, 6) << '\n';
    if (sol.saturation_events > 0) log << "INFO exponent saturation at " << sol.saturation_events << " grid nodes\n";

    add(terminal_check(sol, p));
    add(root_check(sol, p, measure, num));
    add(identity_check(dist, p, measure, num.seed));
    for (const auto& c : standard_monotone_cases(config)) add(check_monotone_case(config, c));

    if (!options.monte_carlo) return report;

    const auto strategy = sol.strategy();
    const double E0 = p.growth(0.0);
    SimulationSettings sim;
    sim.n_paths = num.mc_paths;
    sim.dt = num.mc_dt;
    sim.seed = num.seed;
    sim.x0 = p.x0;
    sim.threads = options.threads;

    for (const auto h : {DefaultState::PostDefault, DefaultState::PreDefault}) {
        const bool post = h == DefaultState::PostDefault;
        const std::string tag = post ? "h=1" : "h=0";
        sim.h0 = h;
        const auto lo = simulate_terminal(strategy, &dist, Distortion::Lo, p, measure, sim);
        const auto hi = simulate_terminal(strategy, &dist, Distortion::Hi, p, measure, sim);
        const auto jl = summarize_terminal(lo.wealth, p.gamma, penalty_integral(dist, Distortion::Lo, 0.0, measure), 1.0);
        const auto jh =
            summarize_terminal(hi.wealth, p.gamma, penalty_integral(dist, Distortion::Hi, 0.0, measure), -1.0);
        const double value = p.alpha * jl.j_value + p.alpha_hat() * jh.j_value;
        const double se = std::hypot(p.alpha * jl.std_error, p.alpha_hat() * jh.std_error);
        add(within_se("robust value " + tag, value, value_function(0.0, p.x0, h, sol.coeffs), se));
        const double b_lo = post ? sol.coeffs.b1_lo[0] : sol.coeffs.b0_lo[0];
        add(within_se("lo intercept " + tag, jl.mean, E0 * p.x0 + b_lo, jl.mean_std_error));

        if (post) {
            double total = 0.0;
            double total_sq = 0.0;
            for (const auto c : lo.claims) {
                total += c;
                total_sq += static_cast<double>(c) * c;
            }
            const double n = static_cast<double>(lo.claims.size());
            const double mean = total / n;
            const double sd = std::sqrt(std::max(0.0, (total_sq - n * mean * mean) / (n - 1.0)));
            const int panels = 2000;
            double expected = 0.0;
            for (int i = 0; i <= panels; ++i) {
                const double t = p.T * i / panels;
                const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                expected += w * measure.integrate([&](double z) { return dist.intensity_factor(Distortion::Lo, t, z); });
            }
            expected *= p.T / panels / 3.0;
            add(within_se("lo claim intensity", mean / p.T, expected / p.T, sd / std::sqrt(n) / p.T));
        } else {
            double hits = 0.0;
            for (const auto d : lo.defaulted) hits += d;
            const double n = static_cast<double>(lo.defaulted.size());
            const double expected = -std::expm1(-p.hP * p.T);
            add(within_se("default frequency", hits / n, expected, std::sqrt(expected * (1.0 - expected) / n)));
        }
    }
    return report;
}

}  // namespace arobust
