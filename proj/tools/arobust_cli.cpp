// arobust: solve / sweep / verify front end.
//
// Exit codes: 0 success, 1 validation or usage error, 2 verification
// failure, 3 numerical failure.

#include "arobust/config.hpp"
#include "arobust/errors.hpp"
#include "arobust/simulator.hpp"
#include "arobust/sweep.hpp"
#include "arobust/verification.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kVerification = 2;
constexpr int kNumerical = 3;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw arobust::ConfigError("cannot open output file '" + path + "'");
    return out;
}

int cmd_solve(const std::string& config_path, const std::string& out_path) {
    const auto config = arobust::load_config(config_path);
    const auto sol = arobust::solve_config(config);
    auto out = open_out(out_path);
    arobust::write_solution_csv(out, sol);
    if (sol.saturation_events > 0) {
        std::cerr << "warning: exponent saturation at " << sol.saturation_events << " grid nodes\n";
    }
    return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& param, double from, double to, int points,
              const std::string& quantity, std::optional<double> t, const std::string& out_path, unsigned threads) {
    const auto config = arobust::load_config(config_path);
    const auto spec = arobust::SweepSpec::linear(param, from, to, points, arobust::parse_quantity(quantity), t);
    const auto result = arobust::run_sweep(config, spec, threads);
    auto out = open_out(out_path);
    arobust::write_sweep_csv(out, result);
    for (const auto& row : result.rows) {
        if (row.status != "ok") std::cerr << param << " = " << row.value << ": " << row.status << '\n';
    }
    return kOk;
}

int cmd_verify(const std::string& config_path, const std::string& dump_path, unsigned threads) {
    const auto config = arobust::load_config(config_path);
    arobust::VerifyOptions options;
    options.threads = threads;
    const auto report = arobust::run_verification(config, std::cout, options);

    if (!dump_path.empty()) {
        const auto measure = arobust::build_measure(config.claims, config.numerics.quad_nodes);
        const auto sol = arobust::solve_equilibrium(config.model, measure, config.numerics);
        arobust::SimulationSettings sim;
        sim.n_paths = std::min<std::int64_t>(config.numerics.mc_paths, 20);
        sim.dt = config.numerics.mc_dt;
        sim.seed = config.numerics.seed;
        sim.x0 = config.model.x0;
        sim.threads = threads;
        const auto paths =
            arobust::simulate_wealth(sol.strategy(), nullptr, arobust::Distortion::None, config.model, measure, sim);
        auto out = open_out(dump_path);
        arobust::write_paths_csv(out, paths);
    }

    const auto failed = std::count_if(report.checks.begin(), report.checks.end(),
                                      [](const arobust::CheckResult& c) { return !c.pass; });
    std::cout << (failed ? "verification FAILED: " : "verification passed: ") << report.checks.size() - failed << '/'
              << report.checks.size() << " checks\n";
    return failed ? kVerification : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"alpha-robust equilibrium reinsurance-investment solver"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0: hardware concurrency)");

    std::string config_path;
    std::string out_path;

    auto* solve = app.add_subcommand("solve", "tabulate the equilibrium strategy and value coefficients");
    solve->add_option("--config", config_path, "config file")->required();
    solve->add_option("--out", out_path, "output CSV")->required();

    std::string param;
    std::string quantity;
    double from = 0.0;
    double to = 0.0;
    int points = 0;
    std::optional<double> t;
    auto* sweep = app.add_subcommand("sweep", "sweep one parameter and record a scalar quantity");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--param", param, "config key, or t")->required();
    sweep->add_option("--from", from, "first value")->required();
    sweep->add_option("--to", to, "last value")->required();
    sweep->add_option("--points", points, "number of points (>= 2)")->required();
    sweep->add_option("--quantity", quantity, "pi_q0 | pi_s0 | pi_p0 | B0_0 | B1_0")->required();
    sweep->add_option("--t", t, "evaluation time (default 0)");
    sweep->add_option("--out", out_path, "output CSV")->required();

    std::string dump_path;
    auto* verify = app.add_subcommand("verify", "run the solver and Monte Carlo oracle suite");
    verify->add_option("--config", config_path, "config file")->required();
    verify->add_option("--dump-paths", dump_path, "write a few reference-measure paths to this CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*solve) return cmd_solve(config_path, out_path);
        if (*sweep) return cmd_sweep(config_path, param, from, to, points, quantity, t, out_path, threads);
        if (*verify) return cmd_verify(config_path, dump_path, threads);
    } catch (const arobust::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const arobust::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const arobust::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kValidation;
}
