#include "arobust/sweep.hpp"

#include "arobust/errors.hpp"
#include "arobust/levy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace arobust {

namespace {

constexpr std::string_view kQuantityNames[] = {"pi_q0", "pi_s0", "pi_p0", "B0_0", "B1_0"};

void write_number(std::ostream& out, double v) {
    if (std::isnan(v)) {
        out << "nan";
    } else {
        out << v;
    }
}

}  // namespace

Quantity parse_quantity(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kQuantityNames); ++i) {
        if (kQuantityNames[i] == name) return static_cast<Quantity>(i);
    }
    throw ValidationError("unknown-quantity",
                          "unknown quantity '" + std::string(name) + "' (expected pi_q0, pi_s0, pi_p0, B0_0, B1_0)");
}

std::string_view quantity_name(Quantity q) { return kQuantityNames[static_cast<std::size_t>(q)]; }

double evaluate_quantity(const EquilibriumSolution& sol, Quantity q, double t) {
    const double T = sol.coeffs.horizon;
    if (!(t >= 0.0 && t <= T)) throw ValidationError("t-range", "evaluation time must lie in [0, T]");
    switch (q) {
        case Quantity::PiQ0: return interpolate(sol.grid, sol.pi_q, t);
        case Quantity::PiS0: return interpolate(sol.grid, sol.pi_s, t);
        case Quantity::PiP0: return interpolate(sol.grid, sol.pi_p, t);
        case Quantity::B0_0: return interpolate(sol.grid, sol.coeffs.B0, t);
        case Quantity::B1_0: return interpolate(sol.grid, sol.coeffs.B1, t);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

SweepSpec SweepSpec::linear(std::string param, double lo, double hi, int count, Quantity quantity,
                            std::optional<double> t) {
    if (count < 2) throw ValidationError("points<2", "a sweep needs at least 2 points");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ValidationError("non-finite", "sweep range must be finite");
    SweepSpec spec;
    spec.param = std::move(param);
    spec.quantity = quantity;
    spec.t = t;
    spec.values.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        spec.values[static_cast<std::size_t>(i)] = (i == count - 1) ? hi : lo + (hi - lo) * i / (count - 1);
    }
    return spec;
}

void SweepSpec::validate() const {
    if (param != "t" && !is_config_key(param)) {
        throw ValidationError("unknown-param", "unknown sweep parameter '" + param + "'");
    }
    if (values.size() < 2) throw ValidationError("points<2", "a sweep needs at least 2 points");
    if (param == "t" && t) throw ValidationError("t-conflict", "cannot sweep t and fix --t at once");
}

EquilibriumSolution solve_config(const Config& config) {
    config.validate();
    const auto measure = build_measure(config.claims, config.numerics.quad_nodes);
    return solve_equilibrium(config.model, measure, config.numerics);
}

SweepResult run_sweep(const Config& base, const SweepSpec& spec, unsigned threads) {
    spec.validate();
    SweepResult result;
    result.param = spec.param;
    result.quantity = spec.quantity;
    result.rows.resize(spec.values.size());

    // the t axis shares one solve
    std::optional<EquilibriumSolution> shared;
    if (spec.param == "t") shared = solve_config(base);

    auto evaluate = [&](std::size_t i) {
        SweepRow row;
        row.value = spec.values[i];
        row.quantity = std::numeric_limits<double>::quiet_NaN();
        try {
            if (shared) {
                row.quantity = evaluate_quantity(*shared, spec.quantity, row.value);
            } else {
                Config cfg = base;
                set_value(cfg, spec.param, row.value);
                const auto sol = solve_config(cfg);
                row.quantity = evaluate_quantity(sol, spec.quantity, spec.t.value_or(0.0));
            }
            row.status = "ok";
        } catch (const ValidationError& e) {
            row.status = "skipped:" + e.code();
        } catch (const ConfigError& e) {
            row.status = "skipped:config";
        } catch (const NumericalError&) {
            row.status = "skipped:numerical";
        }
        result.rows[i] = std::move(row);
    };

    const std::size_t n = spec.values.size();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) evaluate(i);
    } else {
        std::vector<std::thread> pool;
        const std::size_t workers = std::min<std::size_t>(threads, n);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) evaluate(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(17);
    out << result.param << ',' << quantity_name(result.quantity) << ",status\n";
    for (const auto& row : result.rows) {
        write_number(out, row.value);
        out << ',';
        write_number(out, row.quantity);
        out << ',' << row.status << '\n';
    }
    out.flags(flags);
    out.precision(prec);
}

void write_solution_csv(std::ostream& out, const EquilibriumSolution& sol) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(17);
    out << "t,pi_q,pi_s,pi_p,B1,B0,b1_lo,b1_hi,b0_lo,b0_hi\n";
    const auto& c = sol.coeffs;
    for (Eigen::Index k = 0; k < sol.grid.size(); ++k) {
        const double cols[] = {sol.grid[k], sol.pi_q[k], sol.pi_s[k], sol.pi_p[k], c.B1[k],
                               c.B0[k],     c.b1_lo[k],  c.b1_hi[k],  c.b0_lo[k], c.b0_hi[k]};
        for (std::size_t j = 0; j < std::size(cols); ++j) {
            if (j) out << ',';
            write_number(out, cols[j]);
        }
        out << '\n';
    }
    out.flags(flags);
    out.precision(prec);
}

}  // namespace arobust
