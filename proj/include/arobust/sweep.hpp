#pragma once

#include "arobust/config.hpp"
#include "arobust/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arobust {

/// Scalar read off a solved model at one time (t = 0 unless overridden).
enum class Quantity { PiQ0, PiS0, PiP0, B0_0, B1_0 };

Quantity parse_quantity(std::string_view name);
std::string_view quantity_name(Quantity q);

double evaluate_quantity(const EquilibriumSolution& solution, Quantity q, double t = 0.0);

/// One swept parameter. `param` is a config key, or "t" to sweep the
/// evaluation time itself on the base configuration.
struct SweepSpec {
    std::string param;
    std::vector<double> values;
    Quantity quantity = Quantity::PiQ0;
    std::optional<double> t;

    static SweepSpec linear(std::string param, double lo, double hi, int count, Quantity quantity,
                            std::optional<double> t = std::nullopt);
    void validate() const;
};

struct SweepRow {
    double value = 0.0;
    double quantity = 0.0;  // NaN when skipped
    std::string status;     // "ok", "skipped:<code>" or "skipped:numerical"
};

struct SweepResult {
    std::string param;
    Quantity quantity = Quantity::PiQ0;
    std::vector<SweepRow> rows;  // sorted by value
};

/// Points run on up to `threads` workers; the row order never depends on it.
SweepResult run_sweep(const Config& base, const SweepSpec& spec, unsigned threads = 1);

/// Header `<param>,<quantity>,status`.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Header t,pi_q,pi_s,pi_p,B1,B0,b1_lo,b1_hi,b0_lo,b0_hi; 17 significant digits.
void write_solution_csv(std::ostream& out, const EquilibriumSolution& solution);

/// Builds the measure and solves; the usual entry point for a Config.
EquilibriumSolution solve_config(const Config& config);

}  // namespace arobust
