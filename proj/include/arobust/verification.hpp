#pragma once

#include "arobust/config.hpp"
#include "arobust/levy.hpp"
#include "arobust/solver.hpp"
#include "arobust/sweep.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arobust {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // measured discrepancy and tolerance
};

/// A directional expectation for one sweep column.
struct MonotoneCase {
    std::string label;
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    Quantity quantity = Quantity::PiQ0;
    int direction = 1;   // +1 increasing, -1 decreasing
    bool strict = true;  // weak: allows flat steps within 1e-10 relative
    std::vector<std::pair<std::string, double>> overrides;
};

/// Every row must be ok and move in `direction`.
CheckResult check_monotone(const SweepResult& result, int direction, bool strict, const std::string& label);
CheckResult check_monotone_case(const Config& base, const MonotoneCase& c, int points = 20);

/// The expected sensitivity directions of the strategies, with
/// ranges adapted to the given base configuration.
std::vector<MonotoneCase> standard_monotone_cases(const Config& base);

/// max over the grid and quadrature nodes of |phi1|, |phi2|, |phi3| (lo side).
double max_abs_distortion(const EquilibriumSolution& solution, const ModelParams& params,
                          const ClaimMeasure& measure);

struct VerifyOptions {
    bool monte_carlo = true;
    unsigned threads = 0;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    double max_abs_phi = 0.0;
    [[nodiscard]] bool passed() const;
};

/// Runs the oracle suite and streams one PASS/FAIL line per check to `log`.
/// Throws ValidationError("paths-too-few") when mc_paths < 100.
VerificationReport run_verification(const Config& config, std::ostream& log, const VerifyOptions& options = {});

}  // namespace arobust
