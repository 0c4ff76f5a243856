#pragma once

#include "arobust/config.hpp"
#include "arobust/levy.hpp"
#include "arobust/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

namespace arobust {

/// One simulated trajectory on the grid t0 = s_0 < ... < s_K = T.
struct WealthPath {
    std::vector<double> times;
    std::vector<double> wealth;
    std::vector<int> default_state;  // H(s_k)
    /// +inf when no default happens before T.
    double default_time = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> claim_log;  // (arrival time, size), accepted claims only
};

struct SimulationSettings {
    std::int64_t n_paths = 200000;
    double dt = 1e-3;
    std::uint64_t seed = 42;
    double t0 = 0.0;
    double x0 = 1.0;
    DefaultState h0 = DefaultState::PreDefault;
    unsigned threads = 0;  // 0: hardware concurrency
    double exp_cap = 700.0;
};

/// Terminal values only, indexed by path.
struct TerminalSample {
    std::vector<double> wealth;
    std::vector<std::int32_t> claims;
    std::vector<std::uint8_t> defaulted;
    double elapsed = 0.0;  // T - t0
};

/// Paths under the reference measure (side None) or under the lo / hi
/// distorted dynamics given by `dist`. Results depend only on the settings,
/// never on the thread count.
std::vector<WealthPath> simulate_wealth(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                        const ModelParams& params, const ClaimMeasure& measure,
                                        const SimulationSettings& settings);

TerminalSample simulate_terminal(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                 const ModelParams& params, const ClaimMeasure& measure,
                                 const SimulationSettings& settings);

/// Defaultable bond price p(t, T1) at the path's grid times.
std::vector<double> bond_price_path(const WealthPath& path, const ModelParams& params);

struct ObjectiveEstimate {
    double mean = 0.0;
    double variance = 0.0;
    double penalty = 0.0;
    double j_value = 0.0;
    double std_error = 0.0;
    double mean_std_error = 0.0;
};

/// mean - (gamma/2) var + sign * penalty with a delta-method standard error.
ObjectiveEstimate summarize_terminal(const std::vector<double>& wealth, double gamma, double penalty, double sign);

ObjectiveEstimate estimate_objective(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                     const ModelParams& params, const ClaimMeasure& measure,
                                     const SimulationSettings& settings);

struct RobustEstimate {
    ObjectiveEstimate lo;
    ObjectiveEstimate hi;
    double value = 0.0;  // alpha J_lo + (1 - alpha) J_hi
    double std_error = 0.0;
};

RobustEstimate robust_objective(const Strategy& strategy, const DistortionFunctions& dist, const ModelParams& params,
                                const ClaimMeasure& measure, const SimulationSettings& settings);

/// Columns path_id,time,wealth,default_state.
void write_paths_csv(std::ostream& out, const std::vector<WealthPath>& paths);

/// Independent 64-bit stream key for (seed, tag, index).
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);

}  // namespace arobust
