#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace arobust {

/// Market, insurance, ambiguity and horizon constants.
///
/// Plain aggregate; call validate() after filling it by hand. Records produced
/// by load_config()/parse_config() are already validated.
struct ModelParams {
    // financial market
    double r = 0.05;
    double mu = 0.1;
    double sigma2 = 0.2;
    double rho = -0.5;
    // surplus
    double sigma1 = 0.5;
    double theta = 0.1;
    double eta = 0.2;
    // defaultable bond
    double delta = 0.01;
    double zeta = 0.5;
    double hP = 0.002;
    // preferences and ambiguity
    double gamma = 0.5;
    double alpha = 0.8;
    double beta1 = 1.0;
    double beta2 = 3.0;
    double beta3 = 0.1;
    // horizon
    double T = 10.0;
    double T1 = 20.0;
    double x0 = 1.0;

    [[nodiscard]] double rho_hat() const;
    [[nodiscard]] double alpha_hat() const { return 1.0 - alpha; }
    /// Risk-neutral default intensity h^Q = delta / zeta.
    [[nodiscard]] double hQ() const;
    /// Delta = zeta * hP / delta, the inverse of the default risk premium.
    [[nodiscard]] double Delta() const;
    /// e^{r (T - t)}
    [[nodiscard]] double growth(double t) const;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
};

enum class ClaimKind { TruncatedNormal, TabulatedDensity };

/// Claim-size law. Truncated normal on (0, inf) by default; a tabulated
/// density is given by (z, density) pairs on an increasing grid.
struct ClaimModelSpec {
    double lambda = 1.0;
    double muZ = 1.0;
    double sigmaZ = 0.1;
    ClaimKind kind = ClaimKind::TruncatedNormal;
    std::vector<double> table_z;
    std::vector<double> table_density;

    void validate() const;
};

struct NumericsConfig {
    int quad_nodes = 64;
    int time_steps = 1000;
    double root_tol = 1e-10;
    double exp_cap = 700.0;
    std::int64_t mc_paths = 200000;
    double mc_dt = 1e-3;
    std::uint64_t seed = 42;

    void validate() const;
};

struct Config {
    ModelParams model;
    ClaimModelSpec claims;
    NumericsConfig numerics;

    void validate() const;
};

/// Every recognised key, in canonical order.
const std::vector<std::string>& config_keys();
[[nodiscard]] bool is_config_key(std::string_view key);

/// Parses the flat `key = value` format (`#` starts a comment). Missing
/// numerics keys take defaults; missing model or claim keys are errors.
/// Throws ConfigError on malformed input and ValidationError on invariants.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Inverse of parse_config; numeric fields survive a round trip bit-for-bit.
std::string to_config_string(const Config& config);

/// Generic key access used by parameter sweeps. set_value() does not validate.
double get_value(const Config& config, std::string_view key);
void set_value(Config& config, std::string_view key, double value);

/// Outcome of the integrability check on the claim measure.
struct AssumptionReport {
    bool ok = false;
    /// Exponent c with int_1^inf e^{c z^2} nu(dz) < inf (truncated normal only).
    double witness_c = 0.0;
    std::string message;
};

AssumptionReport validate_assumption31(const ClaimModelSpec& spec, const ModelParams& params);

}  // namespace arobust
