#pragma once

#include "arobust/config.hpp"
#include "arobust/errors.hpp"
#include "arobust/levy.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <string>

namespace arobust {

enum class DefaultState { PreDefault = 0, PostDefault = 1 };

/// Which extremal measure: the ambiguity-averse infimum ("lo"), the
/// ambiguity-seeking supremum ("hi"), or the reference measure.
enum class Distortion { None, Lo, Hi };

// ---------------------------------------------------------------------------
// Pointwise strategy pieces
// ---------------------------------------------------------------------------

/// Equilibrium stock amount; closed form, identical in both default states.
double pi_s_star(double t, const ModelParams& params);

/// Exponent K(t, z) = pi_q z e^{r(T-t)} + (gamma/2) pi_q^2 z^2 e^{2r(T-t)} that
/// drives the claim distortion.
inline double claim_exponent(double growth, double pi_q, double z, double gamma) {
    const double a = pi_q * z * growth;
    return a + 0.5 * gamma * a * a;
}

/// Right-hand side F(t, pi_q) of the reinsurance first-order condition.
/// F(t, 0) = eta e^{r(T-t)} m1 > 0 and F decreases strictly in pi_q for
/// alpha >= 1/2. Exponents are clamped to [-exp_cap, exp_cap]; when that
/// happens and `saturated` is non-null it is set to true.
double reinsurance_foc(double t, double pi_q, const ModelParams& params, const ClaimMeasure& measure,
                       double exp_cap = 700.0, bool* saturated = nullptr);

/// Unique root pi_q* >= 0 of F(t, .), with |F| <= root_tol * eta e^{r(T-t)} m1.
/// Throws NumericalError if no sign change is found after 60 bracket doublings.
double solve_pi_q_star(double t, const ModelParams& params, const ClaimMeasure& measure,
                       double root_tol = 1e-10, double exp_cap = 700.0, bool* saturated = nullptr);

/// Claim integrals at a fixed (t, pi_q), with E = beta3 K:
///   z_lo = int z e^{E} nu,    z_hi = int z e^{-E} nu,
///   tilt_lo = int (1 - e^{E}) nu / beta3,   tilt_hi = int (1 - e^{-E}) nu / beta3.
struct JumpIntegrals {
    double z_lo = 0.0;
    double z_hi = 0.0;
    double tilt_lo = 0.0;
    double tilt_hi = 0.0;
};

JumpIntegrals jump_integrals(double t, double pi_q, const ModelParams& params, const ClaimMeasure& measure,
                             double exp_cap = 700.0, bool* saturated = nullptr);

// ---------------------------------------------------------------------------
// Backward coefficient sweep
// ---------------------------------------------------------------------------

/// pi_q*, pi_s* and the claim integrals on the half grid t_j = j * h / 2,
/// j = 0..2M, so RK4 stages have exact strategy values.
struct StrategyTable {
    int steps = 0;  // M
    double horizon = 0.0;
    Eigen::VectorXd t;
    Eigen::VectorXd growth;
    Eigen::VectorXd pi_q;
    Eigen::VectorXd pi_s;
    Eigen::VectorXd z_lo, z_hi, tilt_lo, tilt_hi;
    int saturation_events = 0;

    [[nodiscard]] double step() const { return horizon / steps; }
};

StrategyTable tabulate_strategy(const ModelParams& params, const ClaimMeasure& measure,
                                const NumericsConfig& numerics);

/// V(t, x, h) = A(t) x + B_h(t); g_lo / g_hi share the slope A and have
/// intercepts b_h_lo / b_h_hi. All vectors are indexed like `grid`.
struct ValueCoefficients {
    Eigen::VectorXd grid;
    Eigen::VectorXd A;
    Eigen::VectorXd B1, B0;
    Eigen::VectorXd b1_lo, b1_hi;
    Eigen::VectorXd b0_lo, b0_hi;
    double rate = 0.0;
    double horizon = 0.0;
};

struct PostDefaultCoefficients {
    Eigen::VectorXd grid;
    Eigen::VectorXd pi_q, pi_s;
    Eigen::VectorXd B1, b1_lo, b1_hi;
};

/// Post-default intercepts B1, b1_lo, b1_hi integrated backward from zero at T.
PostDefaultCoefficients post_default_coeffs(const ModelParams& params, const ClaimMeasure& measure,
                                            const StrategyTable& table);

struct PreDefaultSystem {
    Eigen::VectorXd grid;
    Eigen::VectorXd pi_q, pi_s, pi_p;
    Eigen::VectorXd B1, b1_lo, b1_hi;
    Eigen::VectorXd B0, b0_lo, b0_hi;
};

/// Bond demand from the linear first-order condition given intercept gaps.
double bond_demand(double t, double gap_lo, double gap_hi, const ModelParams& params);

/// Coupled pre-default system: classical RK4 backward from T on
/// b' = hP b - f with pi_p eliminated algebraically inside every stage.
/// Throws NumericalError when hP = 0 or zeta = 0 (unbounded bond demand).
PreDefaultSystem pre_default_system(const ModelParams& params, const ClaimMeasure& measure,
                                    const StrategyTable& table);

// ---------------------------------------------------------------------------
// Assembled solution
// ---------------------------------------------------------------------------

struct StrategyPoint {
    double pi_q = 0.0;
    double pi_s = 0.0;
    double pi_p = 0.0;  // pre-default bond amount; zero once defaulted
};

/// Any deterministic feedback-free strategy t -> (pi_q, pi_s, pi_p).
using Strategy = std::function<StrategyPoint(double)>;

struct EquilibriumSolution {
    Eigen::VectorXd grid;
    Eigen::VectorXd pi_q;
    Eigen::VectorXd pi_s;
    Eigen::VectorXd pi_p;
    ValueCoefficients coeffs;
    int saturation_events = 0;

    /// Linear interpolation on the grid; `t` is clamped to [0, T].
    [[nodiscard]] StrategyPoint at(double t) const;
    /// Copy of the tables behind a callable, safe to outlive *this.
    [[nodiscard]] Strategy strategy() const;
};

EquilibriumSolution solve_equilibrium(const ModelParams& params, const ClaimMeasure& measure,
                                      const NumericsConfig& numerics);

/// Linear interpolation on a uniform grid starting at grid[0].
double interpolate(const Eigen::VectorXd& grid, const Eigen::VectorXd& values, double t);

/// e^{r(T-t)} x + B_h(t). Throws ValidationError for t outside [0, T].
double value_function(double t, double x, DefaultState h, const ValueCoefficients& coeffs);

// ---------------------------------------------------------------------------
// Distortions and penalty
// ---------------------------------------------------------------------------

/// Extremal probability distortions induced by a strategy:
///   phi1 = +-beta1 (sigma1 + sigma2 rho pi_s) E,  phi2 = +-beta2 sigma2 rho_hat pi_s E,
///   1 - phi3 = e^{+-beta3 K(t, z)},
/// with the upper sign for the ambiguity-averse (lo) measure.
class DistortionFunctions {
public:
    DistortionFunctions(Strategy strategy, const ModelParams& params, double exp_cap = 700.0);

    [[nodiscard]] double phi1_lo(double t) const;
    [[nodiscard]] double phi2_lo(double t) const;
    [[nodiscard]] double phi1_hi(double t) const { return -phi1_lo(t); }
    [[nodiscard]] double phi2_hi(double t) const { return -phi2_lo(t); }
    [[nodiscard]] double phi3_lo(double t, double z) const;
    [[nodiscard]] double phi3_hi(double t, double z) const;

    [[nodiscard]] double phi1(Distortion side, double t) const;
    [[nodiscard]] double phi2(Distortion side, double t) const;
    [[nodiscard]] double phi3(Distortion side, double t, double z) const;
    /// 1 - phi3, computed directly from the exponent (no cancellation).
    [[nodiscard]] double intensity_factor(Distortion side, double t, double z) const;

    [[nodiscard]] const Strategy& strategy() const { return strategy_; }
    [[nodiscard]] const ModelParams& params() const { return params_; }

private:
    [[nodiscard]] double signed_exponent(Distortion side, double t, double z) const;

    Strategy strategy_;
    ModelParams params_;
    double exp_cap_;
};

DistortionFunctions distortions(const EquilibriumSolution& solution, const ModelParams& params,
                                double exp_cap = 700.0);

/// h_beta(phi) = phi1^2/(2 beta1) + phi2^2/(2 beta2)
///             + int [(1-phi3) ln(1-phi3) + phi3] nu(dz) / beta3.
/// Throws ValidationError if phi3 >= 1 at any quadrature node.
template <class Phi3>
double penalty_rate(double phi1, double phi2, Phi3&& phi3_of_z, const ModelParams& params,
                    const ClaimMeasure& measure);

double penalty_rate(const DistortionFunctions& dist, Distortion side, double t, const ClaimMeasure& measure);

/// int_{t0}^{T} h_beta(phi(s)) ds by composite Simpson on `intervals` panels.
double penalty_integral(const DistortionFunctions& dist, Distortion side, double t0,
                        const ClaimMeasure& measure, int intervals = 2000);

// ---------------------------------------------------------------------------
// Quadrature oracles for the simulator
// ---------------------------------------------------------------------------

/// E^{phi}[X(T) | X(t0) = x, H(t0) = h] - e^{r(T-t0)} x for any deterministic
/// strategy, by integrating the mean dynamics (independent of the B/b sweep).
double expected_terminal_intercept(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                   DefaultState h, double t0, const ModelParams& params,
                                   const ClaimMeasure& measure, int intervals = 4000);

/// Var^{phi}[X(T) | X(t0) = x, H = 1] for a post-default start.
double post_default_terminal_variance(const Strategy& strategy, const DistortionFunctions* dist,
                                      Distortion side, double t0, const ModelParams& params,
                                      const ClaimMeasure& measure, int intervals = 4000);

// ---------------------------------------------------------------------------

template <class Phi3>
double penalty_rate(double phi1, double phi2, Phi3&& phi3_of_z, const ModelParams& params,
                    const ClaimMeasure& measure) {
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < measure.nodes().size(); ++i) {
        const double z = measure.nodes()[i];
        const double p3 = phi3_of_z(z);
        if (!(p3 < 1.0)) {
            throw ValidationError("phi3>=1", "claim distortion phi3 must stay below 1 (z = " +
                                                 std::to_string(z) + ")");
        }
        entropy += measure.weights()[i] * ((1.0 - p3) * std::log1p(-p3) + p3);
    }
    return phi1 * phi1 / (2.0 * params.beta1) + phi2 * phi2 / (2.0 * params.beta2) + entropy / params.beta3;
}

}  // namespace arobust
