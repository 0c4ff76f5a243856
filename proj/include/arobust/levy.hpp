#pragma once

#include "arobust/config.hpp"

#include <Eigen/Core>

#include <boost/random/mersenne_twister.hpp>

#include <cmath>
#include <vector>

namespace arobust {

/// Random engine used throughout; one independent instance per consumer.
/// Boost distributions are used with it so draws are identical across
/// standard library implementations.
using RandomStream = boost::random::mt19937_64;

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
struct GaussLegendreRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
GaussLegendreRule gauss_legendre(int n);

/// Claim-size Levy measure nu(dz) = lambda * f(z) dz on (0, inf).
///
/// The quadrature weights already carry lambda and the density, so
/// integrate(g) approximates int g(z) nu(dz). For the truncated normal the
/// rule covers [max(0, muZ - 8 sigmaZ), muZ + 8 sigmaZ]; the tail mass left
/// out is below 1e-15 * lambda.
class ClaimMeasure {
public:
    ClaimMeasure(const ClaimModelSpec& spec, int quad_nodes);

    [[nodiscard]] const ClaimModelSpec& spec() const { return spec_; }
    [[nodiscard]] const Eigen::VectorXd& nodes() const { return nodes_; }
    [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }
    [[nodiscard]] double support_lower() const { return lower_; }
    [[nodiscard]] double support_upper() const { return upper_; }
    [[nodiscard]] double intensity() const { return spec_.lambda; }

    /// int z^k nu(dz); cached for k = 0, 1, 2.
    [[nodiscard]] double moment(int k) const;

    /// Sum of w_i g(z_i). Throws NumericalError naming the node when g is not finite.
    template <class G>
    [[nodiscard]] double integrate(G&& g) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
            const double v = g(nodes_[i]);
            if (!std::isfinite(v)) throw_non_finite(i, v);
            acc += weights_[i] * v;
        }
        return acc;
    }

    /// Normalised claim-size density f(z) (integrates to 1 over (0, inf)).
    [[nodiscard]] double density(double z) const;

    /// One claim size drawn from f.
    double draw_size(RandomStream& rng) const;

private:
    [[noreturn]] void throw_non_finite(Eigen::Index i, double v) const;

    ClaimModelSpec spec_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    double normaliser_ = 1.0;  // 1 - Phi(-muZ/sigmaZ), or table mass
    double density_max_ = 0.0;  // tabulated sampling envelope
    double moments_[3] = {0.0, 0.0, 0.0};
};

ClaimMeasure build_measure(const ClaimModelSpec& spec, int quad_nodes);

template <class G>
double integrate(const ClaimMeasure& measure, G&& g) {
    return measure.integrate(std::forward<G>(g));
}

/// Expected-value premium (1 + theta) int z nu(dz).
double premium_rate(const ClaimMeasure& measure, double theta);

/// Claim sizes arriving during an interval of length dt: a Poisson(lambda dt)
/// count of independent draws.
std::vector<double> sample_claims(const ClaimMeasure& measure, double dt, RandomStream& rng);

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace arobust
