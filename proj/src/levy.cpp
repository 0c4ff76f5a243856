#include "arobust/levy.hpp"

#include "arobust/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <numbers>
#include <sstream>

namespace arobust {

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw ValidationError("quad_nodes<1", "Gauss-Legendre rule needs at least one node");
    // Jacobi matrix of the Legendre recurrence: off-diagonal k / sqrt(4k^2 - 1).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    GaussLegendreRule rule;
    rule.nodes = eig.eigenvalues();
    rule.weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
    return rule;
}

namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double table_density_at(const ClaimModelSpec& spec, double z) {
    const auto& zs = spec.table_z;
    if (z < zs.front() || z > zs.back()) return 0.0;
    auto it = std::upper_bound(zs.begin(), zs.end(), z);
    if (it == zs.end()) return spec.table_density.back();
    const auto i = static_cast<std::size_t>(it - zs.begin());
    const double w = (z - zs[i - 1]) / (zs[i] - zs[i - 1]);
    return (1.0 - w) * spec.table_density[i - 1] + w * spec.table_density[i];
}

}  // namespace

ClaimMeasure::ClaimMeasure(const ClaimModelSpec& spec, int quad_nodes) : spec_(spec) {
    spec_.validate();
    const auto rule = gauss_legendre(quad_nodes);

    if (spec_.kind == ClaimKind::TruncatedNormal) {
        lower_ = std::max(0.0, spec_.muZ - 8.0 * spec_.sigmaZ);
        upper_ = spec_.muZ + 8.0 * spec_.sigmaZ;
        if (!(upper_ > 0)) {
            throw ValidationError("muZ-support", "truncated-normal claim law has no mass on (0, inf)");
        }
        normaliser_ = normal_cdf(spec_.muZ / spec_.sigmaZ);  // 1 - Phi(-muZ/sigmaZ)
        const double half = 0.5 * (upper_ - lower_);
        const double mid = 0.5 * (upper_ + lower_);
        nodes_ = (mid + half * rule.nodes.array()).matrix();
        weights_.resize(nodes_.size());
        for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
            weights_[i] = spec_.lambda * half * rule.weights[i] * density(nodes_[i]);
        }
    } else {
        // composite rule, one Gauss-Legendre panel per table segment
        const auto& zs = spec_.table_z;
        const auto& fs = spec_.table_density;
        lower_ = zs.front();
        upper_ = zs.back();
        normaliser_ = 0.0;
        for (std::size_t i = 1; i < zs.size(); ++i) {
            normaliser_ += 0.5 * (fs[i] + fs[i - 1]) * (zs[i] - zs[i - 1]);
        }
        density_max_ = *std::max_element(fs.begin(), fs.end()) / normaliser_;
        const auto panels = static_cast<Eigen::Index>(zs.size() - 1);
        nodes_.resize(panels * rule.nodes.size());
        weights_.resize(nodes_.size());
        Eigen::Index k = 0;
        for (Eigen::Index p = 0; p < panels; ++p) {
            const double a = zs[p];
            const double b = zs[p + 1];
            for (Eigen::Index j = 0; j < rule.nodes.size(); ++j, ++k) {
                nodes_[k] = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[j];
                weights_[k] = spec_.lambda * 0.5 * (b - a) * rule.weights[j] * density(nodes_[k]);
            }
        }
        // a table starting at z = 0 would put no node at 0, but keep the invariant explicit
        if ((nodes_.array() <= 0.0).any()) {
            throw ValidationError("table-support", "quadrature nodes must be strictly positive");
        }
    }

    moments_[0] = weights_.sum();
    moments_[1] = weights_.dot(nodes_);
    moments_[2] = weights_.dot(nodes_.cwiseAbs2());
}

double ClaimMeasure::moment(int k) const {
    if (k >= 0 && k <= 2) return moments_[k];
    return integrate([k](double z) { return std::pow(z, k); });
}

double ClaimMeasure::density(double z) const {
    if (z <= 0.0) return 0.0;
    if (spec_.kind == ClaimKind::TruncatedNormal) {
        return normal_pdf((z - spec_.muZ) / spec_.sigmaZ) / (spec_.sigmaZ * normaliser_);
    }
    return table_density_at(spec_, z) / normaliser_;
}

double ClaimMeasure::draw_size(RandomStream& rng) const {
    if (spec_.kind == ClaimKind::TruncatedNormal) {
        boost::random::normal_distribution<double> normal(spec_.muZ, spec_.sigmaZ);
        for (;;) {
            const double z = normal(rng);
            if (z > 0.0) return z;
        }
    }
    boost::random::uniform_real_distribution<double> uz(lower_, upper_);
    boost::random::uniform_real_distribution<double> u01(0.0, 1.0);
    for (;;) {
        const double z = uz(rng);
        if (z > 0.0 && u01(rng) * density_max_ <= density(z)) return z;
    }
}

void ClaimMeasure::throw_non_finite(Eigen::Index i, double v) const {
    std::ostringstream os;
    os.precision(17);
    os << "integrand is not finite at quadrature node " << i << " (z = " << nodes_[i]
       << ", value = " << v << ")";
    throw NumericalError(os.str());
}

ClaimMeasure build_measure(const ClaimModelSpec& spec, int quad_nodes) {
    return ClaimMeasure(spec, quad_nodes);
}

double premium_rate(const ClaimMeasure& measure, double theta) {
    if (!(theta > 0)) throw ValidationError("theta<=0", "premium loading theta must be positive");
    return (1.0 + theta) * measure.moment(1);
}

std::vector<double> sample_claims(const ClaimMeasure& measure, double dt, RandomStream& rng) {
    std::vector<double> out;
    if (dt < 0 || !std::isfinite(dt)) throw ValidationError("dt<0", "claim sampling interval must be >= 0");
    if (dt == 0.0 || measure.intensity() == 0.0) return out;
    boost::random::poisson_distribution<long, double> count(measure.intensity() * dt);
    const long n = count(rng);
    out.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) out.push_back(measure.draw_size(rng));
    return out;
}

}  // namespace arobust
