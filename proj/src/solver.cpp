#include "arobust/solver.hpp"

#include "arobust/root.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <sstream>

namespace arobust {

namespace {

double clamp_exponent(double x, double cap, bool* saturated) {
    if (x > cap) {
        if (saturated) *saturated = true;
        return cap;
    }
    if (x < -cap) {
        if (saturated) *saturated = true;
        return -cap;
    }
    return x;
}

template <class F>
double simpson(F&& f, double a, double b, int intervals) {
    if (intervals < 2) intervals = 2;
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    double acc = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

// Everything the intercept ODEs need at one half-grid node.
struct PostRates {
    double fB1 = 0.0;
    double f1lo = 0.0;
    double f1hi = 0.0;
};

PostRates post_rates(const StrategyTable& tab, int j, const ModelParams& p, double m1) {
    const double E = tab.growth[j];
    const double q = tab.pi_q[j];
    const double s = tab.pi_s[j];
    const double rh = p.rho_hat();
    const double tilt = p.gamma + (2.0 * p.alpha - 1.0) * p.beta1;
    const double D = p.gamma + (2.0 * p.alpha - 1.0) * (p.beta1 * p.rho * p.rho + p.beta2 * rh * rh);
    const double N = (p.mu - p.r) - tilt * p.sigma1 * p.sigma2 * p.rho * E;
    const double prem = (p.theta - p.eta + (1.0 + p.eta) * q) * E * m1;
    const double quad = p.sigma2 * p.sigma2 * E * E * (p.beta1 * p.rho * p.rho + p.beta2 * rh * rh) * s * s;
    const double cross = 2.0 * p.beta1 * p.sigma1 * p.sigma2 * p.rho * E * E;
    const double base = p.beta1 * p.sigma1 * p.sigma1 * E * E;

    PostRates out;
    out.fB1 = prem - 0.5 * tilt * p.sigma1 * p.sigma1 * E * E + N * N / (2.0 * p.sigma2 * p.sigma2 * D) +
              p.alpha * tab.tilt_lo[j] - p.alpha_hat() * tab.tilt_hi[j];
    out.f1lo = prem - base + ((p.mu - p.r) * E - cross) * s - quad - q * E * tab.z_lo[j];
    out.f1hi = prem + base + ((p.mu - p.r) * E + cross) * s + quad - q * E * tab.z_hi[j];
    return out;
}

template <int N, class Rhs>
void backward_rk4(const StrategyTable& tab, Rhs&& rhs, std::array<Eigen::VectorXd, N>& out) {
    using State = Eigen::Matrix<double, N, 1>;
    const int M = tab.steps;
    const double h = tab.step();
    for (auto& v : out) v.setZero(M + 1);
    State y = State::Zero();
    for (int k = M; k > 0; --k) {
        const State k1 = rhs(2 * k, y);
        const State k2 = rhs(2 * k - 1, State(y - 0.5 * h * k1));
        const State k3 = rhs(2 * k - 1, State(y - 0.5 * h * k2));
        const State k4 = rhs(2 * k - 2, State(y - h * k3));
        y -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) {
            std::ostringstream os;
            os << "backward sweep produced a non-finite intercept at t = " << tab.t[2 * k - 2];
            throw NumericalError(os.str());
        }
        for (int i = 0; i < N; ++i) out[i][k - 1] = y[i];
    }
}

Eigen::VectorXd coarse_grid(const StrategyTable& tab) {
    Eigen::VectorXd g(tab.steps + 1);
    for (int k = 0; k <= tab.steps; ++k) g[k] = tab.t[2 * k];
    return g;
}

Eigen::VectorXd every_other(const Eigen::VectorXd& v) {
    Eigen::VectorXd out((v.size() + 1) / 2);
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = v[2 * k];
    return out;
}

}  // namespace

double pi_s_star(double t, const ModelParams& p) {
    const double rh = p.rho_hat();
    const double D = p.gamma + (2.0 * p.alpha - 1.0) * (p.beta1 * p.rho * p.rho + p.beta2 * rh * rh);
    const double num = (p.mu - p.r) / p.growth(t) -
                       p.sigma1 * p.sigma2 * p.rho * (p.gamma + (2.0 * p.alpha - 1.0) * p.beta1);
    return num / (p.sigma2 * p.sigma2 * D);
}

double reinsurance_foc(double t, double pi_q, const ModelParams& p, const ClaimMeasure& measure,
                       double exp_cap, bool* saturated) {
    const double E = p.growth(t);
    const double a = p.alpha;
    const double ah = p.alpha_hat();
    return measure.integrate([&](double z) {
        const double k = p.beta3 * claim_exponent(E, pi_q, z, p.gamma);
        const double up = std::exp(clamp_exponent(k, exp_cap, saturated));
        const double down = std::exp(clamp_exponent(-k, exp_cap, saturated));
        const double marginal = z * E + p.gamma * pi_q * z * z * E * E;
        return (1.0 + p.eta) * z * E - marginal * (a * up + ah * down);
    });
}

double solve_pi_q_star(double t, const ModelParams& p, const ClaimMeasure& measure, double root_tol,
                       double exp_cap, bool* saturated) {
    const double scale = p.eta * p.growth(t) * measure.moment(1);
    auto F = [&](double q) { return reinsurance_foc(t, q, p, measure, exp_cap, saturated); };
    double lo = 0.0;
    double flo = F(lo);
    if (flo <= root_tol * scale) return 0.0;
    double hi = 1.0;
    double fhi = F(hi);
    int doublings = 0;
    while (fhi > 0.0) {
        if (++doublings > 60) {
            std::ostringstream os;
            os << "no sign change of the reinsurance condition at t = " << t << " up to pi_q = " << hi;
            throw NumericalError(os.str());
        }
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = F(hi);
    }
    if (fhi == 0.0) return hi;
    const auto res = brent_root(F, lo, hi, flo, fhi, 0.0, root_tol * scale, 500);
    if (!std::isfinite(res.x)) throw NumericalError("reinsurance root is not finite");
    return res.x;
}

JumpIntegrals jump_integrals(double t, double pi_q, const ModelParams& p, const ClaimMeasure& measure,
                             double exp_cap, bool* saturated) {
    const double E = p.growth(t);
    JumpIntegrals out;
    const auto& nodes = measure.nodes();
    const auto& w = measure.weights();
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
        const double z = nodes[i];
        const double k = clamp_exponent(p.beta3 * claim_exponent(E, pi_q, z, p.gamma), exp_cap, saturated);
        const double up = std::exp(k);
        const double down = std::exp(-k);
        out.z_lo += w[i] * z * up;
        out.z_hi += w[i] * z * down;
        out.tilt_lo -= w[i] * std::expm1(k);
        out.tilt_hi -= w[i] * std::expm1(-k);
    }
    out.tilt_lo /= p.beta3;
    out.tilt_hi /= p.beta3;
    if (!std::isfinite(out.z_lo) || !std::isfinite(out.tilt_lo)) {
        throw NumericalError("claim integrals overflowed; lower exp_cap or check beta3");
    }
    return out;
}

StrategyTable tabulate_strategy(const ModelParams& p, const ClaimMeasure& measure, const NumericsConfig& num) {
    if (num.time_steps < 1) throw ValidationError("time_steps<1", "time_steps must be at least 1");
    StrategyTable tab;
    tab.steps = num.time_steps;
    tab.horizon = p.T;
    const int n = 2 * num.time_steps + 1;
    tab.t.resize(n);
    tab.growth.resize(n);
    tab.pi_q.resize(n);
    tab.pi_s.resize(n);
    tab.z_lo.resize(n);
    tab.z_hi.resize(n);
    tab.tilt_lo.resize(n);
    tab.tilt_hi.resize(n);
    for (int j = 0; j < n; ++j) {
        const double t = (j == n - 1) ? p.T : p.T * j / (n - 1);
        bool sat = false;
        tab.t[j] = t;
        tab.growth[j] = p.growth(t);
        tab.pi_q[j] = solve_pi_q_star(t, p, measure, num.root_tol, num.exp_cap, &sat);
        tab.pi_s[j] = pi_s_star(t, p);
        const auto ji = jump_integrals(t, tab.pi_q[j], p, measure, num.exp_cap, &sat);
        tab.z_lo[j] = ji.z_lo;
        tab.z_hi[j] = ji.z_hi;
        tab.tilt_lo[j] = ji.tilt_lo;
        tab.tilt_hi[j] = ji.tilt_hi;
        if (sat) ++tab.saturation_events;
    }
    return tab;
}

PostDefaultCoefficients post_default_coeffs(const ModelParams& p, const ClaimMeasure& measure,
                                            const StrategyTable& tab) {
    const double m1 = measure.moment(1);
    std::array<Eigen::VectorXd, 3> out;
    backward_rk4<3>(
        tab,
        [&](int j, const Eigen::Vector3d&) {
            const auto r = post_rates(tab, j, p, m1);
            return Eigen::Vector3d(-r.fB1, -r.f1lo, -r.f1hi);
        },
        out);
    PostDefaultCoefficients c;
    c.grid = coarse_grid(tab);
    c.pi_q = every_other(tab.pi_q);
    c.pi_s = every_other(tab.pi_s);
    c.B1 = out[0];
    c.b1_lo = out[1];
    c.b1_hi = out[2];
    return c;
}

double bond_demand(double t, double gap_lo, double gap_hi, const ModelParams& p) {
    const double zh = p.zeta * p.hP;
    const double num = p.delta - zh + p.gamma * zh * (p.alpha * gap_lo + p.alpha_hat() * gap_hi);
    return num / (p.gamma * p.zeta * zh * p.growth(t));
}

PreDefaultSystem pre_default_system(const ModelParams& p, const ClaimMeasure& measure, const StrategyTable& tab) {
    if (!(p.hP > 0.0) || !(p.zeta > 0.0)) {
        throw NumericalError("defaultable-bond demand is unbounded when hP or zeta is zero");
    }
    const double m1 = measure.moment(1);
    using Vec6 = Eigen::Matrix<double, 6, 1>;
    std::array<Eigen::VectorXd, 6> out;
    Eigen::VectorXd pi_p(tab.steps + 1);

    auto rhs = [&](int j, const Vec6& y) {
        const double B1 = y[0], l1 = y[1], u1 = y[2], B0 = y[3], l0 = y[4], u0 = y[5];
        const double E = tab.growth[j];
        const auto r = post_rates(tab, j, p, m1);
        const double pp = bond_demand(tab.t[j], l1 - l0, u1 - u0, p);
        const double jump = -E * p.zeta * pp;
        const double carry = pp * p.delta * E;
        const double dl = jump + l1 - l0;
        const double du = jump + u1 - u0;
        const double fB0 = r.fB1 + carry + p.hP * (jump + B1) - 0.5 * p.alpha * p.gamma * p.hP * dl * dl -
                           0.5 * p.alpha_hat() * p.gamma * p.hP * du * du;
        const double f0lo = r.f1lo + p.hP * (jump + l1) + carry;
        const double f0hi = r.f1hi + p.hP * (jump + u1) + carry;
        Vec6 d;
        d << -r.fB1, -r.f1lo, -r.f1hi, p.hP * B0 - fB0, p.hP * l0 - f0lo, p.hP * u0 - f0hi;
        return d;
    };
    backward_rk4<6>(tab, rhs, out);

    PreDefaultSystem s;
    s.grid = coarse_grid(tab);
    s.pi_q = every_other(tab.pi_q);
    s.pi_s = every_other(tab.pi_s);
    s.B1 = out[0];
    s.b1_lo = out[1];
    s.b1_hi = out[2];
    s.B0 = out[3];
    s.b0_lo = out[4];
    s.b0_hi = out[5];
    for (int k = 0; k <= tab.steps; ++k) {
        pi_p[k] = bond_demand(s.grid[k], s.b1_lo[k] - s.b0_lo[k], s.b1_hi[k] - s.b0_hi[k], p);
    }
    s.pi_p = pi_p;
    return s;
}

double interpolate(const Eigen::VectorXd& grid, const Eigen::VectorXd& values, double t) {
    const Eigen::Index n = grid.size();
    if (n == 0) throw ValidationError("empty-grid", "cannot interpolate on an empty grid");
    if (n == 1 || t <= grid[0]) return values[0];
    if (t >= grid[n - 1]) return values[n - 1];
    const double h = (grid[n - 1] - grid[0]) / static_cast<double>(n - 1);
    auto i = static_cast<Eigen::Index>((t - grid[0]) / h);
    i = std::clamp<Eigen::Index>(i, 0, n - 2);
    const double w = (t - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

StrategyPoint EquilibriumSolution::at(double t) const {
    return {interpolate(grid, pi_q, t), interpolate(grid, pi_s, t), interpolate(grid, pi_p, t)};
}

Strategy EquilibriumSolution::strategy() const {
    return [g = grid, q = pi_q, s = pi_s, b = pi_p](double t) {
        return StrategyPoint{interpolate(g, q, t), interpolate(g, s, t), interpolate(g, b, t)};
    };
}

EquilibriumSolution solve_equilibrium(const ModelParams& p, const ClaimMeasure& measure,
                                      const NumericsConfig& num) {
    p.validate();
    const auto tab = tabulate_strategy(p, measure, num);
    const auto sys = pre_default_system(p, measure, tab);
    EquilibriumSolution sol;
    sol.grid = sys.grid;
    sol.pi_q = sys.pi_q;
    sol.pi_s = sys.pi_s;
    sol.pi_p = sys.pi_p;
    sol.saturation_events = tab.saturation_events;
    auto& c = sol.coeffs;
    c.grid = sys.grid;
    c.A.resize(sys.grid.size());
    for (Eigen::Index k = 0; k < sys.grid.size(); ++k) c.A[k] = p.growth(sys.grid[k]);
    c.B1 = sys.B1;
    c.B0 = sys.B0;
    c.b1_lo = sys.b1_lo;
    c.b1_hi = sys.b1_hi;
    c.b0_lo = sys.b0_lo;
    c.b0_hi = sys.b0_hi;
    c.rate = p.r;
    c.horizon = p.T;
    return sol;
}

double value_function(double t, double x, DefaultState h, const ValueCoefficients& c) {
    const double slack = 1e-12 * std::max(1.0, c.horizon);
    if (!(t >= -slack && t <= c.horizon + slack)) {
        throw ValidationError("t-range", "value function is defined for t in [0, T]");
    }
    const double A = std::exp(c.rate * (c.horizon - t));
    const auto& B = (h == DefaultState::PostDefault) ? c.B1 : c.B0;
    return A * x + interpolate(c.grid, B, t);
}

// ---------------------------------------------------------------------------

DistortionFunctions::DistortionFunctions(Strategy strategy, const ModelParams& params, double exp_cap)
    : strategy_(std::move(strategy)), params_(params), exp_cap_(exp_cap) {}

double DistortionFunctions::phi1_lo(double t) const {
    const auto& p = params_;
    return p.beta1 * (p.sigma1 + p.sigma2 * p.rho * strategy_(t).pi_s) * p.growth(t);
}

double DistortionFunctions::phi2_lo(double t) const {
    const auto& p = params_;
    return p.beta2 * p.sigma2 * p.rho_hat() * strategy_(t).pi_s * p.growth(t);
}

double DistortionFunctions::signed_exponent(Distortion side, double t, double z) const {
    if (side == Distortion::None) return 0.0;
    const double k = params_.beta3 * claim_exponent(params_.growth(t), strategy_(t).pi_q, z, params_.gamma);
    return clamp_exponent(side == Distortion::Lo ? k : -k, exp_cap_, nullptr);
}

double DistortionFunctions::phi3_lo(double t, double z) const { return phi3(Distortion::Lo, t, z); }
double DistortionFunctions::phi3_hi(double t, double z) const { return phi3(Distortion::Hi, t, z); }

double DistortionFunctions::phi1(Distortion side, double t) const {
    if (side == Distortion::None) return 0.0;
    return side == Distortion::Lo ? phi1_lo(t) : phi1_hi(t);
}

double DistortionFunctions::phi2(Distortion side, double t) const {
    if (side == Distortion::None) return 0.0;
    return side == Distortion::Lo ? phi2_lo(t) : phi2_hi(t);
}

double DistortionFunctions::phi3(Distortion side, double t, double z) const {
    return -std::expm1(signed_exponent(side, t, z));
}

double DistortionFunctions::intensity_factor(Distortion side, double t, double z) const {
    return std::exp(signed_exponent(side, t, z));
}

DistortionFunctions distortions(const EquilibriumSolution& solution, const ModelParams& params, double exp_cap) {
    return DistortionFunctions(solution.strategy(), params, exp_cap);
}

double penalty_rate(const DistortionFunctions& dist, Distortion side, double t, const ClaimMeasure& measure) {
    if (side == Distortion::None) return 0.0;
    return penalty_rate(
        dist.phi1(side, t), dist.phi2(side, t), [&](double z) { return dist.phi3(side, t, z); }, dist.params(),
        measure);
}

double penalty_integral(const DistortionFunctions& dist, Distortion side, double t0, const ClaimMeasure& measure,
                        int intervals) {
    return simpson([&](double s) { return penalty_rate(dist, side, s, measure); }, t0, dist.params().T,
                   intervals);
}

// ---------------------------------------------------------------------------

namespace {

// E * (expected wealth drift net of r X) under the chosen measure, post-default.
double mean_rate(const StrategyPoint& sp, const DistortionFunctions* dist, Distortion side, double t,
                 const ModelParams& p, const ClaimMeasure& measure) {
    const double E = p.growth(t);
    double phi1 = 0.0;
    double phi2 = 0.0;
    double claims = sp.pi_q * measure.moment(1);
    if (side != Distortion::None) {
        phi1 = dist->phi1(side, t);
        phi2 = dist->phi2(side, t);
        claims = sp.pi_q * measure.integrate([&](double z) { return z * dist->intensity_factor(side, t, z); });
    }
    const double c = sp.pi_s * (p.mu - p.r) + (p.theta - p.eta + (1.0 + p.eta) * sp.pi_q) * measure.moment(1) -
                     (p.sigma1 + sp.pi_s * p.sigma2 * p.rho) * phi1 - sp.pi_s * p.sigma2 * p.rho_hat() * phi2 -
                     claims;
    return E * c;
}

void require_distortion(const DistortionFunctions* dist, Distortion side) {
    if (side != Distortion::None && dist == nullptr) {
        throw ValidationError("missing-distortion", "a distorted measure needs distortion functions");
    }
}

}  // namespace

double expected_terminal_intercept(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                   DefaultState h, double t0, const ModelParams& p, const ClaimMeasure& measure,
                                   int intervals) {
    require_distortion(dist, side);
    if (intervals < 1) intervals = 1;
    auto rhs = [&](double t, const Eigen::Vector2d& y) {
        const auto sp = strategy(t);
        const double E = p.growth(t);
        const double c = mean_rate(sp, dist, side, t, p, measure);
        Eigen::Vector2d d;
        d[0] = -c;
        d[1] = p.hP * y[1] - (c + E * sp.pi_p * p.delta + p.hP * (-E * p.zeta * sp.pi_p + y[0]));
        return d;
    };
    const double dt = (p.T - t0) / intervals;
    Eigen::Vector2d y = Eigen::Vector2d::Zero();
    for (int k = intervals; k > 0; --k) {
        const double t = t0 + k * dt;
        const Eigen::Vector2d k1 = rhs(t, y);
        const Eigen::Vector2d k2 = rhs(t - 0.5 * dt, y - 0.5 * dt * k1);
        const Eigen::Vector2d k3 = rhs(t - 0.5 * dt, y - 0.5 * dt * k2);
        const Eigen::Vector2d k4 = rhs(t - dt, y - dt * k3);
        y -= dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return h == DefaultState::PostDefault ? y[0] : y[1];
}

double post_default_terminal_variance(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                      double t0, const ModelParams& p, const ClaimMeasure& measure, int intervals) {
    require_distortion(dist, side);
    const double rh = p.rho_hat();
    return simpson(
        [&](double t) {
            const auto sp = strategy(t);
            const double E = p.growth(t);
            const double a = p.sigma1 + sp.pi_s * p.sigma2 * p.rho;
            const double b = sp.pi_s * p.sigma2 * rh;
            double jumps = measure.moment(2);
            if (side != Distortion::None) {
                jumps = measure.integrate([&](double z) { return z * z * dist->intensity_factor(side, t, z); });
            }
            return E * E * (a * a + b * b + sp.pi_q * sp.pi_q * jumps);
        },
        t0, p.T, intervals);
}

}  // namespace arobust
