#include "arobust/simulator.hpp"

#include "arobust/errors.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <thread>

namespace arobust {

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    // splitmix64 finaliser applied to a running combination
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ tag) ^ index);
}

namespace {

// Coefficients frozen at the midpoint of each step.
struct StepCoeffs {
    double drift_post = 0.0;
    double drift_pre = 0.0;
    double vol = 0.0;
    double pi_q = 0.0;
    double pi_p = 0.0;
    double growth = 0.0;  // e^{r(T - mid)}
};

struct Engine {
    const ModelParams& p;
    const ClaimMeasure& measure;
    Distortion side;
    SimulationSettings cfg;
    int steps = 0;
    double dt = 0.0;
    std::vector<StepCoeffs> coeffs;
    double rate_bound = 0.0;    // dominating claim intensity for thinning
    double factor_bound = 1.0;  // rate_bound / lambda

    Engine(const Strategy& strategy, const DistortionFunctions* dist, Distortion s, const ModelParams& params,
           const ClaimMeasure& m, const SimulationSettings& settings)
        : p(params), measure(m), side(s), cfg(settings) {
        if (side != Distortion::None && dist == nullptr) {
            throw ValidationError("missing-distortion", "a distorted measure needs distortion functions");
        }
        const double span = p.T - cfg.t0;
        if (!(span > 0.0)) throw ValidationError("t-range", "simulation start must lie before T");
        if (!(cfg.dt > 0.0) || cfg.dt > p.T / 10.0) {
            throw ValidationError("dt-range", "simulation step must satisfy 0 < dt <= T/10");
        }
        steps = std::max(1, static_cast<int>(std::lround(span / cfg.dt)));
        dt = span / steps;
        coeffs.resize(static_cast<std::size_t>(steps));
        const double m1 = measure.moment(1);
        const double rh = p.rho_hat();
        for (int k = 0; k < steps; ++k) {
            const double mid = cfg.t0 + (k + 0.5) * dt;
            const auto sp = strategy(mid);
            const double phi1 = side == Distortion::None ? 0.0 : dist->phi1(side, mid);
            const double phi2 = side == Distortion::None ? 0.0 : dist->phi2(side, mid);
            const double a = p.sigma1 + sp.pi_s * p.sigma2 * p.rho;
            const double b = sp.pi_s * p.sigma2 * rh;
            auto& c = coeffs[static_cast<std::size_t>(k)];
            // compensated form: (theta - eta + eta q) m1 + q int z phi3 nu, plus the
            // compensator q int z (1 - phi3) nu of the raw claims subtracted below
            c.drift_post = sp.pi_s * (p.mu - p.r) + (p.theta - p.eta + (1.0 + p.eta) * sp.pi_q) * m1 - a * phi1 -
                           b * phi2;
            // pi_p (1 - Delta) delta + pi_p zeta hP
            c.drift_pre = c.drift_post + sp.pi_p * p.delta;
            c.vol = std::hypot(a, b);
            c.pi_q = sp.pi_q;
            c.pi_p = sp.pi_p;
            c.growth = p.growth(mid);
            if (side != Distortion::None) {
                for (Eigen::Index i = 0; i < measure.nodes().size(); ++i) {
                    factor_bound = std::max(factor_bound, factor(c, measure.nodes()[i]));
                }
                factor_bound = std::max(factor_bound, factor(c, measure.support_upper()));
                factor_bound = std::max(factor_bound, factor(c, measure.support_lower()));
            }
        }
        rate_bound = measure.intensity() * factor_bound;
    }

    // 1 - phi3 at the step midpoint
    [[nodiscard]] double factor(const StepCoeffs& c, double z) const {
        if (side == Distortion::None) return 1.0;
        double k = p.beta3 * claim_exponent(c.growth, c.pi_q, z, p.gamma);
        if (side == Distortion::Hi) k = -k;
        return std::exp(std::clamp(k, -cfg.exp_cap, cfg.exp_cap));
    }

    [[nodiscard]] std::uint64_t tag() const {
        return side == Distortion::Lo ? 1 : side == Distortion::Hi ? 2 : 0;
    }

    // Runs one path; returns terminal wealth. `rec` (optional) receives the full path.
    double run(std::int64_t index, std::int32_t& claim_count, bool& defaulted, WealthPath* rec) const {
        RandomStream rng(stream_key(cfg.seed, tag(), static_cast<std::uint64_t>(index)));
        boost::random::normal_distribution<double> normal(0.0, 1.0);
        boost::random::exponential_distribution<double> unit_exp(1.0);
        boost::random::uniform_01<double> u01;

        const double sqdt = std::sqrt(dt);
        const double g = std::exp(p.r * dt);
        const double g_half = std::exp(0.5 * p.r * dt);
        const double horizon = p.T;

        bool pre = cfg.h0 == DefaultState::PreDefault;
        double tau = std::numeric_limits<double>::infinity();
        if (pre && p.hP > 0.0) tau = cfg.t0 + unit_exp(rng) / p.hP;
        double next_claim = rate_bound > 0.0 ? cfg.t0 + unit_exp(rng) / rate_bound
                                             : std::numeric_limits<double>::infinity();

        double x = cfg.x0;
        claim_count = 0;
        if (rec) {
            rec->times.reserve(static_cast<std::size_t>(steps) + 1);
            rec->wealth.reserve(static_cast<std::size_t>(steps) + 1);
            rec->default_state.reserve(static_cast<std::size_t>(steps) + 1);
            rec->times.push_back(cfg.t0);
            rec->wealth.push_back(x);
            rec->default_state.push_back(pre ? 0 : 1);
        }
        for (int k = 0; k < steps; ++k) {
            const auto& c = coeffs[static_cast<std::size_t>(k)];
            const double t_end = (k + 1 == steps) ? horizon : cfg.t0 + (k + 1) * dt;
            double inc = (pre ? c.drift_pre : c.drift_post) * dt + c.vol * sqdt * normal(rng);
            while (next_claim <= t_end) {
                const double z = measure.draw_size(rng);
                const bool accept = side == Distortion::None || u01(rng) * factor_bound < factor(c, z);
                if (accept) {
                    inc -= c.pi_q * z;
                    ++claim_count;
                    if (rec) rec->claim_log.emplace_back(next_claim, z);
                }
                next_claim += unit_exp(rng) / rate_bound;
            }
            if (pre && tau <= t_end) {
                inc -= p.zeta * c.pi_p;
                pre = false;
                if (rec) rec->default_time = tau;
            }
            // exact compounding; shocks act at the step midpoint
            x = x * g + g_half * inc;
            if (rec) {
                rec->times.push_back(t_end);
                rec->wealth.push_back(x);
                rec->default_state.push_back(pre ? 0 : 1);
            }
        }
        defaulted = tau <= horizon;
        return x;
    }
};

template <class Body>
void parallel_chunks(std::int64_t n, unsigned threads, Body&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, std::max<std::int64_t>(1, n)));
    if (threads == 1) {
        body(std::int64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<WealthPath> simulate_wealth(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                        const ModelParams& params, const ClaimMeasure& measure,
                                        const SimulationSettings& settings) {
    const Engine engine(strategy, dist, side, params, measure, settings);
    std::vector<WealthPath> paths(static_cast<std::size_t>(std::max<std::int64_t>(0, settings.n_paths)));
    parallel_chunks(settings.n_paths, settings.threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            std::int32_t count = 0;
            bool defaulted = false;
            engine.run(i, count, defaulted, &paths[static_cast<std::size_t>(i)]);
        }
    });
    return paths;
}

TerminalSample simulate_terminal(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                 const ModelParams& params, const ClaimMeasure& measure,
                                 const SimulationSettings& settings) {
    const Engine engine(strategy, dist, side, params, measure, settings);
    const auto n = static_cast<std::size_t>(std::max<std::int64_t>(0, settings.n_paths));
    TerminalSample out;
    out.wealth.resize(n);
    out.claims.resize(n);
    out.defaulted.resize(n);
    out.elapsed = params.T - settings.t0;
    parallel_chunks(settings.n_paths, settings.threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            const auto k = static_cast<std::size_t>(i);
            bool defaulted = false;
            out.wealth[k] = engine.run(i, out.claims[k], defaulted, nullptr);
            out.defaulted[k] = defaulted ? 1 : 0;
        }
    });
    return out;
}

std::vector<double> bond_price_path(const WealthPath& path, const ModelParams& params) {
    if (params.T > params.T1) throw ValidationError("T>=T1", "bond maturity T1 must not precede T");
    const double spread = params.r + params.delta;
    const double tau = path.default_time;
    std::vector<double> out;
    out.reserve(path.times.size());
    for (const double t : path.times) {
        if (t < tau) {
            out.push_back(std::exp(-spread * (params.T1 - t)));
        } else {
            out.push_back((1.0 - params.zeta) * std::exp(-spread * (params.T1 - tau)) * std::exp(params.r * (t - tau)));
        }
    }
    return out;
}

ObjectiveEstimate summarize_terminal(const std::vector<double>& wealth, double gamma, double penalty, double sign) {
    const auto n = static_cast<std::int64_t>(wealth.size());
    if (n < 100) throw ValidationError("paths-too-few", "paths too few: at least 100 paths are needed");
    double mean = 0.0;
    for (const double x : wealth) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const double x : wealth) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(n - 1);

    // influence function of mean - (gamma/2) var
    double s1 = 0.0;
    double s2 = 0.0;
    for (const double x : wealth) {
        const double d = x - mean;
        const double psi = d - 0.5 * gamma * (d * d - var);
        s1 += psi;
        s2 += psi * psi;
    }
    const double dn = static_cast<double>(n);
    const double psi_var = (s2 - s1 * s1 / dn) / (dn - 1.0);

    ObjectiveEstimate est;
    est.mean = mean;
    est.variance = var;
    est.penalty = penalty;
    est.j_value = mean - 0.5 * gamma * var + sign * penalty;
    est.std_error = std::sqrt(psi_var / dn);
    est.mean_std_error = std::sqrt(var / dn);
    return est;
}

ObjectiveEstimate estimate_objective(const Strategy& strategy, const DistortionFunctions* dist, Distortion side,
                                     const ModelParams& params, const ClaimMeasure& measure,
                                     const SimulationSettings& settings) {
    if (settings.n_paths < 100) {
        throw ValidationError("paths-too-few", "paths too few: at least 100 paths are needed");
    }
    const auto sample = simulate_terminal(strategy, dist, side, params, measure, settings);
    double penalty = 0.0;
    double sign = 0.0;
    if (side != Distortion::None) {
        penalty = penalty_integral(*dist, side, settings.t0, measure);
        sign = side == Distortion::Lo ? 1.0 : -1.0;
    }
    return summarize_terminal(sample.wealth, params.gamma, penalty, sign);
}

RobustEstimate robust_objective(const Strategy& strategy, const DistortionFunctions& dist, const ModelParams& params,
                                const ClaimMeasure& measure, const SimulationSettings& settings) {
    RobustEstimate out;
    out.lo = estimate_objective(strategy, &dist, Distortion::Lo, params, measure, settings);
    out.hi = estimate_objective(strategy, &dist, Distortion::Hi, params, measure, settings);
    const double a = params.alpha;
    const double ah = params.alpha_hat();
    out.value = a * out.lo.j_value + ah * out.hi.j_value;
    out.std_error = std::sqrt(a * a * out.lo.std_error * out.lo.std_error + ah * ah * out.hi.std_error * out.hi.std_error);
    return out;
}

void write_paths_csv(std::ostream& out, const std::vector<WealthPath>& paths) {
    const auto old_flags = out.flags();
    const auto old_prec = out.precision();
    out << std::setprecision(17);
    out << "path_id,time,wealth,default_state\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& path = paths[i];
        for (std::size_t k = 0; k < path.times.size(); ++k) {
            out << i << ',' << path.times[k] << ',' << path.wealth[k] << ',' << path.default_state[k] << '\n';
        }
    }
    out.flags(old_flags);
    out.precision(old_prec);
}

}  // namespace arobust
