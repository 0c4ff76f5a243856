#include "arobust/config.hpp"

#include "arobust/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace arobust {

namespace {

std::string fmt_value(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

[[noreturn]] void fail(const std::string& code, const std::string& what, double value) {
    throw ValidationError(code, "invalid parameters: " + what + " (got " + fmt_value(value) + ")");
}

enum class Slot { Model, Claims, Numerics };

struct KeyInfo {
    std::string_view name;
    Slot slot;
};

constexpr KeyInfo kKeys[] = {
    {"r", Slot::Model},          {"mu", Slot::Model},         {"sigma2", Slot::Model},
    {"rho", Slot::Model},        {"sigma1", Slot::Model},     {"theta", Slot::Model},
    {"eta", Slot::Model},        {"delta", Slot::Model},      {"zeta", Slot::Model},
    {"hP", Slot::Model},         {"gamma", Slot::Model},      {"alpha", Slot::Model},
    {"beta1", Slot::Model},      {"beta2", Slot::Model},      {"beta3", Slot::Model},
    {"T", Slot::Model},          {"T1", Slot::Model},         {"x0", Slot::Model},
    {"lambda", Slot::Claims},    {"muZ", Slot::Claims},       {"sigmaZ", Slot::Claims},
    {"quad_nodes", Slot::Numerics}, {"time_steps", Slot::Numerics}, {"root_tol", Slot::Numerics},
    {"exp_cap", Slot::Numerics}, {"mc_paths", Slot::Numerics}, {"mc_dt", Slot::Numerics},
    {"seed", Slot::Numerics},
};

const KeyInfo* find_key(std::string_view key) {
    for (const auto& k : kKeys) {
        if (k.name == key) return &k;
    }
    return nullptr;
}

template <class M>
auto model_field(M& m, std::string_view key) -> decltype(&m.r) {
    if (key == "r") return &m.r;
    if (key == "mu") return &m.mu;
    if (key == "sigma2") return &m.sigma2;
    if (key == "rho") return &m.rho;
    if (key == "sigma1") return &m.sigma1;
    if (key == "theta") return &m.theta;
    if (key == "eta") return &m.eta;
    if (key == "delta") return &m.delta;
    if (key == "zeta") return &m.zeta;
    if (key == "hP") return &m.hP;
    if (key == "gamma") return &m.gamma;
    if (key == "alpha") return &m.alpha;
    if (key == "beta1") return &m.beta1;
    if (key == "beta2") return &m.beta2;
    if (key == "beta3") return &m.beta3;
    if (key == "T") return &m.T;
    if (key == "T1") return &m.T1;
    if (key == "x0") return &m.x0;
    return nullptr;
}

template <class C>
auto claims_field(C& c, std::string_view key) -> decltype(&c.lambda) {
    if (key == "lambda") return &c.lambda;
    if (key == "muZ") return &c.muZ;
    if (key == "sigmaZ") return &c.sigmaZ;
    return nullptr;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view key, int line) {
    double v = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigError("line " + std::to_string(line) + ": value for '" + std::string(key) +
                          "' is not a decimal number: '" + std::string(text) + "'");
    }
    return v;
}

// Integer keys are read exactly; a double cannot hold every 64-bit seed.
template <class Int>
Int parse_count(std::string_view text, std::string_view key, int line) {
    Int v{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || v < 0) {
        throw ConfigError("line " + std::to_string(line) + ": value for '" + std::string(key) +
                          "' must be a nonnegative integer, got '" + std::string(text) + "'");
    }
    return v;
}

template <class Int>
Int as_count(double v, std::string_view key) {
    if (v != std::floor(v) || v < 0 ||
        v >= std::ldexp(1.0, std::numeric_limits<Int>::digits)) {
        throw ConfigError("value for '" + std::string(key) + "' must be a nonnegative integer, got " +
                          fmt_value(v));
    }
    return static_cast<Int>(v);
}

}  // namespace

double ModelParams::rho_hat() const { return std::sqrt(std::max(0.0, 1.0 - rho * rho)); }

double ModelParams::hQ() const { return delta / zeta; }

double ModelParams::Delta() const { return zeta * hP / delta; }

double ModelParams::growth(double t) const { return std::exp(r * (T - t)); }

void ModelParams::validate() const {
    const double all[] = {r, mu, sigma2, rho, sigma1, theta, eta, delta, zeta, hP,
                          gamma, alpha, beta1, beta2, beta3, T, T1, x0};
    for (double v : all) {
        if (!std::isfinite(v)) fail("non-finite", "all parameters must be finite", v);
    }
    if (!(r > 0)) fail("r<=0", "risk-free rate r must be positive", r);
    if (!(sigma2 > 0)) fail("sigma2<=0", "stock volatility sigma2 must be positive", sigma2);
    if (!(sigma1 >= 0)) fail("sigma1<0", "surplus volatility sigma1 must be nonnegative", sigma1);
    if (!(gamma > 0)) fail("gamma<=0", "risk aversion gamma must be positive", gamma);
    if (!(zeta >= 0 && zeta <= 1)) fail("zeta-range", "loss rate zeta must lie in [0,1]", zeta);
    if (!(rho >= -1 && rho <= 1)) fail("rho-range", "correlation rho must lie in [-1,1]", rho);
    if (!(theta > 0)) fail("theta<=0", "safety loadings must satisfy eta>theta>0", theta);
    if (!(eta > theta)) fail("eta<=theta", "safety loadings must satisfy eta>theta>0", eta);
    if (!(alpha >= 0.5 && alpha <= 1)) fail("alpha-range", "ambiguity attitude must satisfy 1/2<=alpha<=1", alpha);
    if (!(beta1 > 0)) fail("beta1<=0", "ambiguity level beta1 must be positive", beta1);
    if (!(beta2 > 0)) fail("beta2<=0", "ambiguity level beta2 must be positive", beta2);
    if (!(beta3 > 0)) fail("beta3<=0", "ambiguity level beta3 must be positive", beta3);
    if (!(hP >= 0)) fail("hP<0", "default intensity hP must be nonnegative", hP);
    if (!(T > 0)) fail("T<=0", "horizon T must be positive", T);
    if (!(T < T1)) fail("T>=T1", "horizon must precede bond maturity, T<T1", T1);
    if (!(delta >= zeta * hP)) {
        fail("delta<zeta*hP", "default risk premium requires 1/Delta>=1, i.e. delta>=zeta*hP", delta);
    }
}

void ClaimModelSpec::validate() const {
    if (!(std::isfinite(lambda) && lambda > 0)) fail("lambda<=0", "claim intensity lambda must be positive", lambda);
    if (kind == ClaimKind::TruncatedNormal) {
        if (!std::isfinite(muZ)) fail("non-finite", "muZ must be finite", muZ);
        if (!(std::isfinite(sigmaZ) && sigmaZ > 0)) fail("sigmaZ<=0", "claim-size sigmaZ must be positive", sigmaZ);
        return;
    }
    if (table_z.size() < 2 || table_z.size() != table_density.size()) {
        throw ValidationError("table-shape", "tabulated density needs >= 2 matching (z, density) pairs");
    }
    if (!(table_z.front() >= 0)) fail("table-support", "tabulated support must lie in [0, inf)", table_z.front());
    double mass = 0.0;
    for (std::size_t i = 0; i < table_z.size(); ++i) {
        if (!std::isfinite(table_z[i]) || !std::isfinite(table_density[i])) {
            fail("non-finite", "tabulated density must be finite", table_density[i]);
        }
        if (table_density[i] < 0) fail("density<0", "tabulated density must be nonnegative", table_density[i]);
        if (i > 0) {
            if (!(table_z[i] > table_z[i - 1])) fail("table-order", "tabulated z must be increasing", table_z[i]);
            mass += 0.5 * (table_density[i] + table_density[i - 1]) * (table_z[i] - table_z[i - 1]);
        }
    }
    if (!(mass > 0)) fail("density-mass", "tabulated density has zero mass", mass);
}

void NumericsConfig::validate() const {
    if (quad_nodes < 1) fail("quad_nodes<1", "quad_nodes must be >= 1", quad_nodes);
    if (time_steps < 1) fail("time_steps<1", "time_steps must be >= 1", time_steps);
    if (mc_paths < 1) fail("mc_paths<1", "mc_paths must be >= 1", static_cast<double>(mc_paths));
    if (!(root_tol > 0)) fail("root_tol<=0", "root_tol must be positive", root_tol);
    if (!(exp_cap > 0)) fail("exp_cap<=0", "exp_cap must be positive", exp_cap);
    if (!(mc_dt > 0)) fail("mc_dt<=0", "mc_dt must be positive", mc_dt);
}

void Config::validate() const {
    model.validate();
    claims.validate();
    numerics.validate();
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& k : kKeys) out.emplace_back(k.name);
        return out;
    }();
    return keys;
}

bool is_config_key(std::string_view key) { return find_key(key) != nullptr; }

double get_value(const Config& config, std::string_view key) {
    if (const auto* f = model_field(config.model, key)) return *f;
    if (const auto* f = claims_field(config.claims, key)) return *f;
    const auto& n = config.numerics;
    if (key == "quad_nodes") return n.quad_nodes;
    if (key == "time_steps") return n.time_steps;
    if (key == "root_tol") return n.root_tol;
    if (key == "exp_cap") return n.exp_cap;
    if (key == "mc_paths") return static_cast<double>(n.mc_paths);
    if (key == "mc_dt") return n.mc_dt;
    if (key == "seed") return static_cast<double>(n.seed);
    throw ConfigError("unknown parameter '" + std::string(key) + "'");
}

void set_value(Config& config, std::string_view key, double value) {
    if (auto* f = model_field(config.model, key)) {
        *f = value;
        return;
    }
    if (auto* f = claims_field(config.claims, key)) {
        *f = value;
        return;
    }
    auto& n = config.numerics;
    if (key == "quad_nodes") n.quad_nodes = as_count<int>(value, key);
    else if (key == "time_steps") n.time_steps = as_count<int>(value, key);
    else if (key == "root_tol") n.root_tol = value;
    else if (key == "exp_cap") n.exp_cap = value;
    else if (key == "mc_paths") n.mc_paths = as_count<std::int64_t>(value, key);
    else if (key == "mc_dt") n.mc_dt = value;
    else if (key == "seed") n.seed = as_count<std::uint64_t>(value, key);
    else throw ConfigError("unknown parameter '" + std::string(key) + "'");
}

Config parse_config(std::string_view text) {
    Config config;
    std::map<std::string, int, std::less<>> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto raw = trim(line.substr(eq + 1));
        if (!find_key(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        if (!seen.emplace(std::string(key), line_no).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        if (key == "seed") config.numerics.seed = parse_count<std::uint64_t>(raw, key, line_no);
        else if (key == "mc_paths") config.numerics.mc_paths = parse_count<std::int64_t>(raw, key, line_no);
        else set_value(config, key, parse_number(raw, key, line_no));
    }

    for (const auto& k : kKeys) {
        if (k.slot != Slot::Numerics && !seen.contains(k.name)) {
            throw ConfigError("missing required key '" + std::string(k.name) + "'");
        }
    }
    config.validate();
    return config;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_config_string(const Config& config) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (const auto& k : kKeys) {
        const double v = get_value(config, k.name);
        if (k.name == "seed") {
            os << k.name << " = " << config.numerics.seed << '\n';
        } else if (k.name == "mc_paths") {
            os << k.name << " = " << config.numerics.mc_paths << '\n';
        } else {
            os << k.name << " = " << v << '\n';
        }
    }
    return os.str();
}

namespace {

// Power-law decay exponent p of density ~ z^{-p} fitted on the last two
// positive table points; +inf when the table ends at zero density.
double tail_exponent(const ClaimModelSpec& spec) {
    const auto n = spec.table_z.size();
    const double f1 = spec.table_density[n - 2];
    const double f2 = spec.table_density[n - 1];
    if (f2 == 0.0) return std::numeric_limits<double>::infinity();
    if (f1 <= 0.0 || spec.table_z[n - 2] <= 0.0) return 0.0;
    return -std::log(f2 / f1) / std::log(spec.table_z[n - 1] / spec.table_z[n - 2]);
}

}  // namespace

AssumptionReport validate_assumption31(const ClaimModelSpec& spec, const ModelParams& params) {
    params.validate();
    spec.validate();
    AssumptionReport report;
    if (spec.kind == ClaimKind::TruncatedNormal) {
        // e^{c z^2} times the Gaussian density is integrable iff c < 1/(2 sigmaZ^2);
        // half the critical exponent is a safe witness.
        const double critical = 1.0 / (2.0 * spec.sigmaZ * spec.sigmaZ);
        report.ok = true;
        report.witness_c = 0.5 * critical;
        report.message = "Gaussian tail: int_1^inf e^{c z^2} nu(dz) < inf for c = " +
                         fmt_value(report.witness_c) + " < " + fmt_value(critical);
        return report;
    }

    const double p = tail_exponent(spec);
    std::vector<std::string> failed;
    // int^inf z^k z^{-p} dz converges iff p > k + 1
    if (!(p > 3.0)) failed.emplace_back("second moment int z^2 nu(dz) is infinite");
    if (!(p > 2.0)) failed.emplace_back("first moment int z nu(dz) is infinite");
    if (failed.empty()) {
        report.ok = true;
        report.message = "tabulated density: first and second moments finite (tail exponent " +
                         fmt_value(p) + ")";
        return report;
    }
    report.ok = false;
    report.message = "tabulated density violates integrability: ";
    for (std::size_t i = 0; i < failed.size(); ++i) {
        if (i) report.message += "; ";
        report.message += failed[i];
    }
    report.message += " (tail exponent " + fmt_value(p) + ")";
    return report;
}

}  // namespace arobust
