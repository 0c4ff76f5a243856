"""Independent reference values for the C++ test suites.

Uses adaptive quadrature (scipy.integrate.quad) over the full truncated-normal
support, brentq for the reinsurance root, and a tight-tolerance solve_ivp for
the coupled pre-default system. None of this shares code with the C++ path.
"""
import numpy as np
from scipy import integrate, optimize, stats

base = dict(alpha=0.8, gamma=0.5, theta=0.1, eta=0.2, beta1=1.0, beta2=3.0,
            beta3=0.1, mu=0.1, r=0.05, lam=1.0, sigma1=0.5, sigma2=0.2,
            rho=-0.5, delta=0.01, zeta=0.5, hP=0.002, T=10.0, muZ=1.0, sigmaZ=0.1)


def tn_pdf(z, p):
    a = -p["muZ"] / p["sigmaZ"]
    return stats.norm.pdf(z, p["muZ"], p["sigmaZ"]) / stats.norm.sf(a)


def nu_int(g, p):
    lo = max(0.0, p["muZ"] - 12 * p["sigmaZ"])
    hi = p["muZ"] + 12 * p["sigmaZ"]
    val, _ = integrate.quad(lambda z: g(z) * tn_pdf(z, p), lo, hi,
                            epsabs=0, epsrel=1e-13, limit=400)
    return p["lam"] * val


def tn_moments(p):
    a = -p["muZ"] / p["sigmaZ"]
    d = stats.truncnorm(a, np.inf, loc=p["muZ"], scale=p["sigmaZ"])
    return d.mean(), d.moment(2)


def K(t, q, z, p):
    E = np.exp(p["r"] * (p["T"] - t))
    return q * z * E + 0.5 * p["gamma"] * q * q * z * z * E * E


def foc(t, q, p):
    E = np.exp(p["r"] * (p["T"] - t))
    a, ah, b3, g = p["alpha"], 1 - p["alpha"], p["beta3"], p["gamma"]

    def integrand(z):
        k = K(t, q, z, p)
        lin = z * E + g * q * z * z * E * E
        return (1 + p["eta"]) * z * E - a * lin * np.exp(b3 * k) - ah * lin * np.exp(-b3 * k)
    return nu_int(integrand, p)


def pi_q(t, p):
    hi = 1.0
    while foc(t, hi, p) > 0:
        hi *= 2
    return optimize.brentq(lambda q: foc(t, q, p), 0.0, hi, xtol=1e-15, rtol=1e-15)


def pi_s(t, p):
    rh2 = 1 - p["rho"] ** 2
    D = p["gamma"] + (2 * p["alpha"] - 1) * (p["beta1"] * p["rho"] ** 2 + p["beta2"] * rh2)
    num = ((p["mu"] - p["r"]) * np.exp(-p["r"] * (p["T"] - t))
           - p["sigma1"] * p["sigma2"] * p["rho"] * (p["gamma"] + (2 * p["alpha"] - 1) * p["beta1"]))
    return num / (p["sigma2"] ** 2 * D)


def coefficients(p, t_eval=0.0):
    """Integrate y = (B1, b1lo, b1hi, B0, b0lo, b0hi) backward from T."""
    r, a, ah, g, b1, b2, b3 = p["r"], p["alpha"], 1 - p["alpha"], p["gamma"], p["beta1"], p["beta2"], p["beta3"]
    s1, s2, rho = p["sigma1"], p["sigma2"], p["rho"]
    rh2 = 1 - rho ** 2
    m1 = nu_int(lambda z: z, p)
    D = g + (2 * a - 1) * (b1 * rho ** 2 + b2 * rh2)
    zeta, hP, delta = p["zeta"], p["hP"], p["delta"]

    def rhs(t, y):
        B1, l1, u1, B0, l0, u0 = y
        E = np.exp(r * (p["T"] - t))
        q = pi_q(t, p)
        s = pi_s(t, p)
        zl = nu_int(lambda z: z * np.exp(b3 * K(t, q, z, p)), p)
        zu = nu_int(lambda z: z * np.exp(-b3 * K(t, q, z, p)), p)
        jl = nu_int(lambda z: -np.expm1(b3 * K(t, q, z, p)), p)
        ju = nu_int(lambda z: -np.expm1(-b3 * K(t, q, z, p)), p)
        prem = (p["theta"] - p["eta"] + (1 + p["eta"]) * q) * E * m1
        N = (p["mu"] - r) - s1 * s2 * rho * g * E - (2 * a - 1) * b1 * s1 * s2 * rho * E
        fB = (prem - 0.5 * g * s1 ** 2 * E ** 2 - 0.5 * (2 * a - 1) * b1 * s1 ** 2 * E ** 2
              + N ** 2 / (2 * s2 ** 2 * D) + a / b3 * jl - ah / b3 * ju)
        quad = s2 ** 2 * E ** 2 * (b1 * rho ** 2 + b2 * rh2) * s * s
        fl = (prem - b1 * s1 ** 2 * E ** 2 + ((p["mu"] - r) * E - 2 * b1 * s1 * s2 * rho * E ** 2) * s
              - quad - q * E * zl)
        fu = (prem + b1 * s1 ** 2 * E ** 2 + ((p["mu"] - r) * E + 2 * b1 * s1 * s2 * rho * E ** 2) * s
              + quad - q * E * zu)
        pp = (delta - zeta * hP + g * zeta * hP * (a * (l1 - l0) + ah * (u1 - u0))) / (g * zeta ** 2 * hP * E)
        jump = -E * pp * zeta
        fB0 = (fB + pp * delta * E + hP * (jump + B1)
               - 0.5 * a * g * (jump + l1 - l0) ** 2 * hP - 0.5 * ah * g * (jump + u1 - u0) ** 2 * hP)
        fl0 = fl + hP * (jump + l1) + pp * delta * E
        fu0 = fu + hP * (jump + u1) + pp * delta * E
        return [-fB, -fl, -fu, hP * B0 - fB0, hP * l0 - fl0, hP * u0 - fu0]

    sol = integrate.solve_ivp(rhs, (p["T"], t_eval), np.zeros(6), method="DOP853",
                              rtol=1e-12, atol=1e-13)
    y = sol.y[:, -1]
    E = np.exp(r * (p["T"] - t_eval))
    pp = (delta - zeta * hP + g * zeta * hP * (a * (y[1] - y[4]) + ah * (y[2] - y[5]))) / (g * zeta ** 2 * hP * E)
    return y, pp


if __name__ == "__main__":
    p = dict(base)
    m1, m2 = tn_moments(p)
    print("E[Z]   =", repr(m1))
    print("E[Z^2] =", repr(m2))
    print("nu-quad m1 =", repr(nu_int(lambda z: z, p)), " m2 =", repr(nu_int(lambda z: z * z, p)))
    for t in (0.0, 5.0, 10.0):
        print(f"pi_q({t}) =", repr(pi_q(t, p)))
    print("pi_s(T) =", repr(pi_s(10.0, p)), " pi_s(0) =", repr(pi_s(0.0, p)))
    print("pi_p(T) =", repr((p["delta"] - p["zeta"] * p["hP"]) / (p["gamma"] * p["zeta"] ** 2 * p["hP"])))
    y, pp = coefficients(p)
    print("B1(0), b1lo(0), b1hi(0), B0(0), b0lo(0), b0hi(0) =", [repr(v) for v in y])
    print("pi_p(0) =", repr(pp))
