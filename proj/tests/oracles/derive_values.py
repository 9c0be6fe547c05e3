"""Independent reference values frozen into the C++ tests.

Correlations come from the Lindblad master equation propagated with a matrix
exponential (quantum regression), not from the closed forms used in the
library. Integrals use scipy adaptive quadrature.
"""
import numpy as np
from scipy.linalg import expm
from scipy.integrate import quad
from scipy.special import wofz, erf, voigt_profile

TWO_PI = 2 * np.pi


def liouvillian(gamma, omega):
    sm = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e| in basis (e, g)
    h = 0.5 * omega * (sm + sm.conj().T)
    eye = np.eye(2)

    def op(a, b):  # vec(A X B) = (B^T kron A) vec(X), column stacking
        return np.kron(b.T, a)

    lv = -1j * (op(h, eye) - op(eye, h))
    lv += gamma * (op(sm, sm.conj().T) - 0.5 * op(sm.conj().T @ sm, eye) - 0.5 * op(eye, sm.conj().T @ sm))
    return lv, sm


def vec(m):
    return m.reshape(-1, order="F")


def unvec(v):
    return v.reshape(2, 2, order="F")


def steady(lv):
    w, v = np.linalg.eig(lv)
    rho = unvec(v[:, np.argmin(abs(w))])
    return rho / np.trace(rho)


def correlations(gamma_mhz, ratio, tau_ns):
    gamma = TWO_PI * gamma_mhz * 1e6
    omega = ratio * gamma
    lv, sm = liouvillian(gamma, omega)
    rho = steady(lv)
    sp = sm.conj().T
    prop = expm(lv * tau_ns * 1e-9)
    # G1(tau) = Tr[sp U(tau)(sm rho)], G2 = Tr[sp sm U(tau)(sm rho sp)]
    g1 = np.trace(sp @ unvec(prop @ vec(sm @ rho)))
    n = np.trace(sp @ sm @ rho).real
    g2 = np.trace(sp @ sm @ unvec(prop @ vec(sm @ rho @ sp))).real / n**2
    return (g1 / np.trace(sp @ sm @ rho)).real, g2


def g2_closed(gamma, omega, tau):
    mu = np.sqrt(complex(omega**2 - gamma**2 / 16))
    t = abs(tau)
    v = 1 - np.exp(-0.75 * gamma * t) * (np.cos(mu * t) + 0.75 * gamma / mu * np.sin(mu * t))
    return v.real


def gauss(t, sigma):
    return np.exp(-0.5 * (t / sigma) ** 2) / (sigma * np.sqrt(TWO_PI))


def smoothed_g2_zero(gamma_mhz, ratio, fwhm_ps, xi=0.0):
    gamma = TWO_PI * gamma_mhz * 1e6
    sigma = fwhm_ps * 1e-12 / 2.354820045030949382
    keep = (1 - xi) ** 2
    f = lambda t: (keep * g2_closed(gamma, ratio * gamma, t) + 1 - keep) * gauss(t, sigma)
    val, _ = quad(f, 0, 12 * sigma, epsabs=0, epsrel=1e-13, limit=400)
    return 2 * val


if __name__ == "__main__":
    for g, r, t in [(233, 0.48, 0.5), (233, 0.48, 2.0), (167, 0.34, 1.0), (233, 0.1, 1.0), (233, 3.0, 0.3)]:
        g1, g2 = correlations(g, r, t)
        print(f"corr gamma={g} ratio={r} tau_ns={t}: g1={g1:.15e} g2={g2:.15e}")
    for z in [1 + 0.5j, 3 + 0.1j, 0.2 + 2j, 6 + 0.01j]:
        w = wofz(z)
        print(f"wofz({z}) = {w.real:.15e} {w.imag:+.15e}j")
    s, lw, nu = 68.0, 233.0, 150.0
    print(f"voigt ratio nu={nu}: {voigt_profile(nu, s, lw / 2) / voigt_profile(0, s, lw / 2):.15e}")
    p = erf(0.1 / (15 * np.sqrt(2)))
    q, _ = quad(lambda x: np.sqrt(2 / np.pi) / 15 * np.exp(-x**2 / 450), 0, 0.1, epsabs=0, epsrel=1e-13)
    print(f"pair probability: {p:.15e} quad {q:.15e} pairs {0.5 * p * 6400:.12f}")
    for g in [100, 167, 233, 500]:
        print(f"jitter g2(0) gamma={g}: {smoothed_g2_zero(g, 0.3, 226):.12e}")
    print(f"measured g2_B(0) xi=0.017: {smoothed_g2_zero(167, 0.34, 226, 0.017):.12e}")
