"""Independent reference values, computed with scipy quadrature and closed forms only.

Nothing here imports the package. The test modules freeze the printed numbers;
``test_oracles.py`` recomputes them to guard against drift.
"""

import math

import numpy as np
from scipy import integrate, special


def power_mass(s: float) -> float:
    """``int_R (1+x^2)^-s dx`` by adaptive quadrature on ``[0, 1e6]`` plus the asymptotic tail."""
    cut = 1e6
    head = integrate.quad(lambda x: (1 + x * x) ** (-s), 0, 1, epsrel=1e-13)[0]
    # substitute x = e^u on [1, cut] to keep the integrand tame
    head += integrate.quad(lambda u: math.exp(u) * (1 + math.exp(2 * u)) ** (-s), 0, math.log(cut), epsrel=1e-13, limit=400)[0]
    tail = cut ** (1 - 2 * s) / (2 * s - 1) - s * cut ** (-1 - 2 * s) / (2 * s + 1)
    return 2 * (head + tail)


def power_mass_closed(s: float) -> float:
    return math.sqrt(math.pi) * math.gamma(s - 0.5) / math.gamma(s)


def A(eps: float) -> float:
    return power_mass((1 + eps) / 2)


def B(eps: float) -> float:
    return power_mass((2 + eps) / 2)


def residual_bound(eps: float, delta: float) -> float:
    return eps / delta**2 + (1 + eps) / delta**2 * B(eps) / A(eps)


def hardy_tail_average(x: float, a: float, b: float) -> float:
    """``int_x^inf chi_[a,b](s) ds / s``."""
    lo = max(x, a)
    return math.log(b / lo) if lo < b else 0.0


def hardy_average(x: float, a: float, b: float) -> float:
    """``(1/x) int_0^x chi_[a,b](s) ds`` for ``x > 0``."""
    return max(0.0, min(x, b) - a) / x if x > a else 0.0


def haar_hilbert_l1() -> float:
    """L1 norm of ``(1/pi) ln|x (x-1) / (x-1/2)^2|``, the transform of chi_[0,1/2] - chi_[1/2,1]."""
    g = lambda x: abs(math.log(abs(x * (x - 1)) / (x - 0.5) ** 2)) / math.pi  # noqa: E731
    # zeros of x(x-1) = (x-1/2)^2 +- ... : x(x-1) = -(x-1/2)^2 gives x = 1/2 +- 1/(2 sqrt 2)
    r = 0.5 / math.sqrt(2)
    pts = [0.0, 0.5 - r, 0.5, 0.5 + r, 1.0]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += integrate.quad(g, a, b, limit=200, epsrel=1e-12)[0]
    # the two half-lines agree by symmetry about 1/2; x = 1/u maps (1, inf) onto (0, 1)
    total += 2 * integrate.quad(lambda u: g(1 / u) / u**2, 0, 1, limit=200, epsrel=1e-12)[0]
    return total


def hausdorff_pairing(phi_lo: float, phi_hi: float, f, g, lo: float, hi: float) -> float:
    """``int int f(x/t) phi(t)/t g(x) dt dx`` for ``phi = chi_[phi_lo, phi_hi]``, by 2-d quadrature."""
    inner = lambda x: integrate.quad(lambda t: f(x / t) / t, phi_lo, phi_hi, limit=200, epsabs=1e-13)[0]  # noqa: E731
    return integrate.quad(lambda x: inner(x) * g(x), lo, hi, limit=200, epsabs=1e-13)[0]


def adjoint_pairing(phi_lo: float, phi_hi: float, f, g, lo: float, hi: float) -> float:
    """``int f(x) int g(t x) phi(t) dt dx``."""
    inner = lambda x: integrate.quad(lambda t: g(t * x), phi_lo, phi_hi, limit=200, epsabs=1e-13)[0]  # noqa: E731
    return integrate.quad(lambda x: f(x) * inner(x), lo, hi, limit=200, epsabs=1e-13)[0]


def poisson_family_at(eps: float, x: float, y: float) -> complex:
    """``(P_y * f_eps)(x)`` by direct quadrature against ``(x + i)^-(1+eps)``."""
    s = 1 + eps
    f = lambda u: (u + 1j) ** (-s)  # noqa: E731
    P = lambda u: y / (math.pi * ((x - u) ** 2 + y * y))  # noqa: E731
    re = integrate.quad(lambda u: (P(u) * f(u)).real, -np.inf, np.inf, limit=400, epsabs=1e-13)[0]
    im = integrate.quad(lambda u: (P(u) * f(u)).imag, -np.inf, np.inf, limit=400, epsabs=1e-13)[0]
    return complex(re, im)


def gaussian_bump_maximal(xs, scales):
    """``max_t |phi * Phi_t|(x)`` with ``phi`` the unit Gaussian and ``Phi`` the unit Gaussian mollifier:
    the convolution is a Gaussian of variance ``1 + t^2``."""
    xs = np.asarray(xs, dtype=float)[:, None]
    var = 1.0 + np.asarray(scales)[None, :] ** 2
    return (np.exp(-xs**2 / (2 * var)) / np.sqrt(2 * np.pi * var)).max(axis=1)


if __name__ == "__main__":
    print("A(0.1)", repr(A(0.1)), repr(power_mass_closed(0.55)))
    for e in (0.8, 0.4, 0.2, 0.1, 0.05):
        print("eps", e, "A", repr(A(e)), "B", repr(B(e)), "bound", repr(residual_bound(e, 0.25)))
    print("haar H l1", repr(haar_hilbert_l1()))
    print("ln2", math.log(2), "hardy", hardy_average(2, 0, 1))
    print("poisson f1 (0,1)", poisson_family_at(1.0, 0.0, 1.0))
    for x in (-3.0, 0.0, 2.0):
        print("poisson f0.5", x, repr(poisson_family_at(0.5, x, 2.0)), repr((x + 3j) ** -1.5))
