"""Witness functions: the family ``(x + i)^-(1+eps)``, H1 atoms, and a closed-form Hilbert pair."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import SampledFunction, TailModel, UniformGrid, cell_average_indicator


@dataclass(frozen=True)
class ExtremalParams:
    epsilon: float

    def __post_init__(self):
        if not (0 < self.epsilon <= 2):
            raise ValueError(f"epsilon must lie in (0, 2], got {self.epsilon}")

    @property
    def power(self) -> float:
        return 1.0 + self.epsilon


def f_epsilon(p: ExtremalParams, g: UniformGrid) -> SampledFunction:
    """Samples of ``(x + i)^-(1+eps)`` on the principal branch, ``arg(x + i)`` in ``(0, pi)``.

    Far right the phase tends to 1, far left to ``exp(-i pi (1+eps))``.
    """
    s = p.power
    x = g.points
    theta = np.arctan2(1.0, x)
    values = (x * x + 1.0) ** (-s / 2) * np.exp(-1j * s * theta)
    return SampledFunction(g, values, TailModel(s, np.exp(-1j * math.pi * s), 1.0))


def F_epsilon_at(p: ExtremalParams, x, y: float):
    """The holomorphic extension ``(z + i)^-(1+eps)`` at ``z = x + iy``."""
    if not y > 0:
        raise ValueError(f"y must be positive, got {y}")
    z = np.asarray(x, dtype=float) + 1j * (y + 1.0)
    return z ** (-p.power)


def _power_integral(s: float, cut: float = 1e3) -> float:
    # int_R (1+x^2)^-s dx for s > 1/2: quadrature on [0, cut] plus an asymptotic series beyond
    head = quad(lambda x: (1.0 + x * x) ** (-s), 0.0, cut, limit=400, epsabs=0, epsrel=1e-13)[0]
    tail, coef = 0.0, 1.0
    for k in range(6):
        tail += coef * cut ** (1.0 - 2 * s - 2 * k) / (2 * s + 2 * k - 1)
        coef *= -(s + k) / (k + 1)
    return 2.0 * (head + tail)


def l1_mass(epsilon: float) -> float:
    """``int (1+x^2)^-(1+eps)/2 dx``, the L1 norm of the family member."""
    return _power_integral((1.0 + epsilon) / 2)


def next_mass(epsilon: float) -> float:
    """``int (1+x^2)^-(2+eps)/2 dx``."""
    return _power_integral((2.0 + epsilon) / 2)


def residual_bound(epsilon: float, delta: float) -> float:
    """``eps/delta^2 + (1+eps)/delta^2 * next_mass/l1_mass``: the analytic bound on the
    relative residual ``||H f - (int phi) f|| / ||f||`` for kernels on ``[delta, 1]``."""
    return epsilon / delta**2 + (1 + epsilon) / delta**2 * next_mass(epsilon) / l1_mass(epsilon)


# ---------------------------------------------------------------- atoms

ATOM_PROFILES = ("haar", "random")


@dataclass(frozen=True)
class AtomSpec:
    center: float
    radius: float
    profile: str = "haar"
    seed: int = 0
    knots: int = 8

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("atom radius must be positive")
        if self.profile not in ATOM_PROFILES:
            raise ValueError(f"unknown atom profile {self.profile!r}; expected one of {ATOM_PROFILES}")

    @property
    def interval(self) -> tuple[float, float]:
        return self.center - self.radius, self.center + self.radius


def make_atom(a: AtomSpec, g: UniformGrid) -> SampledFunction:
    """Mean-zero function supported in the interval with sup-norm at most ``1/|B|``."""
    lo, hi = a.interval
    x = g.points
    if lo < x[0] or hi > x[-1]:
        raise ValueError(f"atom interval [{lo:g}, {hi:g}] is not inside the grid")
    cap = 1.0 / (hi - lo)
    if a.profile == "haar":
        # outer edges move in to the nearest nodes so no sample leaves the interval; the
        # lobes are cell averages about the midpoint, so their masses cancel exactly and
        # the middle jump sits at its true position rather than on the nearest node
        h = g.spacing
        lo_n = x[0] + math.ceil((lo - x[0]) / h - 1e-9) * h
        hi_n = x[0] + math.floor((hi - x[0]) / h + 1e-9) * h
        if not hi_n > lo_n:
            raise ValueError("atom interval is narrower than the grid resolution")
        mid = 0.5 * (lo_n + hi_n)
        v = cap * (cell_average_indicator(g, lo_n, mid).values - cell_average_indicator(g, mid, hi_n).values)
        if not np.any(v > 0) or not np.any(v < 0):
            raise ValueError("atom interval is narrower than the grid resolution")
        return SampledFunction(g, v)
    inside = (x > lo) & (x < hi)
    if inside.sum() < 3:
        raise ValueError("atom interval is narrower than the grid resolution")
    rng = np.random.default_rng(a.seed)
    kx = np.linspace(lo, hi, a.knots + 2)
    ky = np.concatenate([[0.0], rng.standard_normal(a.knots), [0.0]])
    xs = x[inside]
    prof = np.interp(xs, kx, ky)
    # remove the mean with a window vanishing at both ends, so the atom stays continuous
    win = np.sin(np.pi * (xs - lo) / (hi - lo)) ** 2
    prof -= win * (prof.sum() / win.sum())
    v = np.zeros(g.num_points)
    # rescaling (not clipping) keeps the mean at zero
    v[inside] = prof * (cap / np.max(np.abs(prof)))
    return SampledFunction(g, v)


def converse_pair(g: UniformGrid) -> tuple[SampledFunction, SampledFunction]:
    """``f = x/(x^2+1)^2`` and its Hilbert transform ``(x^2-1)/(2 (x^2+1)^2)``."""
    x = g.points
    q = (x * x + 1.0) ** 2
    f = SampledFunction(g, x / q, TailModel(3.0, -1.0, 1.0))
    hf = SampledFunction(g, (x * x - 1.0) / (2.0 * q), TailModel(2.0, 0.5, 0.5))
    return f, hf
