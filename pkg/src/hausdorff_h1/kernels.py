"""Nonnegative integrable kernels on (0, inf) and their moments.

A :class:`KernelSpec` is a base profile (indicator, power law, smooth bump, or
a table on a logarithmic grid) composed with a multiplier, a dilation of the
argument and a window::

    phi(t) = scale_factor * profile(dilation * t) * 1[window_lo <= t <= window_hi]

The window/dilation pair is what makes the truncation ``phi * 1[delta, 1]`` and
the dilate-and-cut ``phi(m t) * 1(0, 1]`` closed under the type.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Tuple, Union

import numpy as np
from scipy import integrate as _quad

INF = math.inf


@dataclass(frozen=True)
class Indicator:
    a: float
    b: float

    def __post_init__(self):
        # a = 0 is allowed: the flat kernel 1(0, 1] generates the adjoint Hardy operator
        if not (0 <= self.a < self.b < INF):
            raise ValueError(f"indicator needs 0 <= a < b < inf, got ({self.a}, {self.b})")

    def support(self):
        return self.a, self.b

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return ((t >= self.a) & (t <= self.b)).astype(float)

    def power_integral(self, q: float, lo: float, hi: float) -> float:
        lo, hi = max(lo, self.a), min(hi, self.b)
        return _power_integral(q, lo, hi)


@dataclass(frozen=True)
class PowerLaw:
    power: float
    a: float
    b: float = INF

    def __post_init__(self):
        if not (0 <= self.a <= self.b):
            raise ValueError(f"power law support needs 0 <= a <= b, got ({self.a}, {self.b})")
        if self.b == INF and self.power >= -1:
            raise ValueError("power law with unbounded support needs power < -1")
        if self.a == 0 and self.power <= -1:
            raise ValueError("power law touching 0 needs power > -1")

    def support(self):
        return self.a, self.b

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.a) & (t <= self.b)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(inside, np.power(np.where(inside, t, 1.0), self.power), 0.0)

    def power_integral(self, q: float, lo: float, hi: float) -> float:
        lo, hi = max(lo, self.a), min(hi, self.b)
        return _power_integral(self.power + q, lo, hi)


_BUMP_NORM = _quad.quad(lambda u: math.exp(-1.0 / (1.0 - u * u)), -1.0, 1.0, epsabs=1e-14, epsrel=1e-12)[0]


def _bump_profile(u):
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(inside, np.exp(-1.0 / np.where(inside, 1.0 - u * u, 1.0)), 0.0)


@dataclass(frozen=True)
class BumpAtOne:
    """C-infinity bump on ``[1 - width, 1 + width]`` with total mass ``mass``."""

    width: float
    mass: float = 1.0

    def __post_init__(self):
        if not (0 < self.width < 1):
            raise ValueError(f"bump width must lie in (0, 1), got {self.width}")
        if not self.mass > 0:
            raise ValueError(f"bump mass must be positive, got {self.mass}")

    def support(self):
        return 1.0 - self.width, 1.0 + self.width

    def __call__(self, t):
        return self.mass / (self.width * _BUMP_NORM) * _bump_profile((np.asarray(t, dtype=float) - 1.0) / self.width)

    def power_integral(self, q: float, lo: float, hi: float) -> float:
        lo, hi = max(lo, 1.0 - self.width), min(hi, 1.0 + self.width)
        if hi <= lo:
            return 0.0
        if q == 0 and lo <= 1.0 - self.width and hi >= 1.0 + self.width:
            return self.mass
        return _quad.quad(lambda t: t**q * float(self(t)), lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


@dataclass(frozen=True, eq=False)
class LogTable:
    """Tabulated kernel, linear in ``log t`` between nodes and zero outside."""

    log_t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        lt = np.array(self.log_t, dtype=float)
        v = np.array(self.values, dtype=float)
        if lt.ndim != 1 or lt.shape != v.shape or lt.size < 2:
            raise ValueError("log table needs matching 1-d arrays with at least two nodes")
        if np.any(np.diff(lt) <= 0):
            raise ValueError("log-grid nodes must be strictly increasing")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("tabulated kernel values must be finite and nonnegative")
        lt.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "log_t", lt)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, func, t_min: float, t_max: float, count: int) -> "LogTable":
        u = np.linspace(math.log(t_min), math.log(t_max), count)
        return cls(u, np.asarray(func(np.exp(u)), dtype=float))

    def support(self):
        return math.exp(self.log_t[0]), math.exp(self.log_t[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            u = np.log(np.where(t > 0, t, np.nan))
        out = np.interp(u, self.log_t, self.values, left=0.0, right=0.0)
        return np.where(np.isnan(u), 0.0, out)

    def power_integral(self, q: float, lo: float, hi: float) -> float:
        # trapezoid in u = log t of phi(e^u) e^{(q+1)u}, table nodes plus clipped ends
        ulo = max(math.log(lo) if lo > 0 else -INF, self.log_t[0])
        uhi = min(math.log(hi) if hi < INF else INF, self.log_t[-1])
        if uhi <= ulo:
            return 0.0
        inner = self.log_t[(self.log_t > ulo) & (self.log_t < uhi)]
        u = np.concatenate(([ulo], inner, [uhi]))
        g = np.interp(u, self.log_t, self.values) * np.exp((q + 1.0) * u)
        return float(np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(u)))


Profile = Union[Indicator, PowerLaw, BumpAtOne, LogTable]


def _power_integral(q: float, lo: float, hi: float) -> float:
    """``int_lo^hi t^q dt`` (inf when divergent)."""
    if hi <= lo:
        return 0.0
    if q == -1.0:
        if lo == 0 or hi == INF:
            return INF
        return math.log(hi / lo)
    if hi == INF and q >= -1:
        return INF
    if lo == 0 and q <= -1:
        return INF
    top = 0.0 if hi == INF else hi ** (q + 1)
    bottom = 0.0 if lo == 0 else lo ** (q + 1)
    return (top - bottom) / (q + 1)


@dataclass(frozen=True)
class KernelSpec:
    variant: Profile
    scale_factor: float = 1.0
    dilation: float = 1.0
    window: Tuple[float, float] = (0.0, INF)

    def __post_init__(self):
        if not self.scale_factor >= 0:
            raise ValueError("scale_factor must be nonnegative")
        if not self.dilation > 0:
            raise ValueError("dilation must be positive")
        lo, hi = self.window
        if not (0 <= lo <= hi):
            raise ValueError(f"bad window {self.window}")
        if not math.isfinite(moment(self)):
            raise ValueError("kernel is not integrable on (0, inf)")

    @cached_property
    def support(self) -> Tuple[float, float]:
        """Smallest interval outside which the kernel vanishes."""
        a, b = self.variant.support()
        lo = max(a / self.dilation, self.window[0])
        hi = min(b / self.dilation, self.window[1])
        return (lo, hi) if hi > lo else (lo, lo)

    def __call__(self, t):
        return evaluate(self, t)


def indicator(a: float, b: float) -> KernelSpec:
    return KernelSpec(Indicator(float(a), float(b)))


def powerlaw(power: float, a: float, b: float = INF) -> KernelSpec:
    return KernelSpec(PowerLaw(float(power), float(a), float(b)))


def bump(width: float, mass: float = 1.0) -> KernelSpec:
    return KernelSpec(BumpAtOne(float(width), float(mass)))


def log_table(func, t_min: float, t_max: float, count: int) -> KernelSpec:
    return KernelSpec(LogTable.sample(func, t_min, t_max, count))


def evaluate(k: KernelSpec, t) -> np.ndarray:
    """``phi(t)`` for ``t > 0``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise ValueError("kernel is defined for t > 0 only")
    lo, hi = k.window
    inside = (t_arr >= lo) & (t_arr <= hi)
    out = k.scale_factor * k.variant(k.dilation * t_arr) * inside
    return out if out.ndim else float(out)


def weighted_moment(k: KernelSpec, q: float) -> float:
    """``int_0^inf t^q phi(t) dt``; ``inf`` when divergent."""
    d = k.dilation
    lo, hi = k.window
    # substitute s = d t: int (s/d)^q profile(s) ds / d over s in d*window
    inner = k.variant.power_integral(q, d * lo, d * hi if hi < INF else INF)
    if inner == 0.0:
        return 0.0
    return k.scale_factor * inner / d ** (q + 1.0)


def moment(k: KernelSpec) -> float:
    """``int_0^inf phi(t) dt`` (the sharp operator norm)."""
    return weighted_moment(k, 0.0)


def mass_between(k: KernelSpec, a: float, b: float) -> float:
    """``int_a^b phi(t) dt``."""
    lo, hi = k.window
    return moment(replace(k, window=(max(lo, a), max(min(hi, b), max(lo, a)))))


def truncate_below(k: KernelSpec, delta: float) -> KernelSpec:
    """``t -> phi(t) * 1[delta, 1](t)``."""
    if not (0 < delta < 1):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    lo, hi = k.window
    new_lo = max(lo, delta)
    return replace(k, window=(new_lo, max(min(hi, 1.0), new_lo)))


def dilate_and_cut(k: KernelSpec, m: float) -> KernelSpec:
    """``t -> phi(m t) * 1(0, 1](t)``."""
    if not m > 0:
        raise ValueError(f"m must be positive, got {m}")
    lo, hi = k.window
    new_lo = lo / m
    return replace(k, dilation=k.dilation * m, window=(new_lo, max(min(hi / m, 1.0), new_lo)))


def rescale(k: KernelSpec, m: float) -> KernelSpec:
    """``t -> phi(t / m)``; its moment is ``m * moment(k)``."""
    if not m > 0:
        raise ValueError(f"m must be positive, got {m}")
    lo, hi = k.window
    return replace(k, dilation=k.dilation / m, window=(lo * m, hi * m))


def rescaled_cut(k: KernelSpec, m: float) -> KernelSpec:
    """``t -> phi_m(t / m) = phi(t) 1(0, m](t)``, moment ``int_0^m phi``."""
    return rescale(dilate_and_cut(k, m), m)


_LITERAL = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


def _num(token: str) -> float:
    token = token.strip().lower()
    if token in ("inf", "+inf", "infinity"):
        return INF
    return float(token)


def parse_kernel(text: str) -> KernelSpec:
    """Parse ``indicator(a,b)``, ``powerlaw(p,a[,b])`` or ``bump(width[,mass])``."""
    match = _LITERAL.match(text)
    if not match:
        raise ValueError(f"cannot parse kernel literal {text!r}")
    name = match.group(1).lower()
    args = [_num(tok) for tok in match.group(2).split(",") if tok.strip()]
    builders = {"indicator": (indicator, 2, 2), "powerlaw": (powerlaw, 2, 3), "bump": (bump, 1, 2)}
    if name not in builders:
        raise ValueError(f"unknown kernel family {name!r}")
    build, lo, hi = builders[name]
    if not lo <= len(args) <= hi:
        raise ValueError(f"{name} takes {lo}..{hi} arguments, got {len(args)}")
    return build(*args)


def format_kernel(k: KernelSpec) -> str:
    """Inverse of :func:`parse_kernel` for plain (untransformed) kernels."""
    v = k.variant
    plain = k.scale_factor == 1.0 and k.dilation == 1.0 and k.window == (0.0, INF)
    if plain and isinstance(v, Indicator):
        return f"indicator({v.a!r},{v.b!r})"
    if plain and isinstance(v, PowerLaw):
        return f"powerlaw({v.power!r},{v.a!r},{'inf' if v.b == INF else repr(v.b)})"
    if plain and isinstance(v, BumpAtOne):
        return f"bump({v.width!r},{v.mass!r})"
    return repr(k)
