"""Grids, sampled functions with algebraic tails, and tail-corrected integration.

Every other module computes on :class:`SampledFunction`: complex samples on a
uniform grid covering ``[-L, L)`` plus an optional :class:`TailModel` that
describes the function beyond the grid as ``c * |x|**(-p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

TAIL_RTOL = 0.1


@dataclass(frozen=True)
class UniformGrid:
    """Periodic-style grid ``x_j = -L + j*h`` for ``j = 0..N-1`` with ``h = 2L/N``."""

    half_width: float
    num_points: int

    def __post_init__(self):
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise ValueError(f"half_width must be positive and finite, got {self.half_width}")
        if int(self.num_points) != self.num_points:
            raise ValueError("num_points must be an integer")
        object.__setattr__(self, "num_points", int(self.num_points))
        if self.num_points < 8 or self.num_points % 2:
            raise ValueError(f"num_points must be even and >= 8, got {self.num_points}")
        object.__setattr__(self, "half_width", float(self.half_width))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.num_points

    @cached_property
    def points(self) -> np.ndarray:
        x = -self.half_width + self.spacing * np.arange(self.num_points)
        x.flags.writeable = False
        return x

    def interior(self, fraction: float = 0.5) -> np.ndarray:
        """Boolean mask of points with ``|x| <= fraction * L``."""
        return np.abs(self.points) <= fraction * self.half_width


@dataclass(frozen=True)
class TailModel:
    """Algebraic tail ``f(x) ~ c_left |x|^-p`` (x < -L) and ``c_right x^-p`` (x > L)."""

    exponent: float
    coefficient_left: complex = 0.0
    coefficient_right: complex = 0.0

    def __post_init__(self):
        if not self.exponent > 1:
            raise ValueError(f"tail exponent must exceed 1 for integrability, got {self.exponent}")
        object.__setattr__(self, "exponent", float(self.exponent))
        object.__setattr__(self, "coefficient_left", complex(self.coefficient_left))
        object.__setattr__(self, "coefficient_right", complex(self.coefficient_right))

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore"):
            mag = np.where(ax > 0, ax, np.inf) ** (-self.exponent)
        return np.where(x < 0, self.coefficient_left, self.coefficient_right) * mag

    def integral_beyond(self, half_width: float) -> complex:
        p = self.exponent
        w = half_width ** (1.0 - p) / (p - 1.0)
        return (self.coefficient_left + self.coefficient_right) * w

    def abs_integral_beyond(self, half_width: float) -> float:
        p = self.exponent
        w = half_width ** (1.0 - p) / (p - 1.0)
        return (abs(self.coefficient_left) + abs(self.coefficient_right)) * w

    def scaled(self, factor: complex) -> "TailModel":
        return TailModel(self.exponent, factor * self.coefficient_left, factor * self.coefficient_right)

    def dilated(self, m: float) -> "TailModel":
        """Tail of ``x -> f(x/m)``."""
        return self.scaled(m**self.exponent)


def _tail_mismatch(values: np.ndarray, grid: UniformGrid, tail: TailModel, rtol: float, atol: float) -> Optional[str]:
    x = grid.points
    atol += 1e-10 * max(1.0, float(np.max(np.abs(values))) if values.size else 0.0)
    for idx in (0, grid.num_points - 1):
        model = complex(tail.evaluate(x[idx]))
        got = complex(values[idx])
        if abs(got - model) > rtol * max(abs(model), abs(got)) + atol:
            return f"sample {got:.6g} at x={x[idx]:.6g} disagrees with tail model {model:.6g}"
    return None


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples on a :class:`UniformGrid` with an optional algebraic tail."""

    grid: UniformGrid
    values: np.ndarray
    tail: Optional[TailModel] = None
    tail_rtol: float = field(default=TAIL_RTOL, repr=False)
    # extra absolute slack, used when edge samples come from cancelling operands
    tail_atol: float = field(default=0.0, repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.num_points,):
            raise ValueError(f"expected {self.grid.num_points} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if self.tail is not None:
            msg = _tail_mismatch(v, self.grid, self.tail, self.tail_rtol, self.tail_atol)
            if msg:
                raise ValueError(f"tail model inconsistent with boundary samples: {msg}")

    @classmethod
    def from_callable(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        grid: UniformGrid,
        tail: Optional[TailModel] = None,
    ) -> "SampledFunction":
        return cls(grid, func(grid.points), tail)

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    def with_values(self, values, tail: Optional[TailModel] = None) -> "SampledFunction":
        return SampledFunction(self.grid, values, tail)

    def _check_grid(self, other: "SampledFunction"):
        if other.grid != self.grid:
            raise ValueError("functions live on different grids")

    def __add__(self, other):
        if isinstance(other, SampledFunction):
            self._check_grid(other)
            edges = [0, -1]
            slack = 0.0
            if self.tail is not None or other.tail is not None:
                # each operand's model is only good to tail_rtol at the edges
                slack = TAIL_RTOL * float(np.max(np.abs(np.concatenate([self.values[edges], other.values[edges]]))))
            tail = _combine_tails(self.tail, other.tail, self.grid.half_width)
            return SampledFunction(self.grid, self.values + other.values, tail, tail_atol=slack)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SampledFunction):
            return self + (-other)
        return NotImplemented

    def __neg__(self):
        return self * -1.0

    def __mul__(self, scalar):
        if isinstance(scalar, SampledFunction):
            return NotImplemented
        scalar = complex(scalar)
        tail = self.tail.scaled(scalar) if self.tail is not None else None
        return SampledFunction(self.grid, self.values * scalar, tail)

    __rmul__ = __mul__


def _combine_tails(a: Optional[TailModel], b: Optional[TailModel], half_width: float) -> Optional[TailModel]:
    if a is None:
        return b
    if b is None:
        return a
    if math.isclose(a.exponent, b.exponent, rel_tol=1e-12):
        return TailModel(
            a.exponent,
            a.coefficient_left + b.coefficient_left,
            a.coefficient_right + b.coefficient_right,
        )
    # keep the slower exponent, with coefficients matching the summed models at |x| = L
    p = min(a.exponent, b.exponent)
    edge = np.array([-half_width, half_width])
    c = (a.evaluate(edge) + b.evaluate(edge)) * half_width**p
    return TailModel(p, c[0], c[1])


@dataclass(frozen=True)
class ScaleGrid:
    """Geometric sequence of ``count`` scales from ``t_min`` to ``t_max``."""

    t_min: float
    t_max: float
    count: int

    def __post_init__(self):
        if not (0 < self.t_min <= self.t_max):
            raise ValueError(f"need 0 < t_min <= t_max, got {self.t_min}, {self.t_max}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"count must be an integer >= 2, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @cached_property
    def scales(self) -> np.ndarray:
        s = np.geomspace(self.t_min, self.t_max, self.count)
        s.flags.writeable = False
        return s

    @property
    def log_step(self) -> float:
        return math.log(self.t_max / self.t_min) / (self.count - 1)

    def rescaled(self, m: float) -> "ScaleGrid":
        return ScaleGrid(self.t_min * m, self.t_max * m, self.count)

    def refined(self, factor: int = 2) -> "ScaleGrid":
        """Superset grid: every old scale is kept."""
        return ScaleGrid(self.t_min, self.t_max, (self.count - 1) * factor + 1)


def _trapezoid(values: np.ndarray, grid: UniformGrid, right_end) -> complex:
    # right endpoint x = L is not a grid point; without a tail the grid is closed periodically
    h = grid.spacing
    return h * (values.sum() - 0.5 * values[0] + 0.5 * right_end)


def integrate(f: SampledFunction) -> complex:
    """Trapezoid integral over ``[-L, L]`` plus the analytic tail beyond."""
    if f.tail is None:
        return complex(f.grid.spacing * f.values.sum())
    L = f.grid.half_width
    total = _trapezoid(f.values, f.grid, complex(f.tail.evaluate(L)))
    return complex(total + f.tail.integral_beyond(L))


def is_mean_zero(f: SampledFunction, rtol: float = 1e-4) -> bool:
    """Whether ``int f`` vanishes up to ``rtol * ||f||_1``.

    A single-power tail drops the next term of the far-field expansion, so the
    integral carries an error of order ``p |c| L^-p``; that much is also allowed.
    """
    total = integrate_abs(f)
    if total == 0:
        return True
    slack = 0.0
    if f.tail is not None:
        t = f.tail
        slack = t.exponent * (abs(t.coefficient_left) + abs(t.coefficient_right)) * f.grid.half_width ** (-t.exponent)
    return abs(integrate(f)) <= rtol * total + slack


def integrate_abs(f: SampledFunction) -> float:
    """L1 norm: trapezoid integral of ``|f|`` plus ``|c| L^(1-p)/(p-1)`` per side."""
    a = np.abs(f.values)
    if f.tail is None:
        return float(f.grid.spacing * a.sum())
    L = f.grid.half_width
    total = _trapezoid(a, f.grid, abs(complex(f.tail.evaluate(L))))
    return float(total.real + f.tail.abs_integral_beyond(L))


def l1_distance(f: SampledFunction, g: SampledFunction, mask: Optional[np.ndarray] = None) -> float:
    """L1 norm of ``f - g``, optionally restricted to a sub-window (tails then ignored)."""
    if mask is None:
        return integrate_abs(f - g)
    return float(f.grid.spacing * np.abs(f.values - g.values)[mask].sum())


def l1_on(f: SampledFunction, mask: np.ndarray) -> float:
    return float(f.grid.spacing * np.abs(f.values)[mask].sum())


def cell_average_indicator(grid: UniformGrid, a: float, b: float) -> SampledFunction:
    """Samples of ``chi_[a,b]`` averaged over each cell ``[x - h/2, x + h/2]``.

    Point sampling places the jump anywhere within a cell; averaging keeps the
    jump location (and the mass ``b - a``) exact under linear reconstruction.
    """
    if not a < b:
        raise ValueError("need a < b")
    x, h = grid.points, grid.spacing
    overlap = np.clip(np.minimum(x + h / 2, b) - np.maximum(x - h / 2, a), 0.0, None)
    return SampledFunction(grid, overlap / h)
