"""Smooth, Poisson and nontangential maximal functions over a finite scale grid.

Maximal functions of mean-zero inputs decay only algebraically, so a good part
of their L1 mass sits outside the sampling window. They are therefore evaluated
on a window ``EXTENT`` times wider than the input grid (the input is continued
by its tail model), and the part beyond the input grid is summarized as a tail
model fitted to match both the edge values and the mass found outside.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator

import numba
import numpy as np
import scipy.fft as sfft

from .core import SampledFunction, ScaleGrid, TailModel, UniformGrid
from .transforms import MollifierSpec, angular_frequencies, extend, poisson_at, split

EXTENT = 4
# decay slopes flatter than this are treated as logarithmically divergent
_LOG_SLOPE = 1.05


class LogTailWarning(UserWarning):
    """A maximal function decays like 1/|x| (input with nonzero mean), so its L1 norm diverges."""


@dataclass(frozen=True)
class MaximalConfig:
    """Scales for the supremum and the cone aperture.

    By default the supremum is the plain maximum over the grid scales and the
    cone is ``floor(aperture t / h)`` samples wide. ``refine=True`` instead
    estimates the supremum over the continuum: a parabola in ``log t`` through
    each point's best scale and its neighbours, and cone endpoints at exactly
    ``+-aperture t`` by linear interpolation.
    """

    scale_grid: ScaleGrid
    aperture: float = 1.0
    refine: bool = False

    def __post_init__(self):
        if not (self.aperture >= 0 and math.isfinite(self.aperture)):
            raise ValueError(f"aperture must be a nonnegative real, got {self.aperture}")

    @classmethod
    def for_grid(cls, grid: UniformGrid, count: int = 64, aperture: float = 1.0, refine: bool = False) -> "MaximalConfig":
        """Default: ``count`` geometric scales from the grid spacing to the half-width."""
        return cls(ScaleGrid(grid.spacing, grid.half_width, count), aperture, refine)

    def cone(self, values: np.ndarray, t: float, spacing: float) -> np.ndarray:
        if self.refine:
            return cone_max(values, self.aperture * t / spacing)
        return sliding_max(values, int(math.floor(self.aperture * t / spacing)))

    def check(self, grid: UniformGrid):
        sg = self.scale_grid
        if sg.t_min < grid.spacing * (1 - 1e-9) or sg.t_max > grid.half_width * (1 + 1e-9):
            raise ValueError(
                f"scales [{sg.t_min:g}, {sg.t_max:g}] must lie within [spacing, half_width] = "
                f"[{grid.spacing:g}, {grid.half_width:g}]"
            )


@numba.njit(cache=True)
def _sliding_max(v, w):
    n = v.shape[0]
    out = np.empty(n)
    dq = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    j = 0
    for i in range(n):
        hi = min(n - 1, i + w)
        while j <= hi:
            while tail > head and v[dq[tail - 1]] <= v[j]:
                tail -= 1
            dq[tail] = j
            tail += 1
            j += 1
        while dq[head] < i - w:
            head += 1
        out[i] = v[dq[head]]
    return out


def sliding_max(values, half_width: int) -> np.ndarray:
    """``out[i] = max(values[i-w .. i+w])`` clipped to the array, in O(N) (monotone deque)."""
    if half_width < 0:
        raise ValueError("half_width must be >= 0")
    v = np.ascontiguousarray(values, dtype=float)
    if half_width == 0 or v.size == 0:
        return v.copy()
    return _sliding_max(v, int(half_width))


def cone_max(values: np.ndarray, radius: float) -> np.ndarray:
    """``max |values(y)|`` over ``|y - x| <= radius`` (in samples): the grid points inside,
    plus linear interpolation at the two fractional endpoints ``x +- radius``."""
    k = int(math.floor(radius))
    out = sliding_max(values, k)
    theta = radius - k
    if theta <= 0 or values.size <= k + 1:
        return out
    v = np.asarray(values, dtype=float)
    # values at i + radius and i - radius; beyond the array the nearest inside sample is kept
    ahead = np.empty_like(v)
    ahead[: v.size - k - 1] = (1 - theta) * v[k : v.size - 1] + theta * v[k + 1 :]
    ahead[v.size - k - 1 :] = v[-1] if k == 0 else out[v.size - k - 1 :]
    behind = np.empty_like(v)
    behind[k + 1 :] = (1 - theta) * v[1 : v.size - k] + theta * v[: v.size - k - 1]
    behind[: k + 1] = v[0] if k == 0 else out[: k + 1]
    return np.maximum(out, np.maximum(ahead, behind))


# ---------------------------------------------------------------- extended window


@dataclass(frozen=True)
class _Window:
    """Output window ``[-EXTENT L, EXTENT L)`` inside an FFT domain, same spacing as the input."""

    grid: UniformGrid  # the input grid
    out: UniformGrid
    size: int  # FFT length, a multiple of _MAX_DECIMATION
    wide_offset: int  # index of the input grid's first point in the FFT domain
    out_offset: int  # index of the output window's first point in the FFT domain

    @property
    def crop(self) -> slice:
        start = (self.out.num_points - self.grid.num_points) // 2
        return slice(start, start + self.grid.num_points)


_MAX_DECIMATION = 4096
# a scale-t convolution is resampled no coarser than t / _SAMPLES_PER_SCALE
_SAMPLES_PER_SCALE = 16


def _window(f: SampledFunction, reach: float) -> tuple[_Window, np.ndarray]:
    g = f.grid
    out = UniformGrid(EXTENT * g.half_width, EXTENT * g.num_points)
    wide, vals, off = extend(f, out.half_width + reach)
    size = _MAX_DECIMATION * sfft.next_fast_len(-(-wide.num_points // _MAX_DECIMATION))
    out_offset = off - (out.num_points - g.num_points) // 2
    return _Window(g, out, size, off, out_offset), vals


class _Resampler:
    """Evaluates ``ifft(spec * mult)`` on the output window, on a decimated grid when the
    product is band-limited, followed by cubic interpolation back to full resolution."""

    def __init__(self, spec: np.ndarray, win: _Window):
        self.spec = spec
        self.win = win
        self.idx = np.fft.fftfreq(win.size, d=1.0 / win.size).astype(np.int64)
        self.h = win.grid.spacing
        self.pos = win.out_offset + np.arange(win.out.num_points)

    def factor(self, cutoff: float, scale: float) -> int:
        """Largest power-of-two step keeping ``|omega| > cutoff`` above Nyquist and the
        step below ``scale / _SAMPLES_PER_SCALE``."""
        d = 1
        while d < _MAX_DECIMATION:
            nd = 2 * d
            if np.pi / (nd * self.h) < cutoff or nd * self.h > scale / _SAMPLES_PER_SCALE:
                break
            d = nd
        return d

    def __call__(self, mult_of_omega, cutoff: float, scale: float) -> np.ndarray:
        size = self.win.size
        d = self.factor(cutoff, scale)
        if d == 1:
            omega = 2 * np.pi * self.idx / (size * self.h)
            return sfft.ifft(self.spec * mult_of_omega(omega))[self.pos]
        msz = size // d
        j = np.fft.fftfreq(msz, d=1.0 / msz).astype(np.int64)
        omega = 2 * np.pi * j / (size * self.h)
        coarse = sfft.ifft(self.spec[j % size] * mult_of_omega(omega)) / d
        return _cubic_upsample(coarse, self.pos, d)


@numba.njit(cache=True)
def _upsample(coarse, first, n, d, periodic):
    # cubic Lagrange interpolation of coarse samples at fine positions (first + i) / d
    m = coarse.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        p = first + i
        k0 = p // d
        fr = (p - k0 * d) / d
        wm = -fr * (fr - 1.0) * (fr - 2.0) / 6.0
        w0 = (fr + 1.0) * (fr - 1.0) * (fr - 2.0) / 2.0
        w1 = -(fr + 1.0) * fr * (fr - 2.0) / 2.0
        w2 = (fr + 1.0) * fr * (fr - 1.0) / 6.0
        if periodic:
            out[i] = (
                wm * coarse[(k0 - 1) % m] + w0 * coarse[k0 % m] + w1 * coarse[(k0 + 1) % m] + w2 * coarse[(k0 + 2) % m]
            )
        else:
            out[i] = wm * coarse[k0 - 1] + w0 * coarse[k0] + w1 * coarse[k0 + 1] + w2 * coarse[k0 + 2]
    return out


def _cubic_upsample(coarse: np.ndarray, pos: np.ndarray, d: int) -> np.ndarray:
    return _upsample(np.ascontiguousarray(coarse, dtype=complex), int(pos[0]), pos.shape[0], d, True)


def _smooth_on(func, grid: UniformGrid, scale: float) -> np.ndarray:
    """``func`` on ``grid``, sampled at a step of about ``scale / 32`` and interpolated."""
    h = grid.spacing
    d = 1
    while 2 * d * h <= scale / (2 * _SAMPLES_PER_SCALE) and 2 * d <= _MAX_DECIMATION:
        d *= 2
    n = grid.num_points
    if d == 1:
        return func(grid.points)
    xs = grid.points[0] + (np.arange(n // d + 4) - 1) * (d * h)
    return _upsample(np.ascontiguousarray(func(xs), dtype=complex), d, n, d, False)


def _scaled_moduli(f: SampledFunction, m: MollifierSpec, scales) -> Iterator[tuple[float, np.ndarray]]:
    win, vals = _window(f, m.reach(float(np.max(scales))))
    res = _Resampler(sfft.fft(vals, win.size), win)
    for t in scales:
        conv = res(lambda omega: m.multiplier(t * omega), m.bandwidth / t, t)
        yield t, np.abs(conv), win


def _poisson_moduli(f: SampledFunction, scales) -> Iterator[tuple[float, np.ndarray]]:
    s = split(f)
    g = f.grid
    win, _ = _window(f, 2.0 * float(np.max(scales)))
    buf = np.zeros(win.size, dtype=complex)
    buf[win.wide_offset : win.wide_offset + g.num_points] = s.remainder
    res = _Resampler(sfft.fft(buf), win)
    for y in scales:
        # exp(-y |omega|) < 1e-16 beyond 37 / y
        conv = res(lambda omega: np.exp(-y * np.abs(omega)), 37.0 / y, y)
        # the carriers vary on the scale 1 + y
        conv += _smooth_on(lambda xs: poisson_at(s, xs, y), win.out, 1.0 + y)
        yield y, np.abs(conv), win


def _beyond(v_end: float, v_mid: float, x_end: float, x_mid: float) -> float:
    # power-law extrapolation of the mass past the extended window
    if v_end <= 0:
        return 0.0
    if v_mid <= 0:
        return 0.0
    k = -math.log(v_end / v_mid) / math.log(x_end / x_mid)
    if k <= _LOG_SLOPE:
        warnings.warn(
            f"maximal function decays like |x|^{-k:.3f}; its L1 norm is (nearly) divergent",
            LogTailWarning,
            stacklevel=4,
        )
        k = _LOG_SLOPE
    return v_end * x_end / (k - 1.0)


def _past(v_end: float, x_end: float, tail: TailModel | None, side: int) -> float | None:
    """Mass beyond ``|x| = x_end`` on one side.

    With an input tail ``c |x|^-p`` and bounded scales the maximal function tends to
    ``|c| |x|^-p``; the excess at ``x_end`` is given the next order, ``|x|^-(p+1)``.
    """
    if tail is None or v_end <= 0:
        return None
    p = tail.exponent
    c = abs(tail.coefficient_left if side < 0 else tail.coefficient_right)
    base = c * x_end**-p
    if v_end < base:
        return v_end * x_end / (p - 1.0)
    return base * x_end / (p - 1.0) + (v_end - base) * x_end / p


def _to_grid(ext: np.ndarray, win: _Window, tail: TailModel | None = None) -> SampledFunction:
    """Crop to the input grid and fit a tail carrying the mass found beyond it."""
    g, h = win.grid, win.grid.spacing
    crop = win.crop
    n_out = win.out.num_points
    i_left, i_right = crop.start, crop.stop  # x = -L and x = +L
    v_left, v_right = float(ext[i_left]), float(ext[i_right])
    mass = h * (ext[: i_left + 1].sum() - 0.5 * ext[0] - 0.5 * ext[i_left])
    mass += h * (ext[i_right:].sum() - 0.5 * ext[i_right] - 0.5 * ext[-1])
    x_end = win.out.half_width
    mid = n_out // 4
    for side, i_end, i_mid, x in ((-1, 0, mid, x_end), (1, n_out - 1, n_out - mid, x_end - h)):
        beyond = _past(float(ext[i_end]), x, tail, side)
        if beyond is None:
            beyond = _beyond(float(ext[i_end]), float(ext[i_mid]), x, x_end / 2)
        mass += beyond
    L = g.half_width
    out_tail = None
    edge = v_left + v_right
    if edge > 0 and mass > 0:
        q = 1.0 + edge * L / mass
        # anchor on the outermost kept samples so the model agrees with them exactly
        last = float(ext[i_right - 1])
        out_tail = TailModel(q, v_left * L**q, last * (L - h) ** q)
    return SampledFunction(g, ext[crop], out_tail)


# ---------------------------------------------------------------- public operators


class _Peak:
    """Running max over a log-uniform scale sequence, optionally refined by a parabola
    through the best scale and its two neighbours."""

    def __init__(self, refine: bool = False):
        self.best = None
        self.refine = refine

    def add(self, v: np.ndarray):
        if not self.refine:
            self.best = v.copy() if self.best is None else np.maximum(self.best, v, out=self.best)
            return
        if self.best is None:
            self.best, self.prev, self.j = v.copy(), v, 0
            self.idx = np.zeros(v.shape, dtype=np.int64)
            self.left = np.full(v.shape, np.nan)
            self.right = np.full(v.shape, np.nan)
            return
        self.j += 1
        after = self.idx == self.j - 1
        self.right[after] = v[after]
        up = v > self.best
        self.left[up] = self.prev[up]
        self.right[up] = np.nan
        self.best[up] = v[up]
        self.idx[up] = self.j
        self.prev = v

    def value(self) -> np.ndarray:
        if not self.refine:
            return self.best
        l, c, r = self.left, self.best, self.right
        den = l - 2.0 * c + r
        ok = np.isfinite(den) & (den < 0)
        out = c.copy()
        out[ok] -= (l[ok] - r[ok]) ** 2 / (8.0 * den[ok])
        return out


def _max_over(moduli, cfg: MaximalConfig, cone: bool = False):
    peak = _Peak(cfg.refine)
    for t, mod, win in moduli:
        peak.add(cfg.cone(mod, t, win.grid.spacing) if cone else mod)
    return peak.value(), win


def smooth_maximal(f: SampledFunction, m: MollifierSpec, cfg: MaximalConfig) -> SampledFunction:
    """``max_t |f * Phi_t|`` over the configured scales."""
    cfg.check(f.grid)
    ext, win = _max_over(_scaled_moduli(f, m, cfg.scale_grid.scales), cfg)
    return _to_grid(ext, win, f.tail)


def nontangential_maximal(f: SampledFunction, m: MollifierSpec, cfg: MaximalConfig) -> SampledFunction:
    """``max_t max_{|x-y| <= aperture t} |f * Phi_t(y)|``."""
    cfg.check(f.grid)
    ext, win = _max_over(_scaled_moduli(f, m, cfg.scale_grid.scales), cfg, cone=True)
    return _to_grid(ext, win, f.tail)


def smooth_and_nontangential(f: SampledFunction, m: MollifierSpec, cfg: MaximalConfig):
    """Both mollifier maximal functions from a single pass over the scales."""
    cfg.check(f.grid)
    smooth, cone = _Peak(cfg.refine), _Peak(cfg.refine)
    for t, mod, win in _scaled_moduli(f, m, cfg.scale_grid.scales):
        smooth.add(mod)
        cone.add(cfg.cone(mod, t, win.grid.spacing))
    return _to_grid(smooth.value(), win, f.tail), _to_grid(cone.value(), win, f.tail)


def poisson_maximal(f: SampledFunction, cfg: MaximalConfig) -> SampledFunction:
    """``max_y |P_y * f|`` over the configured heights (unit-mass Poisson kernel)."""
    cfg.check(f.grid)
    ext, win = _max_over(_poisson_moduli(f, cfg.scale_grid.scales), cfg)
    return _to_grid(ext, win, f.tail)
