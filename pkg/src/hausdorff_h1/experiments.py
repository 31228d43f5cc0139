"""Experiment configuration, the shipped test battery, and the bound-checking runs."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import SampledFunction, ScaleGrid, UniformGrid, integrate, integrate_abs
from .extremal import AtomSpec, ExtremalParams, converse_pair, f_epsilon, make_atom
from .h1norms import SELECTORS, norm, norm_report
from .hausdorff import HausdorffConfig, apply, apply_adjoint
from .kernels import KernelSpec, dilate_and_cut, format_kernel, indicator, moment, parse_kernel, truncate_below
from .maximal import MaximalConfig
from .transforms import hilbert

BUDGET = 0.02  # relative discretization allowance on the upper bound
MONOTONE_NOISE = 0.01
CSV_COLUMNS = ("epsilon", "delta", "m", "moment_target", "ratio", "residual", "runtime_ms")

_REPORT_FIELD = {
    "hilbert": "h1_hilbert",
    "smooth": "h1_smooth",
    "poisson": "h1_poisson",
    "nontangential": "h1_nontangential",
    "l1": "l1",
}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: KernelSpec = field(default_factory=lambda: indicator(0.25, 1.0))
    grid_half_width: float = 200.0
    grid_points: int = 1 << 16
    # (t_min, t_max, count); None means 64 scales from the spacing to the half-width
    scales: tuple[float, float, int] | None = None
    epsilons: tuple[float, ...] = (0.8, 0.4, 0.2, 0.1, 0.05)
    delta: float = 0.25
    m_values: tuple[float, ...] = (1.0,)
    norm: str = "hilbert"
    output_path: str = "results.csv"
    seed: int = 0

    def __post_init__(self):
        self.grid  # validates
        for e in self.epsilons:
            ExtremalParams(e)
        if list(self.epsilons) != sorted(self.epsilons, reverse=True):
            raise ValueError("epsilons must be sorted in descending order")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if any(not m > 0 for m in self.m_values):
            raise ValueError("m values must be positive")
        if self.norm not in SELECTORS:
            raise ValueError(f"unknown norm {self.norm!r}; expected one of {SELECTORS}")
        self.maximal  # validates the scale window

    @property
    def grid(self) -> UniformGrid:
        return UniformGrid(self.grid_half_width, self.grid_points)

    @property
    def maximal(self) -> MaximalConfig:
        g = self.grid
        cfg = MaximalConfig(ScaleGrid(*self.scales)) if self.scales else MaximalConfig.for_grid(g)
        cfg.check(g)
        return cfg

    # ---- text format: one ``key = value`` per line, lists comma-separated

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ExperimentConfig":
        kw: dict = {}
        parsers: dict[str, Callable] = {
            "kernel": parse_kernel,
            "grid_half_width": float,
            "grid_points": lambda s: int(float(s)),
            "scales": lambda s: (lambda v: (v[0], v[1], int(v[2])))(_floats(s)),
            "epsilons": _floats,
            "delta": float,
            "m_values": _floats,
            "norm": str.strip,
            "output_path": str.strip,
            "seed": int,
        }
        aliases = {"grid_l": "grid_half_width", "grid_n": "grid_points", "epsilon": "epsilons", "m": "m_values"}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            key = aliases.get(key, key)
            if key not in parsers:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            kw[key] = parsers[key](value)
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(), **overrides)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["kernel"] = format_kernel(self.kernel)
        d["epsilons"] = list(self.epsilons)
        d["m_values"] = list(self.m_values)
        d["scales"] = list(self.scales) if self.scales else None
        return d

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if value is None:
                continue
            if isinstance(value, list):
                value = ", ".join(repr(v) for v in value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConvergenceRecord:
    epsilon: float
    delta: float
    m: float
    moment_target: float
    ratio: float
    residual: float
    runtime_ms: int
    label: str = ""
    flagged: bool = False

    def __post_init__(self):
        if self.ratio < 0 or self.residual < 0:
            raise ValueError("ratio and residual must be nonnegative")


# ---------------------------------------------------------------- battery


def mean_zero_bump(g: UniformGrid, center: float, width: float, kind: str) -> SampledFunction:
    """Gaussian derivative (``odd``) or a mass-balanced difference of Gaussians (``even``)."""
    u = (g.points - center) / width
    if kind == "odd":
        v = -u * np.exp(-0.5 * u * u)
    else:
        # exp(-u^2/2) - exp(-u^2/8)/2 has zero integral
        v = np.exp(-0.5 * u * u) - 0.5 * np.exp(-0.125 * u * u)
    return SampledFunction(g, v / width)


def battery(g: UniformGrid, seed: int = 0) -> list[tuple[str, SampledFunction]]:
    """The 20 shipped test functions: 10 atoms, the converse pair, 3 family members, 5 bumps."""
    rng = np.random.default_rng(seed)
    out: list[tuple[str, SampledFunction]] = []
    out.append(("atom_haar_0_1", make_atom(AtomSpec(0.5, 0.5, "haar"), g)))
    for i in range(9):
        c = float(rng.uniform(-5, 5))
        r = float(rng.uniform(0.25, 3.0))
        profile = "haar" if i % 3 == 0 else "random"
        out.append((f"atom_{profile}_{i}", make_atom(AtomSpec(c, r, profile, seed=seed * 1000 + i), g)))
    f, hf = converse_pair(g)
    out += [("converse_f", f), ("converse_hf", hf)]
    for e in (1.0, 0.5, 0.2):
        out.append((f"f_eps_{e:g}", f_epsilon(ExtremalParams(e), g)))
    for i in range(5):
        c = float(rng.uniform(-10, 10))
        w = float(rng.uniform(0.3, 3.0))
        kind = "odd" if i % 2 == 0 else "even"
        out.append((f"bump_{kind}_{i}", mean_zero_bump(g, c, w, kind)))
    return out


# ---------------------------------------------------------------- runs


def _relative(a: SampledFunction, b: SampledFunction, which: str, mcfg, denom: float) -> float:
    return norm(a - b, which, None, mcfg) / denom


def run_upper_bound_suite(
    cfg: ExperimentConfig, functions: Sequence[tuple[str, SampledFunction]] | None = None
) -> list[ConvergenceRecord]:
    """``||H_phi f|| / ||f||`` for each battery function, flagged above ``moment (1 + 2%)``."""
    funcs = battery(cfg.grid, cfg.seed) if functions is None else functions
    target = moment(cfg.kernel)
    mcfg = cfg.maximal
    records = []
    for label, f in funcs:
        t0 = time.perf_counter()
        hf = apply(cfg.kernel, f)
        nf = norm(f, cfg.norm, None, mcfg)
        ratio = norm(hf, cfg.norm, None, mcfg) / nf
        residual = _relative(hf, target * f, cfg.norm, mcfg, nf)
        eps = float(label.rsplit("_", 1)[1]) if label.startswith("f_eps_") else math.nan
        records.append(
            ConvergenceRecord(
                eps, math.nan, 1.0, target, ratio, residual,
                int(round(1000 * (time.perf_counter() - t0))), label, ratio > target * (1 + BUDGET),
            )
        )
    return records


def lower_bound_kernel(k: KernelSpec, m: float, delta: float) -> KernelSpec:
    """``phi_m`` truncated to ``[delta, 1]``; scaled by ``m`` it stands for the kernel ``phi 1(0, m]``."""
    return truncate_below(dilate_and_cut(k, m), delta)


def run_lower_bound_sweep(cfg: ExperimentConfig) -> list[ConvergenceRecord]:
    """Ratios and residuals of the truncated, dilated kernel on ``f_eps`` for every (m, eps).

    By ``H_{psi(./m)} f = (H_psi f)(./m)`` and ``||g(./m)|| = m ||g||``, the rescaled
    kernel's ratio is ``m`` times the ratio of ``psi = phi_m 1[delta, 1]``; ratio,
    target and residual are all reported on that rescaled scale.
    """
    g, mcfg = cfg.grid, cfg.maximal
    cap = moment(cfg.kernel) * (1 + BUDGET)
    records: list[ConvergenceRecord] = []
    for m in cfg.m_values:
        k = lower_bound_kernel(cfg.kernel, m, cfg.delta)
        mu = moment(k)
        prev: ConvergenceRecord | None = None
        for eps in cfg.epsilons:
            t0 = time.perf_counter()
            f = f_epsilon(ExtremalParams(eps), g)
            hf = apply(k, f)
            nf = norm(f, cfg.norm, None, mcfg)
            ratio = m * norm(hf, cfg.norm, None, mcfg) / nf
            residual = m * _relative(hf, mu * f, cfg.norm, mcfg, nf)
            bad = ratio > cap
            if prev is not None:
                bad |= residual > prev.residual or ratio < prev.ratio * (1 - MONOTONE_NOISE)
            rec = ConvergenceRecord(
                eps, cfg.delta, m, m * mu, ratio, residual,
                int(round(1000 * (time.perf_counter() - t0))), f"f_eps_{eps:g}", bool(bad),
            )
            records.append(rec)
            prev = rec
    return records


@dataclass
class EquivalenceReport:
    upper: dict[str, list[ConvergenceRecord]]
    lower: dict[str, list[ConvergenceRecord]]
    commutation: list[tuple[str, float]]
    duality: list[tuple[str, float]]
    tolerance: float = 1e-3

    @property
    def flagged(self) -> bool:
        recs = [r for rs in list(self.upper.values()) + list(self.lower.values()) for r in rs]
        return (
            any(r.flagged for r in recs)
            or any(d >= self.tolerance for _, d in self.commutation)
            or any(d >= self.tolerance for _, d in self.duality)
        )

    def records(self) -> list[ConvergenceRecord]:
        out = []
        for name in self.upper:
            out += [replace(r, label=f"{name}:{r.label}") for r in self.upper[name]]
        for name in self.lower:
            out += [replace(r, label=f"{name}:lower:{r.label}") for r in self.lower[name]]
        return out

    def to_dict(self) -> dict:
        return {
            "commutation": dict(self.commutation),
            "duality": dict(self.duality),
            "flagged": self.flagged,
        }


def commutation_error(k: KernelSpec, f: SampledFunction, hcfg: HausdorffConfig | None = None) -> float:
    """``||H(H_phi f) - H_phi(H f)||_1 / ||H_phi(H f)||_1``."""
    a = hilbert(apply(k, f, hcfg))
    b = apply(k, hilbert(f), hcfg)
    return integrate_abs(a - b) / integrate_abs(b)


def duality_error(k: KernelSpec, f: SampledFunction, g: SampledFunction, hcfg: HausdorffConfig | None = None) -> float:
    """Relative gap between ``<H_phi f, g>`` and ``<f, H*_phi g>`` (bilinear, no conjugation)."""
    left = integrate(SampledFunction(f.grid, apply(k, f, hcfg).values * g.values))
    right = integrate(SampledFunction(f.grid, f.values * apply_adjoint(k, g, hcfg).values))
    scale = max(abs(left), abs(right))
    if scale == 0.0:
        # disjoint supports: both pairings vanish, compare against the absolute pairing
        scale = integrate_abs(SampledFunction(f.grid, apply(k, f, hcfg).values * g.values))
        return 0.0 if scale == 0.0 else abs(left - right) / scale
    return abs(left - right) / scale


def smooth_test_bump(grid: UniformGrid, center: float, radius: float) -> SampledFunction:
    """C-infinity bump ``exp(-1/(1-u^2))`` on ``[center - radius, center + radius]``."""
    u = (grid.points - center) / radius
    v = np.zeros_like(u)
    inside = np.abs(u) < 1
    v[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return SampledFunction(grid, v)


def duality_pairs(grid: UniformGrid, seed: int = 0, count: int = 10):
    """Compactly supported (atom, smooth bump) pairs."""
    rng = np.random.default_rng(seed + 7)
    pairs = []
    for i in range(count):
        c = float(rng.uniform(-5, 5))
        r = float(rng.uniform(0.5, 3.0))
        atom = make_atom(AtomSpec(c, r, "haar" if i % 2 == 0 else "random", seed=seed + i), grid)
        # centre g on the dilated image of the atom so the pairing is not trivially zero
        gc = c * float(rng.uniform(0.4, 1.0))
        gr = float(rng.uniform(1.0, 5.0))
        pairs.append((f"pair_{i}", atom, smooth_test_bump(grid, gc, gr)))
    return pairs


def run_equivalence_suite(
    cfg: ExperimentConfig, functions: Sequence[tuple[str, SampledFunction]] | None = None
) -> EquivalenceReport:
    """Upper and lower bound checks under every H1-type norm, plus commutation and duality."""
    g, mcfg, k = cfg.grid, cfg.maximal, cfg.kernel
    funcs = battery(g, cfg.seed) if functions is None else functions
    target = moment(k)
    selectors = ("hilbert", "smooth", "poisson", "nontangential")
    upper: dict[str, list[ConvergenceRecord]] = {s: [] for s in selectors}
    commutation = []
    for label, f in funcs:
        t0 = time.perf_counter()
        hf = apply(k, f)
        before, after = norm_report(f, None, mcfg), norm_report(hf, None, mcfg)
        ms = int(round(1000 * (time.perf_counter() - t0)))
        for s in selectors:
            r = getattr(after, _REPORT_FIELD[s]) / getattr(before, _REPORT_FIELD[s])
            upper[s].append(ConvergenceRecord(math.nan, math.nan, 1.0, target, r, 0.0, ms, label, r > target * (1 + BUDGET)))
        commutation.append((label, commutation_error(k, f)))
    lower: dict[str, list[ConvergenceRecord]] = {}
    for s in selectors:
        lower[s] = run_lower_bound_sweep(replace(cfg, norm=s))
    duality = [(label, duality_error(k, a, b)) for label, a, b in duality_pairs(g, cfg.seed)]
    return EquivalenceReport(upper, lower, commutation, duality)


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.12g}"


def emit(records: Iterable[ConvergenceRecord], path: str | Path, config: ExperimentConfig | None = None, extra: dict | None = None):
    """Write the records as CSV plus a sibling ``.json`` holding the configuration."""
    path = Path(path)
    records = list(records)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in records:
                w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
        meta = {
            "config": config.to_dict() if config else None,
            "records": [{"label": r.label, "flagged": r.flagged} for r in records],
        }
        if extra:
            meta.update(extra)
        path.with_suffix(".json").write_text(json.dumps(meta, indent=2, default=str) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_records(path: str | Path) -> list[dict]:
    with Path(path).open() as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def report_rows(functions: Sequence[tuple[str, SampledFunction]], mcfg: MaximalConfig | None = None):
    """``(label, NormReport)`` for each function."""
    return [(label, norm_report(f, None, mcfg)) for label, f in functions]

