"""L1 and H1-type norms of sampled functions, and the norm ratio of ``H_phi``."""

from __future__ import annotations

import warnings
from dataclasses import astuple, dataclass, fields

from .core import SampledFunction, integrate, integrate_abs, is_mean_zero
from .hausdorff import HausdorffConfig, apply
from .kernels import KernelSpec
from .maximal import MaximalConfig, nontangential_maximal, poisson_maximal, smooth_and_nontangential, smooth_maximal
from .transforms import MollifierSpec, hilbert

SELECTORS = ("l1", "hilbert", "smooth", "poisson", "nontangential")


class NonzeroMeanWarning(UserWarning):
    """The input has nonzero integral, so it is not in H1 and maximal norms diverge logarithmically."""


@dataclass(frozen=True)
class NormReport:
    l1: float
    hilbert_l1: float
    h1_hilbert: float
    h1_smooth: float
    h1_poisson: float
    h1_nontangential: float

    def __post_init__(self):
        if any(v < 0 for v in astuple(self)):
            raise ValueError("norms must be nonnegative")

    @classmethod
    def columns(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def csv_row(self) -> str:
        return ",".join(f"{v:.12g}" for v in astuple(self))

    def scaled(self, factor: float) -> "NormReport":
        return NormReport(*(factor * v for v in astuple(self)))


def _warn_if_mean(f: SampledFunction):
    if not is_mean_zero(f):
        warnings.warn(
            f"integral {integrate(f):.3g} is not zero; H1 norms are not finite for this input",
            NonzeroMeanWarning,
            stacklevel=3,
        )


def norm_report(f: SampledFunction, m: MollifierSpec | None = None, cfg: MaximalConfig | None = None) -> NormReport:
    """All norms of ``f``; maximal-function norms include the mass of their fitted tails."""
    m = m or MollifierSpec()
    cfg = cfg or MaximalConfig.for_grid(f.grid)
    _warn_if_mean(f)
    l1 = integrate_abs(f)
    hl1 = integrate_abs(hilbert(f))
    smooth, cone = smooth_and_nontangential(f, m, cfg)
    return NormReport(
        l1=l1,
        hilbert_l1=hl1,
        h1_hilbert=l1 + hl1,
        h1_smooth=integrate_abs(smooth),
        h1_poisson=integrate_abs(poisson_maximal(f, cfg)),
        h1_nontangential=integrate_abs(cone),
    )


def norm(f: SampledFunction, which: str, m: MollifierSpec | None = None, cfg: MaximalConfig | None = None) -> float:
    """A single norm of ``f`` selected by name (see ``SELECTORS``)."""
    if which == "l1":
        return integrate_abs(f)
    if which == "hilbert":
        return integrate_abs(f) + integrate_abs(hilbert(f))
    m = m or MollifierSpec()
    cfg = cfg or MaximalConfig.for_grid(f.grid)
    if which == "smooth":
        return integrate_abs(smooth_maximal(f, m, cfg))
    if which == "poisson":
        return integrate_abs(poisson_maximal(f, cfg))
    if which == "nontangential":
        return integrate_abs(nontangential_maximal(f, m, cfg))
    raise ValueError(f"unknown norm selector {which!r}; expected one of {SELECTORS}")


def norm_ratio(
    k: KernelSpec,
    f: SampledFunction,
    which: str = "hilbert",
    hcfg: HausdorffConfig | None = None,
    m: MollifierSpec | None = None,
    mcfg: MaximalConfig | None = None,
) -> float:
    """``||H_phi f|| / ||f||`` in the selected norm."""
    denom = norm(f, which, m, mcfg)
    if not denom > 0:
        raise ZeroDivisionError("selected norm of the input is zero")
    return norm(apply(k, f, hcfg), which, m, mcfg) / denom
