"""Hausdorff operators on the real Hardy space H1, computed on uniform grids."""

from .core import (
    SampledFunction,
    ScaleGrid,
    TailModel,
    UniformGrid,
    cell_average_indicator,
    integrate,
    integrate_abs,
    is_mean_zero,
    l1_distance,
)
from .extremal import AtomSpec, ExtremalParams, converse_pair, f_epsilon, l1_mass, make_atom, next_mass, residual_bound
from .h1norms import NormReport, norm, norm_ratio, norm_report
from .hausdorff import HausdorffConfig, apply, apply_adjoint
from .kernels import (
    KernelSpec,
    bump,
    dilate_and_cut,
    format_kernel,
    indicator,
    log_table,
    moment,
    parse_kernel,
    powerlaw,
    truncate_below,
)
from .maximal import MaximalConfig, nontangential_maximal, poisson_maximal, sliding_max, smooth_maximal
from .transforms import MollifierSpec, hilbert, mollifier_convolve, poisson_convolve

__version__ = "0.1.0"
