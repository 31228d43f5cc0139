import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hausdorff_h1.core import SampledFunction, TailModel, UniformGrid, cell_average_indicator, integrate, integrate_abs
from hausdorff_h1.experiments import smooth_test_bump
from hausdorff_h1.hausdorff import (
    HausdorffConfig,
    KernelCoverageWarning,
    apply,
    apply_adjoint,
    interpolate,
)
from hausdorff_h1.kernels import bump, indicator, moment, powerlaw, rescale, dilate_and_cut

# <H f, g> for the smooth-bump pair below, by 2-d adaptive quadrature (oracles.hausdorff_pairing)
PAIRING = 0.02182716894251776

G = UniformGrid(50.0, 1 << 14)
# coarser grid for the property tests
P = UniformGrid(50.0, 1 << 12)
K = indicator(0.25, 1.0)


def gaussian(g=G, c=0.0, w=1.0):
    return SampledFunction(g, np.exp(-0.5 * ((g.points - c) / w) ** 2))


def test_config_validation():
    with pytest.raises(ValueError):
        HausdorffConfig(interpolation_order=2)


@pytest.mark.parametrize("op", [apply, apply_adjoint])
def test_narrow_bump_is_near_identity(op):
    f = gaussian()
    out = op(bump(0.02, 1.0), f)
    assert np.max(np.abs(out.values - f.values)) < 1e-3


def test_narrow_bump_scales_by_mass():
    f = gaussian(c=1.0, w=2.0)
    out = apply(bump(0.02, 0.6), f)
    assert np.max(np.abs(out.values - 0.6 * f.values)) < 1e-3


def test_flat_kernel_tail_average():
    g = UniformGrid(8.0, 1 << 12)
    with pytest.warns(KernelCoverageWarning):
        out = apply(indicator(0, 1), cell_average_indicator(g, 1, 2))
    assert interpolate(out, [0.5])[0].real == pytest.approx(math.log(2), abs=1e-3)


def test_inverse_square_kernel_weighted_average():
    # int f(x/t) t^-3 dt over t > 1 is x^-2 int_0^x s f(s) ds; at x = 2 with f = 1[0,1] that is 1/8
    g = UniformGrid(8.0, 1 << 12)
    # the default log grid stops at t = 1e4, leaving 1e-4 of the kernel's mass
    with pytest.warns(KernelCoverageWarning):
        out = apply(powerlaw(-2, 1), cell_average_indicator(g, 0, 1))
    assert interpolate(out, [2.0])[0].real == pytest.approx(0.125, abs=1e-3)


def test_flat_kernel_adjoint_is_hardy_average():
    g = UniformGrid(8.0, 1 << 12)
    with pytest.warns(KernelCoverageWarning):
        out = apply_adjoint(indicator(0, 1), cell_average_indicator(g, 0, 1))
    assert interpolate(out, [2.0])[0].real == pytest.approx(0.5, abs=1e-3)


def test_adjoint_on_ramp():
    x = G.points
    out = apply_adjoint(K, SampledFunction(G, x))
    m = G.interior()
    assert np.allclose(out.values[m], 0.46875 * x[m], atol=1e-5)


def test_duality_against_quadrature():
    f = smooth_test_bump(G, 1.0, 0.8) - smooth_test_bump(G, -0.5, 0.6)
    g = smooth_test_bump(G, 1.5, 1.0)
    left = integrate(SampledFunction(G, apply(K, f).values * g.values)).real
    right = integrate(SampledFunction(G, f.values * apply_adjoint(K, g).values)).real
    assert left == pytest.approx(PAIRING, rel=1e-3)
    assert right == pytest.approx(PAIRING, rel=1e-3)


def test_output_tail_propagation():
    # a pure power |x|^-p maps to int t^(p-1) phi(t) dt times itself
    g = UniformGrid(100.0, 1 << 14)
    p = 1.5
    f = SampledFunction(g, (1 + g.points**2) ** (-p / 2), TailModel(p, 1.0, 1.0))
    out = apply(K, f)
    factor = (1 - 0.25**p) / p
    assert out.tail.coefficient_right.real == pytest.approx(factor)


def test_l1_contraction_on_family():
    from hausdorff_h1.extremal import ExtremalParams, f_epsilon

    g = UniformGrid(200.0, 1 << 16)
    for eps in (1.0, 0.5, 0.2):
        f = f_epsilon(ExtremalParams(eps), g)
        assert integrate_abs(apply(K, f)) <= moment(K) * integrate_abs(f) * 1.02


def test_scaling_identity():
    # H_{psi(./m)} f (x) = (H_psi f)(x/m) with psi = phi_m
    m = 2.0
    psi = dilate_and_cut(powerlaw(-2, 1), m)
    f = gaussian(c=0.5, w=1.5)
    lhs = apply(rescale(psi, m), f)
    rhs = interpolate(apply(psi, f), G.points / m)
    mask = G.interior()
    err = np.sum(np.abs(lhs.values - rhs)[mask]) / np.sum(np.abs(rhs)[mask])
    assert err < 1e-3


_coeffs = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=25, deadline=None)
@given(_coeffs, _coeffs, st.floats(-3, 3), st.floats(0.3, 3))
def test_linearity(a, b, c, w):
    f = gaussian(P, c=c, w=w)
    h = SampledFunction(P, np.sin(P.points) * np.exp(-0.1 * P.points**2))
    lhs = apply(K, a * f + b * h).values
    rhs = a * apply(K, f).values + b * apply(K, h).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + abs(a) + abs(b))


@settings(max_examples=25, deadline=None)
@given(st.floats(-10, 10), st.floats(0.05, 5), st.floats(0.01, 2), st.floats(0.05, 3))
def test_preserves_nonnegativity(c, w, lo, span):
    f = gaussian(P, c=c, w=w)
    out = apply(indicator(lo, lo + span), f)
    assert out.values.real.min() >= -1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-10, 10), st.floats(0.1, 3), st.floats(0.01, 2), st.floats(0.05, 3))
def test_nonnegativity_with_jumps(a, width, lo, span):
    f = cell_average_indicator(P, a, a + width)
    out = apply(indicator(lo, lo + span), f)
    assert out.values.real.min() >= -1e-12
