import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hausdorff_h1.core import UniformGrid, integrate, integrate_abs, l1_distance
from hausdorff_h1.extremal import (
    AtomSpec,
    ExtremalParams,
    F_epsilon_at,
    converse_pair,
    f_epsilon,
    l1_mass,
    make_atom,
    next_mass,
    residual_bound,
)
from hausdorff_h1.transforms import hilbert

# A(eps) = int (1+x^2)^-(1+eps)/2, B(eps) = int (1+x^2)^-(2+eps)/2 and the residual
# bound at delta = 1/4, from oracles.A / oracles.B (quadrature, checked against Gamma functions)
ORACLE = {
    0.8: (3.67909398040588, 2.134759719594884, 29.510929443979585),
    0.4: (6.268653124086038, 2.5057955763406783, 15.354047990686174),
    0.2: (11.323086975215755, 2.7745019184840554, 7.9045860330750335),
    0.1: (21.353449332480025, 2.942468548920776, 4.025249694073242),
    0.05: (41.36954045273285, 3.037590090882683, 2.033552825783395),
}

G = UniformGrid(200.0, 1 << 16)


def test_params_validation():
    for e in (0.0, -1.0, 2.5):
        with pytest.raises(ValueError):
            ExtremalParams(e)


def test_value_at_origin():
    f = f_epsilon(ExtremalParams(1.0), G)
    assert f.values[G.num_points // 2] == pytest.approx(-1.0)


@pytest.mark.parametrize("eps", [2.0, 1.0, 0.3, 0.05])
def test_modulus(eps):
    f = f_epsilon(ExtremalParams(eps), G)
    assert np.allclose(np.abs(f.values), (G.points**2 + 1) ** (-(1 + eps) / 2), rtol=1e-13, atol=0)


def test_l1_against_quadrature():
    f = f_epsilon(ExtremalParams(0.1), G)
    assert integrate_abs(f) == pytest.approx(ORACLE[0.1][0], rel=5e-3)


@pytest.mark.parametrize("eps", sorted(ORACLE))
def test_masses_and_bound(eps):
    a, b, bound = ORACLE[eps]
    assert l1_mass(eps) == pytest.approx(a, rel=1e-10)
    assert next_mass(eps) == pytest.approx(b, rel=1e-10)
    assert residual_bound(eps, 0.25) == pytest.approx(bound, rel=1e-10)


def test_extension_values():
    p = ExtremalParams(1.0)
    assert F_epsilon_at(p, 0.0, 1.0) == pytest.approx(-0.25)
    with pytest.raises(ValueError):
        F_epsilon_at(p, 0.0, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 2), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_extension_modulus(eps, x, y):
    v = F_epsilon_at(ExtremalParams(eps), x, y)
    assert abs(v) == pytest.approx((x * x + (y + 1) ** 2) ** (-(1 + eps) / 2), rel=1e-12)


def test_haar_atom_values():
    a = make_atom(AtomSpec(0.5, 0.5, "haar"), G)
    x, v = G.points, a.values.real
    h = G.spacing
    assert np.all(v[(x > h) & (x < 0.5 - h)] == 1.0)
    assert np.all(v[(x > 0.5 + h) & (x < 1 - h)] == -1.0)
    assert np.max(np.abs(v)) == 1.0


def _check_atom(spec, g):
    a = make_atom(spec, g)
    lo, hi = spec.interval
    v = a.values
    outside = (g.points < lo) | (g.points > hi)
    assert np.all(v[outside] == 0)
    assert np.max(np.abs(v)) <= 1 / (hi - lo) * (1 + 1e-15)
    assert abs(integrate(a)) < 1e-12
    return a


@settings(max_examples=60, deadline=None)
@given(st.floats(-50, 50), st.floats(0.25, 20), st.sampled_from(["haar", "random"]), st.integers(0, 2**31))
def test_atom_conditions(c, r, profile, seed):
    _check_atom(AtomSpec(c, r, profile, seed=seed), UniformGrid(100.0, 1 << 12))


def test_atoms_deterministic():
    s = AtomSpec(1.0, 2.0, "random", seed=42)
    assert np.array_equal(make_atom(s, G).values, make_atom(s, G).values)
    assert not np.array_equal(make_atom(s, G).values, make_atom(AtomSpec(1.0, 2.0, "random", seed=43), G).values)


def test_atom_errors():
    with pytest.raises(ValueError):
        AtomSpec(0.0, 0.0)
    with pytest.raises(ValueError):
        AtomSpec(0.0, 1.0, "triangle")
    with pytest.raises(ValueError):
        make_atom(AtomSpec(199.0, 5.0), G)
    with pytest.raises(ValueError):
        make_atom(AtomSpec(0.0, G.spacing / 4), G)


def test_converse_pair_values():
    f, hf = converse_pair(G)
    i = G.num_points // 2
    assert f.values[i] == 0 and hf.values[i] == -0.5
    assert np.array_equal(f.values[1:], -f.values[1:][::-1])
    assert np.array_equal(hf.values[1:], hf.values[1:][::-1])


def test_converse_pair_is_a_hilbert_pair():
    f, hf = converse_pair(G)
    assert l1_distance(hilbert(f), hf) / integrate_abs(hf) < 1e-3
