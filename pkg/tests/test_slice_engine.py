import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bohr_lab.errors import PreconditionError
from bohr_lab.geometry import (
    Lacunary,
    MapDescriptor,
    constant_map,
    coordinate_vector,
    identity_map,
    mobius_map,
    sample_boundary,
)
from bohr_lab.slice_engine import SliceCoefficients, extract_slice, geometric_tail_bound, mobius_slice


def mobius_oracle(b, S):
    s = np.arange(1, S + 1)
    return np.concatenate([[b], (1 - b * b) * b ** (s - 1.0)])


@pytest.mark.parametrize("b", [0.0, 0.3, 0.5, 0.9])
def test_mobius_slice_matches_closed_form(b):
    assert np.allclose(mobius_slice(b, 50).c, mobius_oracle(b, 50), atol=0, rtol=1e-15)


def test_extract_slice_examples():
    c = extract_slice(mobius_map(0.5, n=2), coordinate_vector(2, 1), S_max=8).c
    assert np.allclose(c[:4], [0.5, 0.75, 0.375, 0.1875], atol=1e-12)
    c = extract_slice(identity_map(2), coordinate_vector(2, 2), S_max=8).c
    assert np.allclose(c, [0, 1, 0, 0, 0, 0, 0, 0, 0], atol=1e-13)
    c = extract_slice(constant_map([0.3, -0.4j]), coordinate_vector(2, 1), S_max=8).c
    assert c[0] == pytest.approx(0.4, abs=1e-15) and np.all(c[1:] < 1e-15)


def test_component_max_of_lacunary_slice():
    fmap = MapDescriptor(2, 2, Lacunary(2, 1, (0.5, -0.25j), 1))
    c = extract_slice(fmap, coordinate_vector(2, 1), S_max=10).c
    expected = np.zeros(11)
    expected[1], expected[3] = 0.5, 0.25
    assert np.allclose(c, expected, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.95), st.integers(0, 10**6), st.sampled_from([1.0, 2.0, math.inf]))
def test_mobius_coefficients_off_axis(b, seed, t):
    # along z0 the slice is the scalar Mobius at zeta * z0_1
    z0 = sample_boundary(2, t, 3, seed)[-1]
    a = abs(z0[0])
    coeffs = extract_slice(mobius_map(b, n=2, t=t), z0, S_max=30)
    s = np.arange(1, 31)
    exact = np.r_[b, (1 - b * b) * b ** (s - 1.0) * a**s]
    err = np.abs(coeffs.c - exact)
    # aliasing from index s + M is about (1-b^2) b^(M-1) rho^M, near 1e-13 at b = 0.95
    assert np.all(err <= 1e-11)
    assert np.all(err <= coeffs.aliasing_bound() + 1e-14)


def test_coefficient_bound_invariant():
    for b in np.linspace(0, 0.99, 12):
        coeffs = extract_slice(mobius_map(b, n=2), coordinate_vector(2, 1))
        assert coeffs.coefficient_bound_slack() >= -1e-9


def test_aliasing_bound_shape():
    coeffs = extract_slice(mobius_map(0.5), [1.0], S_max=16, M=128)
    bound = coeffs.aliasing_bound()
    assert bound.shape == (17,) and np.all(np.diff(bound) > 0)
    assert bound[-1] == pytest.approx(0.95 ** (128 - 16) / 0.05)
    assert np.all(mobius_slice(0.5).aliasing_bound() == 0)


def test_extract_slice_preconditions():
    fmap = mobius_map(0.5, n=2)
    with pytest.raises(PreconditionError):
        extract_slice(fmap, [0.5, 0])
    with pytest.raises(PreconditionError):
        extract_slice(fmap, [1, 0], S_max=64, M=128)
    with pytest.raises(PreconditionError):
        extract_slice(fmap, [1, 0], rho=1.0)
    with pytest.raises(PreconditionError):
        extract_slice(fmap, [1, 0, 0])


def test_slice_coefficients_validation():
    with pytest.raises(PreconditionError):
        SliceCoefficients([0.5, -0.1])
    with pytest.raises(PreconditionError):
        SliceCoefficients([1.5])
    sc = SliceCoefficients([0.2, 0.3])
    with pytest.raises(ValueError):
        sc.c[0] = 0.0
    assert sc.rows() == [(0, 0.2), (1, 0.3)]


def test_geometric_tail_bound():
    coeffs = mobius_slice(0.5, 10)
    assert geometric_tail_bound(coeffs, 0.5) == pytest.approx(0.75 * 0.5**11 / 0.5)
    with pytest.raises(PreconditionError):
        geometric_tail_bound(coeffs, 1.0)
