import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bohr_lab.errors import NoRootError, PreconditionError
from bohr_lab.radius import (
    FAMILIES,
    RBR,
    R2,
    R3,
    ClassicalRN,
    ClassicalRNPrime,
    PsiE,
    RadiusQuery,
    RPkm,
    Xi,
    closed_form_radius,
    minimal_root,
    scan_grid,
)


def brute_root(f, lo=1e-9, hi=1 - 1e-9, n=200_001):
    # independent oracle: dense sign scan, then a secant-free bisection
    r = np.linspace(lo, hi, n)
    v = f(r)
    i = np.nonzero(np.sign(v[1:]) != np.sign(v[0]))[0][0]
    a, b = r[i], r[i + 1]
    for _ in range(200):
        m = 0.5 * (a + b)
        if np.sign(f(m)) == np.sign(f(a)):
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def test_golden_radii():
    assert minimal_root(R3(1)).root == 1 / 3
    assert minimal_root(Xi(1, 1, 0, math.inf, 1, 1, 1)).root == pytest.approx(0.2, abs=1e-10)
    assert minimal_root(RBR(1, 1, 1)).root == pytest.approx(math.sqrt(5) - 2, abs=1e-10)
    assert minimal_root(ClassicalRNPrime(1)).root == pytest.approx(1 / 3, abs=1e-10)
    assert minimal_root(R2(2, 1)).root == pytest.approx(1 / 3, abs=1e-10)
    assert minimal_root(RPkm(2, 1, 1)).root == pytest.approx(1 / 3, abs=1e-10)


def test_known_numeric_roots():
    assert minimal_root(ClassicalRN(1)).root == pytest.approx(math.sqrt(5) - 2, abs=1e-10)
    # R2 with m1 = 2 reduces to (2 + p/2) r^2 + r - p/2 = 0
    for p in (0.5, 1.0, 2.0):
        a, b, c = 2 + p / 2, 1.0, -p / 2
        quad = (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)
        assert minimal_root(R2(p, 2)).root == pytest.approx(quad, abs=1e-10)
    assert minimal_root(R2(1, 2)).root == pytest.approx((math.sqrt(6) - 1) / 5, abs=1e-10)


@pytest.mark.parametrize(
    "query",
    [
        Xi(0.5, 3, 2, 2, 3, 0.5, 2),
        Xi(2, 2, 1, 1, 1, 1, 0),
        R2(0.5, 3),
        RBR(2, 1, 3),
        RBR(0.5, 2, 2),
        ClassicalRN(4),
        ClassicalRNPrime(3),
        RPkm(1.5, 2, 3),
        PsiE(1, 3, 2, 0.7),
    ],
    ids=lambda q: q.family,
)
def test_minimal_root_matches_brute_force(query):
    res = minimal_root(query)
    assert res.root == pytest.approx(brute_root(query.residual), abs=1e-10)
    assert res.bracket[1] - res.bracket[0] <= 1e-12
    assert abs(res.residual_at_root) < 1e-8


def test_closed_forms_agree_with_scan():
    for q in (RBR(1, 1, 1), ClassicalRN(1), ClassicalRNPrime(1), R2(0.7, 1), RPkm(1.2, 3, 3)):
        cf = closed_form_radius(q)
        assert cf is not None
        assert minimal_root(q).root == pytest.approx(cf, abs=1e-11)
    assert closed_form_radius(Xi(1, 1, 0, 1, 1, 1, 1)) is None


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 2.0), st.integers(1, 4), st.integers(0, 4), st.integers(1, 4), st.integers(1, 4))
def test_xi_root_is_first_crossing(p, q, m, m1, m2):
    query = Xi(p, q, m, m1, m2, 1.0, 1.0)
    res = minimal_root(query)
    below = np.linspace(1e-9, res.bracket[0], 2000)
    assert np.all(query.residual(below) < 0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 2.0), st.integers(1, 4))
def test_radius_decreases_with_nu(p, m2):
    lo = minimal_root(Xi(p, 1, 0, 1, m2, 1.0, 0.5)).root
    hi = minimal_root(Xi(p, 1, 0, 1, m2, 1.0, 1.5)).root
    assert hi <= lo + 1e-12


def test_precondition_errors():
    bad = [
        lambda: Xi(0, 1, 0, 1, 1, 1, 1),
        lambda: Xi(1, 0, 0, 1, 1, 1, 1),
        lambda: Xi(1, 1, 0, 1, 1, 0, 0),
        lambda: Xi(1, 1, -1, 1, 1, 1, 1),
        lambda: R3(1.5),
        lambda: RBR(2.5, 1, 1),
        lambda: PsiE(1, 1, 1, 1),
        lambda: PsiE(1, 3, 3, 1),
        lambda: RPkm(1, 0, 1),
        lambda: ClassicalRN(0),
    ]
    for make in bad:
        with pytest.raises(PreconditionError):
            make()
    with pytest.raises(PreconditionError):
        minimal_root(R2(1, 1), tol=1e-16)


def test_no_root_reports_residual_range():
    class Never(RadiusQuery):
        family = "never"

        def residual(self, r):
            return np.ones_like(np.asarray(r, dtype=float))

        def params(self):
            return {}

    with pytest.raises(NoRootError) as exc:
        minimal_root(Never())
    assert exc.value.residual_min == 1.0 == exc.value.residual_max


def test_scan_grid_shape():
    g = scan_grid(10_000)
    assert g.size == 10_000 and np.all(np.diff(g) > 0)
    assert g[0] > 0 and g[-1] == 1 - 1e-9


def test_families_table_and_result_dict():
    assert set(FAMILIES) == {"xi", "r2", "r3", "rbr", "rn", "rnprime", "rpkm", "psie"}
    d = minimal_root(Xi(1, 1, 0, math.inf, 1, 1, 1)).to_dict()
    assert d["query"]["m1"] == "inf" and d["second_sign_change"] is False
