"""Bohr-type functionals evaluated on slice coefficients.

Slice sums take ``r`` as a float or an array and broadcast over it.  Each
sum has a companion ``*_tail`` function giving a certified bound on the part
beyond ``S_max``, derived from the coefficient bound ``c_s <= 1 - c_0**2``.

Theorem left-hand sides are assembled by :func:`thm_lhs` (single point) and
:func:`theorem_terms` (one direction, a grid of radii).  Theorem ids:

``T41``  composition power + weighted lacunary majorant + weighted increment
``T12``  ``|f(0)|^p`` + first refined block + increment along a Schwarz map
``T21``  ``|f(0)|^p`` + first refined block + weight polynomial of the energy
``T14``  composition power + refined block of order ``N``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionError, WeightConditionError
from .geometry import MapDescriptor, lt_norm, map_eval, schwarz_eval, schwarz_spec
from .radius import RBR, R2, R3, Xi
from .slice_engine import DEFAULT_S_MAX, SliceCoefficients, extract_slice

WEIGHT_CONDITION_TOL = 1e-9
THEOREMS = ("T41", "T12", "T21", "T14")


def _radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r >= 1):
        raise PreconditionError("radius must lie in [0, 1)")
    return r


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _powers(r: np.ndarray, S: int) -> np.ndarray:
    return np.power.outer(r, np.arange(S + 1, dtype=float))


def _bound_factor(coeffs: SliceCoefficients) -> float:
    return 1.0 - coeffs.c0**2


# --------------------------------------------------------------------------
# slice sums


def majorant_sum(coeffs: SliceCoefficients, N: int, r):
    """``sum_{s=N}^{S_max} c_s r^s``."""
    r = _radius(r)
    if N < 0:
        raise PreconditionError("N must be nonnegative")
    if N > coeffs.S_max:
        return _out(np.zeros_like(r))
    P = _powers(r, coeffs.S_max)
    return _out(P[..., N:] @ coeffs.c[N:])


def majorant_tail(coeffs: SliceCoefficients, N: int, r):
    r = _radius(r)
    start = max(N, coeffs.S_max + 1)
    return _out(_bound_factor(coeffs) * r**start / (1.0 - r))


def lacunary_sum(coeffs: SliceCoefficients, q: int, m: int, r):
    """``sum_{s>=1, qs+m <= S_max} c_{qs+m} r^{qs+m}``."""
    r = _radius(r)
    if q < 1 or m < 0:
        raise PreconditionError("lacunary sum needs q >= 1 and m >= 0")
    idx = np.arange(q + m, coeffs.S_max + 1, q)
    if idx.size == 0:
        return _out(np.zeros_like(r))
    return _out(np.power.outer(r, idx.astype(float)) @ coeffs.c[idx])


def lacunary_tail(coeffs: SliceCoefficients, q: int, m: int, r):
    r = _radius(r)
    s_first = max(1, (coeffs.S_max - m) // q + 1)
    first = q * s_first + m
    return _out(_bound_factor(coeffs) * r**first / (1.0 - r**q))


def square_sum(coeffs: SliceCoefficients, K: int, r):
    """``sum_{s=K}^{S_max} (c_s r^s)^2``."""
    r = _radius(r)
    if K > coeffs.S_max:
        return _out(np.zeros_like(r))
    P = _powers(r, coeffs.S_max)[..., K:]
    return _out((P * P) @ (coeffs.c[K:] ** 2))


def square_tail(coeffs: SliceCoefficients, K: int, r):
    r = _radius(r)
    start = max(K, coeffs.S_max + 1)
    return _out(_bound_factor(coeffs) ** 2 * r ** (2 * start) / (1.0 - r * r))


def _k_of(N: int) -> int:
    return (N - 1) // 2


def refined_terms(coeffs: SliceCoefficients, N: int, r) -> dict:
    """The three blocks of the refined functional of order ``N``."""
    r = _radius(r)
    if N < 1:
        raise PreconditionError("refined block needs N >= 1")
    k = _k_of(N)
    c0 = coeffs.c0
    low = coeffs.c[1 : min(k, coeffs.S_max) + 1]
    middle = float(np.sum(low**2)) * r**N / (1.0 - r) if k >= 1 else np.zeros_like(r)
    weight = 1.0 / (1.0 + c0) + r / (1.0 - r)
    return {
        "majorant_from_N": np.asarray(majorant_sum(coeffs, N, r)),
        "low_squares": np.asarray(middle),
        "high_squares": np.asarray(weight * square_sum(coeffs, k + 1, r)),
    }


def refined_block(coeffs: SliceCoefficients, N: int, r):
    """Refined block of order ``N`` with ``k = (N-1)//2``::

        sum_{s>=N} c_s r^s + [k>=1] sum_{s=1}^{k} c_s^2 r^N/(1-r)
            + (1/(1+c_0) + r/(1-r)) sum_{s>=k+1} (c_s r^s)^2
    """
    return _out(sum(refined_terms(coeffs, N, r).values()))


def refined_tail(coeffs: SliceCoefficients, N: int, r):
    r = _radius(r)
    k = _k_of(N)
    A = _bound_factor(coeffs)
    extra_low = max(0, k - coeffs.S_max) * A * A * r**N / (1.0 - r)
    weight = 1.0 / (1.0 + coeffs.c0) + r / (1.0 - r)
    return _out(majorant_tail(coeffs, N, r) + extra_low + weight * square_tail(coeffs, k + 1, r))


def refined_bound_rhs(c0: float, N: int, r):
    """``(1 - c0^2) r^N / (1 - r)``."""
    r = _radius(r)
    return _out((1.0 - c0 * c0) * r**N / (1.0 - r))


def schwarz_energy(coeffs: SliceCoefficients, r):
    """``sum_{s>=1} s (c_s r^s)^2``; ``pi`` times this is the area of ``f'`` squared over the disk of radius ``r``."""
    r = _radius(r)
    P = _powers(r, coeffs.S_max)
    s = np.arange(coeffs.S_max + 1, dtype=float)
    return _out((P * P) @ (s * coeffs.c**2))


def schwarz_energy_tail(coeffs: SliceCoefficients, r):
    r = _radius(r)
    S = coeffs.S_max
    x = r * r
    # sum_{s>S} s x^s in closed form
    tail = x ** (S + 1) * ((S + 1) - S * x) / (1.0 - x) ** 2
    return _out(_bound_factor(coeffs) ** 2 * tail)


# --------------------------------------------------------------------------
# weight polynomials and constants


@dataclass(frozen=True)
class PolynomialWeights:
    """Weights ``d_1 .. d_N`` of ``W(x) = sum d_i x^i`` and the exponent ``p``."""

    d: tuple
    p: float = 1.0

    def __post_init__(self):
        d = tuple(float(x) for x in self.d)
        object.__setattr__(self, "d", d)
        if len(d) < 1:
            raise PreconditionError("weight polynomial needs N >= 1 weights")
        if any(not x >= 0 for x in d):
            raise PreconditionError(f"weights must be nonnegative, got {d}")
        if not 0 < self.p <= 1:
            raise PreconditionError(f"p must lie in (0, 1], got {self.p}")

    @property
    def N(self) -> int:
        return len(self.d)

    def radius_query(self) -> R3:
        return R3(self.p)

    def params(self) -> dict:
        return {"p": self.p, "d": list(self.d)}


def weight_poly(W: PolynomialWeights, x):
    """``sum_i d_i x^i``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise PreconditionError("weight polynomial is evaluated at x >= 0")
    out = np.zeros_like(x)
    for i in range(W.N, 0, -1):
        out = (out + W.d[i - 1]) * x
    return _out(out)


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 200):
    """Golden-section search for the maximizer of a unimodal ``f`` on ``[a, b]``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _cs_profile(s: int):
    def g(t):
        return t * (1.0 + t) ** 2 * (1.0 - t * t) ** (2 * s - 2)

    return g


def cs_constant(s: int, grid: int = 10_000) -> tuple:
    """Return ``(c_s, t*)``: the maximum of ``t(1+t)^2(1-t^2)^(2s-2)`` on [0, 1].

    A uniform scan locates the bracket, golden-section search refines it.
    """
    if int(s) != s or s < 2:
        raise PreconditionError(f"c_s is defined for integers s >= 2, got {s}")
    g = _cs_profile(int(s))
    ts = np.linspace(0.0, 1.0, grid + 1)
    i = int(np.argmax(g(ts)))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, grid)]
    t_star, value = golden_max(g, float(lo), float(hi))
    # the maximum is flat, so polish t* on the sign of the log-derivative
    a, b = max(t_star - 1e-6, 1e-15), min(t_star + 1e-6, 1.0 - 1e-15)
    dlog = _cs_log_derivative(int(s))
    if dlog(a) > 0 > dlog(b):
        for _ in range(100):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if dlog(mid) > 0:
                a = mid
            else:
                b = mid
        t_star = 0.5 * (a + b)
        value = g(t_star)
    return float(value), float(t_star)


def _cs_log_derivative(s: int):
    def d(t):
        return 1.0 / t + 2.0 / (1.0 + t) - 4.0 * (s - 1) * t / (1.0 - t * t)

    return d


def mp_constant(p: float) -> float:
    """``p(2+p) / (4p+4)``."""
    if not 0 < p <= 1:
        raise PreconditionError(f"p must lie in (0, 1], got {p}")
    return p * (2.0 + p) / (4.0 * p + 4.0)


def weight_condition_lhs(W: PolynomialWeights) -> float:
    """``sum_i 2(2i-1) gamma_i d_i M_p^(2i)`` with ``gamma_1 = 4``, ``gamma_i = c_i``."""
    M = mp_constant(W.p)
    total = 0.0
    for i, d in enumerate(W.d, start=1):
        if d == 0.0:
            continue
        gamma = 4.0 if i == 1 else cs_constant(i)[0]
        total += 2 * (2 * i - 1) * gamma * d * M ** (2 * i)
    return total


def check_weight_condition(W: PolynomialWeights, tol: float = WEIGHT_CONDITION_TOL) -> tuple:
    """Return ``(holds, lhs)``; holds when ``lhs <= p + tol``."""
    lhs = weight_condition_lhs(W)
    return lhs <= W.p + tol, lhs


def require_weight_condition(W: PolynomialWeights) -> float:
    ok, lhs = check_weight_condition(W)
    if not ok:
        raise WeightConditionError(
            "weight condition violated: 8*d1*M_p^2 + 6*c_2*d2*M_p^4 + ... + "
            f"2(2N-1)*c_N*dN*M_p^(2N) = {lhs:.12g} exceeds p = {W.p:.12g}",
            lhs,
            W.p,
        )
    return lhs


# --------------------------------------------------------------------------
# reports


@dataclass
class FunctionalReport:
    """One evaluation: ``margin = bound - lhs - tail`` (``bound`` is 1 for theorems)."""

    r: float
    lhs: float
    terms: dict
    tail: float
    margin: float = field(init=False)
    bound: float = 1.0

    def __post_init__(self):
        self.margin = self.bound - self.lhs - self.tail

    def passes(self, tol: float = 1e-9) -> bool:
        return self.margin >= -(self.tail + tol)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "lhs": self.lhs,
            "terms": dict(self.terms),
            "tail": self.tail,
            "bound": self.bound,
            "margin": self.margin,
        }

    def csv_header(self) -> list:
        return ["r", "lhs", *self.terms.keys(), "tail", "margin"]

    def csv_row(self) -> list:
        return [self.r, self.lhs, *self.terms.values(), self.tail, self.margin]


# --------------------------------------------------------------------------
# theorem left-hand sides


def _check_params(theorem: str, params):
    expected = {"T41": Xi, "T12": R2, "T21": PolynomialWeights, "T14": RBR}
    if theorem not in expected:
        raise PreconditionError(f"unknown theorem id {theorem!r}; expected one of {THEOREMS}")
    if not isinstance(params, expected[theorem]):
        raise PreconditionError(f"{theorem} expects {expected[theorem].__name__} parameters")
    if theorem == "T21":
        require_weight_condition(params)


def default_schwarz(theorem: str, params, direction, t) -> tuple:
    """Schwarz maps ``+-T_{z0}(z)^(k-1) z`` based at ``direction`` with the theorem's orders.

    Maps feeding a composition power keep the ray (phase +1); maps feeding an
    increment ``|f(v(z)) - f(0)|`` reverse it (phase -1).  Along the axis of
    the coordinate Mobius map both choices are the worst case.
    """
    if theorem == "T41":
        orders = [(params.m1, 1.0), (params.m2, -1.0)]
    elif theorem == "T12":
        orders = [(params.m1, -1.0)]
    elif theorem == "T14":
        orders = [(params.m1, 1.0)]
    else:
        orders = []
    return tuple(
        None if math.isinf(k) else schwarz_spec(int(k), direction, t, phase) for k, phase in orders
    )


def _compose(fmap, spec, direction, r):
    pts = r[:, None] * direction[None, :]
    return map_eval(fmap, schwarz_eval(spec, pts))


def theorem_terms(
    theorem: str,
    fmap: MapDescriptor,
    params,
    coeffs: SliceCoefficients,
    direction,
    r,
    schwarz: Optional[Sequence] = None,
) -> tuple:
    """Named left-hand-side terms of ``theorem`` at ``r * direction`` for each ``r``.

    Returns ``(terms, tail)`` where every entry is an array over ``r``.
    ``coeffs`` must be the slice of ``fmap`` along ``direction``.
    """
    _check_params(theorem, params)
    r = np.atleast_1d(_radius(r))
    direction = np.asarray(direction, dtype=complex)
    if schwarz is None:
        schwarz = default_schwarz(theorem, params, direction, fmap.t)
    f0 = map_eval(fmap, np.zeros(fmap.n, dtype=complex))
    b = float(np.max(np.abs(f0)))
    c0 = coeffs.c0

    def increment(spec):
        vals = _compose(fmap, spec, direction, r)
        return np.max(np.abs(vals - f0[None, :]), axis=1)

    def composition_power(spec, p):
        if spec is None:
            return np.full(r.shape, b**p)
        return np.max(np.abs(_compose(fmap, spec, direction, r)), axis=1) ** p

    if theorem == "T41":
        terms = {
            "composition_power": composition_power(schwarz[0], params.p),
            "lacunary": params.mu * np.asarray(lacunary_sum(coeffs, params.q, params.m, r)),
            "increment": params.nu * increment(schwarz[1]) if params.nu else np.zeros(r.shape),
        }
        tail = params.mu * np.asarray(lacunary_tail(coeffs, params.q, params.m, r))
    elif theorem in ("T12", "T21"):
        weight = 1.0 / (1.0 + c0) + r / (1.0 - r)
        terms = {
            "constant_power": np.full(r.shape, b**params.p),
            "majorant": np.asarray(majorant_sum(coeffs, 1, r)),
            "square_block": weight * np.asarray(square_sum(coeffs, 1, r)),
        }
        tail = np.asarray(majorant_tail(coeffs, 1, r)) + weight * np.asarray(square_tail(coeffs, 1, r))
        if theorem == "T12":
            terms["increment"] = increment(schwarz[0])
        else:
            energy = np.asarray(schwarz_energy(coeffs, r))
            e_tail = np.asarray(schwarz_energy_tail(coeffs, r))
            w = np.asarray(weight_poly(params, energy))
            terms["weighted_energy"] = w
            tail = tail + (np.asarray(weight_poly(params, energy + e_tail)) - w)
    else:
        terms = {"composition_power": composition_power(schwarz[0], params.p)}
        terms.update(refined_terms(coeffs, params.N, r))
        tail = np.asarray(refined_tail(coeffs, params.N, r))
    terms = {k: np.broadcast_to(np.asarray(v, dtype=float), r.shape) for k, v in terms.items()}
    return terms, np.broadcast_to(np.asarray(tail, dtype=float), r.shape)


def thm_lhs(
    theorem: str,
    fmap: MapDescriptor,
    params,
    z,
    schwarz: Optional[Sequence] = None,
    coeffs: Optional[SliceCoefficients] = None,
    S_max: int = DEFAULT_S_MAX,
) -> FunctionalReport:
    """Exact left-hand side of ``theorem`` at the point ``z`` (``r = ||z||_t``)."""
    z = np.asarray(z, dtype=complex).ravel()
    r = lt_norm(z, fmap.t)
    if r >= 1.0:
        raise PreconditionError("z must lie in the open unit ball")
    if r == 0.0:
        direction = np.zeros(fmap.n, dtype=complex)
        direction[0] = 1.0
    else:
        direction = z / r
        direction = direction / lt_norm(direction, fmap.t)
    if coeffs is None:
        coeffs = extract_slice(fmap, direction, S_max=S_max)
    terms, tail = theorem_terms(theorem, fmap, params, coeffs, direction, np.array([r]), schwarz)
    values = {k: float(v[0]) for k, v in terms.items()}
    return FunctionalReport(r=float(r), lhs=float(sum(values.values())), terms=values, tail=float(tail[0]))
