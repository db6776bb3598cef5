"""Sharp radii as minimal roots of their defining equations on (0, 1).

Each radius family is a frozen dataclass whose ``residual`` method is the
defining equation, vectorized over ``r``.  :func:`minimal_root` scans a
geometric-then-uniform grid for the first sign change and bisects it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import NoRootError, PreconditionError

SCAN_CLAMP = 1.0 - 1e-9
DEFAULT_GRID = 10_000


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise PreconditionError(msg)


def _is_pos_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool) and x >= 1


def _frac(r, k):
    rk = r**k
    return rk / (1.0 - rk)


def _damping(r, m1):
    """``(1 - r**m1) / (1 + r**m1)``; identically 1 in the ``m1 = inf`` limit."""
    if math.isinf(m1):
        return np.ones_like(r)
    rm = r**m1
    return (1.0 - rm) / (1.0 + rm)


class RadiusQuery:
    family: str = ""

    def residual(self, r):
        raise NotImplementedError

    def params(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = "inf" if isinstance(v, float) and math.isinf(v) else v
        return out


@dataclass(frozen=True)
class Xi(RadiusQuery):
    """``2 mu r^(q+m)/(1-r^q) + 2 nu r^m2/(1-r^m2) - p (1-r^m1)/(1+r^m1)``.

    ``m1 = math.inf`` selects the limit where the damping factor is 1.
    """

    p: float
    q: int
    m: int
    m1: float
    m2: int
    mu: float
    nu: float
    family = "xi"

    def __post_init__(self):
        _require(0 < self.p <= 2, f"p must lie in (0, 2], got {self.p}")
        _require(_is_pos_int(self.q), f"q must be an integer >= 1, got {self.q}")
        _require(isinstance(self.m, (int, np.integer)) and self.m >= 0, f"m must be an integer >= 0, got {self.m}")
        _require(
            (isinstance(self.m1, float) and math.isinf(self.m1) and self.m1 > 0) or _is_pos_int(self.m1),
            f"m1 must be an integer >= 1 or inf, got {self.m1}",
        )
        _require(_is_pos_int(self.m2), f"m2 must be an integer >= 1, got {self.m2}")
        _require(self.mu >= 0 and self.nu >= 0, "mu and nu must be nonnegative")
        _require(self.mu + self.nu > 0, "mu + nu must be positive")

    def residual(self, r):
        r = np.asarray(r, dtype=float)
        return (
            2.0 * self.mu * r**self.m * _frac(r, self.q)
            + 2.0 * self.nu * _frac(r, self.m2)
            - self.p * _damping(r, self.m1)
        )


@dataclass(frozen=True)
class R2(RadiusQuery):
    """``r/(1-r) + r^m1/(1-r^m1) - p/2``."""

    p: float
    m1: int
    family = "r2"

    def __post_init__(self):
        _require(0 < self.p <= 2, f"p must lie in (0, 2], got {self.p}")
        _require(_is_pos_int(self.m1), f"m1 must be an integer >= 1, got {self.m1}")

    def residual(self, r):
        r = np.asarray(r, dtype=float)
        return _frac(r, 1) + _frac(r, self.m1) - self.p / 2.0


@dataclass(frozen=True)
class R3(RadiusQuery):
    """``p/(2+p)`` in closed form; residual ``2r/(1-r) - p``."""

    p: float
    family = "r3"

    def __post_init__(self):
        _require(0 < self.p <= 1, f"p must lie in (0, 1], got {self.p}")

    def residual(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * r / (1.0 - r) - self.p


@dataclass(frozen=True)
class RBR(RadiusQuery):
    """``p (1-r^m1)/(1+r^m1) - 2 r^N/(1-r)`` (positive at 0)."""

    p: float
    m1: int
    N: int
    family = "rbr"

    def __post_init__(self):
        _require(0 < self.p <= 2, f"p must lie in (0, 2], got {self.p}")
        _require(_is_pos_int(self.m1), f"m1 must be an integer >= 1, got {self.m1}")
        _require(_is_pos_int(self.N), f"N must be an integer >= 1, got {self.N}")

    def residual(self, r):
        r = np.asarray(r, dtype=float)
        return self.p * _damping(r, self.m1) - 2.0 * r**self.N / (1.0 - r)


@dataclass(frozen=True)
class ClassicalRN(RadiusQuery):
    """``2(1+r) r^N - (1-r)^2``."""

    N: int
    family = "rn"

    def __post_init__(self):
        _require(_is_pos_int(self.N), f"N must be an integer >= 1, got {self.N}")

    def residual(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * (1.0 + r) * r**self.N - (1.0 - r) ** 2


@dataclass(frozen=True)
class ClassicalRNPrime(RadiusQuery):
    """``(1+r) r^N - (1-r)^2``."""

    N: int
    family = "rnprime"

    def __post_init__(self):
        _require(_is_pos_int(self.N), f"N must be an integer >= 1, got {self.N}")

    def residual(self, r):
        r = np.asarray(r, dtype=float)
        return (1.0 + r) * r**self.N - (1.0 - r) ** 2


@dataclass(frozen=True)
class RPkm(RadiusQuery):
    """``r^k/(1-r^k) + r^m/(1-r^m) - p/2``."""

    p: float
    k: int
    m: int
    family = "rpkm"

    def __post_init__(self):
        _require(0 < self.p <= 2, f"p must lie in (0, 2], got {self.p}")
        _require(_is_pos_int(self.k) and _is_pos_int(self.m), "k and m must be integers >= 1")

    def residual(self, r):
        r = np.asarray(r, dtype=float)
        return _frac(r, self.k) + _frac(r, self.m) - self.p / 2.0


@dataclass(frozen=True)
class PsiE(RadiusQuery):
    """``2 lam r^(q+m)/(1-r^q) - p (1-r^m)/(1+r^m)`` with ``1 <= m < q``."""

    p: float
    q: int
    m: int
    lam: float
    family = "psie"

    def __post_init__(self):
        _require(0 < self.p <= 2, f"p must lie in (0, 2], got {self.p}")
        _require(_is_pos_int(self.q) and self.q >= 2, f"q must be an integer >= 2, got {self.q}")
        _require(_is_pos_int(self.m) and self.m < self.q, f"m must be an integer with 1 <= m < q, got {self.m}")
        _require(self.lam > 0, f"lambda must be positive, got {self.lam}")

    def residual(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * self.lam * r**self.m * _frac(r, self.q) - self.p * _damping(r, self.m)


FAMILIES = {
    cls.family: cls for cls in (Xi, R2, R3, RBR, ClassicalRN, ClassicalRNPrime, RPkm, PsiE)
}


def radius_equation(query: RadiusQuery):
    """Return ``(residual, (0.0, 1.0))`` for ``query``."""
    return query.residual, (0.0, 1.0)


def closed_form_radius(query: RadiusQuery) -> Optional[float]:
    """Exact radius for the degenerate cases that reduce to linear/quadratic equations."""
    if isinstance(query, R3):
        return query.p / (2.0 + query.p)
    if isinstance(query, RBR) and query.p == 1 and query.m1 == 1 and query.N == 1:
        return math.sqrt(5.0) - 2.0
    if isinstance(query, ClassicalRN) and query.N == 1:
        return math.sqrt(5.0) - 2.0
    if isinstance(query, ClassicalRNPrime) and query.N == 1:
        return 1.0 / 3.0
    if isinstance(query, R2) and query.m1 == 1:
        return query.p / (4.0 + query.p)
    if isinstance(query, RPkm) and query.k == query.m:
        return (query.p / (4.0 + query.p)) ** (1.0 / query.k)
    return None


@dataclass(frozen=True)
class RadiusResult:
    query: RadiusQuery
    root: float
    bracket: tuple
    residual_at_root: float
    tol: float
    second_sign_change: Optional[bool] = None
    method: str = "scan+bisection"

    def to_dict(self) -> dict:
        return {
            "query": {"family": self.query.family, **self.query.params()},
            "root": self.root,
            "bracket": list(self.bracket),
            "residual_at_root": self.residual_at_root,
            "tol": self.tol,
            "second_sign_change": self.second_sign_change,
            "method": self.method,
        }


def scan_grid(points: int = DEFAULT_GRID) -> np.ndarray:
    """Increasing grid on ``(0, 1 - 1e-9]``: 20% geometric below 1e-2, rest uniform."""
    n_geo = max(points // 5, 2)
    geo = np.geomspace(1e-8, 1e-2, n_geo, endpoint=False)
    uni = np.linspace(1e-2, SCAN_CLAMP, points - n_geo)
    return np.concatenate([geo, uni])


def _first_sign_change(values: np.ndarray) -> Optional[int]:
    s = np.sign(values)
    nz = np.nonzero(s[1:] != s[0])[0]
    return int(nz[0]) + 1 if nz.size else None


def minimal_root(query: RadiusQuery, tol: float = 1e-12, grid: int = DEFAULT_GRID) -> RadiusResult:
    """Smallest root in (0, 1) of the query's residual.

    The residual is scanned on :func:`scan_grid` (refined tenfold once when
    no sign change shows up), the first crossing is bisected until the
    bracket is at most ``tol`` wide, and the midpoint is returned.  The
    result also records whether another sign change follows in ``(R, 1)``.
    """
    if not tol >= 1e-14:
        raise PreconditionError(f"tol must be at least 1e-14, got {tol}")
    f, _ = radius_equation(query)
    if isinstance(query, R3):
        root = closed_form_radius(query)
        return RadiusResult(query, root, (root, root), float(f(root)), tol, False, "closed form")

    rs = None
    for points in (grid, 10 * grid):
        rs = scan_grid(points)
        vals = f(rs)
        idx = _first_sign_change(vals)
        if idx is not None:
            break
    else:
        raise NoRootError(
            f"residual of {query.family} {query.params()} has no sign change on (0, 1)",
            float(np.min(vals)),
            float(np.max(vals)),
        )

    if vals[idx] == 0.0:
        lo = hi = float(rs[idx])
    else:
        lo, hi = float(rs[idx - 1]), float(rs[idx])
        f_lo = float(vals[idx - 1])
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            f_mid = float(f(mid))
            if f_mid == 0.0:
                lo = hi = mid
                break
            if (f_mid > 0) == (f_lo > 0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
    root = 0.5 * (lo + hi)
    after = vals[idx + 1 :]
    second = bool(after.size and _first_sign_change(np.concatenate([[vals[idx]], after])) is not None)
    return RadiusResult(query, root, (lo, hi), float(f(root)), tol, second)


def solve(query: RadiusQuery, tol: float = 1e-12) -> float:
    return minimal_root(query, tol).root
