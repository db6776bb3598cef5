"""Sampled verification of the inequalities below their radii and of sharpness above.

A :class:`VerificationPlan` fixes the theorem, its parameters, a map family
(explicit descriptors plus a Mobius ``b``-grid), a direction sample and an
``r``-grid.  :func:`verify_below_radius` evaluates every
``(map, direction, r)`` tuple; a row passes when
``margin >= -(tail + tol)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidMapError, PreconditionError, SharpnessProbeError
from .functionals import (
    THEOREMS,
    FunctionalReport,
    majorant_sum,
    majorant_tail,
    refined_block,
    refined_bound_rhs,
    refined_tail,
    require_weight_condition,
    schwarz_energy,
    theorem_terms,
)
from .geometry import (
    Composed,
    Lacunary,
    MapDescriptor,
    MobiusCoord,
    Rotated,
    identity_map,
    schwarz_spec,
    coordinate_vector,
    map_eval,
    mobius_map,
    sample_boundary,
    validate_self_map,
)
from .radius import minimal_root
from .slice_engine import DEFAULT_S_MAX, SliceCoefficients, extract_slice, mobius_slice

DEFAULT_B_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
SHARPNESS_B_GRID = (0.9, 0.99, 0.999, 0.9999)
SHARPNESS_EXCESS = 1e-6
COEFFICIENT_TOL = 1e-9
PLAN_IDS = THEOREMS + ("lemma21", "lemmaA", "lemmaB", "classical1D")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BOHR_LAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class VerificationPlan:
    theorem: str
    params: object = None
    maps: tuple = ()
    b_grid: tuple = DEFAULT_B_GRID
    n: int = 2
    t: float = 2.0
    direction_count: int = 32
    seed: int = 42
    r_count: int = 100
    r_fraction: float = 0.999
    S_max: int = DEFAULT_S_MAX
    tol: float = 1e-9

    def __post_init__(self):
        if self.theorem not in PLAN_IDS:
            raise PreconditionError(f"unknown theorem id {self.theorem!r}; expected one of {PLAN_IDS}")
        if self.r_count < 1 or not 0 < self.r_fraction <= 1:
            raise PreconditionError("r-grid needs r_count >= 1 and 0 < r_fraction <= 1")

    def family(self) -> list:
        n = 1 if self.theorem == "classical1D" else self.n
        return [mobius_map(b, n, self.t) for b in self.b_grid] + list(self.maps)


@dataclass
class VerificationRow:
    map_label: str
    direction: int
    report: FunctionalReport
    check: str = ""


@dataclass
class VerificationResult:
    theorem: str
    params: dict
    radius: Optional[float]
    rows: list
    tol: float
    grids: dict = field(default_factory=dict)

    @property
    def counterexamples(self) -> list:
        return [row for row in self.rows if not row.report.passes(self.tol)]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    @property
    def worst_margin(self) -> float:
        return min((row.report.margin for row in self.rows), default=math.inf)

    def summary(self) -> dict:
        out = {
            "theorem": self.theorem,
            "params": self.params,
            "radius": self.radius,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "rows": len(self.rows),
            "violations": len(self.counterexamples),
            "grids": self.grids,
        }
        return out


def theorem_radius(theorem: str, params, tol: float = 1e-12) -> float:
    if theorem == "T21":
        require_weight_condition(params)
        return minimal_root(params.radius_query(), tol).root
    return minimal_root(params, tol).root


def _r_grid(radius: float, count: int, fraction: float) -> np.ndarray:
    return radius * fraction * np.arange(1, count + 1) / count


def _params_dict(params) -> dict:
    if params is None:
        return {}
    if hasattr(params, "params"):
        return params.params()
    return dict(params)


def _rows_from(label, j, r, terms, tail, bound=None, check=""):
    rows = []
    for i, ri in enumerate(r):
        values = {k: float(v[i]) for k, v in terms.items()}
        rep = FunctionalReport(
            r=float(ri),
            lhs=float(sum(values.values())),
            terms=values,
            tail=float(tail[i]),
            bound=1.0 if bound is None else float(bound[i]),
        )
        rows.append(VerificationRow(label, j, rep, check))
    return rows


def _checked_slice(fmap: MapDescriptor, direction, S_max: int) -> SliceCoefficients:
    coeffs = extract_slice(fmap, direction, S_max=S_max)
    if coeffs.coefficient_bound_slack() < -COEFFICIENT_TOL:
        raise InvalidMapError(
            f"map {fmap.to_json()} violates c_s <= 1 - c_0^2 along a sampled direction "
            "and lies outside the class the inequalities are stated for"
        )
    return coeffs


def _theorem_rows(plan: VerificationPlan, radius: float) -> list:
    r = _r_grid(radius, plan.r_count, plan.r_fraction)
    family = plan.family()
    for fmap in family:
        validate_self_map(fmap)
    directions = sample_boundary(plan.n, plan.t, plan.direction_count, plan.seed)

    def work(fmap):
        rows = []
        for j, z0 in enumerate(directions):
            coeffs = _checked_slice(fmap, z0, plan.S_max)
            terms, tail = theorem_terms(plan.theorem, fmap, plan.params, coeffs, z0, r)
            rows.extend(_rows_from(fmap.label(), j, r, terms, tail, check=plan.theorem))
        return rows

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        chunks = list(pool.map(work, family))
    return [row for chunk in chunks for row in chunk]


def _lemma21_rows(plan: VerificationPlan) -> list:
    N = int(_params_dict(plan.params).get("N", 1))
    r = _r_grid(1.0, plan.r_count, plan.r_fraction)
    rows = []
    directions = sample_boundary(plan.n, plan.t, plan.direction_count, plan.seed)
    for fmap in plan.family():
        validate_self_map(fmap)
        for j, z0 in enumerate(directions):
            coeffs = _checked_slice(fmap, z0, plan.S_max)
            for rep in check_refined_lemma(coeffs, N, r):
                rows.append(VerificationRow(fmap.label(), j, rep, "refined_block"))
    return rows


def _lemmaA_rows(plan: VerificationPlan) -> list:
    r = _r_grid(1.0, plan.r_count, plan.r_fraction)
    rows = []
    directions = sample_boundary(plan.n, plan.t, plan.direction_count, plan.seed)
    for fmap in plan.family():
        b = float(np.max(np.abs(map_eval(fmap, np.zeros(fmap.n)))))
        for j, z0 in enumerate(directions):
            value = np.max(np.abs(map_eval(fmap, r[:, None] * z0[None, :])), axis=1)
            bound = (b + r) / (1.0 + b * r)
            rows.extend(_rows_from(fmap.label(), j, r, {"value": value}, np.zeros_like(r), bound, "schwarz_pick"))
    return rows


def _lemmaB_rows(plan: VerificationPlan) -> list:
    ps = np.round(np.arange(1, 11) / 10.0, 12)
    ts = np.linspace(0.0, 1.0, plan.r_count, endpoint=False)
    rows = []
    for p in ps:
        bound = (1.0 - ts**p) / (1.0 - ts)
        rows.extend(
            _rows_from(f"p={p:g}", 0, ts, {"p": np.full_like(ts, p)}, np.zeros_like(ts), bound, "power_quotient")
        )
    return rows


def _classical_rows(plan: VerificationPlan) -> list:
    radius = 1.0 / 3.0
    r = _r_grid(radius, plan.r_count, 1.0)
    rows = []
    directions = sample_boundary(1, plan.t, min(plan.direction_count, 8), plan.seed)
    for fmap in plan.family():
        if fmap.n != 1:
            raise PreconditionError("classical one-variable checks need n = 1 maps")
        f0 = map_eval(fmap, np.zeros(1))
        for j, z0 in enumerate(directions):
            coeffs = _checked_slice(fmap, z0, plan.S_max)
            bohr = np.asarray(majorant_sum(coeffs, 0, r))
            tail = np.asarray(majorant_tail(coeffs, 0, r))
            rows.extend(_rows_from(fmap.label(), j, r, {"majorant": bohr}, tail, check="bohr_sum"))
            inc = np.abs(map_eval(fmap, r[:, None] * z0[None, :])[:, 0] - f0[0]) ** 2
            rows.extend(
                _rows_from(fmap.label(), j, r, {"majorant": bohr, "increment_squared": inc}, tail, check="bohr_sum_increment")
            )
    return rows


def verify_below_radius(plan: VerificationPlan) -> VerificationResult:
    """Evaluate the plan's inequality over its whole sample."""
    grids = {
        "b_grid": list(plan.b_grid),
        "n": plan.n,
        "t": "inf" if math.isinf(plan.t) else plan.t,
        "direction_count": plan.direction_count,
        "seed": plan.seed,
        "r_count": plan.r_count,
        "r_fraction": plan.r_fraction,
        "S_max": plan.S_max,
    }
    radius = None
    if plan.theorem in THEOREMS:
        radius = theorem_radius(plan.theorem, plan.params)
        rows = _theorem_rows(plan, radius)
    elif plan.theorem == "lemma21":
        rows = _lemma21_rows(plan)
    elif plan.theorem == "lemmaA":
        rows = _lemmaA_rows(plan)
    elif plan.theorem == "lemmaB":
        rows = _lemmaB_rows(plan)
    else:
        radius = 1.0 / 3.0
        rows = _classical_rows(plan)
    return VerificationResult(plan.theorem, _params_dict(plan.params), radius, rows, plan.tol, grids)


# --------------------------------------------------------------------------
# sharpness


@dataclass(frozen=True)
class SharpnessWitness:
    theorem: str
    params: dict
    b: float
    r: float
    radius: float
    lhs: float
    tail: float
    margin: float
    terms: dict

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "params": self.params,
            "b": self.b,
            "r": self.r,
            "radius": self.radius,
            "lhs": self.lhs,
            "tail": self.tail,
            "margin": self.margin,
            "terms": self.terms,
        }


def extremal_lhs(theorem: str, params, b: float, r, n: int = 2, t=2.0, S_max: int = DEFAULT_S_MAX):
    """Left-hand side of ``theorem`` for the coordinate Mobius map along ``e_1``.

    Returns ``(lhs, tail, terms)`` as arrays over ``r``.
    """
    fmap = mobius_map(b, n, t)
    e1 = coordinate_vector(n, 1)
    coeffs = extract_slice(fmap, e1, S_max=S_max)
    terms, tail = theorem_terms(theorem, fmap, params, coeffs, e1, np.atleast_1d(r))
    lhs = sum(terms.values())
    return lhs, tail, terms


def probe_sharpness(
    theorem: str,
    params,
    delta: float = 0.01,
    b_grid=SHARPNESS_B_GRID,
    n: int = 2,
    t=2.0,
    S_max: int = DEFAULT_S_MAX,
) -> SharpnessWitness:
    """Look for ``b`` in ``b_grid`` with ``lhs - tail > 1 + 1e-6`` at ``r = R + delta``."""
    if theorem not in THEOREMS:
        raise PreconditionError(f"sharpness probes exist for {THEOREMS}, got {theorem!r}")
    if delta < 0:
        raise PreconditionError("delta must be nonnegative")
    radius = theorem_radius(theorem, params)
    r = radius + delta
    if r >= 1.0:
        raise PreconditionError(f"probe radius {r} is not below 1")
    best = (-math.inf, None)
    for b in b_grid:
        lhs, tail, terms = extremal_lhs(theorem, params, b, r, n, t, S_max)
        lhs, tail = float(lhs[0]), float(tail[0])
        if lhs - tail > best[0]:
            best = (lhs - tail, b)
        if lhs - tail > 1.0 + SHARPNESS_EXCESS:
            return SharpnessWitness(
                theorem,
                _params_dict(params),
                float(b),
                float(r),
                float(radius),
                lhs,
                tail,
                1.0 - lhs - tail,
                {k: float(v[0]) for k, v in terms.items()},
            )
    raise SharpnessProbeError(
        f"no sharpness witness for {theorem} at r = R + {delta}: max lhs - tail = {best[0]!r} at b = {best[1]}",
        best[0],
        best[1],
    )


# --------------------------------------------------------------------------
# lemma and cross-checks


def check_refined_lemma(coeffs: SliceCoefficients, N: int, r_grid) -> list:
    """Compare the refined block with ``(1 - c_0^2) r^N / (1 - r)`` on ``r_grid``."""
    r = np.asarray(r_grid, dtype=float)
    if np.any(r <= 0) or np.any(r >= 1):
        raise PreconditionError("r_grid must lie in (0, 1)")
    lhs = np.atleast_1d(refined_block(coeffs, N, r))
    rhs = np.atleast_1d(refined_bound_rhs(coeffs.c0, N, r))
    tail = np.atleast_1d(refined_tail(coeffs, N, r))
    return [
        FunctionalReport(float(ri), float(li), {"refined_block": float(li)}, float(ti), bound=float(bi))
        for ri, li, ti, bi in zip(r, lhs, tail, rhs)
    ]


def area_integral_check(b: float, r: float, quad_points: int = 64 * 64) -> tuple:
    """Compare ``pi * energy`` of the Mobius slice with a polar quadrature of ``|f'|^2``.

    Gauss-Legendre nodes in the radius, the periodic trapezoid rule in the
    angle.  Returns ``(series, quadrature, rel_err)``.
    """
    if not 0 < r < 1:
        raise PreconditionError("r must lie in (0, 1)")
    if quad_points < 64 * 64:
        raise PreconditionError("need at least 64^2 quadrature points")
    side = int(math.isqrt(quad_points))
    x, w = np.polynomial.legendre.leggauss(side)
    rho = 0.5 * r * (x + 1.0)
    w_rho = 0.5 * r * w
    theta = 2.0 * math.pi * np.arange(side) / side
    z = rho[:, None] * np.exp(1j * theta)[None, :]
    deriv = np.abs((1.0 - b * b) / (1.0 + b * z) ** 2) ** 2
    quadrature = float(np.sum(w_rho * rho * deriv.sum(axis=1)) * (2.0 * math.pi / side))
    series = math.pi * float(schwarz_energy(mobius_slice(b), r))
    return series, quadrature, abs(series - quadrature) / abs(quadrature)


def builder_family(n: int = 2, t=2.0) -> list:
    """Non-extremal maps used alongside the Mobius grid."""
    maps = [identity_map(n, t)]
    maps.append(MapDescriptor(n, t, Rotated(MobiusCoord(0.6), tuple(0.3 * (j + 1) for j in range(n)))))
    maps.append(MapDescriptor(n, t, Composed(MobiusCoord(0.4), schwarz_spec(2, coordinate_vector(n, 1), t))))
    maps.append(MapDescriptor(n, t, Lacunary(2, 1, (0.5, 0.25), 1)))
    return maps
