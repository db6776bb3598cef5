"""Directional Taylor coefficients of vector-valued maps.

Every functional in this package sees a map only through its slice
``zeta -> f(zeta * z0)`` along a unit direction ``z0``.  The slice
coefficient ``c_s`` is the largest modulus, over the output components, of
the ``s``-th Taylor coefficient of that one-variable function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .geometry import UNIT_SPHERE_TOL, MapDescriptor, lt_norm, map_eval

DEFAULT_S_MAX = 64
DEFAULT_RHO = 0.95


@dataclass(frozen=True, eq=False)
class SliceCoefficients:
    """Nonnegative sequence ``c_0 .. c_S_max`` of slice coefficient moduli.

    ``rho`` and ``M`` record the Cauchy circle used by :func:`extract_slice`
    (``None`` for closed-form sequences) and feed :meth:`aliasing_bound`.
    """

    c: np.ndarray
    constant_term_exact: bool = False
    rho: Optional[float] = None
    M: Optional[int] = None

    def __post_init__(self):
        c = np.array(self.c, dtype=float).ravel()
        if c.size < 1:
            raise PreconditionError("slice needs at least the constant term")
        if np.any(~np.isfinite(c)) or np.any(c < 0):
            raise PreconditionError("slice coefficients must be finite and nonnegative")
        if c[0] > 1.0 + 1e-9:
            raise PreconditionError(f"constant term {c[0]!r} exceeds 1")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def S_max(self) -> int:
        return self.c.size - 1

    @property
    def c0(self) -> float:
        return float(min(self.c[0], 1.0))

    def aliasing_bound(self) -> np.ndarray:
        """Per-coefficient aliasing error bound ``rho**(M-s)/(1-rho)``."""
        s = np.arange(self.S_max + 1)
        if self.rho is None or self.M is None:
            return np.zeros(s.size)
        return self.rho ** (self.M - s) / (1.0 - self.rho)

    def coefficient_bound_slack(self) -> float:
        """Minimum of ``(1 - c_0**2) - c_s`` over ``s >= 1``."""
        if self.S_max == 0:
            return 1.0 - self.c0**2
        return float(np.min(1.0 - self.c0**2 - self.c[1:]))

    def rows(self):
        return [(s, float(v)) for s, v in enumerate(self.c)]


def extract_slice(
    fmap: MapDescriptor,
    direction,
    S_max: int = DEFAULT_S_MAX,
    rho: float = DEFAULT_RHO,
    M: Optional[int] = None,
) -> SliceCoefficients:
    """Taylor coefficients of ``zeta -> fmap(zeta * direction)`` by a discrete
    Cauchy integral on the circle ``|zeta| = rho`` with ``M`` nodes.

    ``M`` defaults to ``max(256, 8 * S_max)``.  The coefficient-wise
    aliasing error is at most ``rho**(M - s) / (1 - rho)`` because the map
    is bounded by 1.
    """
    if M is None:
        M = max(256, 8 * S_max)
    if S_max < 0:
        raise PreconditionError("S_max must be nonnegative")
    if not 0.0 < rho < 1.0:
        raise PreconditionError(f"Cauchy radius rho must lie in (0, 1), got {rho}")
    if M < 4 * S_max:
        raise PreconditionError(f"M={M} is below 4*S_max={4 * S_max}")
    direction = np.asarray(direction, dtype=complex).ravel()
    if direction.size != fmap.n:
        raise PreconditionError("direction dimension does not match the map")
    norm = lt_norm(direction, fmap.t)
    if abs(norm - 1.0) > UNIT_SPHERE_TOL:
        raise PreconditionError(f"direction must be a unit vector, ||z0||_t = {norm!r}")

    nodes = rho * np.exp(2j * np.pi * np.arange(M) / M)
    values = map_eval(fmap, nodes[:, None] * direction[None, :])
    spectrum = np.fft.fft(values, axis=0)[: S_max + 1] / M
    s = np.arange(S_max + 1)
    coeffs = spectrum / (rho**s)[:, None]
    c = np.max(np.abs(coeffs), axis=1)
    return SliceCoefficients(c, constant_term_exact=False, rho=rho, M=M)


def mobius_slice(b: float, S_max: int = DEFAULT_S_MAX) -> SliceCoefficients:
    """Closed-form slice of the coordinate Mobius map along its own axis."""
    if not 0.0 <= b < 1.0:
        raise PreconditionError(f"b must lie in [0, 1), got {b}")
    s = np.arange(1, S_max + 1)
    c = np.concatenate([[b], (1.0 - b * b) * np.power(b, s - 1)])
    return SliceCoefficients(c, constant_term_exact=True)


def geometric_tail_bound(coeffs: SliceCoefficients, r) -> float:
    """Bound ``(1 - c_0**2) r**(S_max+1) / (1 - r)`` on the neglected tail."""
    r = np.asarray(r, dtype=float)
    if np.any(r >= 1.0) or np.any(r < 0.0):
        raise PreconditionError("tail bound needs 0 <= r < 1")
    out = (1.0 - coeffs.c0**2) * r ** (coeffs.S_max + 1) / (1.0 - r)
    return float(out) if out.ndim == 0 else out
