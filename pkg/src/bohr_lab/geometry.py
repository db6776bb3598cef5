"""Geometry of complex l_t^n and the holomorphic maps acting on its unit ball.

Vectors are 1-d complex numpy arrays of length ``n``; batches of points are
arrays of shape ``(K, n)``.  The norm exponent ``t`` is a float in
``[1, inf]`` with ``math.inf`` standing for the sup-norm.

Map descriptors are small frozen dataclasses.  A :class:`MapDescriptor`
carries the dimension, the domain exponent and one *kind*:

* :class:`MobiusCoord`  -- ``z -> ((b + z_c)/(1 + b z_c), 0, ..., 0)`` placed
  in coordinate ``c`` (1-based, as in ``e_1``);
* :class:`Polynomial`   -- finite sum of vector coefficients times monomials;
* :class:`Lacunary`     -- scalar series on powers ``q*i + m`` of one coordinate;
* :class:`Rotated`      -- an inner kind precomposed with diagonal phases;
* :class:`Composed`     -- an outer kind precomposed with a Schwarz map.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidMapError, PreconditionError

SELF_MAP_TOL = 1e-9
UNIT_SPHERE_TOL = 1e-12


def _as_t(t) -> float:
    if isinstance(t, str):
        if t.strip().lower() in ("inf", "infinity", "∞"):
            return math.inf
        t = float(t)
    t = float(t)
    if not t >= 1.0:
        raise PreconditionError(f"norm exponent t must lie in [1, inf], got {t}")
    return t


def lt_norm(z, t):
    """Return the l_t norm of ``z`` (over the last axis for batches)."""
    t = _as_t(t)
    a = np.abs(np.asarray(z, dtype=complex))
    if math.isinf(t):
        out = a.max(axis=-1)
    elif t == 1.0:
        out = a.sum(axis=-1)
    else:
        # scale by the largest modulus so powers neither overflow nor underflow
        big = a.max(axis=-1, keepdims=True)
        safe = np.where(big > 0, big, 1.0)
        out = safe[..., 0] * np.sum((a / safe) ** t, axis=-1) ** (1.0 / t)
        out = np.where(big[..., 0] > 0, out, 0.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _sign(z: np.ndarray) -> np.ndarray:
    a = np.abs(z)
    return np.where(a > 0, np.exp(1j * np.angle(z)), 1.0 + 0.0j)


@dataclass(frozen=True, eq=False)
class SupportFunctional:
    """Norm-one linear functional ``T(z) = sum_j weights_j * z_j``."""

    weights: np.ndarray
    t: float

    def __call__(self, z):
        return np.asarray(z, dtype=complex) @ self.weights


def support_functional(z0, t) -> SupportFunctional:
    """Build the support functional of ``z0`` in l_t^n.

    The returned ``T`` has operator norm 1 and ``T(z0) = ||z0||_t``.  Where
    the norming functional is not unique the choice is deterministic: for
    ``t = inf`` the lowest index attaining ``max |z0_j|``; for ``t = 1`` unit
    phases on the support of ``z0`` and zeros elsewhere.
    """
    t = _as_t(t)
    z0 = np.asarray(z0, dtype=complex).ravel()
    if not np.any(z0 != 0):
        raise PreconditionError("support functional of the zero vector is undefined")
    phase = np.conj(_sign(z0))
    a = np.abs(z0)
    if math.isinf(t):
        w = np.zeros_like(z0)
        j = int(np.argmax(a))
        w[j] = phase[j]
    elif t == 1.0:
        w = np.where(a > 0, phase, 0.0)
    else:
        norm = lt_norm(z0, t)
        w = phase * (a / norm) ** (t - 1.0)
    w = np.asarray(w, dtype=complex)
    w.setflags(write=False)
    return SupportFunctional(w, t)


# --------------------------------------------------------------------------
# Schwarz maps


@dataclass(frozen=True)
class SchwarzMapSpec:
    """Schwarz map ``v(z) = phase * T_{z0}(z)**(k-1) * z`` with a zero of order k at 0.

    ``phase`` is unimodular (default 1); ``-1`` sends the ray through ``z0``
    onto the opposite ray, which is what the increment terms need at the
    extremal map.
    """

    k: int
    z0: tuple
    t: float
    phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise PreconditionError(f"Schwarz order k must be a positive integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "z0", tuple(complex(x) for x in self.z0))
        object.__setattr__(self, "t", _as_t(self.t))
        object.__setattr__(self, "phase", complex(self.phase))
        if abs(abs(self.phase) - 1.0) > 1e-12:
            raise PreconditionError(f"Schwarz phase must be unimodular, got {self.phase}")
        if not any(x != 0 for x in self.z0):
            raise PreconditionError("Schwarz base direction must be nonzero")

    @property
    def n(self) -> int:
        return len(self.z0)

    @property
    def functional(self) -> SupportFunctional:
        return support_functional(np.array(self.z0), self.t)

    def to_dict(self) -> dict:
        out = {
            "k": self.k,
            "z0": [[x.real, x.imag] for x in self.z0],
            "t": _t_to_json(self.t),
        }
        if self.phase != 1.0:
            out["phase"] = [self.phase.real, self.phase.imag]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "SchwarzMapSpec":
        phase = complex(*d["phase"]) if "phase" in d else 1.0 + 0.0j
        return cls(
            k=d["k"],
            z0=tuple(complex(re, im) for re, im in d["z0"]),
            t=_t_from_json(d["t"]),
            phase=phase,
        )


def schwarz_eval(spec: SchwarzMapSpec, z) -> np.ndarray:
    """Evaluate the Schwarz map at a point (or a batch) of the open unit ball."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.asarray(lt_norm(z, spec.t)) >= 1.0):
        raise PreconditionError("schwarz_eval needs points of the open unit ball")
    if spec.k == 1:
        return spec.phase * z
    tz = spec.functional(z)
    return (spec.phase * tz ** (spec.k - 1))[..., None] * z


# --------------------------------------------------------------------------
# Map descriptors


@dataclass(frozen=True)
class MobiusCoord:
    b: float
    coord: int = 1

    def __post_init__(self):
        if not 0.0 <= self.b < 1.0:
            raise PreconditionError(f"Mobius parameter b must lie in [0, 1), got {self.b}")


@dataclass(frozen=True)
class Polynomial:
    """``f(z) = sum coef * z**alpha`` over ``terms = ((alpha, coef), ...)``."""

    terms: tuple


@dataclass(frozen=True)
class Lacunary:
    """``f_c(z) = sum_i coeffs[i] * z_c**(q*i + m)``, other components zero."""

    q: int
    m: int
    coeffs: tuple
    coord: int = 1

    def __post_init__(self):
        if self.q < 1 or self.m < 0:
            raise PreconditionError("lacunary map needs q >= 1 and m >= 0")
        object.__setattr__(self, "coeffs", tuple(complex(a) for a in self.coeffs))


@dataclass(frozen=True)
class Rotated:
    """``f(z) = inner(diag(exp(i*phases)) z)``."""

    inner: "Kind"
    phases: tuple


@dataclass(frozen=True)
class Composed:
    """``f(z) = outer(v(z))`` for a Schwarz map ``v``."""

    outer: "Kind"
    inner: SchwarzMapSpec


Kind = Union[MobiusCoord, Polynomial, Lacunary, Rotated, Composed]


@dataclass(frozen=True)
class MapDescriptor:
    """A holomorphic map from the unit ball of l_t^n into the closed polydisc."""

    n: int
    t: float
    kind: Kind

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise PreconditionError(f"dimension n must be a positive integer, got {self.n}")
        object.__setattr__(self, "t", _as_t(self.t))
        _check_kind(self.kind, int(self.n), self.t)

    def to_dict(self) -> dict:
        return {"n": self.n, "t": _t_to_json(self.t), "kind": _kind_to_dict(self.kind)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "MapDescriptor":
        return cls(n=d["n"], t=_t_from_json(d["t"]), kind=_kind_from_dict(d["kind"]))

    @classmethod
    def from_json(cls, text: str) -> "MapDescriptor":
        return cls.from_dict(json.loads(text))

    def label(self) -> str:
        return _kind_label(self.kind)


def _check_kind(kind, n: int, t: float) -> None:
    if isinstance(kind, (MobiusCoord, Lacunary)):
        if not 1 <= kind.coord <= n:
            raise PreconditionError(f"coordinate {kind.coord} outside 1..{n}")
    elif isinstance(kind, Polynomial):
        for alpha, coef in kind.terms:
            if len(alpha) != n or len(coef) != n or any(a < 0 for a in alpha):
                raise PreconditionError("polynomial term has the wrong shape for n")
    elif isinstance(kind, Rotated):
        if len(kind.phases) != n:
            raise PreconditionError("rotation needs one phase per coordinate")
        _check_kind(kind.inner, n, t)
    elif isinstance(kind, Composed):
        if kind.inner.n != n or kind.inner.t != t:
            raise PreconditionError("Schwarz map must act on the same l_t^n as the map")
        _check_kind(kind.outer, n, t)
    else:
        raise PreconditionError(f"unknown map kind {kind!r}")


def _eval_kind(kind, Z: np.ndarray) -> np.ndarray:
    K, n = Z.shape
    if isinstance(kind, MobiusCoord):
        out = np.zeros((K, n), dtype=complex)
        w = Z[:, kind.coord - 1]
        out[:, kind.coord - 1] = (kind.b + w) / (1.0 + kind.b * w)
        return out
    if isinstance(kind, Polynomial):
        out = np.zeros((K, n), dtype=complex)
        for alpha, coef in kind.terms:
            mono = np.prod(Z ** np.asarray(alpha), axis=1)
            out += mono[:, None] * np.asarray(coef, dtype=complex)[None, :]
        return out
    if isinstance(kind, Lacunary):
        out = np.zeros((K, n), dtype=complex)
        w = Z[:, kind.coord - 1]
        powers = kind.q * np.arange(len(kind.coeffs)) + kind.m
        out[:, kind.coord - 1] = (w[:, None] ** powers[None, :]) @ np.asarray(kind.coeffs, dtype=complex)
        return out
    if isinstance(kind, Rotated):
        return _eval_kind(kind.inner, Z * np.exp(1j * np.asarray(kind.phases, dtype=float)))
    if isinstance(kind, Composed):
        return _eval_kind(kind.outer, schwarz_eval(kind.inner, Z))
    raise PreconditionError(f"unknown map kind {kind!r}")


def map_eval(fmap: MapDescriptor, z, check: bool = True) -> np.ndarray:
    """Evaluate ``fmap`` at a point of the open unit ball (or a batch of them).

    Raises :class:`InvalidMapError` when a value leaves the closed polydisc
    by more than ``SELF_MAP_TOL``.
    """
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 1
    Z = z[None, :] if single else z
    if Z.shape[-1] != fmap.n:
        raise PreconditionError(f"point has dimension {Z.shape[-1]}, map expects {fmap.n}")
    if np.any(np.asarray(lt_norm(Z, fmap.t)) >= 1.0):
        raise PreconditionError("map_eval needs points of the open unit ball")
    out = _eval_kind(fmap.kind, Z)
    if check:
        worst = float(np.max(np.abs(out))) if out.size else 0.0
        if not worst <= 1.0 + SELF_MAP_TOL:
            raise InvalidMapError(
                f"map {fmap.to_json()} leaves the closed polydisc: max modulus {worst!r}"
            )
    return out[0] if single else out


# --------------------------------------------------------------------------
# sampling and validation


def coordinate_vector(n: int, j: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[j - 1] = 1.0
    return e


def sample_boundary(n: int, t, count: int, seed: int) -> list:
    """Deterministic sample of unit vectors of l_t^n.

    The coordinate directions ``e_1 .. e_n`` always come first; the rest are
    normalized complex Gaussian vectors (for ``n = 1``: random unimodular
    phases).  At least ``n`` vectors are returned.
    """
    t = _as_t(t)
    if count < 1:
        raise PreconditionError("count must be at least 1")
    out = [coordinate_vector(n, j) for j in range(1, n + 1)]
    rng = np.random.default_rng(seed)
    while len(out) < count:
        if n == 1:
            theta = rng.uniform(0.0, 2.0 * math.pi)
            out.append(np.array([complex(math.cos(theta), math.sin(theta))]))
            continue
        g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if math.isinf(t):
            a = np.abs(g)
            j = int(np.argmax(a))
            g = g / a[j]
            g[j] = g[j] / abs(g[j])
        else:
            g = g / lt_norm(g, t)
        out.append(g)
    return out


def validate_self_map(fmap: MapDescriptor, count: int = 64, seed: int = 0) -> float:
    """Sampled check that ``fmap`` maps the ball into the closed polydisc.

    Probes a radial grid along boundary directions plus random interior
    points; returns the largest modulus seen.  Raises InvalidMapError.
    """
    dirs = np.array(sample_boundary(fmap.n, fmap.t, count, seed))
    radii = np.array([0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999])
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, fmap.n)
    rng = np.random.default_rng(seed + 1)
    inner = rng.uniform(0.0, 0.999, size=(len(dirs), 1)) * dirs
    vals = map_eval(fmap, np.vstack([pts, inner]))
    return float(np.max(np.abs(vals)))


# --------------------------------------------------------------------------
# builders


def mobius_map(b: float, n: int = 1, t=2, coord: int = 1) -> MapDescriptor:
    return MapDescriptor(n, t, MobiusCoord(float(b), coord))


def identity_map(n: int = 1, t=2) -> MapDescriptor:
    terms = []
    for j in range(n):
        alpha = tuple(1 if i == j else 0 for i in range(n))
        coef = tuple(1.0 + 0j if i == j else 0j for i in range(n))
        terms.append((alpha, coef))
    return MapDescriptor(n, t, Polynomial(tuple(terms)))


def constant_map(value, t=2) -> MapDescriptor:
    value = tuple(complex(v) for v in value)
    n = len(value)
    return MapDescriptor(n, t, Polynomial(((tuple([0] * n), value),)))


def schwarz_spec(k: int, z0, t, phase: complex = 1.0) -> SchwarzMapSpec:
    return SchwarzMapSpec(k, tuple(np.asarray(z0, dtype=complex).ravel()), t, phase)


# --------------------------------------------------------------------------
# JSON helpers


def _t_to_json(t: float):
    if math.isinf(t):
        return "inf"
    return int(t) if float(t).is_integer() else t


def _t_from_json(t) -> float:
    return _as_t(t)


def _c(z: complex) -> list:
    return [z.real, z.imag]


def _kind_to_dict(kind) -> dict:
    if isinstance(kind, MobiusCoord):
        return {"mobius": {"b": kind.b, "coord": kind.coord}}
    if isinstance(kind, Polynomial):
        return {
            "polynomial": {
                "terms": [
                    {"alpha": list(alpha), "coef": [_c(complex(x)) for x in coef]}
                    for alpha, coef in kind.terms
                ]
            }
        }
    if isinstance(kind, Lacunary):
        return {
            "lacunary": {
                "q": kind.q,
                "m": kind.m,
                "coord": kind.coord,
                "coeffs": [_c(a) for a in kind.coeffs],
            }
        }
    if isinstance(kind, Rotated):
        return {"rotated": {"inner": _kind_to_dict(kind.inner), "phases": list(kind.phases)}}
    if isinstance(kind, Composed):
        return {"composed": {"outer": _kind_to_dict(kind.outer), "inner": kind.inner.to_dict()}}
    raise PreconditionError(f"unknown map kind {kind!r}")


def _kind_from_dict(d: dict):
    if len(d) != 1:
        raise PreconditionError(f"map kind must have exactly one tag, got {sorted(d)}")
    (tag, body), = d.items()
    if tag == "mobius":
        return MobiusCoord(float(body["b"]), int(body.get("coord", 1)))
    if tag == "polynomial":
        terms = tuple(
            (tuple(int(a) for a in term["alpha"]), tuple(complex(re, im) for re, im in term["coef"]))
            for term in body["terms"]
        )
        return Polynomial(terms)
    if tag == "lacunary":
        return Lacunary(
            int(body["q"]),
            int(body["m"]),
            tuple(complex(re, im) for re, im in body["coeffs"]),
            int(body.get("coord", 1)),
        )
    if tag == "rotated":
        return Rotated(_kind_from_dict(body["inner"]), tuple(float(x) for x in body["phases"]))
    if tag == "composed":
        return Composed(_kind_from_dict(body["outer"]), SchwarzMapSpec.from_dict(body["inner"]))
    raise PreconditionError(f"unknown map kind tag {tag!r}")


def _kind_label(kind) -> str:
    if isinstance(kind, MobiusCoord):
        return f"mobius(b={kind.b!r},coord={kind.coord})"
    if isinstance(kind, Polynomial):
        return f"polynomial({len(kind.terms)} terms)"
    if isinstance(kind, Lacunary):
        return f"lacunary(q={kind.q},m={kind.m},coord={kind.coord})"
    if isinstance(kind, Rotated):
        return f"rotated[{_kind_label(kind.inner)}]"
    if isinstance(kind, Composed):
        return f"composed[{_kind_label(kind.outer)};k={kind.inner.k}]"
    return repr(kind)
