"""Finite-dimensional real p-normed spaces, their duals and operator norms.

The ambient space is R^d with the p-norm, 1 <= p <= inf.  Functionals act by
the coordinate dot product, so the dual norm is the q-norm with 1/p + 1/q = 1.

Operator norms p -> p are exact (closed form) for p in {1, 2, inf}.  For any
other p the problem is intractable in general and :func:`operator_norm` returns
a :class:`ConstantBound` bracketing the true value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DimensionMismatch

INF = math.inf
EXACT_P = (1.0, 2.0, INF)


def dual_exponent(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def parse_p(value: Any) -> float:
    """Accept a number or the strings ``"inf"``/``"infinity"``."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        value = float(value)
    p = float(value)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent p must lie in [1, inf], got {value!r}")
    return p


def format_p(p: float) -> float | int | str:
    if p == INF:
        return "inf"
    return int(p) if float(p).is_integer() else p


def pnorm(x: np.ndarray, p: float, axis: int = -1) -> np.ndarray:
    """p-norm along ``axis`` (vectorised over the remaining axes)."""
    a = np.abs(np.asarray(x, dtype=float))
    if p == INF:
        return a.max(axis=axis, initial=0.0)
    if p == 1:
        return a.sum(axis=axis)
    # scale by the max entry so large/small vectors do not over/underflow
    m = a.max(axis=axis, keepdims=True, initial=0.0)
    s = a / np.where(m > 0, m, 1.0)
    total = np.sqrt((s * s).sum(axis=axis)) if p == 2 else (s ** p).sum(axis=axis) ** (1.0 / p)
    return np.squeeze(m, axis=axis) * total


@dataclass(frozen=True)
class PNormSpace:
    dim: int
    p: float = 2.0

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", parse_p(self.p))

    @property
    def q(self) -> float:
        return dual_exponent(self.p)

    @property
    def has_exact_norms(self) -> bool:
        return self.p in EXACT_P

    def norm(self, x: np.ndarray, axis: int = -1) -> np.ndarray:
        return pnorm(x, self.p, axis=axis)

    def dual_norm(self, f: np.ndarray, axis: int = -1) -> np.ndarray:
        return pnorm(f, self.q, axis=axis)

    def check_coords(self, coords: np.ndarray, what: str = "vector") -> np.ndarray:
        arr = np.asarray(coords, dtype=float)
        if arr.shape[-1:] != (self.dim,):
            raise DimensionMismatch(f"{what} has shape {arr.shape}, expected trailing dimension {self.dim}")
        return arr

    def to_json(self) -> dict:
        return {"dim": self.dim, "p": format_p(self.p)}

    @classmethod
    def from_json(cls, data: dict) -> PNormSpace:
        return cls(dim=data["dim"], p=parse_p(data["p"]))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Vector:
    coords: np.ndarray
    space: PNormSpace

    def __post_init__(self) -> None:
        arr = self.space.check_coords(self.coords)
        if arr.ndim != 1:
            raise DimensionMismatch("a vector must be one-dimensional")
        object.__setattr__(self, "coords", _frozen(arr))


@dataclass(frozen=True, eq=False)
class Functional:
    coords: np.ndarray
    space: PNormSpace

    def __post_init__(self) -> None:
        arr = self.space.check_coords(self.coords, "functional")
        if arr.ndim != 1:
            raise DimensionMismatch("a functional must be one-dimensional")
        object.__setattr__(self, "coords", _frozen(arr))

    def __call__(self, v: Vector) -> float:
        if v.space != self.space:
            raise DimensionMismatch("functional and vector live in different spaces")
        return float(self.coords @ v.coords)


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray
    space: PNormSpace

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        d = self.space.dim
        if m.shape != (d, d):
            raise DimensionMismatch(f"operator matrix has shape {m.shape}, expected ({d}, {d})")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def identity(cls, space: PNormSpace) -> Operator:
        return cls(np.eye(space.dim), space)

    def __matmul__(self, other: Operator) -> Operator:
        if other.space != self.space:
            raise DimensionMismatch("operators act on different spaces")
        return Operator(self.matrix @ other.matrix, self.space)

    def __sub__(self, other: Operator) -> Operator:
        if other.space != self.space:
            raise DimensionMismatch("operators act on different spaces")
        return Operator(self.matrix - other.matrix, self.space)

    def apply(self, v: Vector) -> Vector:
        return Vector(self.matrix @ v.coords, self.space)


@dataclass(frozen=True)
class ConstantBound:
    """Certified enclosure ``lower <= value <= upper``.

    ``exact`` means both ends come from the same closed-form computation, so
    the interval is degenerate up to floating-point rounding.
    """

    lower: float
    upper: float
    exact: bool = field(default=False)

    def __post_init__(self) -> None:
        lo, hi = float(self.lower), float(self.upper)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("bounds must not be NaN")
        if lo > hi:
            raise ValueError(f"lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def point(cls, value: float) -> ConstantBound:
        return cls(value, value, True)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __add__(self, other: ConstantBound) -> ConstantBound:
        return ConstantBound(self.lower + other.lower, self.upper + other.upper, self.exact and other.exact)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def to_json(self) -> dict:
        upper: float | str = "inf" if self.upper == INF else self.upper
        return {"lower": self.lower, "upper": upper, "exact": self.exact}

    @classmethod
    def from_json(cls, data: dict) -> ConstantBound:
        upper = INF if data["upper"] == "inf" else float(data["upper"])
        return cls(float(data["lower"]), upper, bool(data.get("exact", False)))


def vector_norm(v: Vector) -> float:
    return float(pnorm(v.coords, v.space.p))


def functional_norm(f: Functional) -> float:
    return float(pnorm(f.coords, f.space.q))


# -- operator norms ---------------------------------------------------------

def exact_matrix_norm(m: np.ndarray, p: float) -> np.ndarray:
    """Closed-form p -> p norm for p in {1, 2, inf}; works on stacks (..., d, d)."""
    m = np.asarray(m, dtype=float)
    if p == 1:
        return np.abs(m).sum(axis=-2).max(axis=-1)
    if p == INF:
        return np.abs(m).sum(axis=-1).max(axis=-1)
    if p == 2:
        return np.linalg.svd(m, compute_uv=False)[..., 0]
    raise ValueError(f"no closed form for the {p}-operator norm")


def interpolation_upper(m: np.ndarray, p: float) -> float:
    """Riesz-Thorin upper bound for general p.

    Uses the (1, inf) endpoints and, whichever side of 2 p lies, the tighter
    pair through the spectral norm; the minimum of valid bounds is returned.
    """
    n1 = float(exact_matrix_norm(m, 1))
    ninf = float(exact_matrix_norm(m, INF))
    n2 = float(exact_matrix_norm(m, 2))
    inv = 1.0 / p
    bound = n1 ** inv * ninf ** (1.0 - inv)
    if p < 2:
        theta = 2.0 - 2.0 * inv          # 1/p = (1 - theta)/1 + theta/2
        bound = min(bound, n1 ** (1.0 - theta) * n2 ** theta)
    elif p > 2:
        theta = 2.0 * inv                # 1/p = theta/2 + (1 - theta)/inf
        bound = min(bound, n2 ** theta * ninf ** (1.0 - theta))
    return bound


def _dual_map(v: np.ndarray, r: float) -> np.ndarray:
    """Norming direction of ``v`` in the r-norm (gradient of ||v||_r)."""
    nv = float(pnorm(v, r))
    if nv == 0.0:
        return np.zeros_like(v)
    return np.sign(v) * (np.abs(v) / nv) ** (r - 1.0)


def ascent_lower(m: np.ndarray, p: float, seed: int = 0, starts: int = 8, iters: int = 200) -> float:
    """Lower bound for ||m||_{p->p} by the dual power iteration from several starts.

    Every returned value is the ratio ||m x|| / ||x|| at an actual iterate, so it
    is a valid lower bound whatever the convergence behaviour.
    """
    m = np.asarray(m, dtype=float)
    d = m.shape[1]
    q = dual_exponent(p)
    rng = np.random.default_rng(seed)
    seeds = [np.ones(d), *np.eye(d)[: min(d, starts)]]
    seeds += list(rng.standard_normal((starts, d)))
    best = 0.0
    for x in seeds:
        nx = float(pnorm(x, p))
        if nx == 0.0:
            continue
        x = x / nx
        prev = -1.0
        for _ in range(iters):
            y = m @ x
            val = float(pnorm(y, p))
            best = max(best, val)
            if val == 0.0 or val <= prev * (1 + 1e-13):
                break
            prev = val
            z = m.T @ _dual_map(y, p)
            x_new = _dual_map(z, q)
            nx = float(pnorm(x_new, p))
            if nx == 0.0:
                break
            x = x_new / nx
    return best


def matrix_norm(m: np.ndarray, p: float, seed: int = 0) -> ConstantBound:
    """Array-level version of :func:`operator_norm`."""
    m = np.asarray(m, dtype=float)
    if p in EXACT_P:
        return ConstantBound.point(float(exact_matrix_norm(m, p)))
    lower = ascent_lower(m, p, seed=seed)
    upper = max(interpolation_upper(m, p), lower)
    return ConstantBound(lower, upper, False)


def operator_norm(T: Operator, seed: int = 0) -> ConstantBound:
    """Norm of ``T`` as a map (R^d, ||.||_p) -> (R^d, ||.||_p)."""
    d = T.space.dim
    if T.matrix.shape != (d, d):
        raise DimensionMismatch(f"matrix shape {T.matrix.shape} does not match dimension {d}")
    return matrix_norm(T.matrix, T.space.p, seed=seed)
