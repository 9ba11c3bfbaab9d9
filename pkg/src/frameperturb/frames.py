"""Finite pair sequences ((a_n, b_n*)), frame validation and the constants K_F, L_F.

A pair is a frame when its synthesis sum  sum_n a_n (x) b_n*  is the identity.

The besselian constant L_F is the least A with

    sum_n |b_n*(x)| |y*(a_n)| <= A ||x|| ||y*||     for all x, y*.

For real scalars  sum_n |t_n| = max_s sum_n s_n t_n  over sign vectors s, so

    L_F = max_{s in {+-1}^M} || sum_n s_n a_n (x) b_n* ||_{p->p},

which turns the supremum into a finite enumeration.  The same identity gives
the supremum of  sum_n |y*(D_n x)|  for arbitrary matrices D_n; that is
:func:`abs_bilinear_norm`, shared by the perturbation and dimension modules.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, EnumerationCapExceeded, FrameError
from .space import (
    INF,
    ConstantBound,
    Functional,
    Operator,
    PNormSpace,
    Vector,
    ascent_lower,
    exact_matrix_norm,
    interpolation_upper,
    matrix_norm,
    operator_norm,
    pnorm,
)

DEFAULT_FRAME_TOL = 1e-10
DEFAULT_ENUM_CAP = 14
# max number of d x d matrices materialised at once during enumeration
_CHUNK_FLOATS = 1 << 22


@dataclass(frozen=True, eq=False)
class FramePair:
    """A finite sequence of (vector, functional) pairs on one space.

    ``vectors`` and ``functionals`` are (M, d) arrays; row n holds a_n and b_n*.
    """

    space: PNormSpace
    vectors: np.ndarray
    functionals: np.ndarray

    def __post_init__(self) -> None:
        A = np.array(self.vectors, dtype=float)
        B = np.array(self.functionals, dtype=float)
        d = self.space.dim
        if A.ndim != 2 or B.ndim != 2 or A.shape[1] != d or B.shape[1] != d:
            raise DimensionMismatch(
                f"vectors {A.shape} and functionals {B.shape} must both be (M, {d})")
        if A.shape[0] != B.shape[0]:
            raise DimensionMismatch(f"{A.shape[0]} vectors but {B.shape[0]} functionals")
        if A.shape[0] == 0:
            raise ValueError("a pair sequence needs at least one pair")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise ValueError("pair coordinates must be finite")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "vectors", A)
        object.__setattr__(self, "functionals", B)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[Vector, Functional]]) -> FramePair:
        if not pairs:
            raise ValueError("a pair sequence needs at least one pair")
        space = pairs[0][0].space
        for a, b in pairs:
            if a.space != space or b.space != space:
                raise DimensionMismatch("all vectors and functionals must share one space")
        return cls(space, np.array([a.coords for a, _ in pairs]), np.array([b.coords for _, b in pairs]))

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def __iter__(self) -> Iterator[tuple[Vector, Functional]]:
        for a, b in zip(self.vectors, self.functionals):
            yield Vector(a, self.space), Functional(b, self.space)

    @property
    def M(self) -> int:
        return len(self)

    def terms(self) -> np.ndarray:
        """The rank-one operators a_n (x) b_n* as an (M, d, d) stack."""
        return np.einsum("ni,nj->nij", self.vectors, self.functionals)

    def synthesis(self) -> np.ndarray:
        """Matrix of x -> sum_n b_n*(x) a_n."""
        return self.vectors.T @ self.functionals

    def vector_norms(self) -> np.ndarray:
        return pnorm(self.vectors, self.space.p)

    def functional_norms(self) -> np.ndarray:
        return pnorm(self.functionals, self.space.q)

    def crude_sum(self) -> float:
        return float(np.sum(self.vector_norms() * self.functional_norms()))

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "pairs": [{"a": a.tolist(), "b": b.tolist()} for a, b in zip(self.vectors, self.functionals)],
        }

    @classmethod
    def from_json(cls, data: dict) -> FramePair:
        space = PNormSpace.from_json(data["space"])
        pairs = data["pairs"]
        return cls(space, [p["a"] for p in pairs], [p["b"] for p in pairs])


@dataclass(frozen=True)
class FrameValidation:
    residual: float
    is_frame: bool
    tol: float

    def to_json(self) -> dict:
        return {"residual": self.residual, "is_frame": self.is_frame, "tol": self.tol}


def validate_frame(F: FramePair, tol: float = DEFAULT_FRAME_TOL, seed: int = 0) -> FrameValidation:
    if tol <= 0:
        raise ValueError("tol must be positive")
    residual = matrix_norm(F.synthesis() - np.eye(F.space.dim), F.space.p, seed=seed).upper
    return FrameValidation(residual, residual <= tol, tol)


def require_frame(F: FramePair, tol: float = DEFAULT_FRAME_TOL) -> None:
    report = validate_frame(F, tol)
    if not report.is_frame:
        raise FrameError(f"pair is not a frame: synthesis residual {report.residual:.3e} > {tol:g}")


def frame_constant_K(F: FramePair, tol: float = DEFAULT_FRAME_TOL, seed: int = 0) -> ConstantBound:
    """sup_n || sum_{k<=n} a_k (x) b_k* ||, the uniform bound on partial sums."""
    require_frame(F, tol)
    partial = np.cumsum(F.terms(), axis=0)
    p = F.space.p
    if F.space.has_exact_norms:
        return ConstantBound.point(float(exact_matrix_norm(partial, p).max()))
    bounds = [matrix_norm(S, p, seed=seed) for S in partial]
    return ConstantBound(max(b.lower for b in bounds), max(b.upper for b in bounds), False)


# -- sign enumeration ---------------------------------------------------------

def _sign_patterns(m: int, start: int, stop: int) -> np.ndarray:
    """Rows are sign vectors with s_0 = +1 (s and -s give the same norm)."""
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(m - 1, dtype=np.int64)) & 1
    return np.hstack([np.ones((len(idx), 1)), 1.0 - 2.0 * bits])


def enumerate_signs(terms: np.ndarray, p: float) -> tuple[float, np.ndarray]:
    """Exact max_s ||sum s_n D_n|| for p in {1, 2, inf}; returns (value, argmax signs)."""
    M, d, _ = terms.shape
    total = 1 << (M - 1)
    chunk = max(1, _CHUNK_FLOATS // (d * d))
    best, best_s = -1.0, None
    for start in range(0, total, chunk):
        S = _sign_patterns(M, start, min(total, start + chunk))
        norms = exact_matrix_norm(np.tensordot(S, terms, axes=(1, 0)), p)
        k = int(np.argmax(norms))
        if norms[k] > best:
            best, best_s = float(norms[k]), S[k]
    return best, best_s


def _norms_lower(stack: np.ndarray, p: float, seed: int) -> np.ndarray:
    if p in (1.0, 2.0, INF):
        return exact_matrix_norm(stack, p)
    return np.array([ascent_lower(S, p, seed=seed, starts=2, iters=60) for S in stack])


def greedy_signs(terms: np.ndarray, p: float, seed: int = 0, restarts: int = 3) -> tuple[float, np.ndarray]:
    """Single-flip hill climbing over sign patterns; a lower bound for the sign maximum."""
    M = terms.shape[0]
    rng = np.random.default_rng(seed)
    starts = [np.ones(M)] + [rng.choice([-1.0, 1.0], size=M) for _ in range(restarts)]
    best, best_s = -1.0, starts[0]
    for s in starts:
        s = s.copy()
        S = np.tensordot(s, terms, axes=(0, 0))
        cur = float(_norms_lower(S[None], p, seed)[0])
        for _ in range(4 * M):
            flipped = S[None] - 2.0 * s[:, None, None] * terms
            vals = _norms_lower(flipped, p, seed)
            k = int(np.argmax(vals))
            if vals[k] <= cur * (1 + 1e-14):
                break
            S, cur = flipped[k], float(vals[k])
            s[k] = -s[k]
        if cur > best:
            best, best_s = cur, s
    if p not in (1.0, 2.0, INF):
        # refine the winning pattern with a fuller ascent
        best = max(best, ascent_lower(np.tensordot(best_s, terms, axes=(0, 0)), p, seed=seed))
    return best, best_s


def _to_two_norm_factor(r: float, d: int) -> float:
    """Constant c with ||x||_2 <= c ||x||_r on R^d."""
    return 1.0 if r <= 2 else d ** (0.5 - 1.0 / r)


def _analysis_norm_upper(V: np.ndarray, r: float) -> float:
    """Upper bound for x -> (v_n . x)_n as a map l^r_d -> l^2_M."""
    if V.size == 0:
        return 0.0
    if r == 1:
        return float(np.sqrt((V * V).sum(axis=0)).max())
    return _to_two_norm_factor(r, V.shape[1]) * float(np.linalg.svd(V, compute_uv=False)[0])


def factorization_upper(U: np.ndarray, V: np.ndarray, space: PNormSpace) -> float:
    """Bound sum_n |v_n(x)| |y*(u_n)| <= ||V||_{p->2} ||U||_{q->2} ||x|| ||y*|| (Cauchy-Schwarz)."""
    return _analysis_norm_upper(V, space.p) * _analysis_norm_upper(U, space.q)


def abs_bilinear_norm(
    terms: np.ndarray,
    space: PNormSpace,
    mode: str = "auto",
    cap: int = DEFAULT_ENUM_CAP,
    seed: int = 0,
    factors: Sequence[tuple[np.ndarray, np.ndarray]] | None = None,
) -> ConstantBound:
    """Supremum of sum_n |y*(D_n x)| over unit x and unit y*.

    ``terms`` is an (M, d, d) stack.  ``factors`` optionally lists rank-one
    families (U, V) with  D_n = sum over families of u_n (x) v_n ; they only
    sharpen the upper end in bounds mode.

    mode: ``exact`` enumerates all sign patterns (p in {1, 2, inf}, M <= cap),
    ``bounds`` returns [greedy lower, min(crude sum, factorization)],
    ``auto`` picks exact whenever it is available.
    """
    terms = np.asarray(terms, dtype=float)
    if terms.ndim != 3 or terms.shape[1:] != (space.dim, space.dim):
        raise DimensionMismatch(f"terms must be (M, {space.dim}, {space.dim}), got {terms.shape}")
    if mode not in ("auto", "exact", "bounds"):
        raise ValueError(f"unknown mode {mode!r}")
    M = terms.shape[0]
    if M == 0 or not np.any(terms):
        return ConstantBound.point(0.0)
    p = space.p
    can_enumerate = space.has_exact_norms and M <= cap
    if mode == "exact" and not space.has_exact_norms:
        raise ValueError(f"exact mode needs p in {{1, 2, inf}}, got p = {p}")
    if mode == "exact" and M > cap:
        raise EnumerationCapExceeded(f"{M} terms exceed the enumeration cap {cap}")
    if mode == "exact" or (mode == "auto" and can_enumerate):
        value, _ = enumerate_signs(terms, p)
        return ConstantBound.point(value)

    lower, _ = greedy_signs(terms, p, seed=seed)
    if space.has_exact_norms:
        crude = float(exact_matrix_norm(terms, p).sum())
    else:
        crude = float(sum(interpolation_upper(D, p) for D in terms))
    upper = crude
    if factors:
        fam_crude = sum(float(np.sum(pnorm(U, p) * pnorm(V, space.q))) for U, V in factors)
        fam_fact = sum(factorization_upper(U, V, space) for U, V in factors)
        upper = min(upper, fam_crude, fam_fact)
    return ConstantBound(lower, max(lower, upper), False)


def besselian_constant(
    F: FramePair, mode: str = "auto", cap: int = DEFAULT_ENUM_CAP, seed: int = 0
) -> ConstantBound:
    """L_F: the least constant A with sum_n |b_n*(x)||y*(a_n)| <= A ||x|| ||y*||."""
    return abs_bilinear_norm(F.terms(), F.space, mode=mode, cap=cap, seed=seed,
                             factors=[(F.vectors, F.functionals)])


@dataclass(frozen=True)
class DiagnosticReport:
    max_ratio: float
    bound: float
    ok: bool
    samples: int

    def to_json(self) -> dict:
        return {"max_ratio": self.max_ratio, "bound": self.bound, "ok": self.ok, "samples": self.samples}


def besselian_diagnostic(
    F: FramePair, samples: int = 1000, seed: int = 0, L: ConstantBound | None = None
) -> DiagnosticReport:
    """Largest observed  sum_n |b_n*(x)||y*(a_n)| / (||x|| ||y*||)  over random (x, y*).

    Half of the samples are Gaussian; the other half are sign vectors and
    coordinate directions so the l1/l-inf extreme points are visited too.
    """
    if L is None:
        L = besselian_constant(F, seed=seed)
    d = F.space.dim
    rng = np.random.default_rng(seed)
    half = samples // 2
    X = np.vstack([rng.standard_normal((half, d)), _extreme_samples(rng, samples - half, d)])
    Y = np.vstack([rng.standard_normal((half, d)), _extreme_samples(rng, samples - half, d)])
    num = np.abs(X @ F.functionals.T) * np.abs(Y @ F.vectors.T)
    den = F.space.norm(X) * F.space.dual_norm(Y)
    ratios = num.sum(axis=1) / np.where(den > 0, den, np.inf)
    worst = float(ratios.max()) if samples else 0.0
    bound = L.upper
    return DiagnosticReport(worst, bound, worst <= bound + 1e-9, samples)


def _extreme_samples(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    signs = rng.choice([-1.0, 1.0], size=(n, d))
    coord = np.zeros((n, d))
    coord[np.arange(n), rng.integers(0, d, size=n)] = rng.choice([-1.0, 1.0], size=n)
    pick = rng.random(n) < 0.5
    return np.where(pick[:, None], signs, coord)


@dataclass(frozen=True, eq=False)
class EquivalenceWitness:
    """An isomorphism T with certified inverse R.

    ``direction`` is ``"E"`` (w_n = R x_n), ``"E*"`` (z_n* = y_n* o R) or
    ``"both"`` when the same T witnesses the two equivalences.
    """

    operator: Operator
    inverse: Operator
    direction: str = "both"
    residual: float = math.nan

    def __post_init__(self) -> None:
        if self.direction not in ("E", "E*", "both"):
            raise ValueError(f"unknown direction {self.direction!r}")
        residual = operator_norm(self.operator @ self.inverse - Operator.identity(self.operator.space)).upper
        if residual > 1e-8:
            raise ValueError(f"witness inverse is not certified: ||T R - I|| <= {residual:.3e}")
        object.__setattr__(self, "residual", residual)
