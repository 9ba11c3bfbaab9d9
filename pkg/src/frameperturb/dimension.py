"""Dimension certificates: a verified tail condition implies dim E <= N.

If replacing the first N vectors (or functionals) of a besselian frame and
dropping the rest moves the pair by an abs-bilinear amount < 1, the truncated
pair is still a frame after composition with an isomorphism, so E is spanned
by N vectors.  At finite scale the ambient dimension is known, so every valid
certificate is also checked against it; a failed check means a library bug.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .frames import DEFAULT_ENUM_CAP, FramePair, abs_bilinear_norm
from .space import ConstantBound, pnorm

METHODS = ("cor37a", "cor37b", "remark38")

EPS = float(np.finfo(float).eps)

NOTE = ("desk-scale certificate: a tail bound < 1 implies dim E <= N; "
        "the ambient dimension is known here and was checked")


@dataclass(frozen=True)
class DimensionCertificate:
    N: int
    tail_value: ConstantBound
    method: str
    dim: int
    mode: str = "sharp"

    @property
    def valid(self) -> bool:
        return self.tail_value.upper < 1.0

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "tail": self.tail_value.to_json(),
            "method": self.method,
            "mode": self.mode,
            "valid": self.valid,
            "dim": self.dim,
            "note": NOTE,
        }


def _checked(cert: DimensionCertificate) -> DimensionCertificate:
    if cert.valid and cert.dim > cert.N:
        raise AssertionError(
            f"unsound dimension certificate: {cert.method} claims dim <= {cert.N} but dim = {cert.dim}")
    return cert


def rounding_allowance(M: int, d: int, scale: float) -> float:
    """Absolute slack covering floating-point error in a tail value.

    Summing M matrices and taking a d x d norm each lose O((M + d) eps) relative
    accuracy per unit of sum ||u_n|| ||v_n||; the factor 4 d is a generous cap.
    Structural ties (the tail after d - 1 pairs of a tight frame is exactly 1)
    sit right at the threshold, so the strict test needs this margin.
    """
    return 4.0 * (M + d + 2) * d * EPS * scale


def _with_allowance(b: ConstantBound, U: np.ndarray, V: np.ndarray, space) -> ConstantBound:
    scale = float(np.sum(pnorm(U, space.p) * pnorm(V, space.q)))
    return ConstantBound(b.lower, b.upper + rounding_allowance(len(U), space.dim, scale), False)


def _check_N(F: FramePair, N: int, replacements: np.ndarray) -> None:
    if not 1 <= N <= len(F):
        raise ValueError(f"N must lie in 1..{len(F)}, got {N}")
    if replacements.shape != (N, F.space.dim):
        raise DimensionMismatch(f"expected {N} replacements of dimension {F.space.dim}, got {replacements.shape}")


def dimension_bound_vectors(
    F: FramePair, x0, N: int | None = None, mode: str = "auto",
    cap: int = DEFAULT_ENUM_CAP, seed: int = 0,
) -> DimensionCertificate:
    """Tail sup of sum_{n<=N} |b_n*(x) y*(x0_n - a_n)| + sum_{n>N} |b_n*(x) y*(a_n)|."""
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    N = x0.shape[0] if N is None else N
    _check_N(F, N, x0)
    U = np.vstack([x0 - F.vectors[:N], F.vectors[N:]])
    V = F.functionals
    tail = abs_bilinear_norm(np.einsum("ni,nj->nij", U, V), F.space, mode=mode, cap=cap, seed=seed,
                             factors=[(U, V)])
    return _checked(DimensionCertificate(N, _with_allowance(tail, U, V, F.space), "cor37a", F.space.dim))


def dimension_bound_functionals(
    F: FramePair, y0, N: int | None = None, mode: str = "auto",
    cap: int = DEFAULT_ENUM_CAP, seed: int = 0,
) -> DimensionCertificate:
    """Tail sup of sum_{n<=N} |(y0_n - b_n*)(x) y*(a_n)| + sum_{n>N} |b_n*(x) y*(a_n)|."""
    y0 = np.atleast_2d(np.asarray(y0, dtype=float))
    N = y0.shape[0] if N is None else N
    _check_N(F, N, y0)
    U = F.vectors
    V = np.vstack([y0 - F.functionals[:N], F.functionals[N:]])
    tail = abs_bilinear_norm(np.einsum("ni,nj->nij", U, V), F.space, mode=mode, cap=cap, seed=seed,
                             factors=[(U, V)])
    return _checked(DimensionCertificate(N, _with_allowance(tail, U, V, F.space), "cor37b", F.space.dim))


def crude_tails(F: FramePair) -> np.ndarray:
    """t[N] = sum_{n>N} ||a_n|| ||b_n*|| for N = 0..M (t[M] = 0)."""
    w = pnorm(F.vectors, F.space.p) * pnorm(F.functionals, F.space.q)
    return np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])


def _tail(F: FramePair, N: int, sharp: bool, cap: int, seed: int) -> ConstantBound:
    A, B = F.vectors[N:], F.functionals[N:]
    if len(A) == 0:
        return ConstantBound.point(0.0)
    if sharp:
        value = abs_bilinear_norm(np.einsum("ni,nj->nij", A, B), F.space, cap=cap, seed=seed, factors=[(A, B)])
    else:
        value = ConstantBound.point(float(crude_tails(F)[N]))
    return _with_allowance(value, A, B, F.space)


def remark38_minimal_N(
    F: FramePair, sharp: bool = False, cap: int = DEFAULT_ENUM_CAP, seed: int = 0
) -> DimensionCertificate:
    """Smallest N whose tail after N is < 1 (keeping the first N pairs unchanged).

    Crude mode uses sum_{n>N} ||a_n|| ||b_n*||.  Sharp mode uses the
    abs-bilinear supremum of the tail, which never exceeds the crude sum, so
    the scan starts from the crude N and walks down while the tail stays < 1.
    """
    M = len(F)
    crude_N, crude = next((N, t) for N in range(1, M + 1)
                          if (t := _tail(F, N, False, cap, seed)).upper < 1.0)
    if not sharp:
        return _checked(DimensionCertificate(crude_N, crude, "remark38", F.space.dim, mode="crude"))
    best_N = crude_N
    best = _tail(F, crude_N, True, cap, seed)
    if not best.upper < 1.0:
        # the crude sum is an equally valid upper end for the same tail
        best = ConstantBound(min(best.lower, crude.upper), crude.upper, False)
    for N in range(crude_N - 1, 0, -1):
        tail = _tail(F, N, True, cap, seed)
        if not tail.upper < 1.0:
            break
        best_N, best = N, tail
    return _checked(DimensionCertificate(best_N, best, "remark38", F.space.dim, mode="sharp"))
