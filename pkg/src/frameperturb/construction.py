"""Frames whose members over a chosen index set span prescribed subspaces.

Starting from a frame ((a_n, b_n*)) with M pairs, an index set I inside
{1..M'} (M' = M + |I|) and bases (c_k) of V and (d_k*) of W:

* off I the pairs (a_n, b_n*) are laid out in order; on I we insert (0, d_k*).
  Zero vectors contribute nothing, so this interleaved pair is still a frame.
* the candidate replaces each zero by t_n c_k.  Only the zero-index term of the
  perturbation quantity survives, giving  sum_I |t_n| ||d_k*|| ||c_k||, which the
  geometric choice of t_n keeps at theta (1 - 2^-|I|) < 1.
* the satisfied perturbation criterion then yields frames ((u_n, z_n*)) and ((w_n, v_n*))
  with span{u_n : n in I} = V, span{v_n* : n in I} = W, and the other two spans
  isomorphic to W and V through composition with R = T^{-1}.

When |I| exceeds a basis size the basis is reused cyclically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .frames import FramePair
from .perturbation import (
    DEFAULT_NEUMANN_TOL,
    DEFAULT_ZERO_TOL,
    CriterionReport,
    PerturbationCandidate,
    PerturbedFrames,
    criterion_cor34,
    criterion_thm31,
    emit_perturbed_frames,
)
from .space import PNormSpace, pnorm


@dataclass(frozen=True)
class IndexInterleaving:
    """Partition of {1..total} into I and its complement (1-based, sorted)."""

    total: int
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if len(idx) != len(self.indices):
            raise ValueError("index set contains duplicates")
        if not idx:
            raise ValueError("index set I must be nonempty")
        if idx[0] < 1 or idx[-1] > self.total:
            raise ValueError(f"indices must lie in 1..{self.total}")
        if len(idx) == self.total:
            raise ValueError("the complement of I must be nonempty")
        object.__setattr__(self, "indices", idx)

    @property
    def complement(self) -> tuple[int, ...]:
        chosen = set(self.indices)
        return tuple(n for n in range(1, self.total + 1) if n not in chosen)

    def sigma0(self, n: int) -> int:
        """Rank of n inside I (1-based)."""
        return self.indices.index(n) + 1

    def sigma1(self, n: int) -> int:
        """Rank of n inside the complement (1-based)."""
        return self.complement.index(n) + 1

    def mask(self) -> np.ndarray:
        """Boolean array over 0-based positions, True on I."""
        m = np.zeros(self.total, dtype=bool)
        m[np.array(self.indices) - 1] = True
        return m


@dataclass(frozen=True, eq=False)
class SubspaceSpec:
    """A finite basis; ``kind`` says whether rows are vectors or functionals."""

    basis: np.ndarray
    space: PNormSpace
    kind: str = "vector"

    def __post_init__(self) -> None:
        if self.kind not in ("vector", "functional"):
            raise ValueError(f"unknown subspace kind {self.kind!r}")
        B = np.atleast_2d(np.array(self.basis, dtype=float))
        if B.ndim != 2 or B.shape[1] != self.space.dim:
            raise DimensionMismatch(f"basis rows must have dimension {self.space.dim}, got shape {B.shape}")
        if B.shape[0] == 0:
            raise ValueError("subspace must be nonzero")
        if np.any(self.norms_of(B) == 0):
            raise ValueError("basis elements must be nonzero")
        if np.linalg.matrix_rank(B) != B.shape[0]:
            raise ValueError("basis elements are linearly dependent")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    def norms_of(self, rows: np.ndarray) -> np.ndarray:
        r = self.space.p if self.kind == "vector" else self.space.q
        return pnorm(rows, r)

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def cyclic(self, k: int) -> np.ndarray:
        """Basis element for 1-based position k, wrapping around."""
        return self.basis[(k - 1) % self.rank]

    @classmethod
    def from_json(cls, data, space: PNormSpace, kind: str) -> SubspaceSpec:
        rows = data["basis"] if isinstance(data, dict) else data
        return cls(np.array(rows, dtype=float), space, kind)


def _check_slots(F: FramePair, I: IndexInterleaving) -> None:
    if len(I.complement) != len(F):
        raise ValueError(f"complement of I has {len(I.complement)} slots but the frame has {len(F)} pairs")


def build_interleaved(F: FramePair, W: SubspaceSpec, I: IndexInterleaving) -> FramePair:
    """(a_{sigma1(n)}, b*_{sigma1(n)}) off I and (0, d*_{sigma0(n)}) on I."""
    _check_slots(F, I)
    if W.kind != "functional" or W.space != F.space:
        raise DimensionMismatch("W must be a functional subspace of the frame's space")
    d = F.space.dim
    U = np.zeros((I.total, d))
    Vf = np.zeros((I.total, d))
    on = I.mask()
    U[~on] = F.vectors
    Vf[~on] = F.functionals
    for k, n in enumerate(I.indices, start=1):
        Vf[n - 1] = W.cyclic(k)
    return FramePair(F.space, U, Vf)


@dataclass(frozen=True, eq=False)
class ScalarChoice:
    t: np.ndarray            # one scalar per index of I, in increasing order
    rows: np.ndarray         # t_n c_{sigma0(n)}
    weighted_sum: float      # sum_I ||d*_{sigma0(n)}|| ||t_n c_{sigma0(n)}||
    target: float            # theta (1 - 2^-|I|)


def choose_scalars(V: SubspaceSpec, W: SubspaceSpec, I: IndexInterleaving, theta: float) -> ScalarChoice:
    """t_n = theta 2^-sigma0(n) / (||d*|| ||c||), so the weighted sum is theta (1 - 2^-|I|)."""
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    k = np.arange(1, len(I.indices) + 1)
    C = np.array([V.cyclic(j) for j in k])
    D = np.array([W.cyclic(j) for j in k])
    c_norm = V.norms_of(C)
    d_norm = W.norms_of(D)
    if np.any(c_norm == 0) or np.any(d_norm == 0):
        raise ValueError("basis elements must be nonzero")
    t = theta * 2.0 ** (-k.astype(float)) / (d_norm * c_norm)
    rows = t[:, None] * C
    # same association order as the perturbation quantity: ||d*|| * ||t c||
    row_norm = V.norms_of(rows)
    weighted = sum(float(d_norm[j] * row_norm[j]) for j in range(len(k)))
    return ScalarChoice(t, rows, weighted, theta * (1.0 - 2.0 ** -len(k)))


def _rank(rows: np.ndarray) -> int:
    return int(np.linalg.matrix_rank(rows)) if rows.size else 0


def _same_span(rows: np.ndarray, target: np.ndarray) -> tuple[bool, int, int, int]:
    r1, r2 = _rank(rows), _rank(target)
    joint = _rank(np.vstack([rows, target]))
    return r1 == r2 == joint, r1, r2, joint


@dataclass(frozen=True, eq=False)
class ConstructionResult:
    interleaved: FramePair
    candidate: FramePair
    scalars: ScalarChoice
    report: CriterionReport
    frames: PerturbedFrames
    spans: dict

    @property
    def ok(self) -> bool:
        return self.frames.certified and all(v["equal"] for v in self.spans.values())

    def to_json(self) -> dict:
        return {
            "criterion": self.report.to_json(),
            "t": self.scalars.t.tolist(),
            "weighted_sum": self.scalars.weighted_sum,
            "target_sum": self.scalars.target,
            "interleaved": self.interleaved.to_json(),
            "frames": self.frames.to_json(),
            "spans": self.spans,
            "ok": self.ok,
        }


def construct_targeted_frames(
    F: FramePair,
    V: SubspaceSpec,
    W: SubspaceSpec,
    I: IndexInterleaving,
    theta: float = 0.5,
    besselian: bool = False,
    zero_tol: float = DEFAULT_ZERO_TOL,
    tol: float = DEFAULT_NEUMANN_TOL,
) -> ConstructionResult:
    """Build, certify and emit the targeted frames, then verify the four span claims."""
    if V.kind != "vector" or V.space != F.space:
        raise DimensionMismatch("V must be a vector subspace of the frame's space")
    n_I = len(I.indices)
    if n_I < max(V.rank, W.rank):
        raise ValueError(f"|I| = {n_I} is smaller than dim V = {V.rank} or dim W = {W.rank}")
    if not besselian:
        if np.any(F.vector_norms() <= zero_tol) or np.any(F.functional_norms() <= zero_tol):
            raise ValueError("the Schauder path needs a_n != 0 and b_n* != 0 for every n")
    scalars = choose_scalars(V, W, I, theta)
    F1 = build_interleaved(F, W, I)
    U1 = F1.vectors.copy()
    on = I.mask()
    U1[on] = scalars.rows
    tilde = FramePair(F.space, U1, F1.functionals)
    c = PerturbationCandidate(F1, tilde)
    report = criterion_cor34(c) if besselian else criterion_thm31(c, zero_tol=zero_tol)
    if not report.satisfied:
        raise AssertionError(f"construction bound {report.value.upper} is not < 1")
    frames = emit_perturbed_frames(c, report, tol=tol)
    R = frames.transfer.inverse.matrix

    u_I = frames.frame_xz.vectors[on]
    z_I = frames.frame_xz.functionals[on]
    w_I = frames.frame_wy.vectors[on]
    v_I = frames.frame_wy.functionals[on]
    spans = {}
    for name, rows, target, claim in (
        ("u_equals_V", u_I, V.basis, "span{u_n : n in I} = V"),
        ("z_isomorphic_W", z_I, W.basis @ R, "span{z_n* : n in I} = {phi o R : phi in W}"),
        ("v_equals_W", v_I, W.basis, "span{v_n* : n in I} = W"),
        ("w_isomorphic_V", w_I, V.basis @ R.T, "span{w_n : n in I} = R(V)"),
    ):
        equal, r_rows, r_target, r_joint = _same_span(rows, target)
        spans[name] = {"claim": claim, "equal": equal, "rank": r_rows,
                       "target_rank": r_target, "joint_rank": r_joint}
    spans["z_isomorphic_W"]["witness"] = "phi -> phi o R"
    spans["w_isomorphic_V"]["witness"] = "v -> R v"
    return ConstructionResult(F1, tilde, scalars, report, frames, spans)
