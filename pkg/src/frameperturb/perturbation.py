"""Perturbation criteria, the transfer operator and emission of perturbed frames.

Given a frame ((a_n, b_n*)) and a candidate pair ((x_n, y_n*)), each criterion
bounds ||T - I|| for the transfer operator  T = sum_n x_n (x) y_n*.  When the
bound is < 1, T is invertible with R = T^{-1} = sum_k (I - T)^k, and

    ((x_n, y_n* o R))   and   ((R x_n, y_n*))

are frames again.  Criteria:

``thm31``  Q = sum ||y_n*-b_n*|| ||x_n|| + sum_{a_n != 0} 2 K_F ||x_n-a_n|| / ||a_n||
           + sum_{a_n = 0} ||b_n*|| ||x_n||
``cor34``  sum ||y_n*|| ||x_n-a_n|| + ||y_n*-b_n*|| ||a_n||
``thm33``  alpha = sup sum_n |y*(D_n x)|,  D_n = (x_n-a_n) (x) y_n* + a_n (x) (y_n*-b_n*)
``cor35``  thm33 with y_n* = b_n* (only the vectors move)
``cor36``  thm33 with x_n = a_n (only the functionals move)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CriterionNotSatisfied, DimensionMismatch, NeumannError
from .frames import (
    DEFAULT_ENUM_CAP,
    DEFAULT_FRAME_TOL,
    EquivalenceWitness,
    FramePair,
    FrameValidation,
    abs_bilinear_norm,
    besselian_constant,
    frame_constant_K,
    require_frame,
    validate_frame,
)
from .space import ConstantBound, Operator, matrix_norm, operator_norm, pnorm

CRITERIA = ("thm31", "cor34", "thm33", "cor35", "cor36")
BESSELIAN_CRITERIA = ("cor34", "thm33", "cor35", "cor36")
DEFAULT_ZERO_TOL = 1e-14
DEFAULT_NEUMANN_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class PerturbationCandidate:
    base: FramePair
    candidate: FramePair

    def __post_init__(self) -> None:
        if self.base.space != self.candidate.space:
            raise DimensionMismatch("base and candidate live in different spaces")
        if len(self.base) != len(self.candidate):
            raise DimensionMismatch(f"base has {len(self.base)} pairs, candidate has {len(self.candidate)}")

    @classmethod
    def from_arrays(cls, base: FramePair, X, Y) -> PerturbationCandidate:
        return cls(base, FramePair(base.space, X, Y))

    @property
    def space(self):
        return self.base.space

    @property
    def X(self) -> np.ndarray:
        return self.candidate.vectors

    @property
    def Y(self) -> np.ndarray:
        return self.candidate.functionals

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "candidate": [{"x": x.tolist(), "y": y.tolist()} for x, y in zip(self.X, self.Y)],
        }

    @classmethod
    def from_json(cls, data: dict) -> PerturbationCandidate:
        base = FramePair.from_json(data["base"])
        cand = data["candidate"]
        return cls.from_arrays(base, [c["x"] for c in cand], [c["y"] for c in cand])


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    value: ConstantBound
    components: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.value.upper < 1.0

    @property
    def margin(self) -> float:
        return 1.0 - self.value.upper

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "value": self.value.to_json(),
            "satisfied": self.satisfied,
            "margin": self.margin,
            "components": self.components,
        }


def criterion_thm31(
    c: PerturbationCandidate,
    zero_tol: float = DEFAULT_ZERO_TOL,
    K: ConstantBound | None = None,
    frame_tol: float = DEFAULT_FRAME_TOL,
) -> CriterionReport:
    if K is None:
        K = frame_constant_K(c.base, tol=frame_tol)
    sp = c.space
    A, B, X, Y = c.base.vectors, c.base.functionals, c.X, c.Y
    a_norm = pnorm(A, sp.p)
    x_norm = pnorm(X, sp.p)
    dx = pnorm(X - A, sp.p)
    dy = pnorm(Y - B, sp.q)
    b_norm = pnorm(B, sp.q)
    zero = a_norm <= zero_tol
    M = len(c.base)
    functional_sum = sum(float(dy[n] * x_norm[n]) for n in range(M))
    ratio_sum = sum(float(dx[n] / a_norm[n]) for n in range(M) if not zero[n])
    zero_sum = sum(float(b_norm[n] * x_norm[n]) for n in range(M) if zero[n])

    def q_of(k: float) -> float:
        return functional_sum + 2.0 * k * ratio_sum + zero_sum

    value = ConstantBound(q_of(K.lower), q_of(K.upper), K.exact)
    return CriterionReport("thm31", value, {
        "functional_sum": functional_sum,
        "relative_vector_sum": ratio_sum,
        "zero_index_sum": zero_sum,
        "zero_indices": [int(n) + 1 for n in np.flatnonzero(zero)],
        "K": K.to_json(),
    })


def criterion_cor34(c: PerturbationCandidate, frame_tol: float = DEFAULT_FRAME_TOL) -> CriterionReport:
    require_frame(c.base, frame_tol)
    sp = c.space
    A, B, X, Y = c.base.vectors, c.base.functionals, c.X, c.Y
    first = pnorm(Y, sp.q) * pnorm(X - A, sp.p)
    second = pnorm(Y - B, sp.q) * pnorm(A, sp.p)
    value = sum(float(first[n] + second[n]) for n in range(len(c.base)))
    return CriterionReport("cor34", ConstantBound.point(value), {
        "vector_part": float(first.sum()),
        "functional_part": float(second.sum()),
    })


def perturbation_terms(c: PerturbationCandidate) -> np.ndarray:
    """D_n = (x_n - a_n) (x) y_n* + a_n (x) (y_n* - b_n*), stacked (M, d, d)."""
    A, B, X, Y = c.base.vectors, c.base.functionals, c.X, c.Y
    return np.einsum("ni,nj->nij", X - A, Y) + np.einsum("ni,nj->nij", A, Y - B)


def criterion_thm33(
    c: PerturbationCandidate,
    mode: str = "auto",
    cap: int = DEFAULT_ENUM_CAP,
    seed: int = 0,
    frame_tol: float = DEFAULT_FRAME_TOL,
    criterion: str = "thm33",
) -> CriterionReport:
    require_frame(c.base, frame_tol)
    A, B, X, Y = c.base.vectors, c.base.functionals, c.X, c.Y
    value = abs_bilinear_norm(perturbation_terms(c), c.space, mode=mode, cap=cap, seed=seed,
                              factors=[(X - A, Y), (A, Y - B)])
    return CriterionReport(criterion, value, {"mode": "exact" if value.exact else "bounds"})


def criterion_cor35(base: FramePair, vectors, **kwargs) -> CriterionReport:
    c = PerturbationCandidate.from_arrays(base, vectors, base.functionals)
    return criterion_thm33(c, criterion="cor35", **kwargs)


def criterion_cor36(base: FramePair, functionals, **kwargs) -> CriterionReport:
    c = PerturbationCandidate.from_arrays(base, base.vectors, functionals)
    return criterion_thm33(c, criterion="cor36", **kwargs)


def evaluate_criterion(c: PerturbationCandidate, criterion: str, **kwargs) -> CriterionReport:
    """Dispatch by id; cor35/cor36 read the candidate's vectors/functionals respectively."""
    if criterion == "thm31":
        return criterion_thm31(c, **{k: v for k, v in kwargs.items() if k in ("zero_tol", "frame_tol")})
    if criterion == "cor34":
        return criterion_cor34(c, **{k: v for k, v in kwargs.items() if k == "frame_tol"})
    enum_kw = {k: v for k, v in kwargs.items() if k in ("mode", "cap", "seed", "frame_tol")}
    if criterion == "thm33":
        return criterion_thm33(c, **enum_kw)
    if criterion == "cor35":
        return criterion_cor35(c.base, c.X, **enum_kw)
    if criterion == "cor36":
        return criterion_cor36(c.base, c.Y, **enum_kw)
    raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")


def effective_candidate(c: PerturbationCandidate, criterion: str) -> PerturbationCandidate:
    """The pair the criterion actually certifies (cor35/cor36 keep half of the base)."""
    if criterion == "cor35":
        return PerturbationCandidate.from_arrays(c.base, c.X, c.base.functionals)
    if criterion == "cor36":
        return PerturbationCandidate.from_arrays(c.base, c.base.vectors, c.Y)
    return c


def build_transfer(c: PerturbationCandidate) -> Operator:
    """T = sum_n x_n (x) y_n*, i.e. T(x) = sum_n y_n*(x) x_n."""
    return Operator(c.X.T @ c.Y, c.space)


# -- Neumann inversion ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NeumannResult:
    inverse: Operator
    error_bound: float
    iterations: int


def neumann_terms_needed(Q: float, tol: float) -> int:
    """Smallest m >= 0 with Q^(m+1) / (1 - Q) <= tol."""
    if Q == 0.0:
        return 0
    m = max(0, math.ceil(math.log(tol * (1.0 - Q)) / math.log(Q)) - 1)
    while m > 0 and Q ** m / (1.0 - Q) <= tol:
        m -= 1
    while Q ** (m + 1) / (1.0 - Q) > tol:
        m += 1
    return m


def neumann_inverse(
    T: Operator,
    Q: float,
    tol: float = DEFAULT_NEUMANN_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    check: bool = True,
) -> NeumannResult:
    """Partial sum R = sum_{k<=m} (I - T)^k with certified ||R - T^{-1}|| <= Q^(m+1)/(1-Q).

    ``Q`` must bound ||T - I||.  With ``check`` the bound is verified against the
    computed operator norm (to 1e-12); callers that already hold a proof of the
    bound (a satisfied criterion) may skip it.
    """
    if not Q < 1.0:
        raise NeumannError(f"contraction bound Q = {Q} is not < 1")
    if Q < 0:
        raise ValueError("Q must be nonnegative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    S = np.eye(T.space.dim) - T.matrix
    if check:
        actual = matrix_norm(S, T.space.p).upper
        if actual > Q + 1e-12:
            raise NeumannError(f"||T - I|| <= {actual:.6g} is not bounded by Q = {Q:.6g}")
    m = neumann_terms_needed(Q, tol)
    if m > max_iter:
        raise NeumannError(f"Neumann series needs {m} terms, over the cap {max_iter}")
    R = np.eye(T.space.dim)
    P = np.eye(T.space.dim)
    for _ in range(m):
        P = S @ P
        R = R + P
    return NeumannResult(Operator(R, T.space), Q ** (m + 1) / (1.0 - Q), m)


@dataclass(frozen=True, eq=False)
class TransferOperator:
    T: Operator
    contraction: float
    inverse: Operator
    inverse_error: float
    iterations: int

    def __post_init__(self) -> None:
        if not self.contraction < 1:
            raise NeumannError("transfer operator needs contraction < 1")


@dataclass(frozen=True, eq=False)
class PerturbedFrames:
    frame_xz: FramePair
    frame_wy: FramePair
    witness: EquivalenceWitness
    transfer: TransferOperator
    report: CriterionReport
    validation_xz: FrameValidation
    validation_wy: FrameValidation
    forced: bool = False

    @property
    def certified(self) -> bool:
        return (self.report.satisfied and not self.forced
                and self.validation_xz.is_frame and self.validation_wy.is_frame)

    def to_json(self) -> dict:
        tr = self.transfer
        return {
            "criterion": self.report.criterion,
            "value": self.report.value.to_json(),
            "satisfied": self.report.satisfied,
            "margin": self.report.margin,
            "certified": self.certified,
            "status": "CERTIFIED" if self.certified else "UNCERTIFIED",
            "contraction": tr.contraction,
            "T": tr.T.matrix.tolist(),
            "R": tr.inverse.matrix.tolist(),
            "inverse_error": tr.inverse_error,
            "neumann_iterations": tr.iterations,
            "witness_residual": self.witness.residual,
            "frame_xz": self.frame_xz.to_json(),
            "frame_wy": self.frame_wy.to_json(),
            "residual_xz": self.validation_xz.residual,
            "residual_wy": self.validation_wy.residual,
        }


def emit_perturbed_frames(
    c: PerturbationCandidate,
    report: CriterionReport,
    tol: float = DEFAULT_NEUMANN_TOL,
    force: bool = False,
    frame_tol: float = 1e-8,
    max_iter: int = DEFAULT_MAX_ITER,
) -> PerturbedFrames:
    """Invert T by Neumann series and emit ((x_n, y_n* o R)) and ((R x_n, y_n*)).

    For cor35/cor36 reports the certified pair is the half-substituted one
    (see :func:`effective_candidate`).  ``force`` skips the criterion gate; the
    result is then marked UNCERTIFIED, and inversion still needs ||T - I|| < 1.
    """
    if not report.satisfied and not force:
        raise CriterionNotSatisfied(
            f"{report.criterion} bound {report.value.upper:.6g} is not < 1 (use force to override)")
    c = effective_candidate(c, report.criterion)
    T = build_transfer(c)
    sp = c.space
    # both quantities bound ||T - I||; keep the smaller one
    direct = operator_norm(T - Operator.identity(sp)).upper
    Q = min(report.value.upper if report.satisfied else math.inf, direct)
    neumann = neumann_inverse(T, Q, tol=tol, max_iter=max_iter, check=False)
    R = neumann.inverse
    transfer = TransferOperator(T, Q, R, neumann.error_bound, neumann.iterations)
    witness = EquivalenceWitness(T, R, "both")
    W = c.X @ R.matrix.T
    Z = c.Y @ R.matrix
    frame_xz = FramePair(sp, c.X, Z)
    frame_wy = FramePair(sp, W, c.Y)
    return PerturbedFrames(
        frame_xz, frame_wy, witness, transfer, report,
        validate_frame(frame_xz, frame_tol), validate_frame(frame_wy, frame_tol), forced=force and not report.satisfied,
    )


@dataclass(frozen=True)
class BesselianCertificate:
    L_xz: ConstantBound
    L_wy: ConstantBound
    bound: float
    alpha: ConstantBound
    L_base: ConstantBound
    R_norm: ConstantBound

    @property
    def holds_xz(self) -> bool:
        return self.L_xz.upper <= self.bound + 1e-8

    @property
    def holds_wy(self) -> bool:
        return self.L_wy.upper <= self.bound + 1e-8

    @property
    def ok(self) -> bool:
        return self.holds_xz and self.holds_wy

    def to_json(self) -> dict:
        return {
            "L_xz": self.L_xz.to_json(),
            "L_wy": self.L_wy.to_json(),
            "bound": self.bound,
            "alpha": self.alpha.to_json(),
            "L_base": self.L_base.to_json(),
            "R_norm": self.R_norm.to_json(),
            "holds_xz": self.holds_xz,
            "holds_wy": self.holds_wy,
            "ok": self.ok,
        }


def besselian_certificate(
    pf: PerturbedFrames,
    alpha: ConstantBound,
    L_F: ConstantBound,
    R_norm: ConstantBound | None = None,
    mode: str = "auto",
    cap: int = DEFAULT_ENUM_CAP,
    seed: int = 0,
) -> BesselianCertificate:
    """Check both emitted frames against the bound (alpha + L_F) ||R||.

    A violation is reported through ``ok``; nothing is raised.
    """
    if R_norm is None:
        R_norm = operator_norm(pf.transfer.inverse, seed=seed)
    bound = (alpha.upper + L_F.upper) * R_norm.upper
    return BesselianCertificate(
        besselian_constant(pf.frame_xz, mode=mode, cap=cap, seed=seed),
        besselian_constant(pf.frame_wy, mode=mode, cap=cap, seed=seed),
        bound, alpha, L_F, R_norm,
    )
