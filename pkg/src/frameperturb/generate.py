"""Seeded random frames for experiments and tests."""
from __future__ import annotations

import numpy as np

from .frames import FramePair
from .space import PNormSpace

KINDS = ("canonical", "tight", "random")


def canonical_frame(space: PNormSpace) -> FramePair:
    eye = np.eye(space.dim)
    return FramePair(space, eye, eye)


def mercedes_frame(p: float = 2.0) -> FramePair:
    """Three unit vectors in R^2 at mutual angles of 120 degrees, b_n* = (2/3) a_n."""
    th = np.deg2rad([90.0, 210.0, 330.0])
    A = np.column_stack([np.cos(th), np.sin(th)])
    return FramePair(PNormSpace(2, p), A, (2.0 / 3.0) * A)


def _inv_sqrt_psd(S: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(S)
    return (Q / np.sqrt(w)) @ Q.T


def tight_frame(space: PNormSpace, count: int, rng: np.random.Generator, sweeps: int = 30) -> FramePair:
    """Approximately unit-norm tight frame via alternating column normalisation and polar steps.

    The last step is a polar normalisation G <- (G G^T)^{-1/2} G, which makes
    G G^T = I, so with a_n = s g_n and b_n* = g_n / s the frame identity holds
    to rounding error whatever the convergence of the sweeps.
    """
    d = space.dim
    if count < d:
        raise ValueError(f"a frame for R^{d} needs at least {d} pairs, got {count}")
    G = rng.standard_normal((d, count))
    for _ in range(sweeps):
        G /= np.linalg.norm(G, axis=0)
        G = _inv_sqrt_psd(G @ G.T) @ G
    s = np.sqrt(count / d)
    return FramePair(space, s * G.T, G.T / s)


def random_frame(space: PNormSpace, count: int, rng: np.random.Generator) -> FramePair:
    """Random synthesis vectors with random functionals corrected to sum_n a_n (x) b_n* = I.

    The correction adds A (A^T A)^{-1} (I - A^T B0) to the raw functionals B0,
    the right-inverse completion of the frame identity A^T B = I.
    """
    d = space.dim
    if count < d:
        raise ValueError(f"a frame for R^{d} needs at least {d} pairs, got {count}")
    while True:
        A = rng.standard_normal((count, d))
        if np.linalg.cond(A) < 1e3:
            break
    B0 = rng.standard_normal((count, d))
    B = B0 + A @ np.linalg.solve(A.T @ A, np.eye(d) - A.T @ B0)
    return FramePair(space, A, B)


def generate_frame(dim: int, count: int, p: float = 2.0, kind: str = "tight", seed: int = 0) -> FramePair:
    space = PNormSpace(dim, p)
    if kind == "canonical":
        if count != dim:
            raise ValueError(f"the canonical frame of R^{dim} has exactly {dim} pairs")
        return canonical_frame(space)
    rng = np.random.default_rng(seed)
    if kind == "tight":
        return tight_frame(space, count, rng)
    if kind == "random":
        return random_frame(space, count, rng)
    raise ValueError(f"unknown frame kind {kind!r}; expected one of {KINDS}")


def random_perturbation(F: FramePair, rng: np.random.Generator, scale: float = 1.0,
                        move_vectors: bool = True, move_functionals: bool = True):
    """Gaussian directions for (x_n - a_n, y_n* - b_n*), multiplied by ``scale``."""
    dX = rng.standard_normal(F.vectors.shape) if move_vectors else np.zeros(F.vectors.shape)
    dY = rng.standard_normal(F.functionals.shape) if move_functionals else np.zeros(F.functionals.shape)
    return F.vectors + scale * dX, F.functionals + scale * dY
