"""Slow, deliberately naive reference computations used to cross-check the library.

Nothing in here imports from the other modules of the package: norms, sign
enumeration and inverses are re-derived from scratch so that a bug in the main
path cannot silently agree with itself.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


class OracleError(ValueError):
    pass


def _vec_norm(v, p):
    v = [abs(float(t)) for t in v]
    if p == math.inf:
        return max(v) if v else 0.0
    return sum(t ** p for t in v) ** (1.0 / p)


def direct_inverse(T, cond_limit=1e12):
    """Dense LU inverse, refusing ill-conditioned input."""
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise OracleError("matrix must be square")
    cond = np.linalg.cond(T)
    if not np.isfinite(cond) or cond >= cond_limit:
        raise OracleError(f"matrix is singular or ill-conditioned (cond={cond:.3g})")
    R = np.linalg.solve(T, np.eye(T.shape[0]))
    residual = np.abs(T @ R - np.eye(T.shape[0])).max()
    if residual > 1e-10:
        raise OracleError(f"inverse residual {residual:.3g} exceeds 1e-10")
    return R


def ball_vertex_norm(T, p):
    """p -> p norm for p in {1, inf} by maximising over the extreme points of the unit ball.

    The l1 ball has vertices +-e_j; the l-inf ball has the 2^d sign vectors.
    A convex function attains its max over a polytope at a vertex.
    """
    T = np.asarray(T, dtype=float)
    d = T.shape[1]
    if p == 1:
        vertices = [s * row for row in np.eye(d) for s in (1.0, -1.0)]
    elif p == math.inf:
        if d > 16:
            raise OracleError("vertex enumeration of the cube is capped at d = 16")
        vertices = [np.array(s) for s in itertools.product((1.0, -1.0), repeat=d)]
    else:
        raise OracleError("vertex enumeration only applies to p = 1 or p = inf")
    return max(_vec_norm(T @ v, p) for v in vertices)


def spectral_norm(T):
    T = np.asarray(T, dtype=float)
    return math.sqrt(max(0.0, float(np.linalg.eigvalsh(T.T @ T).max())))


def exact_norm(T, p):
    if p == 2:
        return spectral_norm(T)
    return ball_vertex_norm(T, p)


def sign_enum_bilinear(terms, p, cap=20):
    """max over all s in {+-1}^M of || sum_n s_n D_n ||_{p->p}.

    Enumerates every one of the 2^M patterns (no symmetry reduction), in
    lexicographic order starting from all minus signs.
    """
    terms = [np.asarray(D, dtype=float) for D in terms]
    if len(terms) > cap:
        raise OracleError(f"{len(terms)} terms exceed the oracle cap {cap}")
    if p not in (1, 2, math.inf):
        raise OracleError("exact enumeration needs p in {1, 2, inf}")
    if not terms:
        return 0.0
    best = 0.0
    for signs in itertools.product((-1.0, 1.0), repeat=len(terms)):
        S = np.zeros_like(terms[0])
        for s, D in zip(signs, terms):
            S = S + s * D
        best = max(best, exact_norm(S, p))
    return best


def sampled_operator_norm(T, p, samples=10_000, seed=0, polish=20):
    """Dense random-start ascent for general p; a lower estimate of ||T||_{p->p}.

    Each start is refined by a few steps of plain projected gradient ascent on
    the ratio ||T x||_p / ||x||_p with a fixed step, a different scheme from the
    library's dual power iteration.
    """
    T = np.asarray(T, dtype=float)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, T.shape[1]))
    X /= (np.abs(X) ** p).sum(axis=1, keepdims=True) ** (1.0 / p)
    best = 0.0
    for _ in range(polish + 1):
        Y = X @ T.T
        vals = (np.abs(Y) ** p).sum(axis=1) ** (1.0 / p)
        best = max(best, float(vals.max()))
        grad = (np.sign(Y) * np.abs(Y) ** (p - 1)) @ T
        X = X + 0.05 * grad / np.maximum(np.abs(grad).max(axis=1, keepdims=True), 1e-300)
        X /= (np.abs(X) ** p).sum(axis=1, keepdims=True) ** (1.0 / p)
    return best


def brute_besselian_ratio(A, B, x, y):
    """sum_n |b_n(x)| |y(a_n)| computed term by term."""
    return sum(abs(float(np.dot(b, x))) * abs(float(np.dot(y, a))) for a, b in zip(A, B))
