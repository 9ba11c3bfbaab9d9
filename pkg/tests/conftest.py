import numpy as np
import pytest

from frameperturb.generate import canonical_frame, generate_frame, mercedes_frame
from frameperturb.perturbation import PerturbationCandidate
from frameperturb.space import INF, PNormSpace

EXACT_PS = (1.0, 2.0, INF)


@pytest.fixture
def mercedes():
    return mercedes_frame(2.0)


@pytest.fixture
def canonical2():
    return canonical_frame(PNormSpace(2, 2))


def shifted_vector(F, n, x):
    X = F.vectors.copy()
    X[n] = x
    return PerturbationCandidate.from_arrays(F, X, F.functionals)


def scaled_functional(F, n, factor):
    Y = F.functionals.copy()
    Y[n] = factor * Y[n]
    return PerturbationCandidate.from_arrays(F, F.vectors, Y)


def random_frames(count, seed, max_dim=6, max_M=16, ps=EXACT_PS, kinds=("tight", "random")):
    """Deterministic stream of (frame, rng) for property tests."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        d = int(rng.integers(1, max_dim + 1))
        M = int(rng.integers(d, max(d, max_M) + 1))
        p = ps[i % len(ps)]
        kind = kinds[i % len(kinds)]
        yield generate_frame(d, M, p=p, kind=kind, seed=int(rng.integers(2**31))), rng
