import numpy as np
import pytest

from conftest import EXACT_PS, random_frames
from frameperturb import oracle
from frameperturb.errors import DimensionMismatch, EnumerationCapExceeded, FrameError
from frameperturb.frames import (
    EquivalenceWitness,
    FramePair,
    abs_bilinear_norm,
    besselian_constant,
    besselian_diagnostic,
    frame_constant_K,
    validate_frame,
)
from frameperturb.generate import canonical_frame, generate_frame, mercedes_frame
from frameperturb.space import INF, ConstantBound, Operator, PNormSpace


def test_validate_examples(mercedes):
    r = validate_frame(canonical_frame(PNormSpace(3, 2)))
    assert r.residual == 0.0 and r.is_frame
    r = validate_frame(mercedes)
    assert r.residual <= 1e-15 and r.is_frame
    half = FramePair(PNormSpace(2, 2), [[1, 0]], [[1, 0]])
    r = validate_frame(half)
    assert r.residual == 1.0 and not r.is_frame


def test_validate_rejects_bad_tol(mercedes):
    with pytest.raises(ValueError):
        validate_frame(mercedes, tol=0)


def test_pair_shape_errors():
    sp = PNormSpace(2, 2)
    with pytest.raises(DimensionMismatch):
        FramePair(sp, [[1, 0]], [[1, 0], [0, 1]])
    with pytest.raises(DimensionMismatch):
        FramePair(sp, [[1, 0, 0]], [[1, 0, 0]])


def test_json_round_trip(mercedes):
    back = FramePair.from_json(mercedes.to_json())
    np.testing.assert_array_equal(back.vectors, mercedes.vectors)
    np.testing.assert_array_equal(back.functionals, mercedes.functionals)
    assert back.space == mercedes.space


@pytest.mark.parametrize("p", EXACT_PS)
@pytest.mark.parametrize("d", [1, 2, 4])
def test_canonical_constants(p, d):
    F = canonical_frame(PNormSpace(d, p))
    assert frame_constant_K(F) == ConstantBound(1.0, 1.0, True)
    assert besselian_constant(F) == ConstantBound(1.0, 1.0, True)


def test_mercedes_K_by_eigensolve(mercedes):
    partial = np.cumsum(mercedes.terms(), axis=0)
    # symmetric partial sums: spectral norm is the largest |eigenvalue|
    eig = [np.linalg.eigvalsh(S) for S in partial]
    np.testing.assert_allclose(sorted(eig[1]), [1 / 3, 1.0], atol=1e-12)
    oracle_K = max(np.abs(e).max() for e in eig)
    K = frame_constant_K(mercedes)
    assert K.exact and K.upper == pytest.approx(oracle_K, abs=1e-12) and K.upper == pytest.approx(1.0, abs=1e-12)


def test_mercedes_L_exact(mercedes):
    L = besselian_constant(mercedes, mode="exact")
    assert L.exact and L.upper == pytest.approx(1.0, abs=1e-12)
    assert L.upper == pytest.approx(oracle.sign_enum_bilinear(list(mercedes.terms()), 2), abs=1e-12)


def test_single_scaled_pair():
    F = FramePair(PNormSpace(2, 2), [[1, 0]], [[2, 0]])
    assert besselian_constant(F) == ConstantBound(2.0, 2.0, True)
    assert besselian_diagnostic(F, samples=1000).max_ratio <= 2 + 1e-9


def test_K_requires_frame():
    with pytest.raises(FrameError):
        frame_constant_K(FramePair(PNormSpace(2, 2), [[1, 0]], [[1, 0]]))


def test_exact_mode_errors():
    F = generate_frame(2, 16, kind="tight", seed=0)
    with pytest.raises(EnumerationCapExceeded):
        besselian_constant(F, mode="exact")
    with pytest.raises(ValueError):
        besselian_constant(mercedes_frame(3.0), mode="exact")
    with pytest.raises(ValueError):
        besselian_constant(F, mode="nope")


def test_bounds_used_beyond_cap():
    F = generate_frame(3, 18, kind="tight", seed=1)
    L = besselian_constant(F)
    assert not L.exact
    assert 1 - 1e-9 <= L.lower <= L.upper <= F.crude_sum() + 1e-9


def test_general_p_bounds():
    F = mercedes_frame(3.0)
    L = besselian_constant(F)
    K = frame_constant_K(F)
    assert not L.exact and not K.exact
    assert L.lower >= 1 - 1e-9 and K.lower >= 1 - 1e-9
    assert L.upper <= F.crude_sum() + 1e-9


def test_diagnostic_examples(mercedes):
    assert besselian_diagnostic(canonical_frame(PNormSpace(3, 2)), samples=500).max_ratio <= 1 + 1e-12
    rep = besselian_diagnostic(mercedes, samples=1000, seed=0)
    assert rep.ok and rep.max_ratio <= 1 + 1e-9


def test_diagnostic_agrees_with_termwise_oracle(mercedes):
    rng = np.random.default_rng(3)
    x, y = rng.standard_normal(2), rng.standard_normal(2)
    direct = oracle.brute_besselian_ratio(mercedes.vectors, mercedes.functionals, x, y)
    vec = float((np.abs(mercedes.functionals @ x) * np.abs(mercedes.vectors @ y)).sum())
    assert direct == pytest.approx(vec, rel=1e-14)


def test_constants_at_least_one():
    for F, _ in random_frames(60, seed=11, max_M=10):
        assert frame_constant_K(F).lower >= 1 - 1e-9
        assert besselian_constant(F).lower >= 1 - 1e-9


def test_rescaling_invariance():
    rng = np.random.default_rng(5)
    for F, _ in random_frames(30, seed=5, max_dim=4, max_M=9):
        lam = rng.uniform(0.3, 3.0, len(F)) * rng.choice([-1, 1], len(F))
        G = FramePair(F.space, lam[:, None] * F.vectors, F.functionals / lam[:, None])
        assert validate_frame(G).residual == pytest.approx(validate_frame(F).residual, abs=1e-9)
        assert frame_constant_K(G).upper == pytest.approx(frame_constant_K(F).upper, abs=1e-9)
        assert besselian_constant(G).upper == pytest.approx(besselian_constant(F).upper, abs=1e-9)


def test_permutation_invariance_of_L():
    rng = np.random.default_rng(6)
    for F, _ in random_frames(30, seed=6, max_dim=4, max_M=10):
        perm = rng.permutation(len(F))
        G = FramePair(F.space, F.vectors[perm], F.functionals[perm])
        assert besselian_constant(G).upper == pytest.approx(besselian_constant(F).upper, abs=1e-9)


def test_exact_matches_oracle_and_bounds_bracket():
    for F, _ in random_frames(40, seed=7, max_dim=4, max_M=10):
        exact = besselian_constant(F, mode="exact")
        ref = oracle.sign_enum_bilinear(list(F.terms()), F.space.p)
        assert exact.upper == pytest.approx(ref, abs=1e-9)
        b = besselian_constant(F, mode="bounds")
        assert b.lower <= exact.upper + 1e-9 and exact.upper <= b.upper + 1e-9
        assert b.upper <= F.crude_sum() + 1e-9


def test_abs_bilinear_zero_and_shape():
    sp = PNormSpace(2, 2)
    assert abs_bilinear_norm(np.zeros((3, 2, 2)), sp) == ConstantBound.point(0.0)
    with pytest.raises(DimensionMismatch):
        abs_bilinear_norm(np.zeros((3, 3, 3)), sp)


def test_equivalence_witness():
    sp = PNormSpace(2, 2)
    T = Operator(np.diag([2.0, 1.0]), sp)
    w = EquivalenceWitness(T, Operator(np.diag([0.5, 1.0]), sp))
    assert w.residual == 0.0
    with pytest.raises(ValueError):
        EquivalenceWitness(T, Operator.identity(sp))
