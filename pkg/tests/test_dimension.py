import numpy as np
import pytest

from conftest import random_frames
from frameperturb.dimension import (
    crude_tails,
    dimension_bound_functionals,
    dimension_bound_vectors,
    remark38_minimal_N,
)
from frameperturb.frames import FramePair
from frameperturb.generate import canonical_frame
from frameperturb.space import PNormSpace


@pytest.mark.parametrize("fn,attr", [(dimension_bound_vectors, "vectors"),
                                     (dimension_bound_functionals, "functionals")])
def test_full_replacement_is_empty_tail(fn, attr, mercedes):
    cert = fn(mercedes, getattr(mercedes, attr))
    assert cert.N == 3 and cert.tail_value.upper == 0.0 and cert.valid


@pytest.mark.parametrize("fn,attr", [(dimension_bound_vectors, "vectors"),
                                     (dimension_bound_functionals, "functionals")])
def test_mercedes_two(fn, attr, mercedes):
    cert = fn(mercedes, getattr(mercedes, attr)[:2])
    # single tail term (2/3) a_3 a_3^T with ||a_3|| = 1
    assert cert.tail_value.upper == pytest.approx(2 / 3, abs=1e-12)
    assert cert.valid and cert.N == 2 and cert.dim == 2


@pytest.mark.parametrize("fn,attr", [(dimension_bound_vectors, "vectors"),
                                     (dimension_bound_functionals, "functionals")])
def test_canonical_three_not_two(fn, attr):
    F = canonical_frame(PNormSpace(3, 2))
    cert = fn(F, getattr(F, attr)[:2])
    # exact tail is 1; the upper end carries the rounding allowance on top
    assert cert.tail_value.lower == 1.0 and 1.0 <= cert.tail_value.upper < 1.0 + 1e-12
    assert not cert.valid


def test_bad_N(mercedes):
    with pytest.raises(ValueError):
        dimension_bound_vectors(mercedes, np.zeros((4, 2)))
    with pytest.raises(ValueError):
        dimension_bound_vectors(mercedes, np.zeros((2, 2)), N=1)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
@pytest.mark.parametrize("sharp", [False, True])
def test_remark38_canonical(d, sharp):
    assert remark38_minimal_N(canonical_frame(PNormSpace(d, 2)), sharp=sharp).N == d


def test_remark38_mercedes(mercedes):
    np.testing.assert_allclose(crude_tails(mercedes)[1:3], [4 / 3, 2 / 3], atol=1e-12)
    cert = remark38_minimal_N(mercedes)
    assert cert.N == 2 and cert.valid and cert.mode == "crude"
    assert remark38_minimal_N(mercedes, sharp=True).N == 2


def test_remark38_single_pair():
    F = FramePair(PNormSpace(1, 2), [[1.0]], [[1.0]])
    assert remark38_minimal_N(F).N == 1


def test_monotone_and_sharp_not_worse():
    for F, _ in random_frames(40, seed=31, max_M=14):
        tails = crude_tails(F)
        assert np.all(np.diff(tails) <= 1e-15)
        crude = remark38_minimal_N(F)
        sharp = remark38_minimal_N(F, sharp=True)
        assert sharp.N <= crude.N
        assert F.space.dim <= sharp.N
