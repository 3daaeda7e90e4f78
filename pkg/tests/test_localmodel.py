import random

import pytest
from hypothesis import given, settings, strategies as st

from kforge.coeff import make_ring
from kforge.cohom import mat_vec
from kforge.localmodel import (ChiNotInvertible, FrobeniusNotTrivial, LocalModel, NotFinite, TorsionMismatch,
                               alpha_eval, beta_eval, beta_inverse, finite_singular, random_model,
                               singular_equal)


def diag_model():
    # ell = 17, p = 3: 9 | ell + 1, Frobenius diag(1, -1)
    return LocalModel(17, make_ring(3, 1), ((1, 0), (0, 2)))


def test_diag_model_orders():
    M = diag_model()
    assert M.tame == 9
    assert M.T.h1().order == 81
    assert M.subspace_order(M.finite_rows()) == 9 == M.coinvariant_order()
    assert M.subspace_order(M.transverse_rows()) == 9 == len(M.fixed_vectors())


def test_torsion_mismatch():
    M = LocalModel(5, make_ring(3, 2), ((1, 0), (0, 8)))  # 9 does not divide 6
    assert not M.torsion_ok()
    with pytest.raises(TorsionMismatch):
        M.transverse_rows()


def test_tame_order_must_divide_ell_plus_one():
    with pytest.raises(ValueError):
        LocalModel(17, make_ring(3, 1), ((1, 0), (0, 2)), tame=27)


def test_alpha_rejects_ramified_classes():
    M = diag_model()
    tr = [z for z in M.classes(M.transverse_rows()) if not z.is_zero()]
    with pytest.raises(NotFinite):
        alpha_eval(M, tr[0])


def test_beta_inverse_round_trip():
    M = diag_model()
    for v in M.fixed_vectors():
        z, k = beta_inverse(M, v)
        assert tuple(beta_eval(M, z, k)) == tuple(v)
        assert M.is_transverse(z)


def test_finite_singular_with_chi():
    M = diag_model()
    fin = M.classes(M.finite_rows())
    chi = ((2, 0), (0, 2))
    for z in fin:
        a = alpha_eval(M, z)
        out = finite_singular(M, z, chi)
        assert singular_equal(M, out, beta_inverse(M, mat_vec(M.ring, chi, a)))
    with pytest.raises(ChiNotInvertible):
        finite_singular(M, fin[0], ((1, 0), (0, 0)))


def test_nontrivial_fr_lambda_refused():
    # F of order 4, so Fr_lambda = F^2 = -1 is not the identity
    M = LocalModel(17, make_ring(3, 1), ((0, 2), (1, 0)))
    assert M.fr_lambda != ((1, 0), (0, 1))
    with pytest.raises(FrobeniusNotTrivial):
        finite_singular(M, M.T.zero_cocycle())


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.sampled_from([(3, 1), (5, 1), (3, 2)]))
def test_random_model_decomposition(seed, ps):
    M = random_model(random.Random(seed), *ps)
    fin, tr = M.finite_rows(), M.transverse_rows()
    assert M.subspace_order(fin) * M.subspace_order(tr) == M.T.h1().order
    fin_classes = M.classes(fin)
    assert len({alpha_eval(M, z) for z in fin_classes}) == len(fin_classes) == M.coinvariant_order()
    for z in fin_classes:
        assert alpha_eval(M, M.frobenius_act(z)) == M.coinvariant_rep(mat_vec(M.ring, M.frobenius,
                                                                               alpha_eval(M, z)))
