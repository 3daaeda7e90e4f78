import itertools

import pytest
from hypothesis import given, strategies as st

from kforge.groups import (Abelian, BadTwist, Cyclic, Dihedral, GroupRingElt, Metacyclic, Product, coset_index,
                           coset_reps, derivative_operator, derivative_product, group_from_json, sigma_element,
                           subgroup_from_gens, trace_operator, whole_group)

GROUPS = [Cyclic(6), Abelian([2, 6]), Dihedral(5), Metacyclic(7, 3, 2), Metacyclic(18, 6, 11),
          Product([Cyclic(3), Dihedral(3)])]


def test_metacyclic_twist_must_satisfy_relation():
    # 11 has order 6 mod 18, so 11^4 = 7 mod 18 and b = 4 is not allowed
    with pytest.raises(BadTwist):
        Metacyclic(18, 4, 11)
    G = Metacyclic(18, 6, 11)
    assert G.order() == 108 and len(G.elements()) == 108


@pytest.mark.parametrize("G", GROUPS, ids=repr)
def test_group_axioms_and_relators(G):
    els = G.elements()
    assert len(els) == G.order()
    e = G.identity()
    for x in els[:20]:
        assert G.mul(x, G.inv(x)) == e
        assert G.eval_word(G.word(x)) == x
    for a, b, c in itertools.islice(itertools.product(els, repeat=3), 300):
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    for rel in G.relators():
        assert G.eval_word(rel) == e


@pytest.mark.parametrize("G", GROUPS, ids=repr)
def test_json_round_trip(G):
    H = group_from_json(G.to_json())
    assert H == G and H.order() == G.order()


def test_dihedral_is_metacyclic_with_inverting_twist():
    D = Dihedral(4)
    assert D.order() == 8
    s, c = D.gens()
    assert D.conj(c, s) == D.inv(s)


def test_coset_reps_partition_the_group():
    G = Dihedral(6)
    H = subgroup_from_gens(G, [(2, 0)], "<x^2>")
    reps = coset_reps(G, H)
    assert len(reps) == H.index() == 4
    seen = {}
    for g in G.elements():
        i, h = coset_index(G, H, reps, g)
        assert G.mul(reps[i], h) == g and H.contains(h)
        seen[i] = seen.get(i, 0) + 1
    assert set(seen.values()) == {3}
    assert H.is_normal()
    assert not subgroup_from_gens(G, [(0, 1)]).is_normal()
    assert whole_group(G).index() == 1


def test_derivative_and_trace_small_cases():
    assert derivative_operator(4).coeffs == (((1,), 1), ((2,), 2), ((3,), 3))
    assert trace_operator(3).coeffs == (((0,), 1), ((1,), 1), ((2,), 1))
    with pytest.raises(ValueError):
        derivative_operator(1)
    # operators on one coordinate of a product of cyclic groups
    D = derivative_product((3, 4), [0, 1])
    assert D == derivative_operator(3, 0, (3, 4)) * derivative_operator(4, 1, (3, 4))
    assert sum(c for _, c in D.coeffs) == 3 * 6


@given(st.integers(2, 200))
def test_telescopic_identity(M):
    o = (M,)
    lhs = (sigma_element(o) - GroupRingElt.scalar(o, 1)) * derivative_operator(M)
    assert lhs == GroupRingElt.scalar(o, M) - trace_operator(M)


@given(st.integers(2, 12), st.integers(2, 12), st.integers(0, 1))
def test_telescopic_identity_in_products(M1, M2, which):
    o = (M1, M2)
    M = o[which]
    lhs = (sigma_element(o, which) - GroupRingElt.scalar(o, 1)) * derivative_operator(M, which, o)
    assert lhs == GroupRingElt.scalar(o, M) - trace_operator(M, which, o)


@given(st.integers(1, 30))
def test_trace_absorbs_sigma(M):
    o = (M,)
    T = trace_operator(M)
    assert sigma_element(o) * T == T
