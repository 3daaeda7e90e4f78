"""The reference computations checked on cases with known answers."""

import pytest

from kforge.groups import Cyclic, Dihedral
from kforge.keyformula import cor_cocycle, generate_instance
from kforge.oracles import (brute_force_h0, brute_force_h1, class_partition, ec_trace_by_symbols,
                            naive_transfer, quadratic_residue_symbol, sieve_second_path)


@pytest.mark.parametrize("M,q,expected", [(6, 3, 3), (9, 9, 9), (27, 9, 9), (5, 9, 1), (10, 25, 5)])
def test_brute_force_cyclic_trivial(M, q, expected):
    Z, B = brute_force_h1(Cyclic(M), q, 1, [[[1]]])
    assert len(B) == 1
    assert len(class_partition(Z, B, q)) == expected


def test_brute_force_sign_module():
    # C2 acting by -1 on Z/3: no cocycle survives beyond the coboundaries
    Z, B = brute_force_h1(Cyclic(2), 3, 1, [[[2]]])
    assert Z == B and len(class_partition(Z, B, 3)) == 1
    assert brute_force_h0(Dihedral(3), 3, 1, [[[1]], [[2]]]) == 1


def test_enumeration_limit():
    with pytest.raises(ValueError):
        brute_force_h1(Cyclic(5), 25, 2, [[[1, 0], [0, 1]]], limit=100)


def test_residue_symbols():
    assert [quadratic_residue_symbol(a, 7) for a in range(7)] == [0, 1, 1, -1, 1, -1, -1]
    assert ec_trace_by_symbols(-16, 16, 5) == -2


def test_second_sieve_path_small_table():
    sets = sieve_second_path({17: 3, 11: 0, 41: 0, 7: 0}, 3, -7, 37, 1)
    # 7 is ramified, 11 splits, 41 = 2 mod 3 is inert with 42 = 3 * 14
    assert sets["inert"] == {17, 41}
    assert sets["candidate"] == {17, 41}
    assert sets["member"] == {17, 41}


def test_naive_transfer_matches_linear_corestriction():
    inst = generate_instance(7, 3, 1)
    q = inst.ring.q
    c = cor_cocycle(inst, reduced=False)
    for k, g in enumerate(inst.shell.G.gens()):
        assert naive_transfer(inst, g, q) == tuple(int(v) for v in c.gen_value(k))
