import pytest
from hypothesis import given, strategies as st

from kforge.coeff import (CompositeP, MatrixOverR, NotDivisible, PrecisionExhausted, ReducibleModulus,
                          exact_div_p_power, group_ring_layer, howell_form, in_row_span, is_unit, kernel,
                          make_ring, smith_invariants, solve)

RINGS = [make_ring(3, 1), make_ring(3, 2), make_ring(5, 2), make_ring(3, 2, [1, 0, 1])]


def test_make_ring_basic():
    R = make_ring(3, 2)
    assert R.q == 9 and R.size == 9 and R.d == 1
    E = make_ring(3, 2, [1, 0, 1])  # X^2 + 1 is irreducible mod 3
    assert E.d == 2 and E.size == 81


def test_make_ring_rejects_bad_input():
    with pytest.raises(CompositeP):
        make_ring(9, 1)
    with pytest.raises(CompositeP):
        make_ring(2, 3)
    with pytest.raises(ReducibleModulus):
        make_ring(5, 1, [1, 0, 1])  # -1 is a square mod 5
    with pytest.raises(ValueError):
        make_ring(3, 0)


def test_units_and_division():
    R = make_ring(3, 3)
    assert is_unit(R.elt(2)) and not is_unit(R.elt(6))
    x = R.elt(18)
    y = exact_div_p_power(x, 2)
    assert y.ctx.N == 1 and y == 2
    with pytest.raises(NotDivisible):
        exact_div_p_power(R.elt(3), 2)
    with pytest.raises(PrecisionExhausted):
        exact_div_p_power(R.elt(0), 3)


def test_inverse_in_extension():
    E = make_ring(3, 2, [1, 0, 1])
    x = E.elt((1, 1))
    assert x * x.inverse() == 1


def test_howell_solve_kernel_small_example():
    R = make_ring(3, 2)
    m = MatrixOverR.from_rows(R, [[3, 0], [0, 1], [3, 1]])
    H, U = howell_form(m)
    assert (U @ m).entries == H.entries
    assert in_row_span(m, [3, 5]) and not in_row_span(m, [1, 0])
    x = solve(m, [6, 2])
    assert x is not None
    assert (MatrixOverR.from_rows(R, [x]) @ m).entries == ((6, 2),)
    K = kernel(m)
    assert all(e == 0 for row in (K @ m).entries for e in row)
    # quotient orders of (Z/9)^2 by the row span
    assert smith_invariants(R, [[3, 0], [0, 1]], 2) == [3]
    assert smith_invariants(R, [[3, 0], [0, 3], [6, 6]], 2) == [3, 3]


def test_matrix_json_round_trip():
    R = make_ring(5, 2)
    m = MatrixOverR.from_rows(R, [[1, 24], [5, 0]])
    assert MatrixOverR.from_json(m.to_json()) == m


def test_group_ring_layer_projection():
    R = make_ring(3, 1)
    L2 = group_ring_layer(R, 2)
    assert group_ring_layer(R, 0) is R
    x, y = L2.gamma_power(4), L2.add(L2.one(), L2.gamma_power(7))
    L1 = group_ring_layer(R, 1)
    # projection to a lower layer is a ring map
    assert L2.project(L2.mul(x, y), 1) == L1.mul(L2.project(x, 1), L2.project(y, 1))
    assert L2.project(L2.gamma_power(4), 1) == L1.gamma_power(1)
    assert L2.project(L2.one(), 0) == (R.one(),)
    with pytest.raises(ValueError):
        L1.project(L1.one(), 2)


elts = st.integers(min_value=-10 ** 6, max_value=10 ** 6)


@given(st.sampled_from(RINGS), elts, elts, elts)
def test_ring_axioms(R, a, b, c):
    x, y, z = (R.elt(R.from_int(v)) if R.d == 1 else R.elt((v, (v * 7) % R.q)) for v in (a, b, c))
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == 0


@given(st.sampled_from(RINGS), elts)
def test_unit_iff_valuation_zero(R, a):
    x = R.elt(R.from_int(a))
    assert x.is_unit() == (x.valuation() == 0)
    if x.is_unit():
        assert x * x.inverse() == 1


@given(st.integers(0, 80), st.integers(0, 80))
def test_solve_agrees_with_row_span(a, b):
    R = make_ring(3, 2)
    m = MatrixOverR.from_rows(R, [[3, 6], [0, 3]])
    target = [a % 9, b % 9]
    assert (solve(m, target) is not None) == in_row_span(m, target)
    assert in_row_span(m, target) == (a % 3 == 0 and b % 3 == 0)
