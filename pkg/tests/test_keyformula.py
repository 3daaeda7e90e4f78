import json

import pytest
from hypothesis import given, settings, strategies as st

from kforge.coeff import make_ring
from kforge.keyformula import (CONDITIONS, HypothesisFailure, KolyvaginInstance, NotUnit, generate_instance,
                               key_formula_check, mutate, solve_abar, solve_f_y, theta, validate, zero_instance)
from kforge.oracles import naive_abar, naive_key_formula

PROFILES = [(3, 1), (5, 1), (3, 2)]


def test_generated_instance_passes_all_conditions():
    inst = generate_instance(1, 3, 1)
    assert validate(inst).ok
    rep = key_formula_check(inst)
    assert rep.passed and rep.lhs == rep.rhs
    assert any(rep.abar_x)
    assert rep.diagnostics["abar_matches_f_y"] and rep.diagnostics["lift_reduces_to_abar"]


def test_zero_instance():
    inst = generate_instance(2, 3, 1)
    z = zero_instance(inst.shell, inst.M1, inst.delta, inst.d)
    assert validate(z).ok
    rep = key_formula_check(z)
    assert rep.passed and not any(rep.abar) and not any(rep.lhs)


@pytest.mark.parametrize("cond", CONDITIONS)
def test_each_mutant_fails_only_its_condition(cond):
    inst = generate_instance(3, 3, 1)
    m = mutate(inst, cond)
    assert validate(m).failures == [cond]
    assert m.mutation == cond
    with pytest.raises(HypothesisFailure):
        key_formula_check(m)


def test_t3_mutant_uses_zero_cocycles():
    m = mutate(generate_instance(4, 5, 1), "T3")
    assert m.x.is_zero() and m.y.is_zero() and m.M1 == 0


@pytest.mark.parametrize("p,s", PROFILES)
def test_es_mutant_breaks_the_formula(p, s):
    for seed in range(1, 4):
        m = mutate(generate_instance(seed, p, s), "E-S")
        rep = key_formula_check(m, require_valid=False)
        assert not rep.passed and any(rep.difference)


def test_unknown_condition():
    with pytest.raises(ValueError):
        mutate(generate_instance(1, 3, 1), "G9")


@settings(max_examples=12)
@given(st.integers(1, 400), st.sampled_from(PROFILES))
def test_key_formula_matches_naive_arithmetic(seed, ps):
    inst = generate_instance(seed, *ps)
    rep = key_formula_check(inst)
    naive = naive_key_formula(inst)
    assert naive["unique"]
    assert rep.passed and naive["passed"]
    assert tuple(naive["abar"]) == rep.abar and tuple(naive["lhs"]) == rep.lhs
    assert naive_abar(inst) == [tuple(rep.abar)]


@settings(max_examples=8)
@given(st.integers(1, 400), st.sampled_from(PROFILES))
def test_f_y_recovers_abar(seed, ps):
    inst = generate_instance(seed, *ps)
    abar = solve_abar(inst)
    fy = solve_f_y(inst, abar)
    assert fy.is_cocycle()


def test_instance_json_round_trip():
    inst = generate_instance(5, 3, 2)
    text = json.dumps(inst.to_json(), sort_keys=True)
    back = KolyvaginInstance.from_json(json.loads(text))
    assert json.dumps(back.to_json(), sort_keys=True) == text
    assert key_formula_check(back).to_json() == key_formula_check(inst).to_json()


def test_theta_is_frobenius_when_u_is_one():
    R = make_ring(3, 2)
    Fr = ((0, 1), (1, 0))
    low, th = theta(5, 0, 1, 1, Fr, R)
    assert low.N == 1 and th == ((0, 1), (1, 0))


def test_theta_on_an_eigenbasis():
    # Fr = diag(1, -1), ell = 11, a = 9, u = 2 over Z/27, s1 = 1:
    # entries e ((ell+1)e - u a) / ((ell+1)e - a) in Z/9
    R = make_ring(3, 3)
    low, th = theta(11, 9, 2, 1, ((1, 0), (0, 26)), R)
    expect = []
    for e in (1, -1):
        num, den = (12 * e - 18) // 3, (12 * e - 9) // 3
        expect.append(e * num * pow(den, -1, 9) % 9)
    assert th == ((expect[0], 0), (0, expect[1])) == ((7, 0), (0, 5))


def test_theta_requires_divisibility():
    with pytest.raises(NotUnit):
        theta(5, 1, 1, 1, ((1, 0), (0, 8)), make_ring(3, 2))
