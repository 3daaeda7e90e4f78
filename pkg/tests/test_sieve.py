import pytest
from hypothesis import given, strategies as st

from kforge.coeff import is_prime
from kforge.oracles import ec_trace_by_symbols, quadratic_residue_symbol
from kforge.sieve import (DuplicatePrime, MissingCoefficient, NotPrime, ParseError, Ramified, RepData,
                          SingularCurve, candidate_P_s, dumps_coefficients, ec_point_count, ec_table,
                          ingest_coefficients, is_inert, kolyvagin_sieve, kronecker, loads_coefficients,
                          records_json, records_tsv, sieve_record, status_sets, write_coefficients)

PRIMES = [ell for ell in range(3, 500) if is_prime(ell)]


def data(table, **kw):
    return RepData(3, 37, -7, table, **kw)


def test_inertness_examples():
    assert is_inert(3, -7)
    assert not is_inert(11, -7)
    with pytest.raises(Ramified):
        is_inert(7, -7)
    with pytest.raises(NotPrime):
        is_inert(9, -7)


def test_point_count_examples():
    # y^2 = x^3 - 16x + 16 is a model of the conductor-37 curve
    # known traces of that curve: a_5 = -2, a_11 = -5, a_13 = -2, a_17 = a_19 = 0
    assert [ec_point_count(-16, 16, ell) for ell in (5, 11, 13, 17, 19)] == [-2, -5, -2, 0, 0]
    assert ec_point_count(0, 1, 5) == 0  # supersingular at 5
    with pytest.raises(SingularCurve):
        ec_point_count(0, 0, 7)
    with pytest.raises(NotPrime):
        ec_point_count(-16, 16, 3)


def test_member_and_candidate_examples():
    d = data({17: 3})
    rec = sieve_record(17, d, 1)
    assert rec.status == "member_L_t" and rec.s1_of_ell == 1
    # a_17 = 0: every candidate condition holds but v_3(18) = 2 != 1
    rec = sieve_record(17, data({17: 0}), 1)
    assert rec.status == "candidate_P_s"
    assert not rec.flags["unit_plus"] and not rec.flags["unit_minus"]
    assert sieve_record(11, data({11: 0}), 1).status == "rejected"


def test_missing_coefficient_and_bad_parameters():
    with pytest.raises(MissingCoefficient):
        candidate_P_s(17, data({}), 1)
    with pytest.raises(ValueError):
        RepData(3, 37, -4, {})
    with pytest.raises(ValueError):
        RepData(3, 7, -7, {})
    with pytest.raises(ValueError):
        RepData(2, 37, -7, {})


def test_frobenius_condition():
    d = data({17: 3}, frobenius={17: ((1, 0), (0, 2))})
    ok, flags = candidate_P_s(17, d, 1)
    assert ok and flags["frobenius"]
    d = data({17: 3}, frobenius={17: ((1, 1), (0, 1))})
    ok, flags = candidate_P_s(17, d, 1)
    assert not ok and not flags["frobenius"]


def test_empty_range():
    assert kolyvagin_sieve(range(100, 100), data({}), 1) == []


def test_sieve_skips_bad_primes():
    table = ec_table(-16, 16, range(5, 200))
    recs = kolyvagin_sieve(range(1, 200), data(table), 1)
    ells = [r.ell for r in recs]
    assert 3 not in ells and 7 not in ells and 37 not in ells
    assert all(is_prime(e) for e in ells)


@given(st.sampled_from(PRIMES), st.integers(-2000, 2000))
def test_kronecker_matches_enumeration(ell, a):
    assert kronecker(a, ell) == quadratic_residue_symbol(a, ell)


@given(st.sampled_from([ell for ell in PRIMES if ell >= 5]), st.integers(-50, 50), st.integers(-50, 50))
def test_point_count_two_ways_and_hasse(ell, a4, a6):
    if (4 * a4 ** 3 + 27 * a6 ** 2) % ell == 0:
        return
    a = ec_point_count(a4, a6, ell)
    assert a == ec_trace_by_symbols(a4, a6, ell)
    assert a * a <= 4 * ell


@given(st.integers(5, 1500))
def test_status_sets_are_nested_and_monotone(hi):
    table = ec_table(-16, 16, range(5, hi))
    recs = kolyvagin_sieve(range(5, hi), data(table), 1)
    sets = status_sets(recs)
    assert sets["member"] <= sets["candidate"] <= sets["inert"]
    # growing the range only adds records
    more = status_sets(kolyvagin_sieve(range(5, hi + 100), data(ec_table(-16, 16, range(5, hi + 100))), 1))
    assert all(sets[k] <= more[k] for k in sets)


@given(st.dictionaries(st.integers(3, 10 ** 5), st.integers(-500, 500), max_size=30))
def test_csv_round_trip_is_byte_identical(table):
    text = dumps_coefficients(table)
    back = loads_coefficients(text)
    assert back == table and dumps_coefficients(back) == text


def test_parse_errors():
    with pytest.raises(ParseError):
        loads_coefficients("p,a\n5,1\n")
    with pytest.raises(ParseError):
        loads_coefficients("ell,a_ell\n5,x\n")
    with pytest.raises(DuplicatePrime):
        loads_coefficients("ell,a_ell\n5,1\n5,2\n")
    with pytest.raises(ParseError):
        loads_coefficients("{", "json")
    assert loads_coefficients('{"5": -2}', "json") == {5: -2}


def test_file_round_trip(tmp_path):
    table = ec_table(-16, 16, range(5, 100))
    path = tmp_path / "coeffs.csv"
    write_coefficients(table, str(path))
    assert ingest_coefficients(str(path)) == table
    assert path.read_bytes() == dumps_coefficients(table).encode()
    assert [p.name for p in tmp_path.iterdir()] == ["coeffs.csv"]


def test_record_outputs():
    recs = kolyvagin_sieve([17, 19], data({17: 3, 19: 0}), 1)
    tsv = records_tsv(recs).splitlines()
    assert tsv[0].split("\t")[0] == "ell" and tsv[1].endswith("member_L_t")
    assert '"status": "member_L_t"' in records_json(recs)
