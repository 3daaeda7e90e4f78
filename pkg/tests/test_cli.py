import json

import pytest

from kforge.cli import UsageError, parse_range, parse_seeds, results_section, run, thread_count


class Args:
    def __init__(self, **kw):
        self.__dict__.update(kw)


def test_parse_helpers():
    assert parse_seeds("1..4") == [1, 2, 3, 4]
    assert parse_seeds("1,4,9") == [1, 4, 9]
    assert parse_seeds(7) == [7]
    assert list(parse_range("5..9")) == [5, 6, 7, 8, 9]
    with pytest.raises(UsageError):
        parse_range("5-9")


def test_thread_count(monkeypatch):
    monkeypatch.delenv("KFORGE_THREADS", raising=False)
    assert thread_count(Args(threads=None)) == 1
    assert thread_count(Args(threads=3)) == 3
    monkeypatch.setenv("KFORGE_THREADS", "2")
    assert thread_count(Args(threads=None)) == 2
    assert thread_count(Args(threads=8)) == 2
    monkeypatch.setenv("KFORGE_THREADS", "many")
    with pytest.raises(UsageError):
        thread_count(Args(threads=None))


def test_selftest_quick():
    assert run(["selftest", "--quick"]) == 0


def test_usage_errors(tmp_path, capsys):
    assert run(["nonsense"]) == 2
    assert run(["sieve"]) == 2
    assert run(["sieve", "--coeffs", str(tmp_path / "missing.csv")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("ell,a_ell\n5,1\n5,2\n")
    assert run(["sieve", "--coeffs", str(bad), "--p", "3"]) == 2
    assert "DuplicatePrime" in capsys.readouterr().err


def test_sieve_tsv(capsys):
    assert run(["sieve", "--curve=-16,16", "--N", "37", "--range", "5..60", "--check"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t") == ["ell", "inert", "ell_congruence", "trace_congruence", "unit_plus",
                                    "unit_minus", "s1_of_ell", "status"]
    rows = {int(r.split("\t")[0]): r.split("\t")[-1] for r in lines[1:]}
    assert rows[41] == rows[47] == "member_L_t"
    assert rows[17] == "candidate_P_s" and rows[11] == "rejected" and 37 not in rows


def test_sieve_table_and_json_output(tmp_path):
    table, out = tmp_path / "t.csv", tmp_path / "out.json"
    assert run(["sieve", "--curve=-16,16", "--N", "37", "--range", "5..100", "--write-table", str(table)]) == 0
    assert run(["sieve", "--coeffs", str(table), "--N", "37", "--range", "5..100", "--format", "json",
                "--out", str(out)]) == 0
    recs = json.loads(out.read_text())
    assert {r["ell"] for r in recs if r["status"] == "member_L_t"} == {41, 47}


def test_h1_with_check(tmp_path):
    rep = tmp_path / "h1.json"
    assert run(["h1", "--group", "dihedral:3", "--p", "3", "--action", "sign", "--check", "--report", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert data["summary"]["failed"] == 0
    assert run(["h1", "--group", "torus:3"]) == 2


def test_report_schema_and_atomic_write(tmp_path):
    rep = tmp_path / "kf.json"
    assert run(["verify-keyformula", "--seeds", "1..3", "--mutants", "--report", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert set(data) == {"tool", "version", "command", "results", "summary", "wall_clock_seconds"}
    assert data["tool"] == "kforge"
    assert data["summary"] == {"total": 3, "passed": 3, "failed": 0}
    assert data["command"]["command"] == "verify-keyformula"
    assert [p.name for p in tmp_path.iterdir()] == ["kf.json"]


def test_reports_are_deterministic_across_thread_counts(tmp_path, monkeypatch):
    monkeypatch.delenv("KFORGE_THREADS", raising=False)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["derive", "--seeds", "1..3", "--report", str(a)]) == 0
    assert run(["derive", "--seeds", "1..3", "--threads", "2", "--report", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert results_section(ra) == results_section(rb)


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 5, "seeds": "1..2"}))
    rep = tmp_path / "r.json"
    assert run(["verify-keyformula", "--config", str(cfg), "--report", str(rep)]) == 0
    res = json.loads(rep.read_text())["results"]
    assert len(res) == 2 and all(r["p"] == 5 for r in res)
    # a flag beats the config file
    assert run(["verify-keyformula", "--config", str(cfg), "--p", "3", "--report", str(rep)]) == 0
    res = json.loads(rep.read_text())["results"]
    assert all(r["p"] == 3 for r in res)


def test_validate_es_instance_file(tmp_path):
    from kforge.eulersys import generate_es

    path = tmp_path / "es.json"
    path.write_text(json.dumps(generate_es(1, 3, 1).to_json()))
    assert run(["validate-es", "--instance", str(path)]) == 0
    path.write_text("{not json")
    assert run(["validate-es", "--instance", str(path)]) == 2
