"""Command-line front end: kforge <subcommand> [flags].

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on a
usage or I/O error.  Settings come from flags, then a JSON --config file,
then built-in defaults.  KFORGE_THREADS caps the number of worker processes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from . import __version__

DEFAULTS = {
    "p": 3, "s": 1, "t1": 1, "dk": -7, "N": 1, "epsilon": 1, "a": 0, "range": "3..2000",
    "seeds": "1..10", "alpha": 0, "max_M": 81, "format": "tsv",
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def parse_seeds(text) -> list:
    """'1..100' (inclusive), '1,4,9' or a single integer."""
    if isinstance(text, int):
        return [text]
    if isinstance(text, list):
        return [int(x) for x in text]
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def parse_range(text) -> range:
    if isinstance(text, list):
        return range(int(text[0]), int(text[1]) + 1)
    lo, _, hi = str(text).partition("..")
    if not hi:
        raise UsageError(f"range must look like lo..hi, got {text!r}")
    return range(int(lo), int(hi) + 1)


def resolve(args, key: str):
    v = getattr(args, key, None)
    if v is not None:
        return v
    cfg = getattr(args, "_config", {}) or {}
    if key in cfg:
        return cfg[key]
    return DEFAULTS.get(key)


def thread_count(args) -> int:
    """Requested workers (flag, config, else KFORGE_THREADS, else 1), capped by KFORGE_THREADS."""
    env = os.environ.get("KFORGE_THREADS")
    try:
        cap = max(1, int(env)) if env else None
    except ValueError:
        raise UsageError(f"KFORGE_THREADS must be an integer, got {env!r}") from None
    n = resolve(args, "threads") or cap or 1
    return max(1, min(int(n), cap) if cap else int(n))


def _map(fn, items, threads: int) -> list:
    """Ordered map; a process pool when threads > 1 (results merged in input order)."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# reports


def build_report(command: dict, results: list, elapsed: float) -> dict:
    passed = sum(1 for r in results if r.get("pass"))
    return {"tool": "kforge", "version": __version__, "command": command, "results": results,
            "summary": {"total": len(results), "passed": passed, "failed": len(results) - passed},
            "wall_clock_seconds": round(elapsed, 3)}


def emit_report(results: dict, path: str) -> None:
    """Write a report as JSON atomically (temp file in the same directory, then rename)."""
    from .sieve import _atomic_write

    _atomic_write(path, json.dumps(results, sort_keys=True, indent=1) + "\n")


def results_section(report: dict) -> str:
    """Canonical text of the deterministic part of a report."""
    return json.dumps(report["results"], sort_keys=True)


# ---------------------------------------------------------------------------
# workers (top level so they pickle)


def _kf_item(job) -> dict:
    from .keyformula import (CONDITIONS, HypothesisFailure, MutationUnavailable, generate_instance,
                             key_formula_check, mutate, validate)

    seed, p, s, max_M, with_mutant = job
    inst = generate_instance(seed, p, s, max_M)
    try:
        rep = key_formula_check(inst)
        item = {"seed": seed, "p": p, "s": s, "M": inst.M, "pass": rep.passed,
                "lhs": list(rep.lhs), "rhs": list(rep.rhs)}
    except HypothesisFailure as e:
        item = {"seed": seed, "p": p, "s": s, "M": inst.M, "pass": False, "error": str(e)}
    if with_mutant:
        cond = CONDITIONS[seed % len(CONDITIONS)]
        try:
            fails = validate(mutate(inst, cond)).failures
            item["mutant"] = {"condition": cond, "failures": fails}
            item["pass"] = item["pass"] and fails == [cond]
        except MutationUnavailable as e:
            item["mutant"] = {"condition": cond, "error": str(e)}
            item["pass"] = False
    return item


def _es_item(job) -> dict:
    from .eulersys import (check_layer_K1_K2, descend_iwasawa, generate_es, layer_projection_ok,
                           localization_diagram_ok, run_descent, validate_E, validate_pE)

    seed, p, s, alpha, validate_only = job
    inst = generate_es(seed, p, s, alpha_max=alpha)
    base = inst if alpha == 0 else inst.base
    item = {"seed": seed, "p": p, "s": s, "ell": base.tower.primes[0]}
    checks = dict(validate_E(base))
    if alpha:
        checks.update(validate_pE(inst))
    item["axioms"] = {k: v[0] for k, v in sorted(checks.items())}
    ok = all(item["axioms"].values())
    if not validate_only:
        out = run_descent(base)
        item.update(out.to_json())
        ok = ok and out.ok
        for a in range(1, alpha + 1):
            lay = check_layer_K1_K2(inst, a)
            for n in base.indices():
                descend_iwasawa(inst, n, a)
            diag = all(localization_diagram_ok(inst, n, a) for n in base.indices())
            proj = all(layer_projection_ok(inst, n, a - 1) for n in base.indices())
            item[f"layer{a}"] = {"K1_K2": all(lay.values()), "diagram": diag, "projection": proj}
            ok = ok and all(lay.values()) and diag and proj
    item["pass"] = bool(ok)
    return item


# ---------------------------------------------------------------------------
# subcommands


def cmd_sieve(args) -> tuple:
    from . import sieve
    from .oracles import sieve_second_path

    p, dk, t1 = resolve(args, "p"), resolve(args, "dk"), resolve(args, "t1")
    ells = parse_range(resolve(args, "range"))
    if args.coeffs:
        table = sieve.ingest_coefficients(args.coeffs)
    elif args.curve:
        a4, a6 = (int(x) for x in args.curve.split(","))
        table = sieve.ec_table(a4, a6, ells)
    else:
        raise UsageError("one of --coeffs or --curve is required")
    if args.write_table:
        sieve.write_coefficients(table, args.write_table)
    N, eps, a = resolve(args, "N"), resolve(args, "epsilon"), resolve(args, "a")
    data = sieve.RepData(p, N, dk, table, eps, a)
    ells = [ell for ell in ells if ell in table]
    recs = sieve.kolyvagin_sieve(ells, data, t1)
    text = sieve.records_json(recs) + "\n" if resolve(args, "format") == "json" else sieve.records_tsv(recs)
    if args.out:
        sieve._atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    results = [r.to_json() | {"pass": True} for r in recs]
    ok = True
    if args.check:
        sets = sieve.status_sets(recs)
        other = sieve_second_path({ell: table[ell] for ell in ells}, p, dk, N, t1, eps, a)
        ok = sets == other and sets["member"] <= sets["candidate"] <= sets["inert"]
        results.append({"check": "second path", "pass": ok})
    return results, ok


def _parse_group(spec: str):
    from .groups import Abelian, Cyclic, Dihedral, Metacyclic

    name, _, par = spec.partition(":")
    nums = [int(x) for x in par.split(",") if x]
    name = name.lower()
    if name == "cyclic" and len(nums) == 1:
        return Cyclic(nums[0])
    if name == "dihedral" and len(nums) == 1:
        return Dihedral(nums[0])
    if name == "metacyclic" and len(nums) == 3:
        return Metacyclic(*nums)
    if name == "abelian" and nums:
        return Abelian(nums)
    raise UsageError(f"cannot parse group {spec!r}")


def cmd_h1(args) -> tuple:
    from .coeff import make_ring
    from .cohom import GModule, mat_identity
    from .groups import group_from_json

    p, s = resolve(args, "p"), resolve(args, "s")
    rank = args.rank
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh)
        G = group_from_json(data["group"])
        p, s = data.get("p", p), data.get("s", s)
        mats = data["action"]
        rank = len(mats[0])
    else:
        if not args.group:
            raise UsageError("one of --group or --input is required")
        G = _parse_group(args.group)
        R0 = make_ring(p, s)
        ident = [list(r) for r in mat_identity(R0, rank)]
        if args.action == "trivial":
            mats = [ident] * G.ngens
        elif args.action == "sign":
            # the last generator (the reflection of a dihedral group) acts by -1
            neg = [[(-a) % R0.q for a in r] for r in ident]
            mats = [ident] * (G.ngens - 1) + [neg]
        else:
            mats = json.loads(args.action)
    R = make_ring(p, s)
    T = GModule(G, R, rank, mats)
    rep = T.h1()
    item = {"group": G.to_json() if hasattr(G, "to_json") else str(G), "p": p, "s": s, "rank": rank,
            "order": rep.order, "invariant_factors": list(rep.invariant_factors), "pass": True}
    if args.check:
        from .oracles import brute_force_h1, class_partition

        Z, B = brute_force_h1(G, R.q, rank, [[[int(a) for a in r] for r in A] for A in T.action])
        classes = class_partition(Z, B, R.q)
        item["brute_force_order"] = len(classes)
        item["pass"] = len(classes) == rep.order and len(Z) == rep.z1_order
    if not args.report:
        print(f"|H^1| = {rep.order}  invariant factors {list(rep.invariant_factors)}")
    return [item], item["pass"]


def cmd_verify_keyformula(args) -> tuple:
    p, s = resolve(args, "p"), resolve(args, "s")
    seeds = parse_seeds(resolve(args, "seeds"))
    jobs = [(seed, p, s, resolve(args, "max_M"), bool(args.mutants)) for seed in seeds]
    results = _map(_kf_item, jobs, thread_count(args))
    return results, all(r["pass"] for r in results)


def _es_from_file(path: str, validate_only: bool) -> dict:
    from .eulersys import EulerSystemInstance, run_descent, validate_E

    with open(path, encoding="utf-8") as fh:
        inst = EulerSystemInstance.from_json(json.load(fh))
    axioms = {k: v[0] for k, v in sorted(validate_E(inst).items())}
    item = {"instance": os.path.basename(path), "axioms": axioms}
    ok = all(axioms.values())
    if not validate_only:
        out = run_descent(inst)
        item.update(out.to_json())
        ok = ok and out.ok
    item["pass"] = ok
    return item


def _cmd_es(args, validate_only: bool) -> tuple:
    if args.instance:
        results = [_es_from_file(args.instance, validate_only)]
    else:
        p, s, alpha = resolve(args, "p"), resolve(args, "s"), resolve(args, "alpha")
        if alpha > 2:
            raise UsageError("layers are supported up to alpha = 2")
        seeds = parse_seeds(resolve(args, "seeds"))
        jobs = [(seed, p, s, alpha, validate_only) for seed in seeds]
        results = _map(_es_item, jobs, thread_count(args))
    return results, all(r["pass"] for r in results)


def cmd_derive(args) -> tuple:
    return _cmd_es(args, validate_only=False)


def cmd_validate_es(args) -> tuple:
    return _cmd_es(args, validate_only=True)


def selftest_items(quick: bool = True) -> list:
    """Small built-in checks; the quick set only runs trivial cases."""
    from .coeff import make_ring
    from .cohom import GModule, mat_identity
    from .eulersys import generate_es, run_descent, zero_system
    from .groups import Cyclic, GroupRingElt, derivative_operator, sigma_element, trace_operator
    from .sieve import ec_point_count, is_inert

    out = []

    def add(name, ok):
        out.append({"check": name, "pass": bool(ok)})

    for M in range(2, 20 if quick else 200):
        lhs = (sigma_element((M,)) - GroupRingElt.scalar((M,), 1)) * derivative_operator(M)
        add(f"telescopic M={M}", lhs == GroupRingElt.scalar((M,), M) - trace_operator(M))
    R = make_ring(3, 1)
    T = GModule(Cyclic(3), R, 1, [mat_identity(R, 1)])
    add("H^1(Z/3, Z/3) has order 3", T.h1().order == 3)
    add("3 inert in Q(sqrt -7)", is_inert(3, -7))
    add("11 split in Q(sqrt -7)", not is_inert(11, -7))
    add("a_5 of y^2 = x^3 + x + 1", ec_point_count(1, 1, 5) == -3)
    add("a_5 of y^2 = x^3 + 1", ec_point_count(0, 1, 5) == 0)
    inst = zero_system(generate_es(1, 3, 1, zero=True))
    zo = run_descent(inst)
    add("zero system gives zero classes", all(not any(z.values) for z in zo.kappa.values()) and zo.ok)
    add("empty report", build_report({}, [], 0.0)["summary"]["total"] == 0)
    if not quick:
        for seed in range(1, 4):
            add(f"key formula seed {seed}", _kf_item((seed, 3, 1, 81, True))["pass"])
            add(f"descent seed {seed}", _es_item((seed, 3, 1, 0, False))["pass"])
    return out


def cmd_selftest(args) -> tuple:
    results = selftest_items(quick=args.quick)
    for r in results:
        if not args.report:
            print(("PASS " if r["pass"] else "FAIL ") + r["check"])
    return results, all(r["pass"] for r in results)


COMMANDS = {"sieve": cmd_sieve, "h1": cmd_h1, "verify-keyformula": cmd_verify_keyformula,
            "derive": cmd_derive, "validate-es": cmd_validate_es, "selftest": cmd_selftest}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kforge", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"kforge {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, profile=True):
        sp.add_argument("--config", help="JSON file with default settings")
        sp.add_argument("--report", help="write a JSON report to this path")
        sp.add_argument("--threads", type=int, help="worker processes (capped by KFORGE_THREADS)")
        if profile:
            sp.add_argument("--p", type=int)
            sp.add_argument("--s", type=int)

    sp = sub.add_parser("sieve", help="admissible and Kolyvagin primes from a coefficient table")
    common(sp, profile=False)
    sp.add_argument("--p", type=int)
    sp.add_argument("--dk", type=int, help="discriminant of the imaginary quadratic field")
    sp.add_argument("--t1", type=int)
    sp.add_argument("--N", type=int, help="level (primes dividing it are skipped)")
    sp.add_argument("--epsilon", type=int)
    sp.add_argument("--a", type=int, help="exponent in u_ell = epsilon * ell^a")
    sp.add_argument("--coeffs", help="CSV (ell,a_ell) or JSON coefficient table")
    sp.add_argument("--curve", help="a4,a6: build the table by point counting on y^2 = x^3 + a4 x + a6 (write --curve=-16,16 for negative a4)")
    sp.add_argument("--write-table", help="save the coefficient table as CSV")
    sp.add_argument("--range", help="lo..hi (inclusive)")
    sp.add_argument("--format", choices=("tsv", "json"))
    sp.add_argument("--out", help="output path (default standard output)")
    sp.add_argument("--check", action="store_true", help="compare with the second sieve path")

    sp = sub.add_parser("h1", help="first cohomology of a finite group module")
    common(sp)
    sp.add_argument("--group", help="cyclic:M, dihedral:M, metacyclic:a,b,r or abelian:n1,n2,...")
    sp.add_argument("--input", help="JSON {group, p, s, action}")
    sp.add_argument("--rank", type=int, default=1)
    sp.add_argument("--action", default="trivial", help="trivial, sign (last generator acts by -1), or a JSON list of matrices")
    sp.add_argument("--check", action="store_true", help="compare with brute-force enumeration")

    sp = sub.add_parser("verify-keyformula", help="seeded key-formula suite")
    common(sp)
    sp.add_argument("--seeds")
    sp.add_argument("--max-M", dest="max_M", type=int)
    sp.add_argument("--mutants", action="store_true", help="also run one single-condition mutant per seed")

    for name, text in (("derive", "Kolyvagin descent on generated Euler systems"),
                       ("validate-es", "check the Euler-system axioms")):
        sp = sub.add_parser(name, help=text)
        common(sp)
        sp.add_argument("--seeds")
        sp.add_argument("--alpha", type=int, help="top anticyclotomic layer (0, 1 or 2)")
        sp.add_argument("--instance", help="JSON instance file instead of generated seeds")

    sp = sub.add_parser("selftest", help="built-in sanity checks")
    common(sp, profile=False)
    sp.add_argument("--quick", action="store_true")
    return ap


def run(argv: Optional[list] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    t0 = time.perf_counter()
    try:
        args._config = {}
        if getattr(args, "config", None):
            with open(args.config, encoding="utf-8") as fh:
                args._config = json.load(fh)
        results, ok = COMMANDS[args.command](args)
        if args.report:
            echo = {k: v for k, v in sorted(vars(args).items()) if not k.startswith("_") and v is not None}
            emit_report(build_report(echo, results, time.perf_counter() - t0), args.report)
    except (UsageError, OSError, json.JSONDecodeError) as e:
        print(f"kforge: error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        # malformed inputs (ParseError, DuplicatePrime, Ramified, bad parameters)
        print(f"kforge: error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
