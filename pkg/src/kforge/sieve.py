"""Sieve for admissible and Kolyvagin primes from coefficient tables.

Only the characteristic-polynomial conditions are decidable from a_ell, so
P_s membership is reported as "candidate".  When Frobenius matrices are
supplied, Fr^2 = 1 and char poly = X^2 - 1 mod p^s1 are checked as well.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Optional

from .coeff import is_prime


class Ramified(ValueError):
    pass


class NotPrime(ValueError):
    pass


class MissingCoefficient(KeyError):
    pass


class SingularCurve(ValueError):
    pass


class ParseError(ValueError):
    pass


class DuplicatePrime(ValueError):
    pass


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for n > 0, by quadratic reciprocity."""
    if n <= 0:
        raise ValueError("n must be positive")
    result = 1
    # factor 2 of n: (a|2) = 0 for even a, else +1 if a = +-1 mod 8, -1 otherwise
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def valuation(x: int, p: int) -> int:
    """p-adic valuation; a large sentinel for 0."""
    if x == 0:
        return 10 ** 9
    v = 0
    x = abs(x)
    while x % p == 0:
        x //= p
        v += 1
    return v


def is_inert(ell: int, D_K: int) -> bool:
    if not is_prime(ell):
        raise NotPrime(f"{ell} is not prime")
    if D_K % ell == 0:
        raise Ramified(f"{ell} divides {D_K}")
    return kronecker(D_K, ell) == -1


@dataclass
class RepData:
    p: int
    N: int
    D_K: int
    coefficients: dict
    epsilon: int = 1
    a: int = 0
    units: Optional[dict] = None       # explicit u_ell table, overrides the pattern
    frobenius: Optional[dict] = None   # ell -> 2x2 integer matrix

    def __post_init__(self):
        from math import gcd

        if self.p % 2 == 0:
            raise ValueError("p must be odd")
        if gcd(self.N * self.p, self.D_K) != 1:
            raise ValueError("D_K must be prime to N p")
        if self.D_K >= 0 or self.D_K in (-3, -4):
            raise ValueError("D_K must be negative and different from -3, -4")

    def a_ell(self, ell: int) -> int:
        try:
            return self.coefficients[ell]
        except KeyError:
            raise MissingCoefficient(ell) from None

    def u_ell(self, ell: int, modulus: int) -> int:
        if self.units is not None and ell in self.units:
            return self.units[ell] % modulus
        return (self.epsilon * pow(ell, self.a, modulus)) % modulus


@dataclass
class SieveRecord:
    ell: int
    flags: dict = field(default_factory=dict)
    s1_of_ell: int = 0
    status: str = "rejected"

    def to_json(self) -> dict:
        return asdict(self)


def _frobenius_ok(F, q: int) -> bool:
    (a, b), (c, d) = F
    sq = ((a * a + b * c) % q, (a * b + b * d) % q, (c * a + d * c) % q, (c * b + d * d) % q)
    # Fr^2 = 1 and char poly X^2 - tr X + det = X^2 - 1
    return sq == (1 % q, 0, 0, 1 % q) and (a + d) % q == 0 and (a * d - b * c + 1) % q == 0


def candidate_P_s(ell: int, data: RepData, s1: int) -> tuple:
    """(passes, flags): necessary conditions for ell in P_s with s = (s1, .)."""
    if (data.N * data.p) % ell == 0:
        raise ValueError(f"{ell} divides N p")
    p = data.p
    q = p ** s1
    a = data.a_ell(ell)
    flags = {"inert": is_inert(ell, data.D_K),
             "ell_congruence": (ell + 1) % q == 0,
             "trace_congruence": (data.u_ell(ell, q) * a) % q == 0}
    ok = all(flags.values())
    if data.frobenius is not None and ell in data.frobenius:
        flags["frobenius"] = _frobenius_ok(data.frobenius[ell], q)
        ok = ok and flags["frobenius"]
    return ok, flags


def unit_profile(ell: int, a: int, p: int) -> int:
    """The t with v_p(ell + 1 + a) = v_p(ell + 1 - a) = t, or 0 if there is none."""
    vp, vm = valuation(ell + 1 + a, p), valuation(ell + 1 - a, p)
    return vp if vp == vm and vp < 10 ** 9 else 0


def sieve_record(ell: int, data: RepData, t1: int) -> SieveRecord:
    ok, flags = candidate_P_s(ell, data, t1)
    a = data.a_ell(ell)
    p = data.p
    flags["unit_plus"] = valuation(ell + 1 + a, p) == t1
    flags["unit_minus"] = valuation(ell + 1 - a, p) == t1
    s1 = unit_profile(ell, a, p) if flags["inert"] else 0
    if ok and flags["unit_plus"] and flags["unit_minus"]:
        status = "member_L_t"
    elif ok:
        status = "candidate_P_s"
    else:
        status = "rejected"
    return SieveRecord(ell, flags, s1, status)


def sieve_primes(lo: int, hi: int, data: RepData) -> list:
    """Primes in [lo, hi) not dividing N p D_K."""
    bad = data.N * data.p * data.D_K
    return [ell for ell in range(max(lo, 3), hi) if is_prime(ell) and bad % ell]


def kolyvagin_sieve(ells, data: RepData, t1: int) -> list:
    """Records for the primes in ``ells`` (a range or iterable), in order."""
    bad = data.N * data.p * data.D_K
    out = []
    for ell in ells:
        if ell < 3 or not is_prime(ell) or bad % ell == 0:
            continue
        out.append(sieve_record(ell, data, t1))
    return out


def status_sets(records) -> dict:
    """{"inert", "candidate", "member"} sets of primes."""
    inert = {r.ell for r in records if r.flags.get("inert")}
    cand = {r.ell for r in records if r.status in ("candidate_P_s", "member_L_t")}
    mem = {r.ell for r in records if r.status == "member_L_t"}
    return {"inert": inert, "candidate": cand, "member": mem}


# ---------------------------------------------------------------------------
# elliptic curve point counts


def ec_point_count(a4: int, a6: int, ell: int) -> int:
    """a_ell = ell + 1 - #E(F_ell) for y^2 = x^3 + a4 x + a6, by enumeration."""
    if ell < 5 or not is_prime(ell):
        raise NotPrime(f"{ell} must be a prime >= 5")
    if (4 * a4 ** 3 + 27 * a6 ** 2) % ell == 0:
        raise SingularCurve(f"the curve is singular mod {ell}")
    roots = [0] * ell
    for y in range(ell):
        roots[y * y % ell] += 1
    count = 1  # the point at infinity
    for x in range(ell):
        count += roots[(x * x * x + a4 * x + a6) % ell]
    return ell + 1 - count


def ec_table(a4: int, a6: int, ells) -> dict:
    out = {}
    for ell in ells:
        try:
            out[ell] = ec_point_count(a4, a6, ell)
        except (SingularCurve, NotPrime):
            continue
    return out


# ---------------------------------------------------------------------------
# I/O


def dumps_coefficients(table: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ell", "a_ell"])
    for ell in sorted(table):
        w.writerow([ell, table[ell]])
    return buf.getvalue()


def loads_coefficients(text: str, fmt: str = "csv") -> dict:
    table = {}

    def put(ell, a):
        try:
            ell, a = int(ell), int(a)
        except (TypeError, ValueError):
            raise ParseError(f"non-integer entry {ell!r}, {a!r}") from None
        if ell in table:
            raise DuplicatePrime(f"duplicate row for {ell}")
        table[ell] = a

    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["ell", "a_ell"]:
            raise ParseError("expected header ell,a_ell")
        for row in rows[1:]:
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"bad row {row}")
            put(row[0].strip(), row[1].strip())
    elif fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(str(e)) from None
        if isinstance(data, dict):
            data = [{"ell": k, "a_ell": v} for k, v in data.items()]
        for row in data:
            put(row["ell"], row["a_ell"])
    else:
        raise ParseError(f"unknown format {fmt}")
    return table


def ingest_coefficients(path: str, fmt: Optional[str] = None) -> dict:
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "csv"
    with open(path, encoding="utf-8") as fh:
        return loads_coefficients(fh.read(), fmt)


def write_coefficients(table: dict, path: str) -> None:
    _atomic_write(path, dumps_coefficients(table))


def records_tsv(records) -> str:
    cols = ["inert", "ell_congruence", "trace_congruence", "unit_plus", "unit_minus"]
    lines = ["\t".join(["ell"] + cols + ["s1_of_ell", "status"])]
    for r in records:
        lines.append("\t".join([str(r.ell)] + [str(int(bool(r.flags.get(c)))) for c in cols]
                               + [str(r.s1_of_ell), r.status]))
    return "\n".join(lines) + "\n"


def records_json(records) -> str:
    return json.dumps([r.to_json() for r in records], sort_keys=True)


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
