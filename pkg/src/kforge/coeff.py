"""Exact arithmetic over Z/p^N and its unramified extensions.

Elements of a context are handled internally in a "raw" form: a plain int
when the context has degree 1 and a tuple of ints otherwise.  The public
wrappers (RingElt, MatrixOverR) are thin, immutable shells around raw data.

Linear algebra is done with the Howell form, the canonical row-module normal
form over a chain ring.  Every ring handled here is a chain ring with
uniformizer p, so the usual valuation pivoting works unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence


class CompositeP(ValueError):
    pass


class ReducibleModulus(ValueError):
    pass


class NotDivisible(ArithmeticError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _poly_has_root_mod_p(coeffs: Sequence[int], p: int) -> bool:
    for x in range(p):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % p
        if acc == 0:
            return True
    return False


def _poly_irreducible_mod_p(coeffs: Sequence[int], p: int) -> bool:
    if _poly_has_root_mod_p(coeffs, p):
        return len(coeffs) == 2
    if len(coeffs) <= 4:
        # degree <= 3 without roots
        return True
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed([c % p for c in coeffs])), x, modulus=p)
    return bool(poly.is_irreducible)


@dataclass(frozen=True)
class RingCtx:
    """Z/p^N, or Z/p^N[X]/(f) with f monic and irreducible mod p."""

    p: int
    N: int
    modulus: Optional[tuple] = None  # low-to-high coefficients, monic

    @property
    def d(self) -> int:
        return 1 if self.modulus is None else len(self.modulus) - 1

    @cached_property
    def q(self) -> int:
        return self.p ** self.N

    @property
    def size(self) -> int:
        return self.p ** (self.N * self.d)

    def header(self) -> dict:
        return {"p": self.p, "N": self.N,
                "modulus": None if self.modulus is None else list(self.modulus)}

    def with_precision(self, N: int) -> "RingCtx":
        if N < 1:
            raise PrecisionExhausted(f"precision {N} < 1")
        return RingCtx(self.p, N, self.modulus)

    # raw element operations
    def zero(self):
        return 0 if self.d == 1 else (0,) * self.d

    def one(self):
        return 1 if self.d == 1 else (1,) + (0,) * (self.d - 1)

    def from_int(self, n: int):
        n %= self.q
        return n if self.d == 1 else (n,) + (0,) * (self.d - 1)

    def normalize(self, x):
        if self.d == 1:
            return int(x) % self.q
        x = tuple(int(c) % self.q for c in x)
        if len(x) != self.d:
            raise ValueError("wrong coefficient length")
        return x

    def add(self, x, y):
        if self.d == 1:
            return (x + y) % self.q
        return tuple((a + b) % self.q for a, b in zip(x, y))

    def sub(self, x, y):
        if self.d == 1:
            return (x - y) % self.q
        return tuple((a - b) % self.q for a, b in zip(x, y))

    def neg(self, x):
        if self.d == 1:
            return (-x) % self.q
        return tuple((-a) % self.q for a in x)

    def smul(self, n: int, x):
        """Integer scalar times element."""
        if self.d == 1:
            return (n * x) % self.q
        return tuple((n * a) % self.q for a in x)

    def mul(self, x, y):
        if self.d == 1:
            return (x * y) % self.q
        d, q = self.d, self.q
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    prod[i + j] += a * b
        f = self.modulus
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k] % q
            if c:
                for i in range(d):
                    prod[k - d + i] -= c * f[i]
            prod[k] = 0
        return tuple(c % q for c in prod[:d])

    def is_zero(self, x) -> bool:
        return x == 0 if self.d == 1 else not any(x)

    def val(self, x) -> int:
        """Valuation in [0, N]; N means zero."""
        if self.d == 1:
            if x == 0:
                return self.N
            v = 0
            while x % self.p == 0:
                x //= self.p
                v += 1
            return v
        return min(self.val_int(c) for c in x)

    def val_int(self, c: int) -> int:
        c %= self.q
        if c == 0:
            return self.N
        v = 0
        while c % self.p == 0:
            c //= self.p
            v += 1
        return v

    def is_unit(self, x) -> bool:
        return self.val(x) == 0

    def inv(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError("not a unit")
        if self.d == 1:
            return pow(x, -1, self.q)
        # inverse in the residue field by search, then Newton lifting
        p = self.p
        res = RingCtx(p, 1, tuple(c % p for c in self.modulus))
        xr = res.normalize(x)
        y = None
        for idx in range(1, p ** self.d):
            cand = tuple((idx // p ** i) % p for i in range(self.d))
            if res.mul(xr, cand) == res.one():
                y = cand
                break
        y = self.normalize(y)
        two = self.from_int(2)
        for _ in range(self.N.bit_length() + 1):
            y = self.mul(y, self.sub(two, self.mul(x, y)))
        return y

    def div_p_power(self, x, v: int):
        """x / p^v as a raw element of the same context (x divisible by p^v)."""
        pv = self.p ** v
        if self.d == 1:
            if x % pv:
                raise NotDivisible(f"{x} not divisible by p^{v}")
            return x // pv
        if any(c % pv for c in x):
            raise NotDivisible(f"{x} not divisible by p^{v}")
        return tuple(c // pv for c in x)

    def divmod_p_power(self, x, v: int):
        """Split x = p^v * quo + rem with rem coefficientwise in [0, p^v)."""
        pv = self.p ** v
        if self.d == 1:
            return divmod(x, pv)
        qs, rs = zip(*(divmod(c, pv) for c in x))
        return tuple(qs), tuple(rs)

    def reduce_raw(self, x, target: "RingCtx"):
        return target.normalize(x)

    def unit_normalizer(self, x):
        """(v, w) with w a unit and w*x = p^v."""
        v = self.val(x)
        if v >= self.N:
            return self.N, self.one()
        u = self.div_p_power(x, v)
        return v, self.inv(u)

    def elements(self):
        """Enumerate all raw elements (small rings only)."""
        if self.d == 1:
            return list(range(self.q))
        out = []
        for idx in range(self.size):
            out.append(tuple((idx // self.q ** i) % self.q for i in range(self.d)))
        return out

    def elt(self, x) -> "RingElt":
        if isinstance(x, int):
            return RingElt(self, self.from_int(x))
        return RingElt(self, self.normalize(x))


def make_ring(p: int, N: int, modulus: Optional[Sequence[int]] = None) -> RingCtx:
    """Build Z/p^N or the extension Z/p^N[X]/(modulus)."""
    if not is_prime(p) or p < 3:
        raise CompositeP(f"p = {p} must be an odd prime")
    if N < 1:
        raise ValueError("precision must be positive")
    if modulus is None:
        return RingCtx(p, N, None)
    mod = tuple(int(c) for c in modulus)
    if len(mod) < 2 or mod[-1] != 1:
        raise ValueError("modulus must be monic of degree >= 1")
    if not _poly_irreducible_mod_p(mod, p):
        raise ReducibleModulus(f"{list(mod)} is reducible mod {p}")
    q = p ** N
    return RingCtx(p, N, tuple(c % q for c in mod[:-1]) + (1,))


@dataclass(frozen=True)
class RingElt:
    ctx: RingCtx
    raw: object

    def _other(self, o):
        if isinstance(o, RingElt):
            if o.ctx != self.ctx:
                raise ValueError("context mismatch")
            return o.raw
        return self.ctx.from_int(o)

    def __add__(self, o):
        return RingElt(self.ctx, self.ctx.add(self.raw, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return RingElt(self.ctx, self.ctx.sub(self.raw, self._other(o)))

    def __rsub__(self, o):
        return RingElt(self.ctx, self.ctx.sub(self._other(o), self.raw))

    def __neg__(self):
        return RingElt(self.ctx, self.ctx.neg(self.raw))

    def __mul__(self, o):
        return RingElt(self.ctx, self.ctx.mul(self.raw, self._other(o)))

    __rmul__ = __mul__

    def __eq__(self, o):
        if isinstance(o, int):
            return self.raw == self.ctx.from_int(o)
        return isinstance(o, RingElt) and o.ctx == self.ctx and o.raw == self.raw

    def __hash__(self):
        return hash((self.ctx, self.raw))

    def coeffs(self) -> tuple:
        return (self.raw,) if self.ctx.d == 1 else self.raw

    def valuation(self) -> int:
        return self.ctx.val(self.raw)

    def is_unit(self) -> bool:
        return self.ctx.is_unit(self.raw)

    def inverse(self) -> "RingElt":
        return RingElt(self.ctx, self.ctx.inv(self.raw))

    def reduce(self, N: int) -> "RingElt":
        c = self.ctx.with_precision(N)
        return RingElt(c, c.normalize(self.raw))

    def to_json(self) -> list:
        return [str(c) for c in self.coeffs()]

    @classmethod
    def from_json(cls, ctx: RingCtx, data) -> "RingElt":
        vals = [int(s) for s in data]
        return ctx.elt(vals[0] if ctx.d == 1 else tuple(vals))

    def __repr__(self):
        return f"RingElt({self.coeffs()} mod {self.ctx.p}^{self.ctx.N})"


def is_unit(x: RingElt) -> bool:
    return x.is_unit()


def exact_div_p_power(x: RingElt, s: int) -> RingElt:
    """Divide by p^s, landing at precision N - s."""
    ctx = x.ctx
    if s >= ctx.N:
        raise PrecisionExhausted(f"cannot divide by p^{s} at precision {ctx.N}")
    if s < 0:
        raise ValueError("s must be non-negative")
    if ctx.val(x.raw) < s:
        raise NotDivisible(f"{x} is not divisible by p^{s}")
    low = ctx.with_precision(ctx.N - s)
    return RingElt(low, low.normalize(ctx.div_p_power(x.raw, s)))


# ---------------------------------------------------------------------------
# Howell form on raw row lists


def howell_raw(ctx: RingCtx, rows, ncols: int, track=None):
    """Howell form of the row module spanned by ``rows``.

    Returns (H, U, pivots) where H is the list of nonzero canonical rows,
    pivots[k] = (column, valuation) for row k and, if ``track`` is given,
    U holds the matching combinations of the tracked rows (U[k] . track = H[k]
    when track starts as the identity).
    """
    A = [list(r) for r in rows]
    U = [list(t) for t in track] if track is not None else None
    zero = ctx.zero()
    N = ctx.N
    pivots = []
    r = 0
    for j in range(ncols):
        best, bv = None, N
        for i in range(r, len(A)):
            v = ctx.val(A[i][j])
            if v < bv:
                best, bv = i, v
                if v == 0:
                    break
        if best is None:
            continue
        A[r], A[best] = A[best], A[r]
        if U is not None:
            U[r], U[best] = U[best], U[r]
        _, w = ctx.unit_normalizer(A[r][j])
        if w != ctx.one():
            A[r] = [ctx.mul(w, e) for e in A[r]]
            if U is not None:
                U[r] = [ctx.mul(w, e) for e in U[r]]
        prow = A[r]
        for i in range(r + 1, len(A)):
            e = A[i][j]
            if not ctx.is_zero(e):
                c = ctx.div_p_power(e, bv)
                A[i] = [ctx.sub(a, ctx.mul(c, b)) for a, b in zip(A[i], prow)]
                if U is not None:
                    U[i] = [ctx.sub(a, ctx.mul(c, b)) for a, b in zip(U[i], U[r])]
        if bv > 0:
            # p^(N-v) times the pivot row dies in column j but may survive later
            k = ctx.p ** (N - bv)
            ann = [ctx.smul(k, e) for e in prow]
            if any(not ctx.is_zero(e) for e in ann):
                A.append(ann)
                if U is not None:
                    U.append([ctx.smul(k, e) for e in U[r]])
        pivots.append((j, bv))
        r += 1
    # reduce entries above each pivot into the canonical residue range
    for k, (j, v) in enumerate(pivots):
        if v == 0:
            for i in range(k):
                e = A[i][j]
                if not ctx.is_zero(e):
                    A[i] = [ctx.sub(a, ctx.mul(e, b)) for a, b in zip(A[i], A[k])]
                    if U is not None:
                        U[i] = [ctx.sub(a, ctx.mul(e, b)) for a, b in zip(U[i], U[k])]
        else:
            for i in range(k):
                e = A[i][j]
                if not ctx.is_zero(e):
                    c, _ = ctx.divmod_p_power(e, v)
                    if not ctx.is_zero(c):
                        A[i] = [ctx.sub(a, ctx.mul(c, b)) for a, b in zip(A[i], A[k])]
                        if U is not None:
                            U[i] = [ctx.sub(a, ctx.mul(c, b)) for a, b in zip(U[i], U[k])]
    H = A[:r]
    return H, (U[:r] if U is not None else None), pivots


def reduce_by_howell(ctx: RingCtx, H, pivots, vec, U=None):
    """Reduce ``vec`` against a Howell basis.

    Returns (remainder, coefficients); the remainder is the canonical coset
    representative and is zero iff vec lies in the row span.  Coefficients
    are expressed through U when given (otherwise through the rows of H).
    """
    b = list(vec)
    if U is not None:
        x = [ctx.zero()] * len(U[0]) if U else []
    else:
        x = [ctx.zero()] * len(H)
    for k, (j, v) in enumerate(pivots):
        e = b[j]
        if ctx.is_zero(e):
            continue
        c, _ = ctx.divmod_p_power(e, v)
        if ctx.is_zero(c):
            continue
        b = [ctx.sub(a, ctx.mul(c, h)) for a, h in zip(b, H[k])]
        if U is not None:
            x = [ctx.add(a, ctx.mul(c, u)) for a, u in zip(x, U[k])]
        else:
            x[k] = ctx.add(x[k], c)
    return b, x


def left_kernel_raw(ctx: RingCtx, rows, ncols: int):
    """Howell basis of {x : x . A = 0} where A has the given rows."""
    m = len(rows)
    if m == 0:
        return []
    one, zero = ctx.one(), ctx.zero()
    aug = [list(r) + [one if i == k else zero for k in range(m)] for i, r in enumerate(rows)]
    H, _, piv = howell_raw(ctx, aug, ncols + m)
    return [h[ncols:] for h, (j, _) in zip(H, piv) if j >= ncols]


def solve_left_raw(ctx: RingCtx, rows, ncols: int, b):
    """One solution x of x . A = b, or None."""
    m = len(rows)
    if m == 0:
        return [] if all(ctx.is_zero(e) for e in b) else None
    one, zero = ctx.one(), ctx.zero()
    ident = [[one if i == k else zero for k in range(m)] for i in range(m)]
    H, U, piv = howell_raw(ctx, rows, ncols, track=ident)
    rem, x = reduce_by_howell(ctx, H, piv, b, U=U)
    if any(not ctx.is_zero(e) for e in rem):
        return None
    if not U:
        return [zero] * m
    return x


def span_size(ctx: RingCtx, pivots) -> int:
    out = 1
    for _, v in pivots:
        out *= ctx.p ** ((ctx.N - v) * ctx.d)
    return out


def smith_invariants(ctx: RingCtx, rows, ncols: int) -> list:
    """Invariant factors of (R^ncols)/rowspan, as orders p^e of cyclic factors."""
    A = [list(r) for r in rows]
    n = ncols
    diag = []
    r = 0
    while True:
        best, bv = None, ctx.N
        for i in range(r, len(A)):
            for j in range(r, n):
                v = ctx.val(A[i][j])
                if v < bv:
                    best, bv = (i, j), v
        if best is None:
            break
        i, j = best
        A[r], A[i] = A[i], A[r]
        for row in A:
            row[r], row[j] = row[j], row[r]
        piv = A[r][r]
        _, w = ctx.unit_normalizer(piv)
        A[r] = [ctx.mul(w, e) for e in A[r]]
        for i2 in range(len(A)):
            if i2 != r and not ctx.is_zero(A[i2][r]):
                c = ctx.div_p_power(A[i2][r], bv)
                A[i2] = [ctx.sub(a, ctx.mul(c, b)) for a, b in zip(A[i2], A[r])]
        for j2 in range(r + 1, n):
            if not ctx.is_zero(A[r][j2]):
                c = ctx.div_p_power(A[r][j2], bv)
                for row in A:
                    row[j2] = ctx.sub(row[j2], ctx.mul(c, row[r]))
        diag.append(bv)
        r += 1
        if r >= n:
            break
    # columns without a pivot are free factors
    diag += [ctx.N] * (n - len(diag))
    factors = []
    for v in diag:
        # a diagonal entry p^v leaves R/p^v, i.e. d cyclic factors of order p^v
        if v > 0:
            factors.extend([ctx.p ** v] * ctx.d)
    return sorted(factors)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class MatrixOverR:
    ctx: RingCtx
    rows: int
    cols: int
    entries: tuple  # tuple of row tuples of raw elements

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("inconsistent matrix dimensions")

    @classmethod
    def from_rows(cls, ctx: RingCtx, rows) -> "MatrixOverR":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        ent = tuple(tuple(ctx.normalize(e) if not isinstance(e, RingElt) else e.raw for e in r)
                    for r in rows)
        return cls(ctx, len(rows), ncols, ent)

    @classmethod
    def identity(cls, ctx: RingCtx, n: int) -> "MatrixOverR":
        return cls.from_rows(ctx, [[ctx.one() if i == j else ctx.zero() for j in range(n)]
                                   for i in range(n)])

    @classmethod
    def zeros(cls, ctx: RingCtx, rows: int, cols: int) -> "MatrixOverR":
        return cls(ctx, rows, cols, tuple((ctx.zero(),) * cols for _ in range(rows)))

    def __getitem__(self, ij) -> RingElt:
        i, j = ij
        return RingElt(self.ctx, self.entries[i][j])

    def __matmul__(self, other: "MatrixOverR") -> "MatrixOverR":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        ctx = self.ctx
        out = []
        for r in self.entries:
            row = []
            for j in range(other.cols):
                acc = ctx.zero()
                for k, a in enumerate(r):
                    if not ctx.is_zero(a):
                        acc = ctx.add(acc, ctx.mul(a, other.entries[k][j]))
                row.append(acc)
            out.append(tuple(row))
        return MatrixOverR(ctx, self.rows, other.cols, tuple(out))

    def __add__(self, other: "MatrixOverR") -> "MatrixOverR":
        ctx = self.ctx
        return MatrixOverR(ctx, self.rows, self.cols,
                           tuple(tuple(ctx.add(a, b) for a, b in zip(r, s))
                                 for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: "MatrixOverR") -> "MatrixOverR":
        ctx = self.ctx
        return MatrixOverR(ctx, self.rows, self.cols,
                           tuple(tuple(ctx.sub(a, b) for a, b in zip(r, s))
                                 for r, s in zip(self.entries, other.entries)))

    def transpose(self) -> "MatrixOverR":
        return MatrixOverR(self.ctx, self.cols, self.rows,
                           tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    def row_list(self) -> list:
        return [list(r) for r in self.entries]

    def to_json(self) -> dict:
        conv = (lambda e: str(e)) if self.ctx.d == 1 else (lambda e: [str(c) for c in e])
        return {"header": self.ctx.header(),
                "entries": [[conv(e) for e in r] for r in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "MatrixOverR":
        h = data["header"]
        ctx = RingCtx(h["p"], h["N"], None if h["modulus"] is None else tuple(h["modulus"]))
        if ctx.d == 1:
            rows = [[int(e) for e in r] for r in data["entries"]]
        else:
            rows = [[tuple(int(c) for c in e) for e in r] for r in data["entries"]]
        return cls.from_rows(ctx, rows)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def howell_form(m: MatrixOverR):
    """Canonical Howell form of the row span and a transform U with U @ m = H."""
    ctx = m.ctx
    ident = [[ctx.one() if i == k else ctx.zero() for k in range(m.rows)] for i in range(m.rows)]
    H, U, _ = howell_raw(ctx, m.row_list(), m.cols, track=ident)
    Hm = MatrixOverR.from_rows(ctx, H) if H else MatrixOverR.zeros(ctx, 0, m.cols)
    Um = MatrixOverR.from_rows(ctx, U) if U else MatrixOverR.zeros(ctx, 0, m.rows)
    return Hm, Um


def kernel(m: MatrixOverR) -> MatrixOverR:
    """Rows spanning the left kernel {x : x @ m = 0}."""
    K = left_kernel_raw(m.ctx, m.row_list(), m.cols)
    return MatrixOverR.from_rows(m.ctx, K) if K else MatrixOverR.zeros(m.ctx, 0, m.rows)


def solve(m: MatrixOverR, b: Sequence) -> Optional[list]:
    """A row vector x with x @ m = b, or None when b is outside the row span."""
    ctx = m.ctx
    braw = [e.raw if isinstance(e, RingElt) else ctx.normalize(e) for e in b]
    x = solve_left_raw(ctx, m.row_list(), m.cols, braw)
    return None if x is None else [RingElt(ctx, e) for e in x]


def in_row_span(m: MatrixOverR, b: Sequence) -> bool:
    ctx = m.ctx
    H, _, piv = howell_raw(ctx, m.row_list(), m.cols)
    braw = [e.raw if isinstance(e, RingElt) else ctx.normalize(e) for e in b]
    rem, _ = reduce_by_howell(ctx, H, piv, braw)
    return all(ctx.is_zero(e) for e in rem)


# ---------------------------------------------------------------------------
# anticyclotomic group-ring layers R[gamma]/(gamma^(p^alpha) - 1)


@dataclass(frozen=True)
class GroupRingLayer:
    base: RingCtx
    alpha: int

    @property
    def n(self) -> int:
        return self.base.p ** self.alpha

    @property
    def size(self) -> int:
        return self.base.size ** self.n

    def zero(self):
        return (self.base.zero(),) * self.n

    def one(self):
        return (self.base.one(),) + (self.base.zero(),) * (self.n - 1)

    def gamma_power(self, k: int):
        out = [self.base.zero()] * self.n
        out[k % self.n] = self.base.one()
        return tuple(out)

    def from_base(self, x):
        return (x,) + (self.base.zero(),) * (self.n - 1)

    def add(self, x, y):
        return tuple(self.base.add(a, b) for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(self.base.sub(a, b) for a, b in zip(x, y))

    def mul(self, x, y):
        b, n = self.base, self.n
        out = [b.zero()] * n
        for i, a in enumerate(x):
            if b.is_zero(a):
                continue
            for j, c in enumerate(y):
                if not b.is_zero(c):
                    k = (i + j) % n
                    out[k] = b.add(out[k], b.mul(a, c))
        return tuple(out)

    def project(self, x, alpha: int):
        """Image under gamma -> gamma in the layer of index alpha <= self.alpha."""
        if alpha > self.alpha:
            raise ValueError("can only project to a lower layer")
        b = self.base
        m = b.p ** alpha
        out = [b.zero()] * m
        for i, a in enumerate(x):
            out[i % m] = b.add(out[i % m], a)
        return tuple(out)

    def elements(self):
        import itertools

        return [tuple(t) for t in itertools.product(self.base.elements(), repeat=self.n)]


def group_ring_layer(ctx: RingCtx, alpha: int):
    """The ring R[gamma]/(gamma^(p^alpha) - 1); alpha = 0 gives ctx itself."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha == 0:
        return ctx
    return GroupRingLayer(ctx, alpha)
