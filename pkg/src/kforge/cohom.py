"""First cohomology of finite groups with coefficients in free modules.

A module is a free R-module of finite rank with one invertible matrix per
group generator (acting on column vectors).  A 1-cochain is stored by its
values on the generators, flattened generator-major into a single vector of
length ngens * rank.  Cocycles are cut out by linearizing each relator
(Fox derivatives), coboundaries are the image of t -> ((s-1)t)_s, and all
quotients are computed with Howell forms from ``coeff``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .coeff import (RingCtx, howell_raw, left_kernel_raw, reduce_by_howell,
                    smith_invariants, solve_left_raw, span_size)
from .groups import (EnumeratedGroup, FinGroup, NotNormal, NotSubgroup,
                     Subgroup, coset_index, coset_reps, subgroup_from_gens)


class InvalidAction(ValueError):
    pass


class NontrivialHAction(ValueError):
    pass


class NotCyclicQuotient(ValueError):
    pass


class InconsistentConjugators(ValueError):
    pass


# ---------------------------------------------------------------------------
# raw matrices: tuples of row tuples of raw ring elements


def mat_identity(ctx: RingCtx, n: int):
    one, zero = ctx.one(), ctx.zero()
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def mat_zero(ctx: RingCtx, n: int, m: Optional[int] = None):
    m = n if m is None else m
    return tuple(tuple(ctx.zero() for _ in range(m)) for _ in range(n))


def mat_mul(ctx: RingCtx, A, B):
    if not A:
        return A
    cols = list(zip(*B))
    out = []
    for row in A:
        r = []
        for col in cols:
            acc = ctx.zero()
            for a, b in zip(row, col):
                acc = ctx.add(acc, ctx.mul(a, b))
            r.append(acc)
        out.append(tuple(r))
    return tuple(out)


def mat_vec(ctx: RingCtx, A, v):
    out = []
    for row in A:
        acc = ctx.zero()
        for a, b in zip(row, v):
            acc = ctx.add(acc, ctx.mul(a, b))
        out.append(acc)
    return tuple(out)


def mat_add(ctx: RingCtx, A, B):
    return tuple(tuple(ctx.add(a, b) for a, b in zip(r, s)) for r, s in zip(A, B))


def mat_sub(ctx: RingCtx, A, B):
    return tuple(tuple(ctx.sub(a, b) for a, b in zip(r, s)) for r, s in zip(A, B))


def mat_scale(ctx: RingCtx, c, A):
    return tuple(tuple(ctx.mul(c, a) for a in r) for r in A)


def mat_normalize(ctx: RingCtx, A):
    return tuple(tuple(ctx.normalize(a) for a in r) for r in A)


def mat_inverse(ctx: RingCtx, A):
    """Gauss-Jordan with unit pivots; raises ZeroDivisionError if singular mod p."""
    n = len(A)
    M = [list(r) + list(e) for r, e in zip(A, mat_identity(ctx, n))]
    for j in range(n):
        piv = next((i for i in range(j, n) if ctx.is_unit(M[i][j])), None)
        if piv is None:
            raise ZeroDivisionError("matrix is not invertible")
        M[j], M[piv] = M[piv], M[j]
        w = ctx.inv(M[j][j])
        M[j] = [ctx.mul(w, e) for e in M[j]]
        for i in range(n):
            if i != j and not ctx.is_zero(M[i][j]):
                c = M[i][j]
                M[i] = [ctx.sub(a, ctx.mul(c, b)) for a, b in zip(M[i], M[j])]
    return tuple(tuple(r[n:]) for r in M)


def mat_pow(ctx: RingCtx, A, k: int, A_inv=None):
    if k < 0:
        A = A_inv if A_inv is not None else mat_inverse(ctx, A)
        k = -k
    out = mat_identity(ctx, len(A))
    base = A
    while k:
        if k & 1:
            out = mat_mul(ctx, out, base)
        base = mat_mul(ctx, base, base)
        k >>= 1
    return out


def kron(ctx: RingCtx, A, B):
    """Kronecker product with block index outer = B, inner = A.

    Entry ((k, c), (l, e)) = B[k][l] * A[c][e], matching the layout
    position = k * rank(A) + c used for induced modules.
    """
    ra, rb = len(A), len(B)
    out = []
    for k in range(rb):
        for c in range(ra):
            row = []
            for l in range(rb):
                for e in range(ra):
                    row.append(ctx.mul(B[k][l], A[c][e]))
            out.append(tuple(row))
    return tuple(out)


def vec_add(ctx, u, v):
    return tuple(ctx.add(a, b) for a, b in zip(u, v))


def vec_sub(ctx, u, v):
    return tuple(ctx.sub(a, b) for a, b in zip(u, v))


def vec_neg(ctx, u):
    return tuple(ctx.neg(a) for a in u)


def vec_scale(ctx, c, u):
    return tuple(ctx.mul(c, a) for a in u)


def vec_is_zero(ctx, u) -> bool:
    return all(ctx.is_zero(a) for a in u)


# ---------------------------------------------------------------------------
# modules


def _geometric(ctx: RingCtx, B, k: int, n: int):
    """(I + B + ... + B^(k-1), B^k) by doubling."""
    if k == 0:
        return mat_zero(ctx, n), mat_identity(ctx, n)
    if k % 2:
        S, P = _geometric(ctx, B, k - 1, n)
        return mat_add(ctx, S, P), mat_mul(ctx, P, B)
    S, P = _geometric(ctx, B, k // 2, n)
    return mat_add(ctx, S, mat_mul(ctx, P, S)), mat_mul(ctx, P, P)


@dataclass(frozen=True)
class H1Report:
    order: int
    invariant_factors: tuple
    z1_order: int
    b1_order: int

    def to_json(self) -> dict:
        return {"order": self.order, "invariant_factors": list(self.invariant_factors)}


class GModule:
    """A free R-module of rank ``rank`` with a G-action by matrices."""

    def __init__(self, group: FinGroup, ring: RingCtx, rank: int, action: Sequence, check: bool = True):
        self.group = group
        self.ring = ring
        self.rank = rank
        self.action = tuple(mat_normalize(ring, A) for A in action)
        if len(self.action) != group.ngens:
            raise InvalidAction("one matrix per generator is required")
        for A in self.action:
            if len(A) != rank or any(len(r) != rank for r in A):
                raise InvalidAction("action matrix has the wrong shape")
        try:
            self.action_inv = tuple(mat_inverse(ring, A) for A in self.action)
        except ZeroDivisionError:
            raise InvalidAction("action matrix is not invertible") from None
        self._mat = {group.identity(): mat_identity(ring, rank)}
        self._cache = {}
        if check:
            ident = mat_identity(ring, rank)
            for rel in group.relators():
                if self.word_mat(rel) != ident:
                    raise InvalidAction(f"relator {rel} does not act trivially")

    # -- action ------------------------------------------------------------
    def word_mat(self, w):
        ctx = self.ring
        out = mat_identity(ctx, self.rank)
        for g, e in w:
            out = mat_mul(ctx, out, mat_pow(ctx, self.action[g], e, self.action_inv[g]))
        return out

    def mat(self, g):
        m = self._mat.get(g)
        if m is None:
            m = self.word_mat(self.group.word(g))
            self._mat[g] = m
        return m

    def act(self, g, v):
        return mat_vec(self.ring, self.mat(g), v)

    def zero_vector(self):
        return tuple(self.ring.zero() for _ in range(self.rank))

    def basis_vector(self, i: int):
        return tuple(self.ring.one() if j == i else self.ring.zero() for j in range(self.rank))

    def vectors(self):
        """All elements of the module (small modules only)."""
        return [tuple(t) for t in itertools.product(self.ring.elements(), repeat=self.rank)]

    @property
    def cochain_length(self) -> int:
        return self.group.ngens * self.rank

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "ring": self.ring.header(), "rank": self.rank,
                "action": [[list(r) for r in A] for A in self.action]}

    # -- linear algebra of cochains -----------------------------------------
    def syllable(self, s: int, e: int):
        """(S, A^e) with z(s^e) = S z(s) for a cocycle z, A the matrix of s."""
        key = ("syl", s, e)
        out = self._cache.get(key)
        if out is None:
            ctx, n = self.ring, self.rank
            B = self.action[s] if e > 0 else self.action_inv[s]
            S, P = _geometric(ctx, B, abs(e), n)
            if e < 0:
                S = mat_scale(ctx, ctx.neg(ctx.one()), mat_mul(ctx, B, S))
            out = (S, P)
            self._cache[key] = out
        return out

    def _fox_blocks(self, rel):
        """Per-generator matrices C_s with z(rel) = sum_s C_s z(s)."""
        ctx = self.ring
        n = self.rank
        C = {}
        P = mat_identity(ctx, n)
        for s, e in rel:
            if e == 0:
                continue
            S, Pe = self.syllable(s, e)
            C[s] = mat_add(ctx, C.get(s, mat_zero(ctx, n)), mat_mul(ctx, P, S))
            P = mat_mul(ctx, P, Pe)
        return C

    def fox_matrix(self):
        """Rows indexed by (generator, coordinate), columns by (relator, coordinate)."""
        if "fox" not in self._cache:
            ctx, n, k = self.ring, self.rank, self.group.ngens
            rels = self.group.relators()
            rows = [[ctx.zero()] * (len(rels) * n) for _ in range(k * n)]
            for ri, rel in enumerate(rels):
                for s, Cs in self._fox_blocks(rel).items():
                    for j in range(n):
                        row = rows[s * n + j]
                        for c in range(n):
                            row[ri * n + c] = ctx.add(row[ri * n + c], Cs[c][j])
            self._cache["fox"] = rows
        return self._cache["fox"]

    def z1(self):
        """Howell basis (rows, pivots) of the cocycle module Z^1."""
        if "z1" not in self._cache:
            ctx = self.ring
            m = self.cochain_length
            F = self.fox_matrix()
            ncols = len(F[0]) if F else 0
            if m == 0:
                K = []
            elif ncols == 0:
                K = [list(r) for r in mat_identity(ctx, m)]
            else:
                K = left_kernel_raw(ctx, F, ncols)
            H, _, piv = howell_raw(ctx, K, m)
            self._cache["z1"] = (H, piv)
        return self._cache["z1"]

    def b1_generators(self):
        ctx, n = self.ring, self.rank
        ident = mat_identity(ctx, n)
        rows = []
        for c in range(n):
            e = self.basis_vector(c)
            row = []
            for A in self.action:
                row.extend(mat_vec(ctx, mat_sub(ctx, A, ident), e))
            rows.append(row)
        return rows

    def b1(self):
        """Howell basis of the coboundary module B^1, with the transform."""
        if "b1" not in self._cache:
            ctx, n = self.ring, self.rank
            rows = self.b1_generators()
            H, U, piv = howell_raw(ctx, rows, self.cochain_length, track=[list(r) for r in mat_identity(ctx, n)])
            self._cache["b1"] = (H, U, piv)
        return self._cache["b1"]

    def h1(self) -> H1Report:
        if "h1" not in self._cache:
            ctx = self.ring
            ZH, Zp = self.z1()
            BH, _, Bp = self.b1()
            zo, bo = span_size(ctx, Zp), span_size(ctx, Bp)
            k = len(ZH)
            if k == 0:
                inv = ()
            else:
                stacked = [list(r) for r in ZH] + [list(r) for r in BH]
                rel = left_kernel_raw(ctx, stacked, self.cochain_length)
                rel = [r[:k] for r in rel]
                inv = tuple(f for f in smith_invariants(ctx, rel, k) if f > 1)
            self._cache["h1"] = H1Report(zo // bo, inv, zo, bo)
        return self._cache["h1"]

    def h0(self):
        """Howell basis of the invariants T^G (rows are vectors of T)."""
        ctx, n = self.ring, self.rank
        ident = mat_identity(ctx, n)
        k = self.group.ngens
        if k == 0:
            return howell_raw(ctx, [list(r) for r in ident], n)[::2]
        rows = [[ctx.zero()] * (k * n) for _ in range(n)]
        for s, A in enumerate(self.action):
            D = mat_sub(ctx, A, ident)
            for j in range(n):
                for c in range(n):
                    rows[j][s * n + c] = D[c][j]
        K = left_kernel_raw(ctx, rows, k * n)
        H, _, piv = howell_raw(ctx, K, n)
        return H, piv

    def h0_order(self) -> int:
        _, piv = self.h0()
        return span_size(self.ring, piv)

    def canonical(self, vec):
        BH, _, Bp = self.b1()
        rem, _ = reduce_by_howell(self.ring, BH, Bp, list(vec))
        return tuple(rem)

    def in_z1(self, vec) -> bool:
        ZH, Zp = self.z1()
        rem, _ = reduce_by_howell(self.ring, ZH, Zp, list(vec))
        return vec_is_zero(self.ring, rem)

    def coboundary_preimage(self, vec):
        """Some t with ((s-1)t)_s = vec, or None."""
        return solve_left_raw(self.ring, self.b1_generators(), self.cochain_length, list(vec))

    # -- constructors -------------------------------------------------------
    def cocycle(self, values, check: bool = True) -> "Cocycle":
        flat = []
        for v in values:
            if len(v) != self.rank:
                raise ValueError("generator value has the wrong length")
            flat.extend(self.ring.normalize(a) for a in v)
        z = Cocycle(self, tuple(flat))
        if check and not z.is_cocycle():
            raise ValueError("values do not satisfy the cocycle relations")
        return z

    def from_flat(self, flat, check: bool = False) -> "Cocycle":
        z = Cocycle(self, tuple(self.ring.normalize(a) for a in flat))
        if check and not z.is_cocycle():
            raise ValueError("values do not satisfy the cocycle relations")
        return z

    def zero_cocycle(self) -> "Cocycle":
        return Cocycle(self, tuple(self.ring.zero() for _ in range(self.cochain_length)))

    def coboundary(self, t) -> "Cocycle":
        """The cocycle g -> (g - 1) t."""
        ctx = self.ring
        flat = []
        for A in self.action:
            flat.extend(vec_sub(ctx, mat_vec(ctx, A, t), t))
        return Cocycle(self, tuple(flat))

    def cocycle_basis(self) -> list:
        ZH, _ = self.z1()
        return [Cocycle(self, tuple(r)) for r in ZH]

    def random_cocycle(self, rng) -> "Cocycle":
        ctx = self.ring
        ZH, _ = self.z1()
        flat = tuple(ctx.zero() for _ in range(self.cochain_length))
        for r in ZH:
            c = ctx.normalize(rng.randrange(ctx.q)) if ctx.d == 1 else \
                ctx.normalize([rng.randrange(ctx.q) for _ in range(ctx.d)])
            flat = vec_add(ctx, flat, vec_scale(ctx, c, r))
        return Cocycle(self, flat)

    def z1_elements(self) -> list:
        """Every cocycle, as flat vectors (small cases only)."""
        ctx = self.ring
        ZH, Zp = self.z1()
        ranges = []
        for _, v in Zp:
            bound = ctx.p ** (ctx.N - v)
            if ctx.d == 1:
                ranges.append(range(bound))
            else:
                ranges.append([c for c in ctx.elements() if all(x < bound for x in c)])
        out = set()
        zero = tuple(ctx.zero() for _ in range(self.cochain_length))
        for coeffs in itertools.product(*ranges):
            acc = zero
            for c, r in zip(coeffs, ZH):
                acc = vec_add(ctx, acc, vec_scale(ctx, ctx.normalize(c), r))
            out.add(acc)
        return sorted(out)

    def restrict(self, sub: Subgroup) -> "GModule":
        key = ("res", id(sub))
        if key not in self._cache:
            if sub.ambient is not self.group and sub.ambient != self.group:
                raise NotSubgroup("subgroup is not inside the acting group")
            mats = [self.mat(x) for x in sub.gen_images()]
            self._cache[key] = (sub, GModule(sub.group, self.ring, self.rank, mats, check=False))
        return self._cache[key][1]

    def h1_class(self, z: "Cocycle") -> "H1Class":
        return H1Class(self, self.canonical(z.values))


@dataclass(frozen=True, eq=False)
class Cocycle:
    module: GModule
    values: tuple  # flat, generator-major
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ring(self) -> RingCtx:
        return self.module.ring

    def gen_value(self, i: int):
        n = self.module.rank
        return self.values[i * n:(i + 1) * n]

    def gen_values(self) -> list:
        return [self.gen_value(i) for i in range(self.module.group.ngens)]

    def eval_word(self, w):
        ctx = self.ring
        T = self.module
        P = mat_identity(ctx, T.rank)
        acc = T.zero_vector()
        for s, e in w:
            if e == 0:
                continue
            S, Pe = T.syllable(s, e)
            acc = vec_add(ctx, acc, mat_vec(ctx, mat_mul(ctx, P, S), self.gen_value(s)))
            P = mat_mul(ctx, P, Pe)
        return acc

    def __call__(self, g):
        v = self._memo.get(g)
        if v is None:
            v = self.eval_word(self.module.group.word(g))
            self._memo[g] = v
        return v

    def is_cocycle(self) -> bool:
        return self.module.in_z1(self.values)

    def check_identity_exhaustive(self) -> bool:
        """z(gh) = z(g) + g z(h) for all pairs (small groups only)."""
        G, T, ctx = self.module.group, self.module, self.ring
        els = G.elements()
        for g in els:
            for h in els:
                if self(G.mul(g, h)) != vec_add(ctx, self(g), T.act(g, self(h))):
                    return False
        return True

    def _same(self, o):
        if o.module is not self.module:
            raise ValueError("cocycles live on different modules")

    def __add__(self, o):
        self._same(o)
        return Cocycle(self.module, vec_add(self.ring, self.values, o.values))

    def __sub__(self, o):
        self._same(o)
        return Cocycle(self.module, vec_sub(self.ring, self.values, o.values))

    def __neg__(self):
        return Cocycle(self.module, vec_neg(self.ring, self.values))

    def scale(self, c) -> "Cocycle":
        c = self.ring.from_int(c) if isinstance(c, int) else c
        return Cocycle(self.module, vec_scale(self.ring, c, self.values))

    def map_values(self, A) -> "Cocycle":
        """Apply a module endomorphism (matrix) to every value; caller ensures equivariance."""
        ctx, n = self.ring, self.module.rank
        flat = []
        for v in self.gen_values():
            flat.extend(mat_vec(ctx, A, v))
        return Cocycle(self.module, tuple(flat))

    def is_zero(self) -> bool:
        return vec_is_zero(self.ring, self.values)

    def cls(self) -> "H1Class":
        return self.module.h1_class(self)

    def to_json(self) -> dict:
        n = self.module.rank
        return {"group": self.module.group.to_json(), "ring": self.ring.header(),
                "generator_values": [list(self.gen_value(i)) for i in range(self.module.group.ngens)]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True, eq=False)
class H1Class:
    module: GModule
    rep: tuple  # canonical flat representative

    def __eq__(self, o):
        return isinstance(o, H1Class) and o.module is self.module and o.rep == self.rep

    def __hash__(self):
        return hash(self.rep)

    def is_zero(self) -> bool:
        return vec_is_zero(self.module.ring, self.rep)

    def cocycle(self) -> Cocycle:
        return Cocycle(self.module, self.rep)


def same_class(a: Cocycle, b: Cocycle) -> bool:
    a._same(b)
    return vec_is_zero(a.ring, a.module.canonical((a - b).values))


def h1(G: FinGroup, T: GModule) -> H1Report:
    if T.group is not G and T.group != G:
        raise InvalidAction("module is not over this group")
    return T.h1()


# ---------------------------------------------------------------------------
# maps between groups


def pullback(z: Cocycle, target: GModule, hom) -> Cocycle:
    """Cocycle on target.group with values z(hom(gen)); hom must be compatible with the actions."""
    flat = []
    for g in target.group.gens():
        flat.extend(z(hom(g)))
    return Cocycle(target, tuple(flat))


def res(z: Cocycle, sub: Subgroup) -> Cocycle:
    """Restriction to a subgroup of z.module.group."""
    T = z.module
    if sub.ambient is not T.group and sub.ambient != T.group:
        raise NotSubgroup("subgroup is not inside the group of the cocycle")
    return pullback(z, T.restrict(sub), sub.embed)


def cor(z: Cocycle, T: GModule, sub: Subgroup, reps: Optional[Sequence] = None) -> Cocycle:
    """Transfer from sub to T.group over left coset representatives.

    With g r_i = r_j h, the value at g is the sum of r_j . z(h).
    """
    G, ctx = T.group, T.ring
    if sub.ambient is not G and sub.ambient != G:
        raise NotSubgroup("subgroup is not inside the acting group")
    reps = list(reps) if reps is not None else coset_reps(G, sub)
    if len(reps) * sub.group.order() != G.order():
        raise NotSubgroup("coset representatives do not match the index")
    flat = []
    for g in G.gens():
        acc = T.zero_vector()
        for r in reps:
            j, h = coset_index(G, sub, reps, G.mul(g, r))
            acc = vec_add(ctx, acc, T.act(reps[j], z(sub.pullback(h))))
        flat.extend(acc)
    return Cocycle(T, tuple(flat))


def cyclic_position(G: FinGroup, sub: Subgroup, lift, M: int, g) -> tuple:
    """(k, h) with g = lift^k h, 0 <= k < M, h in sub (ambient element)."""
    x = g
    li = G.inv(lift)
    for k in range(M):
        if sub.contains(x):
            return k, x
        x = G.mul(li, x)
    raise NotCyclicQuotient("element is not in any lift^k coset")


def check_cyclic_quotient(G: FinGroup, sub: Subgroup, lift, M: int) -> None:
    if sub.index() != M:
        raise NotCyclicQuotient(f"index {sub.index()} differs from {M}")
    if not sub.is_normal():
        raise NotCyclicQuotient("subgroup is not normal")
    x = G.identity()
    for k in range(1, M):
        x = G.mul(x, lift)
        if sub.contains(x):
            raise NotCyclicQuotient("lift has order smaller than the index")
    if not sub.contains(G.mul(x, lift)):
        raise NotCyclicQuotient("lift^M is not in the subgroup")


def cor_cyclic_map(TH: GModule, T: GModule, sub: Subgroup, lift, M: int) -> list:
    """Corestriction along a cyclic quotient as a linear map on cochains.

    Returns, per generator g of G, a dict s -> matrix B with
    (Cor z)(g) = sum_s B z(s) over the generators s of the subgroup.
    Representatives are lift^i: the value at lift is z(lift^M), the value at
    h in sub is sum_{i<M} lift^i z(lift^-i h lift^i), and other generators
    are reached through g = lift^k h.
    """
    key = ("cormap", id(T), sub.name, lift, M)
    if key in TH._cache:
        return TH._cache[key]
    G, ctx, n = T.group, T.ring, T.rank
    check_cyclic_quotient(G, sub, lift, M)
    zero = mat_zero(ctx, n)

    def add_into(acc, blocks, A):
        for s, B in blocks.items():
            acc[s] = mat_add(ctx, acc.get(s, zero), mat_mul(ctx, A, B))

    def lin(h):
        return TH._fox_blocks(TH.group.word(sub.pullback(h)))

    c_sigma = lin(G.power(lift, M))
    li = G.inv(lift)
    out = []
    for g in G.gens():
        k, h = cyclic_position(G, sub, lift, M, g)
        acc = {}
        pw = G.identity()
        for _ in range(k):
            add_into(acc, c_sigma, T.mat(pw))
            pw = G.mul(pw, lift)
        conj, inner = h, G.identity()
        for _ in range(M):
            add_into(acc, lin(conj), T.mat(G.mul(pw, inner)))
            conj = G.mul(G.mul(li, conj), lift)
            inner = G.mul(inner, lift)
        out.append(acc)
    TH._cache[key] = out
    return out


def cor_cyclic(z: Cocycle, T: GModule, sub: Subgroup, lift, M: int) -> Cocycle:
    """Corestriction along a cyclic quotient with representatives lift^i (see cor_cyclic_map)."""
    ctx = T.ring
    flat = []
    for blocks in cor_cyclic_map(z.module, T, sub, lift, M):
        acc = T.zero_vector()
        for s, B in blocks.items():
            acc = vec_add(ctx, acc, mat_vec(ctx, B, z.gen_value(s)))
        flat.extend(acc)
    return Cocycle(T, tuple(flat))


def inflate(c: Cocycle, G: FinGroup, qmap, kernel: Optional[Subgroup] = None,
            module: Optional[GModule] = None) -> Cocycle:
    """Pull a cocycle on a quotient Q back along q: G -> Q.

    If a G-module is supplied it must act through q; a supplied kernel must
    be normal and act trivially.
    """
    TQ = c.module
    if kernel is not None:
        if not kernel.is_normal():
            raise NotNormal("kernel is not normal")
        if module is not None:
            ident = mat_identity(TQ.ring, TQ.rank)
            for x in kernel.gen_images():
                if module.mat(x) != ident:
                    raise NontrivialHAction("kernel acts nontrivially on the module")
    if module is None:
        module = GModule(G, TQ.ring, TQ.rank, [TQ.mat(qmap(g)) for g in G.gens()], check=False)
    else:
        for g in G.gens():
            if module.mat(g) != TQ.mat(qmap(g)):
                raise NontrivialHAction("module does not act through the quotient")
    return pullback(c, module, qmap)


def conj_action(T: GModule, sub: Subgroup, g, z: Cocycle, check_normal: bool = True) -> Cocycle:
    """(g . z)(h) = g z(g^-1 h g) for z on a normal subgroup of T.group."""
    G = T.group
    if check_normal and not sub.is_normal():
        raise NotNormal("subgroup is not normal")
    gi = G.inv(g)
    flat = []
    for x in sub.gen_images():
        flat.extend(T.act(g, z(sub.pullback(G.conj(gi, x)))))
    return Cocycle(T.restrict(sub), tuple(flat))


def transport(T: GModule, source: Subgroup, target: Subgroup, g, z: Cocycle) -> Cocycle:
    """g_* z on target = g source g^-1:  (g_* z)(d) = g z(g^-1 d g)."""
    G = T.group
    gi = G.inv(g)
    flat = []
    for x in target.gen_images():
        y = G.conj(gi, x)
        h = source.pullback(y)
        if h is None:
            raise InconsistentConjugators("conjugate does not land in the source subgroup")
        flat.extend(T.act(g, z(h)))
    return Cocycle(T.restrict(target), tuple(flat))


# ---------------------------------------------------------------------------
# subgroups from element sets


def subgroup_of_elements(G: FinGroup, elems, name: str = "") -> Subgroup:
    """Subgroup with the given element set, generated by a greedy small generating set."""
    target = set(elems)
    gens = []
    span = {G.identity()}
    for x in sorted(target):
        if x in span:
            continue
        gens.append(x)
        span = set(EnumeratedGroup(G, gens)._elems)
    if span != target:
        raise NotSubgroup("element set is not closed")
    return subgroup_from_gens(G, gens, name)


def subgroup_elements(sub: Subgroup) -> list:
    return [sub.embed(h) for h in sub.group.elements()]


def conjugate_subgroup(G: FinGroup, D: Subgroup, s, name: str = "") -> Subgroup:
    """s^-1 D s."""
    si = G.inv(s)
    return subgroup_of_elements(G, [G.mul(G.mul(si, x), s) for x in subgroup_elements(D)], name)


def intersect(G: FinGroup, A: Subgroup, B: Subgroup, name: str = "") -> Subgroup:
    return subgroup_of_elements(G, [x for x in subgroup_elements(A) if B.contains(x)], name)


def relative_subgroup(outer: Subgroup, inner: Subgroup) -> Subgroup:
    """inner (a subgroup of the ambient group, contained in outer) as a subgroup of outer.group."""
    imgs = []
    for x in inner.gen_images():
        y = outer.pullback(x)
        if y is None:
            raise NotSubgroup("inner subgroup is not contained in outer")
        imgs.append(y)
    return subgroup_from_gens(outer.group, imgs, inner.name)


# ---------------------------------------------------------------------------
# Shapiro isomorphism for a cyclic quotient of order n


@dataclass
class InducedModule:
    """T tensor R[G/G_a] with G/G_a cyclic of order n, generated by the image of ``lift``.

    Coordinates are ordered position = k * rank + c for t_c tensor [lift^k].
    """

    base: GModule
    sub: Subgroup
    lift: object
    n: int
    module: GModule

    def position(self, g) -> int:
        return cyclic_position(self.base.group, self.sub, self.lift, self.n, g)[0]

    def iota0(self, v):
        ctx = self.base.ring
        return tuple(v) + tuple(ctx.zero() for _ in range(self.base.rank * (self.n - 1)))

    def pr0(self, w):
        return tuple(w[:self.base.rank])

    def to_layer(self, w) -> tuple:
        """Coordinates as R[Z/n]-vectors: one tuple per T-coordinate."""
        r = self.base.rank
        return tuple(tuple(w[k * r + c] for k in range(self.n)) for c in range(r))

    def from_layer(self, comps) -> tuple:
        r = self.base.rank
        out = [None] * (r * self.n)
        for c in range(r):
            for k in range(self.n):
                out[k * r + c] = comps[c][k]
        return tuple(out)

    def project(self, w, m: int) -> tuple:
        """Image in the induced module of index m | n (same lift)."""
        if self.n % m:
            raise ValueError("target index must divide the source index")
        ctx, r = self.base.ring, self.base.rank
        out = [ctx.zero()] * (r * m)
        for k in range(self.n):
            for c in range(r):
                i = (k % m) * r + c
                out[i] = ctx.add(out[i], w[k * r + c])
        return tuple(out)


def induced_module(T: GModule, sub: Subgroup, lift, n: Optional[int] = None) -> InducedModule:
    G, ctx = T.group, T.ring
    n = sub.index() if n is None else n
    check_cyclic_quotient(G, sub, lift, n)
    mats = []
    for g in G.gens():
        k = cyclic_position(G, sub, lift, n, g)[0]
        S = tuple(tuple(ctx.one() if i == (j + k) % n else ctx.zero() for j in range(n)) for i in range(n))
        mats.append(kron(ctx, T.mat(g), S))
    W = GModule(G, ctx, T.rank * n, mats, check=False)
    return InducedModule(T, sub, lift, n, W)


def shapiro(y: Cocycle, ind: InducedModule) -> Cocycle:
    """H^1(G_a, T) -> H^1(G, T tensor R[G/G_a]) as Cor of t -> t tensor [1]."""
    W = ind.module
    Wsub = W.restrict(ind.sub)
    flat = []
    for i in range(Wsub.group.ngens):
        flat.extend(ind.iota0(y.gen_value(i)))
    return cor(Cocycle(Wsub, tuple(flat)), W, ind.sub)


def shapiro_inverse(w: Cocycle, ind: InducedModule) -> Cocycle:
    """Restrict to G_a and project to the [1]-component."""
    r = res(w, ind.sub)
    Tsub = ind.base.restrict(ind.sub)
    flat = []
    for i in range(Tsub.group.ngens):
        flat.extend(ind.pr0(r.gen_value(i)))
    return Cocycle(Tsub, tuple(flat))


# ---------------------------------------------------------------------------
# semi-local maps


@dataclass
class Place:
    conjugator: object
    decomposition: Subgroup  # D_w = s^-1 D s
    local: Subgroup          # D_w intersected with the normal subgroup


@dataclass
class SemiLocalData:
    """Places above v of the fixed field of a normal subgroup N of G.

    Places correspond to double cosets D s N; each is given by a conjugator s
    with decomposition group s^-1 D s.
    """

    G: FinGroup
    normal: Subgroup
    D: Subgroup
    places: list

    def double_coset(self, s) -> frozenset:
        G = self.G
        return frozenset(G.mul(G.mul(d, s), n) for d in subgroup_elements(self.D)
                         for n in subgroup_elements(self.normal))


def semilocal_data(G: FinGroup, normal: Subgroup, D: Subgroup, conjugators: Sequence) -> SemiLocalData:
    seen = set()
    data = SemiLocalData(G, normal, D, [])
    for s in conjugators:
        dc = data.double_coset(s)
        if seen & dc:
            raise InconsistentConjugators("two conjugators lie in the same double coset")
        seen |= dc
        Dw = conjugate_subgroup(G, D, s, "D_w")
        data.places.append(Place(s, Dw, intersect(G, Dw, normal, "D_w^N")))
    if len(seen) != G.order():
        raise InconsistentConjugators("conjugators miss some double coset")
    return data


def semilocal_localize(z: Cocycle, T: GModule, data: SemiLocalData) -> list:
    """Components Res_{D_w cap N} of a cocycle on the normal subgroup N."""
    out = []
    for pl in data.places:
        inner = relative_subgroup(data.normal, pl.local)
        comp = pullback(z, T.restrict(pl.local), lambda h, inner=inner: inner.embed(h))
        out.append(comp)
    return out


def semilocal_act(sigma, comps: Sequence, T: GModule, data: SemiLocalData) -> list:
    """Action of sigma on a tuple of local components.

    Component w of the result comes from the component w' with
    s_w' = d s_w sigma n (d in D, n in N), transported by sigma n.
    """
    G = data.G
    Delts = subgroup_elements(data.D)
    out = []
    for pl in data.places:
        base = G.mul(pl.conjugator, sigma)
        found = None
        for j, pl2 in enumerate(data.places):
            for d in Delts:
                n = G.mul(G.inv(base), G.mul(G.inv(d), pl2.conjugator))
                if data.normal.contains(n):
                    found = (j, G.mul(sigma, n))
                    break
            if found:
                break
        if found is None:
            raise InconsistentConjugators("no matching place")
        j, g = found
        out.append(transport(T, data.places[j].local, pl.local, g, comps[j]))
    return out


def components_equal(a: Sequence, b: Sequence) -> bool:
    return len(a) == len(b) and all(same_class(x, y) for x, y in zip(a, b))


def split_corestriction(z: Cocycle, T: GModule, data: SemiLocalData) -> tuple:
    """(Res_D Cor z, sum_w s_w* loc_w z) as cocycles on D; equal in H^1 when D lies in N."""
    lhs = res(cor(z, T, data.normal), data.D)
    comps = semilocal_localize(z, T, data)
    acc = T.restrict(data.D).zero_cocycle()
    for pl, comp in zip(data.places, comps):
        acc = acc + transport(T, pl.local, data.D, pl.conjugator, comp)
    return lhs, acc


def semilocal_shapiro(comps: Sequence, ind: InducedModule, data: SemiLocalData) -> Cocycle:
    """sum_w Cor_{D cap N}^D (s_w * iota0 comp_w), a cocycle on D with values in the induced module."""
    W = ind.module
    G = data.G
    WD = W.restrict(data.D)
    DN = intersect(G, data.D, data.normal, "D^N")
    DN_rel = relative_subgroup(data.D, DN)
    WDN = WD.restrict(DN_rel)
    acc = WD.zero_cocycle()
    for pl, comp in zip(data.places, comps):
        s, si = pl.conjugator, G.inv(pl.conjugator)
        flat = []
        for x in DN_rel.gen_images():
            amb = data.D.embed(x)
            h = pl.local.pullback(G.conj(si, amb))
            flat.extend(W.act(s, ind.iota0(comp(h))))
        moved = Cocycle(WDN, tuple(flat))
        acc = acc + cor(moved, WD, DN_rel)
    return acc
