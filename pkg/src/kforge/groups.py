"""Finite groups with normal forms and explicit presentations.

Every group exposes generators, relator words and a normal-form word for each
element.  A word is a tuple of (generator index, exponent) syllables.  The
cohomology engine only ever talks to groups through this interface, which is
why every family must also supply a finite presentation.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence


class BadTwist(ValueError):
    pass


class NotSubgroup(ValueError):
    pass


class NotNormal(ValueError):
    pass


Word = tuple  # tuple[(gen, exp), ...]


def invert_word(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


def shift_word(w: Word, k: int) -> Word:
    return tuple((g + k, e) for g, e in w)


def compress(w) -> Word:
    out = []
    for g, e in w:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            ne = out[-1][1] + e
            out.pop()
            if ne:
                out.append((g, ne))
        else:
            out.append((g, e))
    return tuple(out)


class FinGroup:
    family = "abstract"

    @property
    def params(self) -> dict:
        return {}

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def gens(self) -> list:
        raise NotImplementedError

    def relators(self) -> list:
        raise NotImplementedError

    def word(self, g) -> Word:
        raise NotImplementedError

    def order(self) -> int:
        raise NotImplementedError

    @property
    def ngens(self) -> int:
        return len(self.gens())

    def power(self, g, k: int):
        if k < 0:
            g, k = self.inv(g), -k
        out = self.identity()
        base = g
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def eval_word(self, w: Word):
        gens = self.gens()
        out = self.identity()
        for g, e in w:
            out = self.mul(out, self.power(gens[g], e))
        return out

    def conj(self, g, h):
        """g h g^-1."""
        return self.mul(self.mul(g, h), self.inv(g))

    def elements(self) -> list:
        """All elements in sorted normal-form order (small groups only)."""
        if getattr(self, "_elements", None) is None:
            seen = {self.identity()}
            frontier = [self.identity()]
            gens = self.gens()
            while frontier:
                nxt = []
                for x in frontier:
                    for s in gens:
                        y = self.mul(x, s)
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
                frontier = nxt
            self._elements = sorted(seen)
        return self._elements

    def element_order(self, g) -> int:
        k, x = 1, g
        e = self.identity()
        while x != e:
            x = self.mul(x, g)
            k += 1
        return k

    def to_json(self) -> dict:
        return {"family": self.family, "params": self.params}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __eq__(self, other):
        return type(self) is type(other) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.dumps())

    def __repr__(self):
        return f"{self.family}({self.params})"


class Cyclic(FinGroup):
    family = "Cyclic"

    def __init__(self, M: int):
        if M < 1:
            raise ValueError("order must be positive")
        self.M = M

    @property
    def params(self):
        return {"M": self.M}

    def identity(self):
        return (0,)

    def mul(self, a, b):
        return ((a[0] + b[0]) % self.M,)

    def inv(self, a):
        return ((-a[0]) % self.M,)

    def gens(self):
        return [(1 % self.M,)]

    def relators(self):
        return [((0, self.M),)]

    def word(self, g):
        return ((0, g[0]),) if g[0] else ()

    def order(self):
        return self.M


class Abelian(FinGroup):
    """Product of cyclic groups Z/n_1 x ... x Z/n_k."""

    family = "Abelian"

    def __init__(self, orders: Sequence[int]):
        self.orders = tuple(int(n) for n in orders)

    @property
    def params(self):
        return {"orders": list(self.orders)}

    def identity(self):
        return (0,) * len(self.orders)

    def mul(self, a, b):
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def inv(self, a):
        return tuple((-x) % n for x, n in zip(a, self.orders))

    def gens(self):
        k = len(self.orders)
        return [tuple((1 % self.orders[i]) if i == j else 0 for j in range(k)) for i in range(k)]

    def relators(self):
        k = len(self.orders)
        rels = [((i, n),) for i, n in enumerate(self.orders)]
        for i in range(k):
            for j in range(i + 1, k):
                rels.append(((i, 1), (j, 1), (i, -1), (j, -1)))
        return rels

    def word(self, g):
        return tuple((i, e) for i, e in enumerate(g) if e)

    def order(self):
        out = 1
        for n in self.orders:
            out *= n
        return out


class Metacyclic(FinGroup):
    """<tau, f | tau^a = f^b = 1, f tau f^-1 = tau^r>, normal form tau^i f^j."""

    family = "Metacyclic"

    def __init__(self, a: int, b: int, r: int):
        if a < 1 or b < 1:
            raise ValueError("a, b must be positive")
        r %= a
        if pow(r, b, a) != 1 % a:
            raise BadTwist(f"{r}^{b} is not 1 mod {a}")
        if a > 1 and pow(r, 1, a) == 0:
            raise BadTwist("twist must be a unit")
        self.a, self.b, self.r = a, b, r
        self._rpow = [pow(r, j, a) for j in range(b)]

    @property
    def params(self):
        return {"a": self.a, "b": self.b, "r": self.r}

    def identity(self):
        return (0, 0)

    def mul(self, x, y):
        i, j = x
        k, l = y
        return ((i + k * self._rpow[j]) % self.a, (j + l) % self.b)

    def inv(self, x):
        i, j = x
        jj = (-j) % self.b
        return ((-i * self._rpow[jj]) % self.a, jj)

    def gens(self):
        return [(1 % self.a, 0), (0, 1 % self.b)]

    def relators(self):
        return [((0, self.a),), ((1, self.b),),
                ((1, 1), (0, 1), (1, -1), (0, -self.r))]

    def word(self, g):
        w = []
        if g[0]:
            w.append((0, g[0]))
        if g[1]:
            w.append((1, g[1]))
        return tuple(w)

    def order(self):
        return self.a * self.b


class Dihedral(Metacyclic):
    """Dihedral group of order 2M, generated by sigma and an involution c."""

    family = "Dihedral"

    def __init__(self, M: int):
        super().__init__(M, 2, M - 1)
        self.M = M

    @property
    def params(self):
        return {"M": self.M}


def metacyclic(a: int, b: int, r: int) -> Metacyclic:
    return Metacyclic(a, b, r)


def _matvec_mod(m, v, orders):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) % orders[i] for i in range(len(v)))


def _matmul_int(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


class SemidirectAbelian(FinGroup):
    """A x| Q with A = prod Z/n_i abelian and Q acting by integer matrices.

    ``action[k]`` is the matrix of the k-th generator of Q acting on column
    vectors of A.  Elements are pairs (a, q) standing for a * q.
    """

    family = "SemidirectAbelian"

    def __init__(self, orders: Sequence[int], Q: FinGroup, action: Sequence):
        self.orders = tuple(int(n) for n in orders)
        self.Q = Q
        self.action = [tuple(tuple(int(x) for x in row) for row in m) for m in action]
        if len(self.action) != Q.ngens:
            raise ValueError("one matrix per generator of Q is required")
        self._rho_cache = {}
        k = len(self.orders)
        ident = tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))
        self._ident = ident
        for rel in Q.relators():
            m = self._word_matrix(rel)
            if not self._is_identity_on_A(m):
                raise BadTwist("action does not respect the relations of Q")

    @property
    def params(self):
        return {"orders": list(self.orders), "Q": self.Q.to_json(),
                "action": [[list(r) for r in m] for m in self.action]}

    def _reduce_mat(self, m):
        return tuple(tuple(x % self.orders[i] for x in row) for i, row in enumerate(m))

    def _is_identity_on_A(self, m) -> bool:
        for j in range(len(self.orders)):
            col = tuple(1 if i == j else 0 for i in range(len(self.orders)))
            if _matvec_mod(m, col, self.orders) != col:
                return False
        return True

    def _gen_inverse(self, k):
        qg = self.Q.gens()[k]
        return self.rho(self.Q.inv(qg))

    def _word_matrix(self, w):
        m = self._ident
        for g, e in w:
            if e >= 0:
                base = self.action[g]
            else:
                base = self._gen_inverse(g)
            for _ in range(abs(e)):
                m = self._reduce_mat(_matmul_int(m, base))
        return m

    def rho(self, q):
        m = self._rho_cache.get(q)
        if m is None:
            m = self._ident
            for g, e in self.Q.word(q):
                for _ in range(e):
                    m = self._reduce_mat(_matmul_int(m, self.action[g]))
            self._rho_cache[q] = m
        return m

    def identity(self):
        return ((0,) * len(self.orders), self.Q.identity())

    def mul(self, x, y):
        a, q = x
        b, q2 = y
        rb = _matvec_mod(self.rho(q), b, self.orders)
        return (tuple((u + v) % n for u, v, n in zip(a, rb, self.orders)), self.Q.mul(q, q2))

    def inv(self, x):
        a, q = x
        qi = self.Q.inv(q)
        ra = _matvec_mod(self.rho(qi), a, self.orders)
        return (tuple((-u) % n for u, n in zip(ra, self.orders)), qi)

    def gens(self):
        k = len(self.orders)
        out = [(tuple(1 if i == j else 0 for j in range(k)), self.Q.identity()) for i in range(k)]
        out += [((0,) * k, g) for g in self.Q.gens()]
        return out

    def relators(self):
        k = len(self.orders)
        rels = [((i, n),) for i, n in enumerate(self.orders)]
        for i in range(k):
            for j in range(i + 1, k):
                rels.append(((i, 1), (j, 1), (i, -1), (j, -1)))
        rels += [shift_word(r, k) for r in self.Q.relators()]
        for s, m in enumerate(self.action):
            for i in range(k):
                img = tuple((j, m[j][i] % self.orders[j]) for j in range(k) if m[j][i] % self.orders[j])
                rels.append(((k + s, 1), (i, 1), (k + s, -1)) + invert_word(img))
        return rels

    def word(self, g):
        a, q = g
        k = len(self.orders)
        return tuple((i, e) for i, e in enumerate(a) if e) + shift_word(self.Q.word(q), k)

    def order(self):
        out = self.Q.order()
        for n in self.orders:
            out *= n
        return out


class Product(FinGroup):
    family = "Product"

    def __init__(self, factors: Sequence[FinGroup]):
        self.factors = list(factors)
        self._offsets = []
        k = 0
        for f in self.factors:
            self._offsets.append(k)
            k += f.ngens

    @property
    def params(self):
        return {"factors": [f.to_json() for f in self.factors]}

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def inv(self, a):
        return tuple(f.inv(x) for f, x in zip(self.factors, a))

    def gens(self):
        out = []
        for i, f in enumerate(self.factors):
            for g in f.gens():
                out.append(tuple(g if j == i else h.identity() for j, h in enumerate(self.factors)))
        return out

    def relators(self):
        rels = []
        for f, off in zip(self.factors, self._offsets):
            rels += [shift_word(r, off) for r in f.relators()]
        for i, f in enumerate(self.factors):
            for j in range(i + 1, len(self.factors)):
                for a in range(f.ngens):
                    for b in range(self.factors[j].ngens):
                        x, y = self._offsets[i] + a, self._offsets[j] + b
                        rels.append(((x, 1), (y, 1), (x, -1), (y, -1)))
        return rels

    def word(self, g):
        out = ()
        for f, off, x in zip(self.factors, self._offsets, g):
            out += shift_word(f.word(x), off)
        return out

    def order(self):
        out = 1
        for f in self.factors:
            out *= f.order()
        return out


class EnumeratedGroup(FinGroup):
    """A small group given by its elements inside an ambient group.

    The presentation is the Schreier presentation read off a breadth-first
    spanning tree of the Cayley graph, so it is valid for any generating set.
    """

    family = "Enumerated"

    def __init__(self, ambient: FinGroup, gen_elements: Sequence):
        self.ambient = ambient
        self._gen_el = list(gen_elements)
        e = ambient.identity()
        index = {e: 0}
        elems = [e]
        tree = {0: ()}
        dq = deque([0])
        while dq:
            i = dq.popleft()
            for k, s in enumerate(self._gen_el):
                y = ambient.mul(elems[i], s)
                if y not in index:
                    index[y] = len(elems)
                    elems.append(y)
                    tree[index[y]] = compress(tree[i] + ((k, 1),))
                    dq.append(index[y])
        self._elems = elems
        self._index = index
        self._tree = tree

    @property
    def params(self):
        return {"ambient": self.ambient.to_json(), "gens": [list(map(_jsonable, g)) if isinstance(g, tuple) else g
                                                            for g in self._gen_el]}

    def identity(self):
        return 0

    def mul(self, a, b):
        return self._index[self.ambient.mul(self._elems[a], self._elems[b])]

    def inv(self, a):
        return self._index[self.ambient.inv(self._elems[a])]

    def gens(self):
        return [self._index[g] for g in self._gen_el]

    def relators(self):
        rels = []
        for i in range(len(self._elems)):
            for k, s in enumerate(self._gen_el):
                j = self._index[self.ambient.mul(self._elems[i], s)]
                w = compress(self._tree[i] + ((k, 1),) + invert_word(self._tree[j]))
                if w:
                    rels.append(w)
        return rels

    def word(self, g):
        return self._tree[g]

    def order(self):
        return len(self._elems)

    def to_ambient(self, g):
        return self._elems[g]

    def from_ambient(self, x):
        return self._index.get(x)


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


# ---------------------------------------------------------------------------
# subgroups


@dataclass
class Subgroup:
    """A subgroup realized as a presented group with an embedding.

    ``embed`` maps elements of ``group`` to the ambient group (an injective
    homomorphism); ``pullback`` maps ambient elements back, returning None
    outside the subgroup.
    """

    ambient: FinGroup
    group: FinGroup
    embed: Callable
    pullback: Callable
    name: str = ""

    def contains(self, x) -> bool:
        return self.pullback(x) is not None

    def gen_images(self) -> list:
        return [self.embed(g) for g in self.group.gens()]

    def index(self) -> int:
        return self.ambient.order() // self.group.order()

    def is_normal(self) -> bool:
        imgs = self.gen_images()
        for s in self.ambient.gens():
            for h in imgs:
                if not self.contains(self.ambient.conj(s, h)):
                    return False
                if not self.contains(self.ambient.conj(self.ambient.inv(s), h)):
                    return False
        return True

    def check(self) -> None:
        """Verify the embedding respects the presentation of the subgroup."""
        A = self.ambient
        imgs = self.gen_images()
        for rel in self.group.relators():
            x = A.identity()
            for g, e in rel:
                x = A.mul(x, A.power(imgs[g], e))
            if x != A.identity():
                raise NotSubgroup(f"relator {rel} does not map to the identity")
        for g, h in zip(self.group.gens(), imgs):
            if self.pullback(h) != g:
                raise NotSubgroup("pullback is not inverse to the embedding")


def subgroup_from_gens(G: FinGroup, gen_elements: Sequence, name: str = "") -> Subgroup:
    """Subgroup generated by explicit elements of a small group."""
    E = EnumeratedGroup(G, gen_elements)
    return Subgroup(G, E, E.to_ambient, E.from_ambient, name)


def whole_group(G: FinGroup) -> Subgroup:
    return Subgroup(G, G, lambda g: g, lambda g: g, "whole")


def trivial_subgroup(G: FinGroup) -> Subgroup:
    return subgroup_from_gens(G, [], "trivial")


def hom_embedding(H: FinGroup, G: FinGroup, images: Sequence) -> Callable:
    """Extend generator images to a map H -> G along normal-form words."""
    imgs = list(images)
    cache = {}

    def embed(h):
        x = cache.get(h)
        if x is None:
            x = G.identity()
            for g, e in H.word(h):
                x = G.mul(x, G.power(imgs[g], e))
            cache[h] = x
        return x

    return embed


def coset_reps(G: FinGroup, H: Subgroup, limit: int = 5000) -> list:
    """One representative per left coset gH.

    Small groups use the first element of each coset in sorted normal-form
    order; large groups use a breadth-first walk on cosets, which is just as
    deterministic.
    """
    if H.ambient is not G and H.ambient != G:
        raise NotSubgroup("subgroup does not live in this group")
    for x in H.gen_images():
        if not H.contains(x):
            raise NotSubgroup("generator images are not recognized by the subgroup")
    if G.order() <= limit:
        reps = []
        for g in G.elements():
            gi = G.inv(g)
            if not any(H.contains(G.mul(gi, r)) for r in reps):
                reps.append(g)
        return sorted(reps)
    reps = [G.identity()]
    dq = deque(reps)
    gens = G.gens()
    target = G.order() // H.group.order()
    while dq and len(reps) < target:
        r = dq.popleft()
        for s in gens:
            x = G.mul(s, r)
            xi = G.inv(x)
            if not any(H.contains(G.mul(xi, y)) for y in reps):
                reps.append(x)
                dq.append(x)
    return reps


def coset_index(G: FinGroup, H: Subgroup, reps: Sequence, g) -> tuple:
    """(i, h) with g = reps[i] * h and h in H (as an ambient element)."""
    for i, r in enumerate(reps):
        h = G.mul(G.inv(r), g)
        if H.contains(h):
            return i, h
    raise NotSubgroup("element lies in no listed coset")


@dataclass
class SubgroupChain:
    ambient: FinGroup
    members: list  # Subgroups of the ambient, largest first

    def check(self) -> dict:
        report = {}
        for i, H in enumerate(self.members):
            try:
                H.check()
                report[f"closed_{i}"] = True
            except NotSubgroup:
                report[f"closed_{i}"] = False
            report[f"normal_{i}"] = H.is_normal()
        for i in range(len(self.members) - 1):
            big, small = self.members[i], self.members[i + 1]
            report[f"nested_{i}"] = all(big.contains(x) for x in small.gen_images())
        return report


# ---------------------------------------------------------------------------
# integral group rings of finite abelian groups


@dataclass(frozen=True)
class GroupRingElt:
    """Integer combination of elements of prod Z/n_i."""

    orders: tuple
    coeffs: tuple  # sorted ((element, coefficient), ...), zero terms dropped

    @classmethod
    def from_dict(cls, orders, d: dict) -> "GroupRingElt":
        orders = tuple(orders)
        acc = {}
        for g, c in d.items():
            g = tuple(x % n for x, n in zip(g, orders))
            acc[g] = acc.get(g, 0) + c
        return cls._reduced(orders, acc)

    @classmethod
    def _reduced(cls, orders: tuple, acc: dict) -> "GroupRingElt":
        """From a dict whose keys are already reduced mod the orders."""
        return cls(orders, tuple(sorted((g, c) for g, c in acc.items() if c)))

    @classmethod
    def scalar(cls, orders, n: int) -> "GroupRingElt":
        return cls.from_dict(orders, {(0,) * len(orders): n})

    @classmethod
    def basis(cls, orders, g) -> "GroupRingElt":
        return cls.from_dict(orders, {tuple(g): 1})

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __add__(self, o):
        d = self.as_dict()
        for g, c in o.coeffs:
            d[g] = d.get(g, 0) + c
        return GroupRingElt._reduced(self.orders, d)

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, n: int):
        return GroupRingElt._reduced(self.orders, {g: n * c for g, c in self.coeffs})

    def __mul__(self, o):
        if isinstance(o, int):
            return self.scale(o)
        d = {}
        orders = self.orders
        if len(orders) == 1:
            n = orders[0]
            for (g,), a in self.coeffs:
                for (h,), b in o.coeffs:
                    k = ((g + h) % n,)
                    d[k] = d.get(k, 0) + a * b
            return GroupRingElt._reduced(orders, d)
        for g, a in self.coeffs:
            for h, b in o.coeffs:
                k = tuple((x + y) % n for x, y, n in zip(g, h, orders))
                d[k] = d.get(k, 0) + a * b
        return GroupRingElt._reduced(orders, d)

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_json(self) -> dict:
        return {"orders": list(self.orders), "terms": [[list(g), c] for g, c in self.coeffs]}


def _unit_vector(k: int, i: int, e: int = 1) -> tuple:
    return tuple(e if j == i else 0 for j in range(k))


def sigma_element(orders: Sequence[int], sigma: int = 0) -> GroupRingElt:
    return GroupRingElt.basis(orders, _unit_vector(len(orders), sigma))


def derivative_operator(ell_plus_one: int, sigma: int = 0, orders: Optional[Sequence[int]] = None) -> GroupRingElt:
    """Sum_{i=1}^{M-1} i sigma^i in the group ring of <sigma> (or of ``orders``)."""
    M = ell_plus_one
    if M < 2:
        raise ValueError("M must be at least 2")
    orders = tuple(orders) if orders is not None else (M,)
    n, k = orders[sigma], len(orders)
    d = {}
    for i in range(1, M):
        g = (i % n,) if k == 1 else tuple((i % n) if j == sigma else 0 for j in range(k))
        d[g] = d.get(g, 0) + i
    return GroupRingElt._reduced(orders, d)


def trace_operator(M: int, sigma: int = 0, orders: Optional[Sequence[int]] = None) -> GroupRingElt:
    """Sum_{i=0}^{M-1} sigma^i."""
    if M < 1:
        raise ValueError("M must be positive")
    orders = tuple(orders) if orders is not None else (M,)
    n, k = orders[sigma], len(orders)
    d = {}
    for i in range(M):
        g = (i % n,) if k == 1 else tuple((i % n) if j == sigma else 0 for j in range(k))
        d[g] = d.get(g, 0) + 1
    return GroupRingElt._reduced(orders, d)


def derivative_product(orders: Sequence[int], indices: Sequence[int]) -> GroupRingElt:
    """D_n as the product of D_l over the listed coordinates, in the given order."""
    orders = tuple(orders)
    out = GroupRingElt.scalar(orders, 1)
    for i in indices:
        out = out * derivative_operator(orders[i], i, orders)
    return out


def group_from_json(data: dict) -> FinGroup:
    fam, par = data["family"], data["params"]
    if fam == "Cyclic":
        return Cyclic(par["M"])
    if fam == "Dihedral":
        return Dihedral(par["M"])
    if fam == "Metacyclic":
        return Metacyclic(par["a"], par["b"], par["r"])
    if fam == "Abelian":
        return Abelian(par["orders"])
    if fam == "SemidirectAbelian":
        return SemidirectAbelian(par["orders"], group_from_json(par["Q"]), par["action"])
    if fam == "Product":
        return Product([group_from_json(f) for f in par["factors"]])
    raise ValueError(f"unknown family {fam}")
