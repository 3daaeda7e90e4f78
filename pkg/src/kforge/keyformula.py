"""The abstract key formula for Kolyvagin derivative classes.

An instance bundles a chain H < G < G~ with G~/H dihedral of order 2M, a
local chain H0 < G0 < G~0 with a projection pi onto a cyclic group of even
order, a free module T over Z/p^N and cocycles x on G, y on H.  ``validate``
checks every hypothesis separately; ``key_formula_check`` evaluates

    (M/p^s phi - M1/p^s) abar_x = (delta M1/p^s phi - (d+1)/p^s) abar

in T/p^sT.

Generated instances use the shell

    H  = A x| (<u^M> x Q),   G = A x| (I x Q),   G~ = G x| <c>

with I = <u> of order t (a multiple of M), Q = <g_F> x <eps>, and
A = T tensor (Z/q[Z/P] + Z/q) a module on which u shifts positions, g_F acts
by F and eps by -1.  The local group <tau, f | f tau f^-1 = tau^ell> embeds
by tau -> a0 u and f -> w g_F c, so sigma is the image of tau.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from math import gcd, lcm
from typing import Optional

from .coeff import (NotDivisible, PrecisionExhausted, RingCtx, RingElt, exact_div_p_power,
                    is_prime, left_kernel_raw, make_ring, reduce_by_howell, smith_invariants,
                    solve_left_raw)
from .cohom import (Cocycle, GModule, cor_cyclic, mat_identity, mat_inverse, mat_mul, mat_normalize,
                    mat_pow, mat_scale, mat_sub, mat_vec, vec_add, vec_is_zero, vec_neg, vec_scale,
                    vec_sub)
from .groups import (Cyclic, FinGroup, Metacyclic, NotSubgroup, Subgroup, compress, hom_embedding,
                     invert_word)
from .cohom import NotCyclicQuotient, check_cyclic_quotient
from .localmodel import matrix_order

CONDITIONS = ("G1", "G2", "G3", "T1", "T2", "T3", "T4", "UR", "COR", "E-S", "FR")


class HypothesisFailure(ValueError):
    pass


class NoSolution(ValueError):
    pass


class NonUnique(ValueError):
    pass


class NotUnit(ValueError):
    pass


class MutationUnavailable(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# group shell


def _mult_order(a: int, n: int) -> int:
    if n == 1:
        return 1
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


def _additive_order(v, q: int) -> int:
    o = 1
    for a in v:
        o = lcm(o, q // gcd(a % q, q))
    return o


class InducedShellGroup(FinGroup):
    """A x| (I x Q), optionally extended by an involution c.

    A = (Z/q)^2 tensor (Z/q[Z/P] + Z/q) has coordinates (position k,
    component b) for k < P plus a last position P on which u acts trivially.
    The generator u of I = Z/t shifts the positions k < P by one, g_F acts on
    every position by F and on I by u -> u^lam (lam = 1 mod P), eps acts by
    -1 on A, and c reflects positions k -> -k, negates position P and
    inverts u.  Elements are tuples (a, j, n, e, c) standing for
    a * u^j * g_F^n * eps^e * c^c, always in the coordinates of the largest
    group.  ``mode`` is "Gt" (with c), "G" (without c) or "H" (I replaced by
    <u^M>; A then needs all 2P + 2 coordinate generators).
    """

    family = "InducedShell"

    def __init__(self, q: int, P: int, t: int, F, ordg: int, mode: str = "G", M: int = 1, lam: int = 1):
        if mode not in ("G", "Gt", "H"):
            raise ValueError(f"unknown mode {mode}")
        if t % P or (mode == "H" and (t % M or M % P)):
            raise ValueError("P must divide M and M must divide t")
        if (lam - 1) % P or pow(lam, ordg, t) != 1 % t or gcd(lam, t) != 1:
            raise ValueError("lam must be 1 mod P with lam^ordg = 1 mod t")
        self.q, self.P, self.t, self.ordg, self.mode, self.M = q, P, t, ordg, mode, M
        self.lam = lam % t
        self._lpow = [pow(lam, n, t) for n in range(ordg)]
        self.F = tuple(tuple(int(x) % q for x in r) for r in F)
        pw = [((1, 0), (0, 1))]
        for _ in range(ordg - 1):
            A = pw[-1]
            pw.append(tuple(tuple(sum(A[i][l] * self.F[l][j] for l in range(2)) % q for j in range(2))
                            for i in range(2)))
        if tuple(tuple(sum(pw[-1][i][l] * self.F[l][j] for l in range(2)) % q for j in range(2))
                 for i in range(2)) != ((1, 0), (0, 1)):
            raise ValueError("F^ordg is not the identity")
        self._Fpow = pw

    @property
    def params(self):
        return {"q": self.q, "P": self.P, "t": self.t, "F": [list(r) for r in self.F],
                "ordg": self.ordg, "mode": self.mode, "M": self.M, "lam": self.lam}

    def act(self, j, n, e, cb, a):
        """Conjugation action of u^j g_F^n eps^e c^cb on a vector of A."""
        P, q = self.P, self.q
        Fm = self._Fpow[n]
        sg = -1 if e else 1
        out = [0] * (2 * P + 2)
        for k in range(P + 1):
            v0, v1 = a[2 * k], a[2 * k + 1]
            if not (v0 or v1):
                continue
            if k < P:
                k2 = ((-k if cb else k) + j) % P
                sk = sg
            else:
                k2, sk = P, (-sg if cb else sg)
            out[2 * k2] = sk * (Fm[0][0] * v0 + Fm[0][1] * v1) % q
            out[2 * k2 + 1] = sk * (Fm[1][0] * v0 + Fm[1][1] * v1) % q
        return out

    def identity(self):
        return ((0,) * (2 * self.P + 2), 0, 0, 0, 0)

    def mul(self, x, y):
        a, j, n, e, cb = x
        b, j2, n2, e2, cb2 = y
        rb = self.act(j, n, e, cb, b)
        q = self.q
        j2 = self._lpow[n] * (-j2 if cb else j2)
        return (tuple((u + v) % q for u, v in zip(a, rb)), (j + j2) % self.t,
                (n + n2) % self.ordg, (e + e2) % 2, (cb + cb2) % 2)

    def inv(self, x):
        a, j, n, e, cb = x
        ni = (-n) % self.ordg
        ji = (self._lpow[ni] * (j if cb else -j)) % self.t
        ra = self.act(ji, ni, e, cb, a)
        return (tuple((-u) % self.q for u in ra), ji, ni, e, cb)

    def _unit(self, i):
        v = [0] * (2 * self.P + 2)
        v[i] = 1
        return tuple(v)

    def gens(self):
        na = 2 * self.P + 2
        z = (0,) * na
        if self.mode == "H":
            out = [(self._unit(i), 0, 0, 0, 0) for i in range(na)]
            out.append((z, self.M % self.t, 0, 0, 0))
        else:
            out = [(self._unit(i), 0, 0, 0, 0) for i in (0, 1, na - 2, na - 1)]
            out.append((z, 1 % self.t, 0, 0, 0))
        out += [(z, 0, 1 % self.ordg, 0, 0), (z, 0, 0, 1, 0)]
        if self.mode == "Gt":
            out.append((z, 0, 0, 0, 1))
        return out

    def relators(self):
        q, P, F = self.q, self.P, self.F
        rels = []

        def comm(a, b):
            return tuple(a) + tuple(b) + invert_word(a) + invert_word(b)

        def fcol(k, b, egen):
            # word for F e_b at the position whose generators are egen(0), egen(1)
            return compress([(egen(0), F[0][b]), (egen(1), F[1][b])])

        if self.mode == "H":
            na = 2 * P + 2
            RHO, G, EPS = na, na + 1, na + 2
            for i in range(na):
                rels.append(((i, q),))
            for i in range(na):
                for j in range(i + 1, na):
                    rels.append(comm([(i, 1)], [(j, 1)]))
            rels.append(((RHO, self.t // self.M),))
            for i in range(na):
                rels.append(comm([(RHO, 1)], [(i, 1)]))
            rest = [(G, self.ordg), (EPS, 2)]
            rels += [(r,) for r in rest]
            rels += [comm([(G, 1)], [(EPS, 1)]), comm([(EPS, 1)], [(RHO, 1)])]
            b0 = self.t // self.M
            rels.append(compress([(G, 1), (RHO, 1), (G, -1), (RHO, -(self.lam % b0))]))
            for k in range(P + 1):
                for b in range(2):
                    img = fcol(k, b, lambda c, k=k: 2 * k + c)
                    rels.append(((G, 1), (2 * k + b, 1), (G, -1)) + invert_word(img))
                    rels.append(((EPS, 1), (2 * k + b, 1), (EPS, -1), (2 * k + b, 1)))
            return rels
        E, Z, U, G, EPS, C = (0, 1), (2, 3), 4, 5, 6, 7
        for b in range(2):
            rels += [((E[b], q),), ((Z[b], q),)]
        for a in range(2):
            for b in range(2):
                for j in range(P):
                    if j == 0 and a >= b:
                        continue
                    rels.append(comm([(E[a], 1)], compress([(U, j), (E[b], 1), (U, -j)])))
                rels.append(comm([(Z[a], 1)], [(E[b], 1)]))
        rels.append(comm([(Z[0], 1)], [(Z[1], 1)]))
        rels.append(((U, self.t),))
        for b in range(2):
            rels += [comm([(U, P)], [(E[b], 1)]), comm([(U, 1)], [(Z[b], 1)])]
        rels += [((G, self.ordg),), ((EPS, 2),), comm([(G, 1)], [(EPS, 1)]),
                 compress([(G, 1), (U, 1), (G, -1), (U, -self.lam)]), comm([(EPS, 1)], [(U, 1)])]
        for gens_ in (E, Z):
            for b in range(2):
                img = fcol(0, b, lambda c: gens_[c])
                rels.append(((G, 1), (gens_[b], 1), (G, -1)) + invert_word(img))
                rels.append(((EPS, 1), (gens_[b], 1), (EPS, -1), (gens_[b], 1)))
        if self.mode == "Gt":
            rels += [((C, 2),), ((C, 1), (U, 1), (C, -1), (U, 1)), comm([(C, 1)], [(G, 1)]),
                     comm([(C, 1)], [(EPS, 1)])]
            for b in range(2):
                rels += [comm([(C, 1)], [(E[b], 1)]), ((C, 1), (Z[b], 1), (C, -1), (Z[b], 1))]
        return [compress(r) for r in rels]

    def word(self, g):
        a, j, n, e, cb = g
        P = self.P
        out = []
        if self.mode == "H":
            for i, v in enumerate(a):
                if v:
                    out.append((i, v))
            if j % self.M:
                raise ValueError("element does not lie in H")
            out.append((2 * P + 2, j // self.M))
            base = 2 * P + 3
        else:
            for k in range(P):
                v0, v1 = a[2 * k], a[2 * k + 1]
                if v0 or v1:
                    out += [(4, k), (0, v0), (1, v1), (4, -k)]
            out += [(2, a[2 * P]), (3, a[2 * P + 1]), (4, j)]
            base = 5
        out += [(base, n), (base + 1, e)]
        if self.mode == "Gt":
            out.append((base + 2, cb))
        elif cb:
            raise ValueError("element does not lie in G")
        return compress(out)

    def order(self):
        n = self.q ** (2 * self.P + 2) * self.ordg * 2
        n *= self.t // self.M if self.mode == "H" else self.t
        return n * (2 if self.mode == "Gt" else 1)


@dataclass
class ShellParams:
    p: int
    s: int
    k: int              # M = p^s * k
    P: int              # number of positions in A (a power of p dividing p^s)
    t: int              # order of the tame inertia quotient, a multiple of M
    ell: int            # prime with ell = -1 mod M, prime to t
    frob: tuple         # matrix of phi on T over Z/p^(s+2)
    a0: tuple           # A component of the image of tau (2P + 2 entries)
    w0: tuple = (0, 0)  # component of the Frobenius lift in the position fixed by u
    eps_sign: int = -1  # action of eps on T
    c_sign: int = 1     # action of the involution c on T
    g_sign: int = 1     # g_F acts on T and on A by g_sign * phi; f = w g_F c acts by phi iff equal
    c_in_G: bool = False
    local_cyclic: bool = False
    pi_scale: int = 1
    torsion: tuple = ()

    def to_json(self) -> dict:
        d = asdict(self)
        d["frob"] = [list(r) for r in self.frob]
        d["a0"] = list(self.a0)
        d["w0"] = list(self.w0)
        d["torsion"] = [list(r) for r in self.torsion]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ShellParams":
        d = dict(d)
        d["frob"] = tuple(tuple(r) for r in d["frob"])
        d["a0"] = tuple(d["a0"])
        d["w0"] = tuple(d.get("w0", (0, 0)))
        d["torsion"] = tuple(tuple(r) for r in d.get("torsion", ()))
        return cls(**d)


class Shell:
    """All group-theoretic data of an instance, built from ShellParams."""

    def __init__(self, sp: ShellParams):
        self.params = sp
        p, s = sp.p, sp.s
        self.N = s + 2
        R = make_ring(p, self.N)
        self.ring = R
        q = R.q
        self.M = M = p ** s * sp.k
        t, P = sp.t, sp.P
        if t % M:
            raise ValueError("M must divide t")
        F = mat_normalize(R, sp.frob)
        self.phi = F
        Fg = mat_scale(R, R.from_int(sp.g_sign), F)
        # g_F acts on inertia by -ell, so that f = w g_F c satisfies f u f^-1 = u^ell
        lam = (-sp.ell) % t
        self.ordg = ordg = lcm(matrix_order(R, Fg), 2, _mult_order(lam, t))
        self.Gt = Gt = InducedShellGroup(q, P, t, Fg, ordg, "Gt", lam=lam)
        self.G = G = InducedShellGroup(q, P, t, Fg, ordg, "G", lam=lam)
        self.H = H = InducedShellGroup(q, P, t, Fg, ordg, "H", M, lam=lam)
        ident = mat_identity(R, 2)
        eps = mat_scale(R, R.from_int(sp.eps_sign), ident)
        cmat = mat_scale(R, R.from_int(sp.c_sign), ident)
        self.module = GModule(Gt, R, 2, [ident, ident, ident, ident, ident, Fg, eps, cmat])
        same = lambda x: x
        self.G_in_Gt = Subgroup(Gt, G, same, lambda x: x if x[4] == 0 else None, "G")
        self.H_in_G = Subgroup(G, H, same, lambda x: x if x[1] % M == 0 else None, "H")
        self.H_in_Gt = Subgroup(Gt, H, same, lambda x: x if x[4] == 0 and x[1] % M == 0 else None, "H")
        self.TG = self.module.restrict(self.G_in_Gt)
        self.TH = self.TG.restrict(self.H_in_G)
        # local images: tau -> a0 u, f -> w g_F c with w fixed by f tau f^-1 = tau^ell
        a0 = tuple(int(a) % q for a in sp.a0)
        self.tau_img = (a0, 1 % t, 0, 0, 0)
        self.f_img = (self._frobenius_part(a0, sp.w0), 0, 1 % ordg, 0, 1)
        fo = Gt.power(self.f_img, ordg)
        self.two_m = ordg * _additive_order(fo[0], q)
        m = self.m = self.two_m // 2
        # the displayed lift of sigma is the image of tau, which lies in G0
        self.sigma = self.tau_img
        self.c = (Gt.identity()[0], 0, 0, 0, 1) if not sp.c_in_G else self.sigma
        if sp.local_cyclic:
            self.Gt0 = Cyclic(2 * m)
            images = [self.f_img]
            self.pi_values = [1]
            self.G0 = Subgroup(self.Gt0, Cyclic(m), lambda g: ((2 * g[0]) % (2 * m),),
                               lambda x: (x[0] // 2,) if x[0] % 2 == 0 else None, "G0")
            self.H0 = Subgroup(self.Gt0, Cyclic(m), lambda g: ((2 * g[0]) % (2 * m),),
                               lambda x: (x[0] // 2,) if x[0] % 2 == 0 else None, "H0")
            self.frob_lift = (1,)
            self.sigma0 = None
        else:
            b0 = t // M
            self.Gt0 = Metacyclic(t, 2 * m, sp.ell % t)
            images = [self.tau_img, self.f_img]
            self.pi_values = [0, 1]
            self.G0 = Subgroup(self.Gt0, Metacyclic(t, m, sp.ell ** 2 % t),
                               lambda g: (g[0], 2 * g[1]),
                               lambda x: (x[0], x[1] // 2) if x[1] % 2 == 0 else None, "G0")
            self.H0 = Subgroup(self.Gt0, Metacyclic(b0, m, sp.ell ** 2 % b0 if b0 > 1 else 0),
                               lambda g: ((M * g[0]) % t, 2 * g[1]),
                               lambda x: (x[0] // M, x[1] // 2) if x[0] % M == 0 and x[1] % 2 == 0 else None,
                               "H0")
            self.frob_lift = (0, 1)
            self.sigma0 = (1, 0)
        self.loc_images = images
        self.loc = hom_embedding(self.Gt0, Gt, images)
        self.pi_order = 2 * m * sp.pi_scale
        self._cache = {}

    def _frobenius_part(self, a0, w0) -> tuple:
        """w in A with (w g_F c) tau (w g_F c)^-1 = tau^ell; w0 fills the position fixed by u."""
        Gt, q, P = self.Gt, self.ring.q, self.params.P
        K = (Gt.identity()[0], 0, 1 % self.ordg, 0, 1)
        conj = Gt.conj(K, self.tau_img)
        target = Gt.power(self.tau_img, self.params.ell)
        if conj[1:] != target[1:]:
            raise ValueError("ell is not -1 modulo the inertia order")
        # (1 - S^-1) w = target - conj, i.e. w_k - w_(k+1) = b_k
        b = [(x - y) % q for x, y in zip(target[0], conj[0])]
        w = [0] * (2 * P + 2)
        w[2 * P], w[2 * P + 1] = int(w0[0]) % q, int(w0[1]) % q
        for k in range(P - 1):
            for c in range(2):
                w[2 * (k + 1) + c] = (w[2 * k + c] - b[2 * k + c]) % q
        for c in range(2):
            if (w[2 * (P - 1) + c] - b[2 * (P - 1) + c] - w[c]) % q:
                raise ValueError("the tau component has augmentation outside the ell-eigenspace")
        return tuple(w)

    # element transport
    def pi(self, g0) -> int:
        gens = self.pi_values
        return sum(e * gens[i] for i, e in self.Gt0.word(g0)) % self.pi_order

    def local_to_G(self, g0):
        x = self.G_in_Gt.pullback(self.loc(g0))
        if x is None:
            raise NotSubgroup("local element does not lie in G")
        return x

    def local_to_H(self, g0):
        x = self.H_in_Gt.pullback(self.loc(g0))
        if x is None:
            raise NotSubgroup("local element does not lie in H")
        return x

    def conj_frob_inv(self, g0):
        """f^-1 g f in G for a local element g (f the Frobenius lift)."""
        Gt = self.Gt
        f = self.loc(self.frob_lift)
        x = Gt.mul(Gt.mul(Gt.inv(f), self.loc(g0)), f)
        y = self.G_in_Gt.pullback(x)
        if y is None:
            raise NotSubgroup("conjugate does not lie in G")
        return y

    def kernel_elements(self, sub: Subgroup) -> list:
        """Elements of G~0 generating (up to normal closure) the kernel of pi on sub."""
        key = ("ker", sub.name)
        if key not in self._cache:
            A = self.Gt0
            imgs = sub.gen_images()
            vals = [self.pi(g) for g in imgs]
            out = []
            for vec in relation_lattice(vals, self.pi_order):
                x = A.identity()
                for g, e in zip(imgs, vec):
                    x = A.mul(x, A.power(g, e))
                out.append(x)
            for i in range(len(imgs)):
                for j in range(i + 1, len(imgs)):
                    a, b = imgs[i], imgs[j]
                    out.append(A.mul(A.mul(a, b), A.inv(A.mul(b, a))))
            self._cache[key] = [x for x in dict.fromkeys(out) if x != A.identity()]
        return self._cache[key]

    def reduced(self, T: GModule, s: Optional[int] = None) -> GModule:
        """The same module over Z/p^s."""
        s = self.params.s if s is None else s
        key = ("red", id(T), s)
        if key not in self._cache:
            Rs = make_ring(self.params.p, s)
            self._cache[key] = GModule(T.group, Rs, T.rank,
                                       [[[Rs.normalize(a) for a in r] for r in A] for A in T.action],
                                       check=False)
        return self._cache[key]


def relation_lattice(values, n: int) -> list:
    """Z-basis of {a : sum a_i values_i = 0 mod n} by Euclid on one column."""
    k = len(values)
    rows = [[v % n] + [1 if j == i else 0 for j in range(k)] for i, v in enumerate(values)]
    rows.append([n] + [0] * k)
    while True:
        live = [r for r in rows if r[0] != 0]
        if len(live) <= 1:
            break
        piv = min(live, key=lambda r: abs(r[0]))
        for r in live:
            if r is not piv:
                c = r[0] // piv[0]
                for i in range(k + 1):
                    r[i] -= c * piv[i]
    return [r[1:] for r in rows if r[0] == 0 and any(r[1:])]


def reduce_cocycle(z: Cocycle, target: GModule) -> Cocycle:
    return Cocycle(target, tuple(target.ring.normalize(a) for a in z.values))


# ---------------------------------------------------------------------------
# instances


@dataclass
class KolyvaginInstance:
    shell: Shell
    x: Cocycle
    y: Cocycle
    M1: int
    delta: int
    d: int
    seed: Optional[int] = None
    mutation: Optional[str] = None

    @property
    def s(self) -> int:
        return self.shell.params.s

    @property
    def M(self) -> int:
        return self.shell.M

    @property
    def phi(self):
        return self.shell.phi

    @property
    def ring(self) -> RingCtx:
        return self.shell.ring

    def with_cocycles(self, x: Cocycle, y: Cocycle, mutation=None) -> "KolyvaginInstance":
        return KolyvaginInstance(self.shell, x, y, self.M1, self.delta, self.d, self.seed, mutation)

    def to_json(self) -> dict:
        sh = self.shell
        return {"seed": self.seed, "mutation": self.mutation, "shell": sh.params.to_json(),
                "ring": sh.ring.header(), "M": sh.M, "m": sh.m,
                "constants": {"s": self.s, "M1": self.M1, "delta": self.delta, "d": self.d},
                "x": list(self.x.values), "y": list(self.y.values)}

    @classmethod
    def from_json(cls, data: dict) -> "KolyvaginInstance":
        sh = Shell(ShellParams.from_json(data["shell"]))
        c = data["constants"]
        x = sh.TG.from_flat(data["x"])
        y = sh.TH.from_flat(data["y"])
        return cls(sh, x, y, c["M1"], c["delta"], c["d"], data.get("seed"), data.get("mutation"))


def zero_instance(shell: Shell, M1: int, delta: int, d: int) -> KolyvaginInstance:
    return KolyvaginInstance(shell, shell.TG.zero_cocycle(), shell.TH.zero_cocycle(), M1, delta, d)


def _random_invertible(rng, R: RingCtx):
    while True:
        P = tuple(tuple(rng.randrange(R.q) for _ in range(2)) for _ in range(2))
        try:
            return P, mat_inverse(R, P)
        except ZeroDivisionError:
            continue


def random_shell_params(rng, p: int, s: int, max_M: int = 81, ell: Optional[int] = None,
                        delta: Optional[int] = None) -> tuple:
    """Shell parameters plus (M1, delta, d) satisfying (FR) by Cayley-Hamilton.

    With ``ell`` given the shell has M = ell + 1, and ``delta`` fixes the unit
    in front of M1 when supplied.
    """
    if ell is None:
        ks = [k for k in (1, 2, 4) if p ** s * k <= max_M]
        if not ks:
            raise ValueError("p^s exceeds the bound on M")
        k = rng.choice(ks)
    else:
        if (ell + 1) % p ** s:
            raise ValueError("p^s does not divide ell + 1")
        k = (ell + 1) // p ** s
    M = p ** s * k
    P = p ** s if p ** s <= 9 else p
    N = s + 2
    # the augmentation of the tau component lies in p^j T; t/P must kill it
    j = s - 1 if P == p ** s else 0
    t = lcm(M, P * p ** (N - j))
    # ell = -1 mod M with p^s exactly dividing ell + 1
    while ell is None:
        ell = M * rng.randrange(1, 400) - 1
        if not (ell > 3 and ell % p ** (s + 1) != p ** (s + 1) - 1 and gcd(ell, t) == 1 and is_prime(ell)):
            ell = None
    R = make_ring(p, N)
    q = R.q
    alpha = (1 + p ** s * rng.randrange(p ** (N - s))) % q
    beta = ell % q
    Pm, _ = _random_invertible(rng, R)
    F = mat_mul(R, mat_mul(R, Pm, ((alpha, 0), (0, beta))), mat_inverse(R, Pm))
    u = rng.randrange(1, q)
    while u % p == 0:
        u = rng.randrange(1, q)
    # augmentation: p^j times a unit multiple of the ell-eigenvector
    v = [(p ** j * u * Pm[i][1]) % q for i in range(2)]
    a0 = [rng.randrange(q) for _ in range(2 * P)] + [0, 0]
    for c in range(2):
        a0[c] = (v[c] - sum(a0[2 * j + c] for j in range(1, P))) % q
    w0 = (rng.randrange(q), rng.randrange(q))
    while delta is None or delta % p == 0:
        delta = rng.randrange(1, q)
    delta %= q
    M1 = (pow(delta, -1, q) * (alpha + beta)) % q
    d = (alpha * beta) % q
    sp = ShellParams(p, s, k, P, t, ell, F, tuple(a0), w0)
    return sp, (M1, delta, d)


# ---------------------------------------------------------------------------
# the linear system (UR), (COR), (E-S) for (x, y)


@dataclass
class _System:
    rows: list
    ncols: int
    kx: int
    ky: int
    X: list
    Y: list


def _build_system(shell: Shell, M1: int, blocks=("COR", "UR", "E-S")) -> _System:
    key = ("sys", M1, tuple(blocks))
    if key in shell._cache:
        return shell._cache[key]
    R = shell.ring
    TG, TH = shell.TG, shell.TH
    n = TG.rank
    X = [Cocycle(TG, tuple(r)) for r in TG.z1()[0]]
    Y = [Cocycle(TH, tuple(r)) for r in TH.z1()[0]]
    h0_gens = shell.H0.gen_images()
    zero = lambda k: [R.zero()] * k
    cols_x = [[] for _ in X]
    cols_y = [[] for _ in Y]
    slack = []  # (block name, list of column vectors per slack variable)
    for b in blocks:
        if b == "COR":
            for i, z in enumerate(X):
                cols_x[i] += list(vec_scale(R, R.neg(R.from_int(M1)), z.values))
            for i, z in enumerate(Y):
                cols_y[i] += list(cor_cyclic(z, TG, shell.H_in_G, shell.sigma, shell.M).values)
            slack.append((b, [list(vec_neg(R, r)) for r in TG.b1_generators()]))
        elif b == "UR":
            kg = [shell.local_to_G(g) for g in shell.kernel_elements(shell.G0)]
            kh = [shell.local_to_H(g) for g in shell.kernel_elements(shell.H0)]
            width = n * (len(kg) + len(kh))
            for i, z in enumerate(X):
                cols_x[i] += [a for g in kg for a in z(g)] + zero(n * len(kh))
            for i, z in enumerate(Y):
                cols_y[i] += zero(n * len(kg)) + [a for h in kh for a in z(h)]
            slack.append((b, []))
            del width
        elif b == "E-S":
            F = shell.phi
            hs = [shell.local_to_H(h) for h in h0_gens]
            conj = [shell.conj_frob_inv(h) for h in h0_gens]
            for i, z in enumerate(X):
                cols_x[i] += [a for g in conj for a in vec_neg(R, mat_vec(R, F, z(g)))]
            for i, z in enumerate(Y):
                cols_y[i] += [a for h in hs for a in z(h)]
            ps = R.from_int(shell.ring.p ** shell.params.s)
            vecs = []
            # p^s T on every H0 generator
            for j in range(len(hs)):
                for c in range(n):
                    v = zero(n * len(hs))
                    v[j * n + c] = R.neg(ps)
                    vecs.append(v)
            # coboundaries of H0
            for c in range(n):
                e = tuple(R.one() if i == c else R.zero() for i in range(n))
                v = []
                for h in hs:
                    v += list(vec_sub(R, TH.act(h, e), e))
                vecs.append([R.neg(a) for a in v])
            slack.append((b, vecs))
        else:
            raise ValueError(f"unknown block {b}")
    ncols = len(cols_x[0]) if cols_x else (len(cols_y[0]) if cols_y else 0)
    rows = [r for r in cols_x] + [r for r in cols_y]
    offset = 0
    widths = []
    for b in blocks:
        if b == "COR":
            widths.append(TG.cochain_length)
        elif b == "UR":
            widths.append(n * (len(shell.kernel_elements(shell.G0)) + len(shell.kernel_elements(shell.H0))))
        else:
            widths.append(n * len(h0_gens))
    for (b, vecs), w in zip(slack, widths):
        for v in vecs:
            rows.append(zero(offset) + v + zero(ncols - offset - w))
        offset += w
    sysm = _System(rows, ncols, len(X), len(Y), X, Y)
    shell._cache[key] = sysm
    return sysm


def _solutions(shell: Shell, M1: int, blocks) -> tuple:
    sysm = _build_system(shell, M1, blocks)
    key = ("ker", M1, tuple(blocks))
    if key not in shell._cache:
        R = shell.ring
        K = left_kernel_raw(R, sysm.rows, sysm.ncols) if sysm.ncols else \
            [list(r) for r in mat_identity(R, len(sysm.rows))]
        shell._cache[key] = K
    return sysm, shell._cache[key]


def _combine(shell: Shell, sysm: _System, coeffs) -> tuple:
    R = shell.ring
    xv = shell.TG.zero_cocycle().values
    for c, z in zip(coeffs[:sysm.kx], sysm.X):
        xv = vec_add(R, xv, vec_scale(R, c, z.values))
    yv = shell.TH.zero_cocycle().values
    for c, z in zip(coeffs[sysm.kx:sysm.kx + sysm.ky], sysm.Y):
        yv = vec_add(R, yv, vec_scale(R, c, z.values))
    return Cocycle(shell.TG, xv), Cocycle(shell.TH, yv)


def _random_solution(rng, shell: Shell, M1: int, blocks) -> tuple:
    R = shell.ring
    sysm, K = _solutions(shell, M1, blocks)
    coeffs = [R.zero()] * len(sysm.rows)
    for row in K:
        c = R.from_int(rng.randrange(R.q))
        coeffs = [R.add(a, R.mul(c, b)) for a, b in zip(coeffs, row)]
    return _combine(shell, sysm, coeffs)


def abar_x(inst: KolyvaginInstance) -> tuple:
    """x evaluated at the square of the Frobenius lift, reduced mod p^s."""
    sh = inst.shell
    f2 = sh.Gt0.power(sh.frob_lift, 2)
    v = inst.x(sh.local_to_G(f2))
    ps = sh.ring.p ** inst.s
    return tuple(a % ps for a in v)


def generate_instance(seed: int, p: int = 3, s: int = 1, max_M: int = 81, attempts: int = 40) -> KolyvaginInstance:
    """Seeded instance with x, y solving (UR), (COR), (E-S) and abar_x != 0."""
    rng = random.Random(f"keyformula:{p}:{s}:{seed}")
    for _ in range(20):
        sp, (M1, delta, d) = random_shell_params(rng, p, s, max_M)
        shell = Shell(sp)
        fallback = None
        for _ in range(attempts):
            x, y = _random_solution(rng, shell, M1, ("COR", "UR", "E-S"))
            inst = KolyvaginInstance(shell, x, y, M1, delta, d, seed)
            if any(abar_x(inst)):
                if any(solve_abar(inst)):
                    return inst
                fallback = fallback or inst
        if fallback is not None:
            return fallback
    raise NoSolution("no instance with nonzero abar_x found")


# ---------------------------------------------------------------------------
# validation


@dataclass
class ConditionResult:
    ok: bool
    witness: str = ""


@dataclass
class ValidationReport:
    results: dict

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results.values())

    @property
    def failures(self) -> list:
        return [k for k in CONDITIONS if k in self.results and not self.results[k].ok]

    def to_json(self) -> dict:
        return {k: {"ok": r.ok, "witness": r.witness} for k, r in self.results.items()}


def _check_G1(sh: Shell, inst) -> ConditionResult:
    G, Gt = sh.G, sh.Gt
    for name, sub in (("H in G", sh.H_in_G), ("G in G~", sh.G_in_Gt), ("H in G~", sh.H_in_Gt)):
        if not sub.is_normal():
            return ConditionResult(False, f"{name} is not normal")
    if sh.H_in_G.index() != sh.M:
        return ConditionResult(False, f"[G:H] = {sh.H_in_G.index()} differs from M = {sh.M}")
    if sh.G_in_Gt.index() != 2:
        return ConditionResult(False, f"[G~:G] = {sh.G_in_Gt.index()}")
    try:
        check_cyclic_quotient(G, sh.H_in_G, sh.sigma, sh.M)
    except NotCyclicQuotient as e:
        return ConditionResult(False, f"sigma lift: {e}")
    c = sh.c
    if sh.G_in_Gt.contains(c):
        return ConditionResult(False, f"c lift {c} lies in G")
    if not sh.H_in_Gt.contains(Gt.mul(c, c)):
        return ConditionResult(False, "c^2 is not in H")
    sg = sh.G_in_Gt.embed(sh.sigma)
    if not sh.H_in_Gt.contains(Gt.mul(Gt.conj(c, sg), sg)):
        return ConditionResult(False, "c sigma c^-1 differs from sigma^-1 modulo H")
    return ConditionResult(True)


def _element_order(A: FinGroup, g, limit: int) -> int:
    x, k = g, 1
    e = A.identity()
    while x != e:
        x = A.mul(x, g)
        k += 1
        if k > limit:
            return -1
    return k


def _check_G2(sh: Shell, inst) -> ConditionResult:
    Gt, A = sh.Gt, sh.Gt0
    imgs = sh.loc_images
    for rel in A.relators():
        x = Gt.identity()
        for g, e in rel:
            x = Gt.mul(x, Gt.power(imgs[g], e))
        if x != Gt.identity():
            return ConditionResult(False, f"local relator {rel} is not respected")
    # injectivity
    if isinstance(A, Metacyclic):
        if _element_order(Gt, imgs[0], A.a) != A.a or _element_order(Gt, imgs[1], A.b) != A.b:
            return ConditionResult(False, "local generators have the wrong order in G~")
        taus = set()
        x = Gt.identity()
        for _ in range(A.a):
            taus.add(x)
            x = Gt.mul(x, imgs[0])
        x = Gt.identity()
        for j in range(1, A.b):
            x = Gt.mul(x, imgs[1])
            if x in taus:
                return ConditionResult(False, f"f^{j} lies in <tau>: embedding not injective")
    else:
        if _element_order(Gt, imgs[0], A.order()) != A.order():
            return ConditionResult(False, "local generator has the wrong order in G~")
    # image of G~0 in G~/H
    H = sh.H_in_Gt
    reps = [Gt.identity()]
    frontier = list(reps)
    while frontier:
        nxt = []
        for r in frontier:
            for g in imgs:
                y = Gt.mul(r, g)
                if not any(H.contains(Gt.mul(Gt.inv(u), y)) for u in reps):
                    reps.append(y)
                    nxt.append(y)
        frontier = nxt
    if len(reps) != 2 * sh.M:
        return ConditionResult(False, f"G~0 maps onto {len(reps)} of the {2 * sh.M} cosets of H")
    for h in sh.H0.gen_images():
        if not H.contains(sh.loc(h)):
            return ConditionResult(False, f"H0 generator {h} is not in H")
    for g in sh.G0.gen_images():
        if not sh.G_in_Gt.contains(sh.loc(g)):
            return ConditionResult(False, f"G0 generator {g} is not in G")
    if sh.H0.group.order() * 2 * sh.M != A.order():
        return ConditionResult(False, "|G~0| / |H0| differs from 2M")
    if sh.G0.group.order() * 2 != A.order():
        return ConditionResult(False, "|G~0| / |G0| differs from 2")
    return ConditionResult(True)


def _check_G3(sh: Shell, inst) -> ConditionResult:
    n = sh.pi_order
    vals = sh.pi_values
    for rel in sh.Gt0.relators():
        if sum(e * vals[g] for g, e in rel) % n:
            return ConditionResult(False, f"pi does not kill the relator {rel}")
    if gcd(gcd(*vals) if len(vals) > 1 else vals[0], n) != 1:
        return ConditionResult(False, "pi is not surjective")
    for name, sub in (("G0", sh.G0), ("H0", sh.H0)):
        g = n
        for x in sub.gen_images():
            g = gcd(g, sh.pi(x))
        if n % 2 or g != 2:
            return ConditionResult(False, f"pi({name}) is generated by {g}, not 2")
    return ConditionResult(True)


def _check_T1(sh: Shell, inst) -> ConditionResult:
    R = sh.ring
    rels = [list(r) for r in sh.params.torsion]
    if not rels:
        return ConditionResult(True)
    inv = smith_invariants(R, rels, 2)
    bad = [f for f in inv if f != R.q]
    if bad:
        return ConditionResult(False, f"torsion factors {bad} in T")
    return ConditionResult(True)


def _check_T2(sh: Shell, inst) -> ConditionResult:
    R = sh.ring
    for g, v in zip(sh.Gt0.gens(), sh.pi_values):
        A = sh.module.mat(sh.loc(g))
        if A != mat_pow(R, sh.phi, v % sh.pi_order):
            return ConditionResult(False, f"local generator {g} acts by {A}, not phi^{v}")
    return ConditionResult(True)


def _check_T3(sh: Shell, inst) -> ConditionResult:
    R = sh.ring
    ps = R.p ** sh.params.s
    if sh.M % ps:
        return ConditionResult(False, f"p^s does not divide M = {sh.M}")
    F2 = mat_sub(R, mat_mul(R, sh.phi, sh.phi), mat_identity(R, 2))
    for j in range(2):
        for i in range(2):
            if F2[i][j] % ps:
                return ConditionResult(False, f"phi^2 e_{j} - e_{j} = {tuple(r[j] for r in F2)} mod p^s")
    return ConditionResult(True)


def _check_T4(sh: Shell, inst) -> ConditionResult:
    Tr = sh.reduced(sh.TH)
    H, piv = Tr.h0()
    if piv:
        return ConditionResult(False, f"H-invariant vector {tuple(H[0])} mod p^s")
    return ConditionResult(True)


def _class_zero_on(T: GModule, z: Cocycle, elems) -> bool:
    """z restricted to the subgroup generated by elems is a coboundary."""
    R = T.ring
    if not elems:
        return True
    n = T.rank
    rows = []
    for c in range(n):
        e = T.basis_vector(c)
        row = []
        for g in elems:
            row += list(vec_sub(R, T.act(g, e), e))
        rows.append(row)
    b = [a for g in elems for a in z(g)]
    return solve_left_raw(R, rows, len(b), b) is not None


def _check_UR(sh: Shell, inst) -> ConditionResult:
    kg = [sh.local_to_G(g) for g in sh.kernel_elements(sh.G0)]
    if not _class_zero_on(sh.TG, inst.x, kg):
        return ConditionResult(False, f"x on ker(pi) of G0: {[inst.x(g) for g in kg]}")
    kh = [sh.local_to_H(g) for g in sh.kernel_elements(sh.H0)]
    if not _class_zero_on(sh.TH, inst.y, kh):
        return ConditionResult(False, f"y on ker(pi) of H0: {[inst.y(h) for h in kh]}")
    return ConditionResult(True)


def _check_COR(sh: Shell, inst) -> ConditionResult:
    R = sh.ring
    if R.val(R.from_int(inst.M1)) < sh.params.s:
        return ConditionResult(False, f"M1 = {inst.M1} is not divisible by p^s")
    diff = vec_sub(R, cor_cocycle(inst, reduced=False).values,
                   vec_scale(R, R.from_int(inst.M1), inst.x.values))
    rem = sh.TG.canonical(diff)
    if not vec_is_zero(R, rem):
        return ConditionResult(False, f"Cor(y) - M1 x is not a coboundary (remainder {tuple(rem)})")
    return ConditionResult(True)


def _es_difference(sh: Shell, inst) -> tuple:
    R = sh.ring
    F = sh.phi
    out = []
    for h0 in sh.H0.gen_images():
        yv = inst.y(sh.local_to_H(h0))
        xv = mat_vec(R, F, inst.x(sh.conj_frob_inv(h0)))
        out += list(vec_sub(R, yv, xv))
    return tuple(out)


def _check_ES(sh: Shell, inst) -> ConditionResult:
    R = sh.ring
    ps = R.p ** sh.params.s
    diff = _es_difference(sh, inst)
    # coboundaries of H0 on T/p^s
    Tr = sh.reduced(sh.TH)
    Rs = Tr.ring
    hs = [sh.local_to_H(h) for h in sh.H0.gen_images()]
    rows = []
    for c in range(2):
        e = Tr.basis_vector(c)
        row = []
        for h in hs:
            row += list(vec_sub(Rs, Tr.act(h, e), e))
        rows.append(row)
    b = [a % ps for a in diff]
    if solve_left_raw(Rs, rows, len(b), b) is None:
        return ConditionResult(False, f"Res(y) - Res(phi x) on H0 generators = {tuple(b)} mod p^s")
    return ConditionResult(True)


def _check_FR(sh: Shell, inst) -> ConditionResult:
    R = sh.ring
    if inst.delta % R.p == 0:
        return ConditionResult(False, f"delta = {inst.delta} is not a unit")
    F = sh.phi
    lhs = mat_sub(R, mat_mul(R, F, F), mat_scale(R, R.from_int(inst.delta * inst.M1), F))
    lhs = [[R.add(a, R.from_int(inst.d) if i == j else 0) for j, a in enumerate(r)] for i, r in enumerate(lhs)]
    if any(a for r in lhs for a in r):
        return ConditionResult(False, f"phi^2 - delta M1 phi + d = {lhs}")
    return ConditionResult(True)


_CHECKS = {"G1": _check_G1, "G2": _check_G2, "G3": _check_G3, "T1": _check_T1, "T2": _check_T2,
           "T3": _check_T3, "T4": _check_T4, "UR": _check_UR, "COR": _check_COR, "E-S": _check_ES,
           "FR": _check_FR}


def validate(inst: KolyvaginInstance, only=None) -> ValidationReport:
    out = {}
    for name in CONDITIONS:
        if only is not None and name not in only:
            continue
        try:
            out[name] = _CHECKS[name](inst.shell, inst)
        except (NotSubgroup, NotCyclicQuotient, ValueError) as e:
            out[name] = ConditionResult(False, f"{type(e).__name__}: {e}")
    return ValidationReport(out)


# ---------------------------------------------------------------------------
# single-condition mutants


def _fresh(inst: KolyvaginInstance, mutation: str, **changes) -> KolyvaginInstance:
    sp = ShellParams.from_json(inst.shell.params.to_json())
    for k, v in changes.items():
        setattr(sp, k, v)
    sh = Shell(sp)
    return KolyvaginInstance(sh, sh.TG.from_flat(inst.x.values), sh.TH.from_flat(inst.y.values),
                             inst.M1, inst.delta, inst.d, inst.seed, mutation)


def _breaker(inst: KolyvaginInstance, cond: str, rng, tries: int = 40) -> KolyvaginInstance:
    blocks = tuple(b for b in ("COR", "UR", "E-S") if b != cond)
    sh = inst.shell
    for _ in range(tries):
        kx, ky = _random_solution(rng, sh, inst.M1, blocks)
        cand = inst.with_cocycles(inst.x + kx, inst.y + ky, cond)
        if not _CHECKS[cond](sh, cand).ok:
            return cand
    raise MutationUnavailable(f"no cocycle breaking only {cond} was found")


def mutate(inst: KolyvaginInstance, cond: str, rng=None) -> KolyvaginInstance:
    """A copy of inst in which exactly the named hypothesis is violated."""
    rng = rng or random.Random(f"mutant:{inst.seed}:{cond}")
    sh = inst.shell
    R = sh.ring
    if cond == "G1":
        return _fresh(inst, cond, c_in_G=True)
    if cond == "G2":
        return _fresh(inst, cond, local_cyclic=True)
    if cond == "G3":
        return _fresh(inst, cond, pi_scale=2)
    if cond == "T1":
        return _fresh(inst, cond, torsion=((R.p, 0),))
    if cond == "T2":
        return _fresh(inst, cond, c_sign=-sh.params.c_sign)
    if cond == "T3":
        # phi with phi^2 = -1: trace 0, det 1, and (FR) holds with M1 = 0, d = 1
        P, Pi = _random_invertible(rng, R)
        J = mat_mul(R, mat_mul(R, P, ((0, R.q - 1), (1, 0))), Pi)
        out = _fresh(inst, cond, frob=J, a0=(0,) * len(sh.params.a0))
        sh2 = out.shell
        return KolyvaginInstance(sh2, sh2.TG.zero_cocycle(), sh2.TH.zero_cocycle(), 0, inst.delta, 1,
                                 inst.seed, cond)
    if cond == "T4":
        out = _fresh(inst, cond, eps_sign=1)
        sh2 = out.shell
        return KolyvaginInstance(sh2, sh2.TG.zero_cocycle(), sh2.TH.zero_cocycle(), inst.M1, inst.delta,
                                 inst.d, inst.seed, cond)
    if cond in ("UR", "COR", "E-S"):
        return _breaker(inst, cond, rng)
    if cond == "FR":
        return KolyvaginInstance(sh, inst.x, inst.y, inst.M1, inst.delta,
                                 (inst.d + R.p ** inst.s) % R.q, inst.seed, cond)
    raise ValueError(f"unknown condition {cond}")


# ---------------------------------------------------------------------------
# derivative cocycles and the key formula


def _reduced_pair(inst: KolyvaginInstance):
    sh = inst.shell
    TGs, THs = sh.reduced(sh.TG), sh.reduced(sh.TH)
    return TGs, THs, reduce_cocycle(inst.x, TGs), reduce_cocycle(inst.y, THs)


def cor_cocycle(inst: KolyvaginInstance, reduced: bool = True) -> Cocycle:
    """Cor y on G in the displayed form (values y(sigma^M) and the conjugate sums)."""
    sh = inst.shell
    if reduced:
        TGs, _, _, ybar = _reduced_pair(inst)
        return cor_cyclic(ybar, TGs, sh.H_in_G, sh.sigma, sh.M)
    return cor_cyclic(inst.y, sh.TG, sh.H_in_G, sh.sigma, sh.M)


def solve_abar(inst: KolyvaginInstance) -> tuple:
    """The unique abar in T/p^s with (Cor ybar)(g) = (g - 1) abar."""
    sh = inst.shell
    TGs = sh.reduced(sh.TG)
    c = cor_cocycle(inst)
    a = TGs.coboundary_preimage(c.values)
    if a is None:
        raise NoSolution("Cor(ybar) is not a coboundary")
    if TGs.h0_order() != 1:
        raise NonUnique("H^0(G, T/p^s) is nonzero")
    return tuple(a)


def derivative_cocycle(inst: KolyvaginInstance) -> Cocycle:
    """(D ybar)(h) = sum_{i=1}^{M-1} i sigma^i ybar(sigma^-i h sigma^i) on H."""
    sh = inst.shell
    G = sh.G
    _, THs, _, ybar = _reduced_pair(inst)
    TGs = sh.reduced(sh.TG)
    Rs = THs.ring
    sig, si = sh.sigma, G.inv(sh.sigma)
    flat = []
    for h in sh.H_in_G.gen_images():
        acc = THs.zero_vector()
        conj, pw = h, G.identity()
        for i in range(1, sh.M):
            conj = G.mul(G.mul(si, conj), sig)
            pw = G.mul(pw, sig)
            v = TGs.act(pw, ybar(sh.H_in_G.pullback(conj)))
            acc = vec_add(Rs, acc, vec_scale(Rs, Rs.from_int(i), v))
        flat.extend(acc)
    return Cocycle(THs, tuple(flat))


def _eval_columns(T: GModule, word) -> list:
    """Matrices C_s with z(word) = sum_s C_s z(s) for cocycles z."""
    R = T.ring
    n = T.rank
    C = T._fox_blocks(word)
    cols = []
    for c in range(n):
        col = [R.zero()] * T.cochain_length
        for s, Cs in C.items():
            for j in range(n):
                col[s * n + j] = R.add(col[s * n + j], Cs[c][j])
        cols.append(col)
    return cols


def solve_f_y(inst: KolyvaginInstance, abar=None) -> Cocycle:
    """The cocycle on G with Res_H = D ybar and value -sigma abar at the sigma lift."""
    sh = inst.shell
    TGs = sh.reduced(sh.TG)
    Rs = TGs.ring
    abar = solve_abar(inst) if abar is None else abar
    Dy = derivative_cocycle(inst)
    cols, rhs = [], []
    F = TGs.fox_matrix()
    ncols_fox = len(F[0]) if F else 0
    for j in range(ncols_fox):
        cols.append([row[j] for row in F])
        rhs.append(Rs.zero())
    for h, hv in zip(sh.H_in_G.gen_images(), Dy.gen_values()):
        for col, v in zip(_eval_columns(TGs, sh.G.word(h)), hv):
            cols.append(col)
            rhs.append(v)
    target = vec_neg(Rs, TGs.act(sh.sigma, abar))
    for col, v in zip(_eval_columns(TGs, sh.G.word(sh.sigma)), target):
        cols.append(col)
        rhs.append(v)
    rows = [list(r) for r in zip(*cols)]
    sol = solve_left_raw(Rs, rows, len(cols), rhs)
    if sol is None:
        raise NoSolution("no cocycle restricts to D ybar with the prescribed sigma value")
    if left_kernel_raw(Rs, rows, len(cols)):
        raise NonUnique("f_y is not determined by the constraints")
    return Cocycle(TGs, tuple(sol))


def _div(R: RingCtx, x: int, s: int, target: RingCtx) -> int:
    """x / p^s computed at precision N - s, reduced into target."""
    q = exact_div_p_power(RingElt(R, R.from_int(x)), s)
    if q.ctx.N < target.N:
        raise PrecisionExhausted(f"precision {q.ctx.N} after division is below {target.N}")
    return target.normalize(q.raw)


@dataclass
class KeyFormulaReport:
    lhs: tuple
    rhs: tuple
    abar: tuple
    abar_x: tuple
    passed: bool
    hypotheses: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def difference(self) -> tuple:
        return self.diagnostics.get("difference", ())

    def to_json(self) -> dict:
        return {"lhs": list(self.lhs), "rhs": list(self.rhs), "abar": list(self.abar),
                "abar_x": list(self.abar_x), "pass": self.passed, "conditions": self.hypotheses,
                "diagnostics": self.diagnostics}


def key_formula_check(inst: KolyvaginInstance, require_valid: bool = True) -> KeyFormulaReport:
    rep = validate(inst)
    if require_valid and not rep.ok:
        raise HypothesisFailure(f"hypotheses fail: {', '.join(rep.failures)}")
    sh = inst.shell
    R, s = sh.ring, inst.s
    if R.N - s < s:
        raise PrecisionExhausted(f"precision {R.N} cannot hold two divisions by p^{s}")
    TGs = sh.reduced(sh.TG)
    Rs = TGs.ring
    abar = solve_abar(inst)
    ax = abar_x(inst)
    Fs = [[Rs.normalize(a) for a in r] for r in sh.phi]
    m_coef = Rs.from_int(sh.M // R.p ** s)
    m1 = _div(R, inst.M1, s, Rs)
    dm1 = _div(R, (inst.delta * inst.M1) % R.q, s, Rs)
    d1 = _div(R, (inst.d + 1) % R.q, s, Rs)
    lhs = vec_sub(Rs, vec_scale(Rs, m_coef, mat_vec(Rs, Fs, ax)), vec_scale(Rs, m1, ax))
    rhs = vec_sub(Rs, vec_scale(Rs, dm1, mat_vec(Rs, Fs, abar)), vec_scale(Rs, d1, abar))
    diag = {"difference": list(vec_sub(Rs, lhs, rhs))}
    # f_y and the local description of abar
    try:
        fy = solve_f_y(inst, abar)
        diag["f_y_restricts_to_Dy"] = True
        if sh.sigma0 is not None:
            s0 = sh.local_to_G(sh.sigma0)
            diag["abar_from_f_y"] = list(vec_neg(Rs, fy(s0)))
            diag["abar_matches_f_y"] = tuple(vec_neg(Rs, fy(s0))) == tuple(abar)
    except (NoSolution, NonUnique) as e:
        diag["f_y_error"] = str(e)
    # full-precision lift a of abar
    full = vec_sub(R, cor_cocycle(inst, reduced=False).values,
                   vec_scale(R, R.from_int(inst.M1), inst.x.values))
    a = sh.TG.coboundary_preimage(full)
    if a is not None:
        diag["lift_reduces_to_abar"] = tuple(Rs.normalize(v) for v in a) == tuple(abar)
    return KeyFormulaReport(tuple(lhs), tuple(rhs), tuple(abar), tuple(ax), tuple(lhs) == tuple(rhs),
                            rep.to_json(), diag)


# ---------------------------------------------------------------------------
# theta


def theta(ell: int, a_ell: int, u_ell: int, s1: int, Fr, ring: RingCtx, det: Optional[int] = None):
    """((ell+1)Fr - a)/p^s1)^-1 ((ell+1)Fr - u a)/p^s1) Fr over Z/p^(N - s1).

    ``det`` replaces ell in the second factor; it defaults to ell, which is
    det Fr for a genuine Frobenius.  Returns (context, matrix).
    """
    n = len(Fr)
    Fr = mat_normalize(ring, Fr)
    low = ring.with_precision(ring.N - s1)

    def scaled(c, e=ell):
        A = mat_sub(ring, mat_scale(ring, ring.from_int(e + 1), Fr),
                    mat_scale(ring, ring.from_int(c), mat_identity(ring, n)))
        try:
            return [[low.normalize(ring.div_p_power(a, s1)) for a in r] for r in A]
        except NotDivisible:
            raise NotUnit(f"(ell+1)Fr - {c} is not divisible by p^{s1}") from None

    A = scaled(a_ell)
    B = scaled(u_ell * a_ell, ell if det is None else det)
    try:
        Ai = mat_inverse(low, A)
    except ZeroDivisionError:
        raise NotUnit("((ell+1)Fr - a)/p^s1 is not invertible") from None
    Fl = [[low.normalize(a) for a in r] for r in Fr]
    out = mat_mul(low, mat_mul(low, Ai, B), Fl)
    try:
        mat_inverse(low, out)
    except ZeroDivisionError:
        raise NotUnit("theta is not invertible") from None
    return low, out
