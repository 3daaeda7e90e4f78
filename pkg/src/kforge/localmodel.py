"""Finite models of the tame local Galois group at a Kolyvagin prime.

Over Q_ell the model is <tau, f | tau^t = f^(2m) = 1, f tau f^-1 = tau^ell>,
with tau generating the tame inertia quotient (t = p-part of ell + 1 by
default) and f a Frobenius lift.  The K_lambda level is the index-2 subgroup
<tau, f^2>; since ell^2 = 1 mod t it is abelian.  T is unramified: tau acts
trivially and f acts by a chosen matrix F.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .coeff import RingCtx, howell_raw, left_kernel_raw, make_ring, reduce_by_howell, span_size, valuation
from .cohom import (Cocycle, GModule, conj_action, mat_identity, mat_inverse, mat_mul, mat_normalize,
                    mat_pow, mat_sub, mat_vec, vec_add, vec_is_zero, vec_neg, vec_scale)
from .groups import Cyclic, Metacyclic, Subgroup


class TorsionMismatch(ValueError):
    pass


class NotFinite(ValueError):
    pass


class FrobeniusNotTrivial(ValueError):
    pass


class ChiNotInvertible(ValueError):
    pass


def matrix_order(ctx: RingCtx, A, limit: int = 100000) -> int:
    ident = mat_identity(ctx, len(A))
    X = A
    k = 1
    while X != ident:
        X = mat_mul(ctx, X, A)
        k += 1
        if k > limit:
            raise ValueError("matrix order exceeds the search limit")
    return k


def frobenius_period(ctx: RingCtx, F) -> int:
    """m such that F^(2m) = 1 and the norm of F^2 over m steps kills T.

    With e the order of F^2, m = e * p^N makes the norm p^N * (...) = 0, so
    the finite cyclic quotient has the same H^1 as the procyclic group.
    """
    e = matrix_order(ctx, mat_mul(ctx, F, F))
    return e * ctx.p ** ctx.N


@dataclass
class LocalModel:
    ell: int
    ring: RingCtx
    frobenius: tuple  # matrix of Fr_ell on T
    tame: int = 0     # order of <tau>; 0 means p-part of ell + 1
    m: int = 0        # order of Fr_lambda in the model; 0 means frobenius_period
    strict_tame: bool = True  # False admits any tame order with ell^(2m) = 1 mod tame
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        ctx = self.ring
        self.frobenius = mat_normalize(ctx, self.frobenius)
        p = ctx.p
        if self.tame == 0:
            self.tame = p ** valuation(self.ell + 1, p)
        if self.strict_tame and (self.ell + 1) % self.tame:
            raise ValueError("tame order must divide ell + 1")
        if self.m == 0:
            self.m = frobenius_period(ctx, self.frobenius)
        F2m = mat_pow(ctx, self.frobenius, 2 * self.m)
        if F2m != mat_identity(ctx, self.rank):
            raise ValueError("Frobenius order does not divide 2m")
        t, m = self.tame, self.m
        self.Gq = Metacyclic(t, 2 * m, self.ell % t if t > 1 else 0)
        self.Gk = Metacyclic(t, m, (self.ell * self.ell) % t if t > 1 else 0)
        ident = mat_identity(ctx, self.rank)
        self.Tq = GModule(self.Gq, ctx, self.rank, [ident, self.frobenius])
        self.local = Subgroup(self.Gq, self.Gk, lambda g: (g[0], 2 * g[1]),
                              lambda x: (x[0], x[1] // 2) if x[1] % 2 == 0 else None, "G_K_lambda")
        self.T = self.Tq.restrict(self.local)
        # inertia <tau> and the Frobenius subgroup cutting out the ramified extension
        self.inertia = Subgroup(self.Gk, Cyclic(t), lambda g: (g[0], 0),
                                lambda x: (x[0],) if x[1] == 0 else None, "inertia")
        self.frob_sub = Subgroup(self.Gk, Cyclic(m), lambda g: (0, g[0]),
                                 lambda x: (x[1],) if x[0] == 0 else None, "frobenius")

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def rank(self) -> int:
        return len(self.frobenius)

    @property
    def fr_lambda(self):
        return mat_mul(self.ring, self.frobenius, self.frobenius)

    @property
    def tau(self):
        return (1 % self.tame, 0)

    @property
    def phi(self):
        return (0, 1 % self.m)

    def to_json(self) -> dict:
        return {"ell": self.ell, "p": self.p, "s": self.ring.N, "m": self.m,
                "frobenius_matrix": [list(r) for r in self.frobenius], "level": "K_lambda",
                "tame": self.tame}

    # -- subspaces of H^1(K_lambda, T) --------------------------------------
    def _res_kernel(self, sub: Subgroup):
        """Cocycle rows (Howell) of the classes restricting to zero on ``sub``."""
        key = ("ker", sub.name)
        if key not in self._cache:
            T, ctx = self.T, self.ring
            ZH, _ = T.z1()
            S = T.restrict(sub)
            BH, _, _ = S.b1()
            imgs = []
            for r in ZH:
                z = Cocycle(T, tuple(r))
                flat = []
                for x in sub.gen_images():
                    flat.extend(z(x))
                imgs.append(flat)
            k = len(ZH)
            if k == 0:
                rows = []
            else:
                stacked = imgs + [list(b) for b in BH]
                K = left_kernel_raw(ctx, stacked, S.cochain_length) if S.cochain_length else \
                    [list(r) for r in mat_identity(ctx, len(stacked))]
                rows = []
                for c in K:
                    acc = tuple(ctx.zero() for _ in range(T.cochain_length))
                    for ci, zr in zip(c[:k], ZH):
                        acc = vec_add(ctx, acc, vec_scale(ctx, ci, zr))
                    rows.append(list(acc))
            rows += [list(b) for b in T.b1()[0]]
            H, _, piv = howell_raw(ctx, rows, T.cochain_length)
            self._cache[key] = (H, piv)
        return self._cache[key]

    def finite_rows(self):
        return self._res_kernel(self.inertia)

    def transverse_rows(self):
        if not self.torsion_ok():
            raise TorsionMismatch("(ell + 1) T is nonzero")
        return self._res_kernel(self.frob_sub)

    def torsion_ok(self) -> bool:
        return (self.ell + 1) % self.ring.q == 0

    def subspace_order(self, rows_piv) -> int:
        """Order of the image of a cocycle subspace (containing B^1) in H^1."""
        _, piv = rows_piv
        return span_size(self.ring, piv) // self.T.h1().b1_order

    def is_finite(self, z: Cocycle) -> bool:
        return all(vec_is_zero(self.ring, z(x)) for x in self.inertia.gen_images())

    def is_transverse(self, z: Cocycle) -> bool:
        H, piv = self.transverse_rows()
        rem, _ = reduce_by_howell(self.ring, H, piv, list(z.values))
        return vec_is_zero(self.ring, rem)

    def classes(self, rows_piv=None) -> list:
        """Canonical representatives of all classes in a subspace (default: all of H^1)."""
        T, ctx = self.T, self.ring
        H, piv = rows_piv if rows_piv is not None else T.z1()
        out = set()
        ranges = [range(ctx.p ** (ctx.N - v)) for _, v in piv]
        zero = tuple(ctx.zero() for _ in range(T.cochain_length))
        for coeffs in itertools.product(*ranges):
            acc = zero
            for c, r in zip(coeffs, H):
                acc = vec_add(ctx, acc, vec_scale(ctx, c, r))
            out.add(T.canonical(acc))
        return [Cocycle(T, r) for r in sorted(out)]

    # -- quotient targets of alpha and beta ---------------------------------
    def coinvariant_basis(self):
        """Howell basis of (Fr_lambda - 1) T, rows are vectors."""
        ctx = self.ring
        D = mat_sub(ctx, self.fr_lambda, mat_identity(ctx, self.rank))
        cols = [list(c) for c in zip(*D)]
        H, _, piv = howell_raw(ctx, cols, self.rank)
        return H, piv

    def coinvariant_rep(self, v):
        H, piv = self.coinvariant_basis()
        rem, _ = reduce_by_howell(self.ring, H, piv, list(v))
        return tuple(rem)

    def coinvariant_order(self) -> int:
        _, piv = self.coinvariant_basis()
        return self.ring.size ** self.rank // span_size(self.ring, piv)

    def fixed_vectors(self) -> list:
        ctx = self.ring
        F2 = self.fr_lambda
        return [v for v in itertools.product(ctx.elements(), repeat=self.rank) if mat_vec(ctx, F2, v) == tuple(v)]

    # -- the evaluation maps ------------------------------------------------
    def frobenius_act(self, z: Cocycle) -> Cocycle:
        """Action of Fr_ell (conjugation by f) on a cocycle of the K_lambda group."""
        return conj_action(self.Tq, self.local, (0, 1), z, check_normal=False)

    def frobenius_act_tensor(self, pair):
        z, k = pair
        return (self.frobenius_act(z), k)


def alpha_eval(model: LocalModel, z: Cocycle):
    """Evaluation at Fr_lambda, as a canonical element of T/(Fr_lambda - 1)T."""
    if not model.is_finite(z):
        raise NotFinite("class is ramified")
    return model.coinvariant_rep(z(model.phi))


def beta_eval(model: LocalModel, z: Cocycle, sigma_power: int = 1):
    """xi tensor sigma^k -> xi(tau^k) = k xi(tau) in T^{Fr_lambda = 1}."""
    return z((sigma_power % model.tame, 0))


def beta_inverse(model: LocalModel, v) -> tuple:
    """Transverse class xi with xi(tau) = v and xi(Fr_lambda) = 0, tensored with sigma."""
    ctx = model.ring
    v = tuple(ctx.normalize(a) for a in v)
    if mat_vec(ctx, model.fr_lambda, v) != v:
        raise ValueError("vector is not fixed by Fr_lambda")
    z = model.T.cocycle([v, tuple(ctx.zero() for _ in range(model.rank))])
    return (z, 1)


def singular_equal(model: LocalModel, a: tuple, b: tuple) -> bool:
    """Equality in H^1_s tensor G_ell of pairs (cocycle, sigma power)."""
    return beta_eval(model, a[0], a[1]) == beta_eval(model, b[0], b[1])


def finite_singular(model: LocalModel, z: Cocycle, chi=None) -> tuple:
    """beta^-1 chi alpha: H^1_f -> H^1_s tensor G_ell."""
    ctx = model.ring
    if model.fr_lambda != mat_identity(ctx, model.rank):
        raise FrobeniusNotTrivial("Fr_lambda acts nontrivially on T")
    a = alpha_eval(model, z)
    if chi is not None:
        chi = mat_normalize(ctx, chi)
        try:
            mat_inverse(ctx, chi)
        except ZeroDivisionError:
            raise ChiNotInvertible("chi is not invertible") from None
        a = mat_vec(ctx, chi, a)
    return beta_inverse(model, a)


def finite_part(model: LocalModel):
    return model.finite_rows()


def transverse_part(model: LocalModel):
    return model.transverse_rows()


def random_model(rng, p: int, s: int, trivial_fr_lambda: bool = True, max_order: int = 12) -> LocalModel:
    """Seeded local model: ell prime with p^s | ell + 1, F with F^2 = 1 (or of small order)."""
    from .coeff import is_prime

    ctx = make_ring(p, s)
    q = ctx.q
    while True:
        ell = rng.randrange(q, 40 * q)
        if (ell + 1) % q == 0 and is_prime(ell):
            break
    while True:
        P = tuple(tuple(rng.randrange(q) for _ in range(2)) for _ in range(2))
        try:
            Pi = mat_inverse(ctx, P)
        except ZeroDivisionError:
            continue
        if trivial_fr_lambda:
            d = ((1, 0), (0, q - 1)) if rng.random() < 0.8 else ((rng.choice([1, q - 1]), 0), (0, rng.choice([1, q - 1])))
            F = mat_mul(ctx, mat_mul(ctx, P, d), Pi)
        else:
            F = P
        try:
            if matrix_order(ctx, mat_mul(ctx, F, F), limit=max_order) <= max_order:
                return LocalModel(ell, ctx, F)
        except ValueError:
            continue
