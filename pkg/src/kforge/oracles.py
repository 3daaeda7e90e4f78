"""Independent reference computations used to cross-check the main code paths.

Nothing here shares logic with the Howell/Fox machinery.  Cocycles are found by
enumerating every assignment of generator values and extending it over the
Cayley graph, which never looks at the relators.
"""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np

from .groups import FinGroup


def _element_matrices(G: FinGroup, gen_mats, q: int):
    """Matrices of all elements by BFS on the Cayley graph (right multiplication)."""
    n = gen_mats[0].shape[0] if gen_mats else 0
    e = G.identity()
    mats = {e: np.eye(n, dtype=np.int64)}
    order = [e]
    parent = {}
    dq = deque([e])
    while dq:
        x = dq.popleft()
        for k, s in enumerate(G.gens()):
            y = G.mul(x, s)
            if y not in mats:
                mats[y] = (mats[x] @ gen_mats[k]) % q
                parent[y] = (x, k)
                order.append(y)
                dq.append(y)
    return mats, order, parent


def brute_force_h1(G: FinGroup, q: int, rank: int, gen_mats, limit: int = 10 ** 6):
    """All cocycles and coboundaries for (Z/q)^rank with the given generator matrices.

    Returns (cocycles, coboundaries) as sets of flat tuples of generator values.
    Every assignment of generator values is extended along a spanning tree of
    the Cayley graph using z(xs) = z(x) + x z(s); it is a cocycle iff every
    remaining edge is consistent.
    """
    k = G.ngens
    A = [np.array(m, dtype=np.int64) % q for m in gen_mats]
    size = q ** (rank * k)
    if size > limit:
        raise ValueError(f"{size} assignments exceed the enumeration limit")
    mats, order, parent = _element_matrices(G, A, q)
    # all assignments at once: shape (size, k, rank)
    idx = np.arange(size, dtype=np.int64)
    digits = np.empty((size, k * rank), dtype=np.int64)
    for j in range(k * rank):
        digits[:, j] = idx % q
        idx //= q
    Z = digits.reshape(size, k, rank)
    vals = {G.identity(): np.zeros((size, rank), dtype=np.int64)}
    for y in order[1:]:
        x, s = parent[y]
        vals[y] = (vals[x] + Z[:, s, :] @ mats[x].T) % q
    ok = np.ones(size, dtype=bool)
    for x in order:
        for s in range(k):
            y = G.mul(x, G.gens()[s])
            pred = (vals[x] + Z[:, s, :] @ mats[x].T) % q
            ok &= np.all(pred == vals[y], axis=1)
    cocycles = {tuple(int(v) for v in row) for row in digits[ok]}
    cob = set()
    for t in np.ndindex(*([q] * rank)):
        tv = np.array(t, dtype=np.int64)
        flat = []
        for M in A:
            flat.extend(int(v) for v in ((M @ tv - tv) % q))
        cob.add(tuple(flat))
    return cocycles, cob


def class_partition(cocycles, coboundaries, q: int) -> set:
    """Cocycles grouped into classes modulo the coboundaries (sets of frozensets)."""
    cob = [np.array(b, dtype=np.int64) for b in coboundaries]
    remaining = set(cocycles)
    classes = set()
    while remaining:
        z = np.array(next(iter(remaining)), dtype=np.int64)
        cls = frozenset(tuple(int(v) for v in ((z + b) % q)) for b in cob)
        classes.add(cls)
        remaining -= cls
    return classes


def brute_force_h0(G: FinGroup, q: int, rank: int, gen_mats) -> int:
    """Number of fixed vectors, by enumeration."""
    A = [np.array(m, dtype=np.int64) % q for m in gen_mats]
    count = 0
    for t in np.ndindex(*([q] * rank)):
        tv = np.array(t, dtype=np.int64)
        if all(np.array_equal((M @ tv) % q, tv) for M in A):
            count += 1
    return count


# ---------------------------------------------------------------------------
# key formula by the coset formula and exhaustive search


def _vec_mod(v, q):
    return tuple(int(a) % q for a in v)


def naive_transfer(inst, g, q: int) -> tuple:
    """Cor(y)(g) mod q as the sum over i of sigma^j y(sigma^-j g sigma^i)."""
    sh = inst.shell
    G, T = sh.G, sh.TG
    sig, M = sh.sigma, sh.M
    pows = [G.identity()]
    for _ in range(M):
        pows.append(G.mul(pows[-1], sig))
    inv_pows = [G.inv(x) for x in pows]
    acc = [0] * T.rank
    for i in range(M):
        gi = G.mul(g, pows[i])
        for j in range(M):
            h = sh.H_in_G.pullback(G.mul(inv_pows[j], gi))
            if h is not None:
                break
        else:
            raise ValueError("no coset representative found")
        v = _vec_mod(inst.y(h), q)
        A = [[int(a) % q for a in r] for r in T.mat(pows[j])]
        for r in range(T.rank):
            acc[r] = (acc[r] + sum(A[r][c] * v[c] for c in range(T.rank))) % q
    return tuple(acc)


def naive_abar(inst) -> list:
    """Every a in (Z/p^s)^2 with (g - 1) a = Cor(y)(g) on the generators of G."""
    sh = inst.shell
    p, s = sh.ring.p, inst.s
    q = p ** s
    G, T = sh.G, sh.TG
    targets = [(naive_transfer(inst, g, q), [[int(a) % q for a in r] for r in T.mat(g)]) for g in G.gens()]
    out = []
    for a in itertools.product(range(q), repeat=T.rank):
        if all(all((sum(A[r][c] * a[c] for c in range(T.rank)) - a[r] - tv[r]) % q == 0
                   for r in range(T.rank)) for tv, A in targets):
            out.append(a)
    return out


def naive_key_formula(inst) -> dict:
    """Both sides of the key formula with integer arithmetic mod p^s."""
    sh = inst.shell
    p, s = sh.ring.p, inst.s
    qs, qN = p ** s, sh.ring.q
    sols = naive_abar(inst)
    if len(sols) != 1:
        return {"unique": False, "solutions": len(sols)}
    abar = sols[0]
    f2 = sh.Gt0.power(sh.frob_lift, 2)
    ax = _vec_mod(inst.x(sh.local_to_G(f2)), qs)
    F = [[int(a) % qs for a in r] for r in sh.phi]

    def div(x):
        x %= qN
        if x % qs:
            raise ValueError(f"{x} is not divisible by p^{s}")
        return (x // qs) % qs

    def comb(c1, c0, v):
        Fv = [sum(F[r][c] * v[c] for c in range(len(v))) for r in range(len(v))]
        return tuple((c1 * a - c0 * b) % qs for a, b in zip(Fv, v))

    lhs = comb((sh.M // qs) % qs, div(inst.M1), ax)
    rhs = comb(div(inst.delta * inst.M1), div(inst.d + 1), abar)
    return {"unique": True, "abar": abar, "abar_x": ax, "lhs": lhs, "rhs": rhs, "passed": lhs == rhs}


# ---------------------------------------------------------------------------
# sieve by a second route: sympy residue symbols and multiplicities


def sieve_second_path(table: dict, p: int, D_K: int, N: int, t1: int, epsilon: int = 1, a: int = 0) -> dict:
    """Sets of inert, candidate and member primes computed without the sieve module."""
    from sympy import isprime, legendre_symbol, multiplicity

    inert, cand, mem = set(), set(), set()
    q = p ** t1
    for ell, a_ell in table.items():
        if ell < 3 or not isprime(ell) or (N * p * D_K) % ell == 0:
            continue
        if legendre_symbol(D_K % ell, ell) != -1:
            continue
        inert.add(ell)
        u = epsilon * pow(ell, a, q)
        if (ell + 1) % q or (u * a_ell) % q:
            continue
        cand.add(ell)
        vals = [multiplicity(p, ell + 1 + a_ell) if ell + 1 + a_ell else None,
                multiplicity(p, ell + 1 - a_ell) if ell + 1 - a_ell else None]
        if vals == [t1, t1]:
            mem.add(ell)
    return {"inert": inert, "candidate": cand, "member": mem}


def ec_trace_by_symbols(a4: int, a6: int, ell: int) -> int:
    """a_ell = -sum_x ((x^3 + a4 x + a6) | ell), with sympy's Legendre symbol."""
    from sympy import legendre_symbol

    total = 0
    for x in range(ell):
        r = (x ** 3 + a4 * x + a6) % ell
        if r:
            total += legendre_symbol(r, ell)
    return -total


def quadratic_residue_symbol(a: int, ell: int) -> int:
    """(a | ell) for an odd prime ell by listing the squares."""
    a %= ell
    if a == 0:
        return 0
    squares = {x * x % ell for x in range(1, ell)}
    return 1 if a in squares else -1
