"""Deterministic instance families shared by the tests, scripts and selftest.

Each builder returns plain lists so callers can count, time and report on
them without knowing how the cases were chosen.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .coeff import make_ring
from .cohom import GModule, InvalidAction
from .groups import Abelian, Cyclic, Dihedral, FinGroup, Metacyclic, Product, Subgroup, subgroup_from_gens


@dataclass
class ModuleCase:
    name: str
    group: FinGroup
    p: int
    s: int
    rank: int
    mats: list

    def module(self) -> GModule:
        return GModule(self.group, make_ring(self.p, self.s), self.rank, self.mats)

    @property
    def assignments(self) -> int:
        return (self.p ** self.s) ** (self.rank * self.group.ngens)


def _candidates(p: int, s: int, rank: int) -> list:
    q = p ** s
    m = q - 1
    if rank == 1:
        out = [[[1]], [[m]]]
        # a generator of the units of order dividing p - 1 or p, when nontrivial
        for g in range(2, q):
            if g % p and pow(g, p - 1, q) == 1 and g != m:
                out.append([[g]])
                break
        out.append([[1 + p]])
        return out
    return [
        [[1, 0], [0, 1]],
        [[m, 0], [0, m]],
        [[1, 0], [0, m]],
        [[0, 1], [1, 0]],
        [[0, m], [1, m]],      # order 3
        [[1, 1], [0, 1]],      # unipotent, order q
        [[1, 0], [p, 1]],      # unipotent, order p^(s-1)
    ]


H1_GROUPS = [
    ("C6", Cyclic(6)), ("C9", Cyclic(9)), ("C5", Cyclic(5)), ("C10", Cyclic(10)),
    ("D3", Dihedral(3)), ("D4", Dihedral(4)), ("D5", Dihedral(5)), ("D6", Dihedral(6)),
    ("C3xC3", Abelian([3, 3])), ("C2xC6", Abelian([2, 6])), ("C5xC5", Abelian([5, 5])),
    ("M(7,3,2)", Metacyclic(7, 3, 2)), ("M(9,3,4)", Metacyclic(9, 3, 4)), ("M(5,4,2)", Metacyclic(5, 4, 2)),
    ("M(3,4,2)", Metacyclic(3, 4, 2)), ("M(9,2,8)", Metacyclic(9, 2, 8)), ("C3xD3", Product([Cyclic(3), Dihedral(3)])),
    ("M(12,2,11)", Metacyclic(12, 2, 11)),
]

H1_RINGS = [(3, 1), (3, 2), (5, 1), (5, 2)]


def h1_suite(limit: int = 2 * 10 ** 5, cap: int = 0) -> list:
    """(group, module) pairs with |G| <= 64, p in {3, 5}, s <= 2, rank <= 2.

    For every group, ring and rank the first two admissible actions in a
    fixed candidate order are kept (the first is usually trivial, the
    second not), subject to an enumeration budget for the brute-force side.
    """
    out = []
    for (gname, G), (p, s), rank in itertools.product(H1_GROUPS, H1_RINGS, (1, 2)):
        if G.order() > 64 or (p ** s) ** (rank * G.ngens) * G.order() > limit * 10:
            continue
        if (p ** s) ** (rank * G.ngens) > limit:
            continue
        kept = 0
        R = make_ring(p, s)
        for choice in itertools.product(_candidates(p, s, rank), repeat=G.ngens):
            try:
                GModule(G, R, rank, list(choice))
            except InvalidAction:
                continue
            out.append(ModuleCase(f"{gname} on (Z/{p}^{s})^{rank} #{kept}", G, p, s, rank, list(choice)))
            kept += 1
            if kept == 2:
                break
    return out[:cap] if cap else out


# ---------------------------------------------------------------------------
# restriction and corestriction


@dataclass
class SubgroupCase:
    name: str
    module: ModuleCase
    sub: Subgroup
    normal: bool


def _cyclic_sub(G: Metacyclic, k: int, name: str) -> Subgroup:
    return subgroup_from_gens(G, [(k % G.a, 0)], name)


def res_cor_suite() -> list:
    """Dihedral and metacyclic groups with normal and non-normal subgroups."""
    cases = []
    specs = [
        (Dihedral(3), [(1, "rotations")], [(3, 1), (3, 2)]),
        (Dihedral(4), [(1, "rotations"), (2, "<x^2>")], [(3, 1), (5, 1)]),
        (Dihedral(6), [(1, "rotations"), (2, "<x^2>"), (3, "<x^3>")], [(3, 1), (3, 2)]),
        (Dihedral(9), [(1, "rotations"), (3, "<x^3>")], [(3, 1)]),
        (Metacyclic(7, 3, 2), [(1, "<x>")], [(3, 1), (3, 2)]),
        (Metacyclic(9, 3, 4), [(1, "<x>"), (3, "<x^3>")], [(3, 1)]),
        (Metacyclic(5, 4, 2), [(1, "<x>")], [(5, 1), (3, 1)]),
    ]
    for G, subs, rings in specs:
        for p, s in rings:
            for rank in (1, 2):
                R = make_ring(p, s)
                mod = None
                for choice in itertools.product(_candidates(p, s, rank), repeat=G.ngens):
                    try:
                        GModule(G, R, rank, list(choice))
                    except InvalidAction:
                        continue
                    if any(A != _candidates(p, s, rank)[0] for A in choice) or mod is None:
                        mod = ModuleCase(f"{G!r} (Z/{p}^{s})^{rank}", G, p, s, rank, list(choice))
                        if any(A != _candidates(p, s, rank)[0] for A in choice):
                            break
                for k, nm in subs:
                    H = _cyclic_sub(G, k, nm)
                    cases.append(SubgroupCase(f"{mod.name} {nm}", mod, H, H.is_normal()))
                # a non-normal subgroup generated by a reflection-type element
                Hn = subgroup_from_gens(G, [(0, 1)], "<y>")
                cases.append(SubgroupCase(f"{mod.name} <y>", mod, Hn, Hn.is_normal()))
    return cases


# ---------------------------------------------------------------------------
# split corestriction along a cyclic quotient of order 3


@dataclass
class SplitCase:
    name: str
    module: ModuleCase
    normal: Subgroup
    D: Subgroup
    conjugators: list


def split_suite() -> list:
    """G with a normal N of index 3, G/N cyclic, and D inside N (v splits)."""
    out = []
    A = Abelian([3, 6])
    N_A = subgroup_from_gens(A, [(0, 1)], "N")
    M7 = Metacyclic(7, 3, 2)
    N_7 = subgroup_from_gens(M7, [(1, 0)], "N")
    M9 = Metacyclic(9, 3, 4)
    N_9 = subgroup_from_gens(M9, [(1, 0)], "N")
    M13 = Metacyclic(13, 3, 3)
    N_13 = subgroup_from_gens(M13, [(1, 0)], "N")
    groups = [
        ("C3xC6", A, N_A, [(0, 0), (1, 0), (2, 0)], [[(0, 2)], [(0, 3)], []]),
        ("M(7,3,2)", M7, N_7, [(0, 0), (0, 1), (0, 2)], [[(1, 0)], []]),
        ("M(9,3,4)", M9, N_9, [(0, 0), (0, 1), (0, 2)], [[(3, 0)], [(1, 0)], []]),
        ("M(13,3,3)", M13, N_13, [(0, 0), (0, 1), (0, 2)], [[(1, 0)], []]),
    ]
    for gname, G, N, conj, Dgens in groups:
        for p, s in ((3, 1), (3, 2), (5, 1)):
            for rank in (1, 2):
                R = make_ring(p, s)
                kept = 0
                for choice in itertools.product(_candidates(p, s, rank), repeat=G.ngens):
                    try:
                        GModule(G, R, rank, list(choice))
                    except InvalidAction:
                        continue
                    mod = ModuleCase(f"{gname} (Z/{p}^{s})^{rank}", G, p, s, rank, list(choice))
                    for dg in Dgens:
                        D = subgroup_from_gens(G, dg, "D")
                        out.append(SplitCase(f"{mod.name} D={dg}", mod, N, D, conj))
                    kept += 1
                    if kept == 2:
                        break
    return out


# ---------------------------------------------------------------------------
# local models


def local_model_suite(n: int = 50, seed: int = 0) -> list:
    from .localmodel import random_model

    rng = random.Random(f"local-models:{seed}")
    out = []
    profiles = [(3, 1), (3, 2), (5, 1)]
    for i in range(n):
        p, s = profiles[i % len(profiles)]
        out.append(random_model(rng, p, s))
    return out


# ---------------------------------------------------------------------------
# key formula and Euler systems


KEYFORMULA_MIX = [(3, 1, 40), (5, 1, 30), (3, 2, 15), (5, 2, 15)]
ES_MIX = [(3, 1, 10), (3, 2, 6), (5, 1, 6)]
LAYER_MIX = [(3, 1, 1, 3), (3, 2, 2, 2)]  # (p, s, alpha_max, count)


def profile_seeds(mix) -> list:
    """Flatten [(p, s, count), ...] into (p, s, seed) triples with seeds 1..count."""
    return [(p, s, seed) for p, s, c in mix for seed in range(1, c + 1)]
