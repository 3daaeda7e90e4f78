"""Mock anticyclotomic Euler systems, Kolyvagin descent and the K1/K2 checks.

A tower carries one Kolyvagin prime ell and is built on the key-formula
shell with M = ell + 1:

    G~ ~ G_{K^+},  G ~ G_K,  H ~ G_{K[ell]},
    G~0 > G0 > H0 ~ G_{Q_ell} > G_{K_lambda} > G_{K[ell]_lambda}.

K[1] = K, so the corestriction from K[1] is the identity.  The classes c(1)
on G and c(ell) on H are solved from the linear constraints (E1), (E2) and
unramifiedness.

Anticyclotomic layers use G x Z/p^A with G_{K_alpha} = G x p^alpha Z/p^A.
The Z/p^A factor acts trivially on T and contains no decomposition group,
so lambda splits completely in every layer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .coeff import left_kernel_raw, make_ring, solve_left_raw
from .cohom import (Cocycle, GModule, conj_action, cor_cyclic, induced_module, mat_identity, mat_inverse,
                    mat_vec, pullback, shapiro, shapiro_inverse, vec_add, vec_is_zero, vec_scale, vec_sub)
from .groups import Cyclic, Product, Subgroup
from .keyformula import (KolyvaginInstance, NotUnit, Shell, _check_ES, _check_UR, _eval_columns,
                         _random_solution, abar_x, cor_cocycle, random_shell_params, reduce_cocycle,
                         solve_abar, theta, validate)
from .localmodel import LocalModel, alpha_eval, beta_eval


class NotInvariant(ValueError):
    pass


class ResNotIso(ValueError):
    pass


class ShapiroFailure(ValueError):
    pass


class EmptySolutionSpace(ValueError):
    pass


def kolyvagin_primes(p: int, s: int, bound: int) -> list:
    """Primes ell > 3 with ell + 1 <= bound and v_p(ell + 1) = s."""
    from .coeff import is_prime

    out = []
    for ell in range(5, bound):
        if ell != p and is_prime(ell) and (ell + 1) % p ** s == 0 and (ell + 1) % p ** (s + 1):
            out.append(ell)
    return out


# ---------------------------------------------------------------------------
# towers


@dataclass
class MockTower:
    p: int
    s: int
    ell: int
    shell: Shell
    alpha_max: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def primes(self) -> tuple:
        return (self.ell,)

    @property
    def ring(self):
        return self.shell.ring

    @property
    def ring_s(self):
        return make_ring(self.p, self.s)

    @property
    def sigma(self):
        return self.shell.sigma

    @property
    def frobenius(self):
        return self.shell.phi

    def TG_s(self) -> GModule:
        return self.shell.reduced(self.shell.TG)

    def TH_s(self) -> GModule:
        return self.shell.reduced(self.shell.TH)

    def local_model(self) -> LocalModel:
        """The K_lambda model over T/p^s whose group is the local chain of the shell."""
        if "local" not in self._cache:
            sh = self.shell
            Rs = self.ring_s
            F = [[Rs.normalize(a) for a in r] for r in sh.phi]
            self._cache["local"] = LocalModel(self.ell, Rs, F, tame=sh.params.t, m=sh.m, strict_tame=False)
        return self._cache["local"]

    def local_hom(self, g):
        """G_{K_lambda} (the local model group) -> G."""
        sh = self.shell
        return sh.local_to_G(sh.G0.embed(g))

    def localize(self, z: Cocycle) -> Cocycle:
        """loc_lambda of a cocycle on G with values in T/p^s."""
        return pullback(z, self.local_model().T, self.local_hom)

    def to_json(self) -> dict:
        return {"p": self.p, "s": self.s, "primes": list(self.primes), "alpha_max": self.alpha_max,
                "shell": self.shell.params.to_json()}

    # -- anticyclotomic layers ----------------------------------------------
    def layer(self, alpha: int) -> "Layer":
        key = ("layer", alpha)
        if key not in self._cache:
            self._cache[key] = Layer(self, alpha)
        return self._cache[key]


class Layer:
    """Groups and modules of K_alpha and K_alpha[ell] inside G x Z/p^A."""

    def __init__(self, tower: MockTower, alpha: int):
        if not 0 <= alpha <= tower.alpha_max:
            raise ValueError("layer outside 0..alpha_max")
        sh = tower.shell
        p, A = tower.p, tower.alpha_max
        self.tower, self.alpha = tower, alpha
        self.index = p ** alpha
        self.G = Product([sh.G, Cyclic(p ** (A - alpha))])
        self.H = Product([sh.H, Cyclic(p ** (A - alpha))])
        R = sh.ring
        ident = mat_identity(R, 2)
        self.TG = GModule(self.G, R, 2, list(sh.TG.action) + [ident], check=False)
        hin = sh.H_in_G
        self.H_in_G = Subgroup(self.G, self.H, lambda x: x,
                               lambda x: x if hin.contains(x[0]) else None, "H_alpha")
        self.TH = self.TG.restrict(self.H_in_G)
        self.sigma = (sh.sigma, (0,))
        # G_{K_alpha} inside G_K = G x Z/p^A
        self.in_base_G = Subgroup(tower.layer(0).G if alpha else self.G, self.G,
                                  lambda x: (x[0], ((x[1][0] * self.index) % p ** A,)),
                                  lambda x: (x[0], (x[1][0] // self.index,)) if x[1][0] % self.index == 0 else None,
                                  f"G_K_{alpha}")
        self.gamma = (sh.G.identity(), (1 % p ** A,))

    def from_base(self, z: Cocycle, TG: GModule) -> Cocycle:
        """Pull a cocycle on the shell group G (or H) back to G x p^alpha Z/p^A (or H x ...)."""
        flat = list(z.values) + [TG.ring.zero()] * TG.rank
        return Cocycle(TG, tuple(TG.ring.normalize(a) for a in flat))

    def down_subgroup(self, upper: "Layer", which: str = "G") -> Subgroup:
        """The layer above as an index-p subgroup of this one."""
        key = ("down", upper.alpha, which)
        cache = self.tower._cache
        if key not in cache:
            p = self.tower.p
            amb = self.G if which == "G" else self.H
            grp = upper.G if which == "G" else upper.H
            cache[key] = Subgroup(amb, grp, lambda x: (x[0], ((x[1][0] * p) % amb.factors[1].M,)),
                                  lambda x: (x[0], (x[1][0] // p,)) if x[1][0] % p == 0 else None,
                                  f"{which}_{upper.alpha}")
        return cache[key]


# ---------------------------------------------------------------------------
# instances


@dataclass
class EulerSystemInstance:
    tower: MockTower
    classes: dict       # 1 -> cocycle on G, ell -> cocycle on H (values in T)
    a_values: dict
    u_values: dict
    det_values: dict    # det of the mock Frobenius matrix
    u_pattern: tuple = (1, 0)
    seed: Optional[int] = None

    def kinst(self, ell: int) -> KolyvaginInstance:
        return KolyvaginInstance(self.tower.shell, self.classes[1], self.classes[ell], self.a_values[ell],
                                 self.u_values[ell], self.det_values[ell], self.seed)

    def indices(self) -> list:
        return [1] + list(self.tower.primes)

    def to_json(self) -> dict:
        return {"tower": self.tower.to_json(),
                "classes": {str(n): list(z.values) for n, z in self.classes.items()},
                "a_values": {str(k): v for k, v in self.a_values.items()},
                "u_pattern": list(self.u_pattern),
                "u_values": {str(k): v for k, v in self.u_values.items()},
                "det_values": {str(k): v for k, v in self.det_values.items()},
                "seed": self.seed}

    @classmethod
    def from_json(cls, data: dict) -> "EulerSystemInstance":
        from .keyformula import ShellParams

        tw = data["tower"]
        sh = Shell(ShellParams.from_json(tw["shell"]))
        tower = MockTower(tw["p"], tw["s"], tw["primes"][0], sh, tw.get("alpha_max", 0))
        classes = {}
        for n, vals in data["classes"].items():
            T = sh.TG if int(n) == 1 else sh.TH
            classes[int(n)] = Cocycle(T, tuple(vals))
        ints = lambda d: {int(k): v for k, v in d.items()}
        return cls(tower, classes, ints(data["a_values"]), ints(data["u_values"]), ints(data["det_values"]),
                   tuple(data.get("u_pattern", (1, 0))), data.get("seed"))


@dataclass
class PCompleteInstance:
    base: EulerSystemInstance
    classes: dict       # (n, alpha) -> cocycle on the layer group of K_alpha[n]

    @property
    def tower(self) -> MockTower:
        return self.base.tower

    @property
    def alpha_max(self) -> int:
        return self.tower.alpha_max


def generate_es(seed: int, p: int = 3, s: int = 1, alpha_max: int = 0, max_M: int = 81,
                zero: bool = False, attempts: int = 30):
    """Seeded Euler system (a p-complete one when alpha_max > 0).

    The prime ell is drawn from the Kolyvagin primes with ell + 1 <= max_M and
    u_ell = eps ell^a; the classes solve (E1), (E2) and unramifiedness.
    """
    rng = random.Random(f"eulersys:{p}:{s}:{seed}")
    primes = kolyvagin_primes(p, s, max_M + 1)
    if not primes:
        raise EmptySolutionSpace(f"no ell with ell + 1 <= {max_M} and v_{p}(ell + 1) = {s}")
    q = p ** (s + 2)
    for _ in range(attempts):
        ell = rng.choice(primes)
        eps, aexp = rng.choice((1, -1)), rng.randrange(3)
        u = (eps * pow(ell, aexp, q)) % q
        sp, (a_ell, delta, det) = random_shell_params(rng, p, s, ell=ell, delta=u)
        if (ell + 1 - a_ell) % p ** (s + 1) == 0 or (ell + 1 + a_ell) % p ** (s + 1) == 0:
            continue
        sh = Shell(sp)
        try:
            theta(ell, a_ell, delta, s, sh.phi, sh.ring, det=det)
        except NotUnit:
            continue
        tower = MockTower(p, s, ell, sh, alpha_max)
        if zero:
            x, y = sh.TG.zero_cocycle(), sh.TH.zero_cocycle()
        else:
            best = None
            for _ in range(attempts):
                x, y = _random_solution(rng, sh, a_ell, ("COR", "UR", "E-S"))
                ki = KolyvaginInstance(sh, x, y, a_ell, delta, det)
                score = bool(any(abar_x(ki))) + bool(any(solve_abar(ki)))
                if best is None or score > best[0]:
                    best = (score, x, y)
                if score == 2:
                    break
            _, x, y = best
        inst = EulerSystemInstance(tower, {1: x, ell: y}, {ell: a_ell}, {ell: delta}, {ell: det},
                                   (eps, aexp), seed)
        return inst if alpha_max == 0 else lift_to_layers(inst)
    raise EmptySolutionSpace("no admissible shell found; try another seed")


def zero_system(inst: EulerSystemInstance) -> EulerSystemInstance:
    sh = inst.tower.shell
    cl = {n: (sh.TG if n == 1 else sh.TH).zero_cocycle() for n in inst.classes}
    return EulerSystemInstance(inst.tower, cl, dict(inst.a_values), dict(inst.u_values),
                               dict(inst.det_values), inst.u_pattern, inst.seed)


def lift_to_layers(inst: EulerSystemInstance) -> PCompleteInstance:
    """b(n p^A) pulled back from c(n); lower layers by corestriction down the tower."""
    tw = inst.tower
    A = tw.alpha_max
    top = tw.layer(A)
    classes = {}
    for n in inst.indices():
        T = top.TG if n == 1 else top.TH
        classes[(n, A)] = top.from_base(inst.classes[n], T)
    for alpha in range(A - 1, -1, -1):
        lo, hi = tw.layer(alpha), tw.layer(alpha + 1)
        for n in inst.indices():
            which = "G" if n == 1 else "H"
            sub = lo.down_subgroup(hi, which)
            T = lo.TG if n == 1 else lo.TH
            classes[(n, alpha)] = cor_cyclic(classes[(n, alpha + 1)], T, sub, lo.gamma_in(which), tw.p)
    return PCompleteInstance(inst, classes)


def _gamma_in(self, which: str):
    sh = self.tower.shell
    e = sh.G.identity() if which == "G" else sh.H.identity()
    return (e, (1 % self.G.factors[1].M,))


Layer.gamma_in = _gamma_in


# ---------------------------------------------------------------------------
# validators


def _coboundary_check(T: GModule, vec) -> tuple:
    t = T.coboundary_preimage(vec)
    return (t is not None), ("" if t is not None else "difference is not a coboundary")


def validate_E(inst: EulerSystemInstance) -> dict:
    """Per-axiom report {name: (ok, witness)} for E1, E2, unramifiedness and the shell."""
    out = {}
    tw = inst.tower
    R = tw.ring
    for ell in tw.primes:
        ki = inst.kinst(ell)
        a = inst.a_values[ell]
        diff = vec_sub(R, cor_cocycle(ki, reduced=False).values, vec_scale(R, R.from_int(a), ki.x.values))
        out[f"E1[{ell}]"] = _coboundary_check(tw.shell.TG, diff)
        r = _check_ES(tw.shell, ki)
        out[f"E2[{ell}]"] = (r.ok, r.witness)
        r = _check_UR(tw.shell, ki)
        out[f"unramified[{ell}]"] = (r.ok, r.witness)
        rep = validate(ki, only=("G1", "G2", "G3", "T1", "T2", "T3", "T4", "FR"))
        out[f"shell[{ell}]"] = (rep.ok, ", ".join(rep.failures))
    return out


def validate_pE(pinst: PCompleteInstance) -> dict:
    tw = pinst.tower
    R = tw.ring
    out = {}
    for alpha in range(tw.alpha_max + 1):
        lo = tw.layer(alpha)
        for ell in tw.primes:
            a = pinst.base.a_values[ell]
            y, x = pinst.classes[(ell, alpha)], pinst.classes[(1, alpha)]
            c = cor_cyclic(y, lo.TG, lo.H_in_G, lo.sigma, ell + 1)
            diff = vec_sub(R, c.values, vec_scale(R, R.from_int(a), x.values))
            out[f"pE1[{ell},{alpha}]"] = _coboundary_check(lo.TG, diff)
            out[f"pE2[{ell},{alpha}]"] = _layer_es(pinst, ell, alpha)
        if alpha < tw.alpha_max:
            hi = tw.layer(alpha + 1)
            for n in pinst.base.indices():
                which = "G" if n == 1 else "H"
                T = lo.TG if n == 1 else lo.TH
                c = cor_cyclic(pinst.classes[(n, alpha + 1)], T, lo.down_subgroup(hi, which),
                               lo.gamma_in(which), tw.p)
                diff = vec_sub(R, c.values, pinst.classes[(n, alpha)].values)
                out[f"pE0[{n},{alpha}]"] = _coboundary_check(T, diff)
    return out


def _layer_es(pinst: PCompleteInstance, ell: int, alpha: int) -> tuple:
    """(E2) at layer alpha through the shell check on the G- and H-components."""
    tw = pinst.tower
    sh = tw.shell
    x = Cocycle(sh.TG, pinst.classes[(1, alpha)].values[:sh.TG.cochain_length])
    y = Cocycle(sh.TH, pinst.classes[(ell, alpha)].values[:sh.TH.cochain_length])
    ki = KolyvaginInstance(sh, x, y, pinst.base.a_values[ell], pinst.base.u_values[ell],
                           pinst.base.det_values[ell])
    r = _check_ES(sh, ki)
    return r.ok, r.witness


# ---------------------------------------------------------------------------
# descent


def derivative(z: Cocycle, TG: GModule, sub: Subgroup, lift, M: int) -> Cocycle:
    """(D z)(h) = sum_{i=1}^{M-1} i lift^i z(lift^-i h lift^i) on sub."""
    G = TG.group
    R = TG.ring
    TH = z.module
    li = G.inv(lift)
    flat = []
    for h in sub.gen_images():
        acc = TH.zero_vector()
        conj, pw = h, G.identity()
        for i in range(1, M):
            conj = G.mul(G.mul(li, conj), lift)
            pw = G.mul(pw, lift)
            v = TG.act(pw, z(sub.pullback(conj)))
            acc = vec_add(R, acc, vec_scale(R, R.from_int(i), v))
        flat.extend(acc)
    return Cocycle(TH, tuple(flat))


def is_invariant(z: Cocycle, TG: GModule, sub: Subgroup, lift) -> bool:
    """lift . [z] = [z] in H^1(sub, T)."""
    moved = conj_action(TG, sub, lift, z, check_normal=False)
    diff = vec_sub(TG.ring, moved.values, z.values)
    return z.module.coboundary_preimage(diff) is not None


def res_inverse(z: Cocycle, TG: GModule, sub: Subgroup) -> Cocycle:
    """A cocycle on TG.group whose restriction to sub is cohomologous to z.

    Solves fox(w) = 0 and w(h) - (h - 1) t = z(h) for the generators h of
    sub; raises ResNotIso when the class of w is not unique.
    """
    R = TG.ring
    G = TG.group
    n = TG.rank
    cols, rhs = [], []
    F = TG.fox_matrix()
    for j in range(len(F[0]) if F else 0):
        cols.append([row[j] for row in F] + [R.zero()] * n)
        rhs.append(R.zero())
    for h, hv in zip(sub.gen_images(), z.gen_values()):
        A = TG.mat(h)
        for c, (col, v) in enumerate(zip(_eval_columns(TG, G.word(h)), hv)):
            # w(h)_c - ((A - 1) t)_c
            tpart = [R.neg(R.sub(A[c][j], R.one() if j == c else R.zero())) for j in range(n)]
            cols.append(list(col) + tpart)
            rhs.append(v)
    rows = [list(r) for r in zip(*cols)]
    width = TG.cochain_length + n
    sol = solve_left_raw(R, rows, len(cols), rhs)
    if sol is None:
        raise NotInvariant("class is not in the image of restriction")
    for k in left_kernel_raw(R, rows, len(cols)):
        if TG.coboundary_preimage(k[:TG.cochain_length]) is None:
            raise ResNotIso("restriction is not injective on H^1")
    del width
    return Cocycle(TG, tuple(sol[:TG.cochain_length]))


def descend(inst: EulerSystemInstance, n: int) -> Cocycle:
    """kappa(n) = Cor_K^{K[1]} Res^{-1} D_n c(n), a cocycle on G with values in T/p^s."""
    tw = inst.tower
    TGs = tw.TG_s()
    if n == 1:
        return reduce_cocycle(inst.classes[1], TGs)
    if n not in tw.primes:
        raise ValueError(f"{n} is not in the index set")
    sh = tw.shell
    ybar = reduce_cocycle(inst.classes[n], tw.TH_s())
    D = derivative(ybar, TGs, sh.H_in_G, sh.sigma, sh.M)
    if not is_invariant(D, TGs, sh.H_in_G, sh.sigma):
        raise NotInvariant("D c(n) is not invariant under G_n")
    return res_inverse(D, TGs, sh.H_in_G)


@dataclass
class KolyvaginSystemOutput:
    inst: EulerSystemInstance
    kappa: dict
    chi: dict = field(default_factory=dict)
    K1: dict = field(default_factory=dict)
    K2: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"n": sorted(self.kappa), "K1": {str(n): v for n, v in self.K1.items()},
                "K2": {f"{n},{ell}": v[0] for (n, ell), v in self.K2.items()},
                "chi_used": {f"{n},{ell}": [list(r) for r in m] for (n, ell), m in self.chi.items()},
                "kappa": {str(n): list(z.values) for n, z in self.kappa.items()}}

    @property
    def ok(self) -> bool:
        return all(self.K1.values()) and all(v[0] for v in self.K2.values())


def theta_matrix(inst: EulerSystemInstance, ell: int):
    """theta_ell over Z/p^s (det of the mock Frobenius in the second factor)."""
    tw = inst.tower
    low, th = theta(ell, inst.a_values[ell], inst.u_values[ell], tw.s, tw.frobenius, tw.ring,
                    det=inst.det_values[ell])
    Rs = tw.ring_s
    return [[Rs.normalize(a) for a in r] for r in th]


def check_K1(out: KolyvaginSystemOutput, n: int) -> bool:
    """Finite at ell not dividing n, transverse at ell dividing n; relaxed elsewhere."""
    tw = out.inst.tower
    model = tw.local_model()
    loc = tw.localize(out.kappa[n])
    for ell in tw.primes:
        ok = model.is_transverse(loc) if n % ell == 0 else model.is_finite(loc)
        if not ok:
            return False
    return True


def check_K2(out: KolyvaginSystemOutput, n: int, ell: int) -> tuple:
    """alpha(loc kappa(n)) = theta beta(loc kappa(n ell) tensor sigma); returns (ok, lhs, rhs)."""
    tw = out.inst.tower
    model = tw.local_model()
    Rs = tw.ring_s
    lhs = alpha_eval(model, tw.localize(out.kappa[n]))
    th = theta_matrix(out.inst, ell)
    rhs = mat_vec(Rs, th, beta_eval(model, tw.localize(out.kappa[n * ell])))
    out.chi[(n, ell)] = mat_inverse(Rs, th)
    return tuple(lhs) == tuple(rhs), tuple(lhs), tuple(rhs)


def run_descent(inst: EulerSystemInstance) -> KolyvaginSystemOutput:
    out = KolyvaginSystemOutput(inst, {n: descend(inst, n) for n in inst.indices()})
    for n in inst.indices():
        out.K1[n] = check_K1(out, n)
    for ell in inst.tower.primes:
        out.K2[(1, ell)] = check_K2(out, 1, ell)
    return out


# ---------------------------------------------------------------------------
# anticyclotomic layers


@dataclass
class LayerOutput:
    pinst: PCompleteInstance
    alpha: int
    inner: dict     # n -> class on G_{K_alpha} before Shapiro
    kappa: dict     # n -> class on G_K with values in T tensor R[Z/p^alpha]
    induced: object


def _layer_module_s(tw: MockTower, layer: Layer, which: str = "G") -> GModule:
    key = ("lay_s", layer.alpha, which)
    if key not in tw._cache:
        T = layer.TG if which == "G" else layer.TH
        Rs = tw.ring_s
        tw._cache[key] = GModule(T.group, Rs, T.rank, [[[Rs.normalize(a) for a in r] for r in M] for M in T.action],
                                 check=False)
    return tw._cache[key]


def _layer_sub_s(tw: MockTower, layer: Layer) -> Subgroup:
    return layer.H_in_G


def induced_for_layer(tw: MockTower, alpha: int):
    key = ("ind", alpha)
    if key not in tw._cache:
        base = tw.layer(0)
        T0 = _layer_module_s(tw, base)
        if alpha == 0:
            sub = Subgroup(base.G, base.G, lambda x: x, lambda x: x, "G_K_0")
        else:
            sub = tw.layer(alpha).in_base_G
        tw._cache[key] = induced_module(T0, sub, base.gamma, tw.p ** alpha)
    return tw._cache[key]


def descend_iwasawa(pinst: PCompleteInstance, n: int, alpha: int) -> LayerOutput:
    """kappa(n)_alpha = Sh_alpha Res^{-1} D_n b(n p^alpha), for n in {1, ell}."""
    tw = pinst.tower
    lay = tw.layer(alpha)
    TGs = _layer_module_s(tw, lay)
    if n == 1:
        inner = reduce_cocycle(pinst.classes[(1, alpha)], TGs)
    else:
        THs = TGs.restrict(lay.H_in_G)
        ybar = reduce_cocycle(pinst.classes[(n, alpha)], THs)
        D = derivative(ybar, TGs, lay.H_in_G, lay.sigma, n + 1)
        if not is_invariant(D, TGs, lay.H_in_G, lay.sigma):
            raise NotInvariant("D b(n p^alpha) is not invariant")
        inner = res_inverse(D, TGs, lay.H_in_G)
    ind = induced_for_layer(tw, alpha)
    # the layer group is G_{K_alpha} itself; move the cocycle onto the module used by Shapiro
    Tsub = ind.base.restrict(ind.sub)
    inner = Cocycle(Tsub, inner.values)
    kappa = shapiro(inner, ind)
    back = shapiro_inverse(kappa, ind)
    if Tsub.canonical(back.values) != Tsub.canonical(inner.values):
        raise ShapiroFailure("Shapiro roundtrip changed the class")
    return LayerOutput(pinst, alpha, {n: inner}, {n: kappa}, ind)


def layer_projection_ok(pinst: PCompleteInstance, n: int, alpha: int) -> bool:
    """The image of kappa(n)_{alpha+1} in T tensor R[Z/p^alpha] is kappa(n)_alpha."""
    hi = descend_iwasawa(pinst, n, alpha + 1)
    lo = descend_iwasawa(pinst, n, alpha)
    ind_hi, ind_lo = hi.induced, lo.induced
    flat = []
    for v in hi.kappa[n].gen_values():
        flat.extend(ind_hi.project(v, ind_lo.n))
    W = ind_lo.module
    return W.canonical(tuple(flat)) == W.canonical(lo.kappa[n].values)


def _layer_local(tw: MockTower, kappa: Cocycle, ind) -> list:
    """Components of loc_lambda kappa, one local cocycle per prime of K_alpha above lambda."""
    model = tw.local_model()
    r = model.rank
    hom = lambda g: (tw.local_hom(g), (0,))
    comps = []
    vals = [kappa(hom(g)) for g in model.T.group.gens()]
    for k in range(ind.n):
        flat = []
        for v in vals:
            flat.extend(v[k * r:(k + 1) * r])
        comps.append(Cocycle(model.T, tuple(flat)))
    return comps


def check_layer_K1_K2(pinst: PCompleteInstance, alpha: int) -> dict:
    """Componentwise K1 and K2 for kappa(1)_alpha and kappa(ell)_alpha."""
    tw = pinst.tower
    model = tw.local_model()
    Rs = tw.ring_s
    ell = tw.ell
    k1 = descend_iwasawa(pinst, 1, alpha)
    kl = descend_iwasawa(pinst, ell, alpha)
    c1 = _layer_local(tw, k1.kappa[1], k1.induced)
    cl = _layer_local(tw, kl.kappa[ell], kl.induced)
    th = theta_matrix(pinst.base, ell)
    out = {"K1[1]": all(model.is_finite(c) for c in c1),
           f"K1[{ell}]": all(model.is_transverse(c) for c in cl)}
    ok = True
    for a, b in zip(c1, cl):
        if tuple(alpha_eval(model, a)) != tuple(mat_vec(Rs, th, beta_eval(model, b))):
            ok = False
    out[f"K2[1,{ell}]"] = ok
    return out


def localization_diagram_ok(pinst: PCompleteInstance, n: int, alpha: int) -> bool:
    """loc_lambda Sh_alpha = (semi-local Shapiro) loc on the primes of K_alpha above lambda.

    The right side is sum_k gamma^k iota_0 z(gamma^-k d gamma^k) over the
    conjugators gamma^k of the places above lambda.
    """
    tw = pinst.tower
    res = descend_iwasawa(pinst, n, alpha)
    ind = res.induced
    W = ind.module
    inner = res.inner[n]
    model = tw.local_model()
    G = W.group
    hom = lambda g: (tw.local_hom(g), (0,))
    lhs, rhs = [], []
    for g in model.T.group.gens():
        d = hom(g)
        lhs.extend(res.kappa[n](d))
        acc = W.zero_vector()
        s = G.identity()
        for k in range(ind.n):
            x = ind.sub.pullback(G.mul(G.mul(G.inv(s), d), s))
            acc = vec_add(W.ring, acc, W.act(s, ind.iota0(inner(x))))
            s = G.mul(s, ind.lift)
        rhs.extend(acc)
    Wloc = GModule(model.T.group, W.ring, W.rank, [W.mat(hom(g)) for g in model.T.group.gens()], check=False)
    return Wloc.canonical(tuple(lhs)) == Wloc.canonical(tuple(rhs))


# ---------------------------------------------------------------------------
# mutants


def mutate_es(inst: EulerSystemInstance, axiom: str, seed: int = 0, tries: int = 40) -> EulerSystemInstance:
    """A copy violating exactly one of E1, E2 at the (single) marked prime.

    E1: c(ell) shifted by a random cocycle whose corestriction is not a
    coboundary.  E2: classes resampled from the COR and UR constraints alone
    until the congruence fails.
    """
    tw = inst.tower
    sh = tw.shell
    ell = tw.primes[0]
    R = sh.ring
    rng = random.Random(f"mutate-es:{axiom}:{seed}")
    for _ in range(tries):
        if axiom == "E1":
            Z, _ = sh.TH.z1()
            flat = list(inst.classes[ell].values)
            for r in Z:
                c = rng.randrange(R.q)
                flat = [(a + c * b) % R.q for a, b in zip(flat, r)]
            classes = {1: inst.classes[1], ell: Cocycle(sh.TH, tuple(flat))}
        elif axiom == "E2":
            x, y = _random_solution(rng, sh, inst.a_values[ell], ("COR", "UR"))
            classes = {1: x, ell: y}
        else:
            raise ValueError(f"unknown axiom {axiom}")
        m = EulerSystemInstance(tw, classes, dict(inst.a_values), dict(inst.u_values), dict(inst.det_values),
                                inst.u_pattern, inst.seed)
        rep = validate_E(m)
        other = "E2" if axiom == "E1" else "E1"
        if not rep[f"{axiom}[{ell}]"][0] and (axiom == "E1" or rep[f"{other}[{ell}]"][0]):
            return m
    raise EmptySolutionSpace(f"no {axiom} mutant found")
