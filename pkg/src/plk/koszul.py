"""Simple modules, Koszul duality checks, truncations, twists and the algebraic spectral sequence.

The objects of the base category B are listed in increasing order
Y_m < ... < Y_1, so the object at position i has index j = m - i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .ainfty import AInftyCategory, Gen, Report, is_unit, unit
from .amod import (Bimodule, BimoduleFunctor, Cone, HomComplex, Module, PreModHom, bimodule_to_functor,
                   compose_homs, cone, cone_les_ok, dualize_bimodule, identity_hom, is_closed,
                   post_compose_map, pre_compose_map, validate_bimodule, yoneda)
from .gf2chain import (ChainComplex, ChainMap, FilteredComplex, GF2Matrix, SpectralPages, cohomology,
                       spectral_sequence)


def obj_index(b: AInftyCategory, y: str) -> int:
    return len(b.objects) - b.pos[y]


def obj_of_index(b: AInftyCategory, j: int) -> str:
    return b.objects[len(b.objects) - j]


def simple_module(b: AInftyCategory, y: str) -> Module:
    """K at y in degree 0, zero elsewhere."""
    return Module("right", b, {f"s[{y}]": (y, 0)}, {}, b.shift_n)


def simple_modules(b: AInftyCategory) -> List[Module]:
    """Simples listed as Y_1^!, ..., Y_m^! (the reverse of the order of B)."""
    return [simple_module(b, y) for y in reversed(b.objects)]


def simples_directedness(b: AInftyCategory) -> Dict[Tuple[str, str], Dict[int, int]]:
    """Cohomology dims of hom(Y_j^!, Y_k^!) for all pairs, keyed by object names."""
    out = {}
    for y in b.objects:
        for z in b.objects:
            out[(y, z)] = HomComplex(simple_module(b, y), simple_module(b, z)).cohomology_dims()
    return out


def check_simples(b: AInftyCategory) -> List[str]:
    """hom(Y_j^!, Y_k^!) = 0 for j > k and K.e for j = k, at chain level."""
    probs = []
    for y in b.objects:
        for z in b.objects:
            j, k = obj_index(b, y), obj_index(b, z)
            hc = HomComplex(simple_module(b, y), simple_module(b, z))
            size = hc.space.total_dim()
            if j > k and size:
                probs.append(f"hom({y}^!, {z}^!) is nonzero")
            if j == k and (size != 1 or hc.space.dim(0) != 1):
                probs.append(f"hom({y}^!, {y}^!) is not spanned by the identity")
    return probs


def koszul_dual_category(b: AInftyCategory) -> Tuple[AInftyCategory, Dict[str, PreModHom]]:
    """The dg category B^! of simple modules, with generators named by hom-complex basis labels."""
    sims = {y: simple_module(b, y) for y in b.objects}
    order = list(reversed(b.objects))
    name = lambda y: f"{y}^!"
    gens, homs = [], {}
    hcs = {}
    for i, y in enumerate(order):
        for z in order[i + 1:]:
            hc = HomComplex(sims[y], sims[z])
            hcs[(y, z)] = hc
            for k, items in hc.basis.items():
                for ch, out in items:
                    lab = f"{name(y)}>{name(z)}:{hc._label(ch, out)}"
                    gens.append(Gen(lab, name(y), name(z), k))
                    homs[lab] = PreModHom(sims[y], sims[z], {ch: {out}}, k)

    def express(y, z, t: PreModHom):
        return frozenset(f"{name(y)}>{name(z)}:{HomComplex._label(ch, o)}" for ch, v in t.comps.items() for o in v)

    mus: Dict[int, Dict[tuple, frozenset]] = {1: {}, 2: {}}
    for (y, z), hc in hcs.items():
        for k, items in hc.basis.items():
            for ch, out in items:
                lab = f"{name(y)}>{name(z)}:{hc._label(ch, out)}"
                dt = hc.d({ch: {out}})
                if dt:
                    mus[1][(lab,)] = express(y, z, PreModHom(sims[y], sims[z], dt, k + 1))
    for (y, z) in hcs:
        for (z2, w) in hcs:
            if z2 != z:
                continue
            for l1, h1 in homs.items():
                if not l1.startswith(f"{name(y)}>{name(z)}:"):
                    continue
                for l2, h2 in homs.items():
                    if not l2.startswith(f"{name(z)}>{name(w)}:"):
                        continue
                    c = compose_homs(h2, h1)
                    if c.comps:
                        mus[2][(l2, l1)] = express(y, w, c)
    cat = AInftyCategory([name(y) for y in order], gens, mus, b.shift_n)
    return cat, homs


@dataclass
class KoszulWitness:
    a: AInftyCategory
    b: AInftyCategory
    delta: Bimodule
    functor: Optional[BimoduleFunctor]
    correspondence: Dict[str, str]
    certificates: Dict[Tuple[str, str], bool] = field(default_factory=dict)
    problems: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems and all(self.certificates.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "correspondence": self.correspondence,
                "certificates": {f"{x}->{y}": v for (x, y), v in self.certificates.items()},
                "problems": self.problems}


def delta_correspondence(delta: Bimodule) -> Tuple[Dict[str, str], List[str]]:
    """Match objects X of A with the unique Y of B where Delta(Y, X) is one-dimensional."""
    a, b = delta.left, delta.right
    corr, probs = {}, []
    for x in a.objects:
        hits = []
        for y in b.objects:
            dim = delta.space(y, x).total_dim()
            if dim > 1:
                probs.append(f"dim Delta({y},{x}) = {dim} > 1")
            elif dim == 1:
                hits.append(y)
        if len(hits) != 1:
            probs.append(f"object {x} pairs with {len(hits)} objects of the other side")
        else:
            corr[x] = hits[0]
    if len(set(corr.values())) != len(corr) or len(a.objects) != len(b.objects):
        probs.append("Delta does not induce a bijection of objects")
    return corr, probs


def functor_first_order_map(f: BimoduleFunctor, x0: str, x1: str) -> ChainMap:
    """(r_N)^1 : hom_A(x0, x1) -> hom_Q(N(-, x0), N(-, x1)) as a chain map."""
    a = f.n.left
    src = a.hom_complex(x0, x1)
    hc = HomComplex(f.modules[x0], f.modules[x1])
    maps = {}
    for k in sorted(set(src.space.degrees()) | set(hc.space.degrees())):
        cols = []
        for lab in src.space.labels(k):
            t = f.component((lab,))
            cols.append(hc.to_bits(t.comps, k))
        maps[k] = GF2Matrix.from_columns(hc.space.dim(k), cols)
    return ChainMap(src, hc.complex(), maps)


def koszul_verify(a: AInftyCategory, b: AInftyCategory, delta: Bimodule) -> KoszulWitness:
    """Check the delta dimension law and that (r_Delta)^1 is a quasi-isomorphism on every hom."""
    corr, probs = delta_correspondence(delta)
    w = KoszulWitness(a, b, delta, None, corr, {}, probs)
    if probs:
        return w
    rep = validate_bimodule(delta)
    if not rep.ok:
        w.problems.append("Delta fails the bimodule relations")
        return w
    order = [b.pos[corr[x]] for x in a.objects]
    if order != sorted(order, reverse=True):
        w.problems.append("correspondence is not order reversing")
    f = bimodule_to_functor(delta)
    w.functor = f
    frep = f.check()
    if not frep.ok:
        w.problems.append("r_Delta fails the functor equations")
    for i, x0 in enumerate(a.objects):
        for x1 in a.objects[i:]:
            w.certificates[(x0, x1)] = functor_first_order_map(f, x0, x1).is_quasi_iso()
    return w


def dual_koszul_check(w: KoszulWitness) -> KoszulWitness:
    """Repeat the check for the dual bimodule D(Delta) over (B, A)."""
    d = dualize_bimodule(w.delta)
    return koszul_verify(w.b, w.a, d)


def m2_example() -> Tuple[AInftyCategory, AInftyCategory, Bimodule]:
    """Two-object pair: B = (Y2 < Y1, b), A = (X1 < X2, a of degree 1), mu(a, d1, b) = d2."""
    b = AInftyCategory(["Y2", "Y1"], [Gen("b", "Y2", "Y1", 0)])
    a = AInftyCategory(["X1", "X2"], [Gen("a", "X1", "X2", 1)])
    delta = Bimodule(a, b, {"d1": ("Y1", "X1", 0), "d2": ("Y2", "X2", 0)},
                     {("a", "d1", "b"): {"d2"}})
    return a, b, delta


def point_pair() -> Tuple[AInftyCategory, AInftyCategory, Bimodule]:
    a = AInftyCategory(["X"], [])
    b = AInftyCategory(["Y"], [])
    return a, b, Bimodule(a, b, {"d": ("Y", "X", 0)}, {})


# truncation and twists


def truncate(m: Module, k: int) -> Tuple[Module, PreModHom]:
    """F_k M (keeps the objects Y_j with j >= k + 1) and its inclusion into M."""
    b = m.base
    if not 0 <= k <= len(b.objects):
        raise ValueError("k out of range")
    keep = {x for x in m.elements if obj_index(b, m.obj(x)) >= k + 1}
    mu = {ch: v for ch, v in m.mu.items() if ch[0] in keep}
    fm = Module("right", b, {x: m.elements[x] for x in keep}, mu, m.shift_n)
    xi = PreModHom(fm, m, {(x,): {x} for x in keep}, 0)
    return fm, xi


def tensor_with_yoneda(m: Module, y: str) -> Tuple[Module, Dict[str, Tuple[str, str]]]:
    """M(y) (as a complex) tensored with the right Yoneda module of y, and the label pairs."""
    yy = yoneda(m.base, y, "right")
    tag = lambda v, g: f"{v}*{g}"
    els, pairs = {}, {}
    for v in m.at(y):
        for g, (obj, k) in yy.elements.items():
            els[tag(v, g)] = (obj, m.deg(v) + k)
            pairs[tag(v, g)] = (v, g[1:-1])
    mu: Dict[tuple, set] = {}
    for v in m.at(y):
        for g in yy.elements:
            key = (tag(v, g),)
            cur = mu.setdefault(key, set())
            for dv in m.act((v,)):
                cur ^= {tag(dv, g)}
            for dg in yy.act((g,)):
                cur ^= {tag(v, dg)}
    for ch, out in yy.mu.items():
        if len(ch) < 2:
            continue
        for v in m.at(y):
            mu[(tag(v, ch[0]),) + ch[1:]] = {tag(v, o) for o in out}
    return Module("right", m.base, els, mu, m.shift_n), pairs


def evaluation_hom(m: Module, y: str) -> PreModHom:
    """t: M(y) x Y^r -> M with t^d(v*<g>, b...) = mu^{d+1}(v, g, b...)."""
    tm, pairs = tensor_with_yoneda(m, y)
    b = m.base
    comps = {}
    for lab, (v, g) in pairs.items():
        tails = [()] + [ch for ch in b.chains(len(b.objects)) if b.dst(ch[0]) == b.src(g)]
        for tail in tails:
            if is_unit(g) and tail:
                continue
            out = m.act((v, g) + tail)
            if out:
                comps[(lab,) + tail] = set(out)
    t = PreModHom(tm, m, comps, 0)
    if not is_closed(t):
        raise AssertionError("evaluation homomorphism is not closed")
    return t


@dataclass
class Twist:
    module: Module
    nu: PreModHom
    steps: List[Cone]


def twist(m: Module, k: int) -> Twist:
    """L_k M by iterated cones of evaluation maps, with nu^k: M -> L_k M."""
    b = m.base
    if not 0 <= k <= len(b.objects):
        raise ValueError("k out of range")
    cur = m
    nu = identity_hom(m)
    steps = []
    for j in range(1, k + 1):
        y = obj_of_index(b, j)
        t = evaluation_hom(cur, y)
        c = cone(t)
        steps.append(c)
        nu = compose_homs(c.iota1, nu)
        cur = c.module
    return Twist(cur, nu, steps)


def ladder_exact(tw: Twist) -> bool:
    return all(cone_les_ok(c) for c in tw.steps)


def twist_property(tw: Twist, n: Module) -> bool:
    """Pre-composition with nu^k is a quasi-isomorphism hom(L_k M, N) -> hom(M, N)."""
    return pre_compose_map(tw.nu, n).is_quasi_iso()


def adjunction_check(n: Module, m: Module, k: int) -> bool:
    """Post-composition with the inclusion F_k M -> M is a quasi-isomorphism on hom(N, -)."""
    fm, xi = truncate(m, k)
    return post_compose_map(xi, n).is_quasi_iso()


def in_subcategory(n: Module, k: int) -> bool:
    b = n.base
    return all(n.is_acyclic_at(obj_of_index(b, j)) for j in range(1, k + 1))


# the algebraic spectral sequence


def algebraic_filtration(m: Module, n: Module) -> Tuple[HomComplex, FilteredComplex]:
    """G^p = hom(M, F_{p-1} N) for p = 1, ..., m: basis elements with output at Y_j, j >= p."""
    hc = HomComplex(m, n)
    cx = hc.complex()
    b = n.base
    size = len(b.objects)
    levels = []
    for p in range(1, size + 1):
        keep = set()
        for k, items in hc.basis.items():
            for i, (ch, y) in enumerate(items):
                if obj_index(b, n.obj(y)) >= p:
                    keep.add(cx.space.labels(k)[i])
        levels.append(keep)
    return hc, FilteredComplex(cx, levels, start=1)


def algebraic_ss(m: Module, n: Module) -> SpectralPages:
    _, f = algebraic_filtration(m, n)
    return spectral_sequence(f)


def e1_formula(m: Module, n: Module) -> Dict[Tuple[int, int], int]:
    """sum over a + b = k + j of dim H^a(hom(M, Y_k^!)) dim H^b(N(Y_k))."""
    b = n.base
    out: Dict[Tuple[int, int], int] = {}
    for k in range(1, len(b.objects) + 1):
        y = obj_of_index(b, k)
        h1 = HomComplex(m, simple_module(b, y)).cohomology_dims()
        h2 = {kk: v for kk, v in cohomology(n.complex(y)).dims.items() if v}
        for da, va in h1.items():
            for db, vb in h2.items():
                tot = da + db
                key = (k, tot - k)
                out[key] = out.get(key, 0) + va * vb
    return {key: v for key, v in out.items() if v}
