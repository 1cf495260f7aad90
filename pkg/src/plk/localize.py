"""Drinfeld quotients of dg categories by full subcategories, orthogonality, and quasi-unit inversion.

Quotient morphisms are formal sums of bar chains (b_{d+1}, ..., b_1) of basis
labels, stored as frozensets (F2 coefficients). The interior objects of a chain
lie in the quotiented subcategory and the chain has degree sum(deg b_i) - d.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .ainfty import AInftyCategory, is_unit, unit
from .amod import Cone, HomComplex, Module, PreModHom, compose_homs, cone, d_hom, identity_hom, is_closed
from .gf2chain import ChainComplex, ChainMap, GF2Matrix, GradedSpace, cohomology

Chain = Tuple[str, ...]
QElem = FrozenSet[Chain]


def _xor(acc: set, items: Iterable):
    for it in items:
        if it in acc:
            acc.remove(it)
        else:
            acc.add(it)


class DGCategory:
    """Finite dg category given on a graded basis of labels: mu^1, mu^2 and units as label sets."""

    def __init__(self, objects: Sequence[str]):
        self.objects = tuple(objects)
        self._basis: Dict[Tuple[str, str], Dict[int, List[str]]] = {}
        self._info: Dict[str, Tuple[str, str, int]] = {}

    def basis(self, x: str, y: str) -> Dict[int, List[str]]:
        return self._basis.get((x, y), {})

    def labels(self, x: str, y: str) -> List[str]:
        return [lab for k in sorted(self.basis(x, y)) for lab in self.basis(x, y)[k]]

    def src(self, lab: str) -> str:
        return self._info[lab][0]

    def dst(self, lab: str) -> str:
        return self._info[lab][1]

    def deg(self, lab: str) -> int:
        return self._info[lab][2]

    def _add(self, lab: str, x: str, y: str, k: int):
        self._info[lab] = (x, y, k)
        self._basis.setdefault((x, y), {}).setdefault(k, []).append(lab)

    def hom_complex(self, x: str, y: str) -> ChainComplex:
        space = GradedSpace({k: tuple(v) for k, v in self.basis(x, y).items()})
        diff = {}
        for k in space.degrees():
            idx = space.index(k + 1)
            cols = []
            for lab in space.labels(k):
                v = 0
                for o in self.d(lab):
                    v ^= 1 << idx[o]
                cols.append(v)
            diff[k] = GF2Matrix.from_columns(space.dim(k + 1), cols)
        return ChainComplex(space, diff, check=False)

    # to be supplied by subclasses
    def d(self, lab: str) -> FrozenSet[str]:
        raise NotImplementedError

    def m2(self, l2: str, l1: str) -> FrozenSet[str]:
        raise NotImplementedError

    def unit(self, x: str) -> FrozenSet[str]:
        raise NotImplementedError

    def is_unit_label(self, lab: str) -> bool:
        return False


class CategoryDG(DGCategory):
    """A directed category with mu^d = 0 for d >= 3, units included as basis labels."""

    def __init__(self, cat: AInftyCategory):
        extra = [d for d, t in cat.mus.items() if d >= 3 and t]
        if extra:
            raise ValueError(f"category is not dg: mu^{extra[0]} is nonzero")
        super().__init__(cat.objects)
        self.cat = cat
        for x in cat.objects:
            self._add(unit(x), x, x, 0)
        for g in cat.gens.values():
            self._add(g.label, g.src, g.dst, g.deg)

    def d(self, lab):
        return self.cat.mu((lab,))

    def m2(self, l2, l1):
        return self.cat.mu((l2, l1))

    def unit(self, x):
        return frozenset([unit(x)])

    def is_unit_label(self, lab):
        return is_unit(lab)


class ModuleDG(DGCategory):
    """The dg category of right modules on a named list of objects, with hom-complex bases."""

    def __init__(self, modules: Mapping[str, Module]):
        super().__init__(list(modules))
        self.modules = dict(modules)
        self.hcs: Dict[Tuple[str, str], HomComplex] = {}
        self._hom: Dict[str, PreModHom] = {}
        for x, mx in self.modules.items():
            for y, my in self.modules.items():
                hc = HomComplex(mx, my)
                self.hcs[(x, y)] = hc
                for k, items in hc.basis.items():
                    for ch, out in items:
                        lab = f"{x}>{y}:{hc._label(ch, out)}"
                        self._add(lab, x, y, k)
                        self._hom[lab] = PreModHom(mx, my, {ch: {out}}, k)

    def hom_of(self, lab: str) -> PreModHom:
        return self._hom[lab]

    def express(self, x: str, y: str, t: PreModHom) -> FrozenSet[str]:
        hc = self.hcs[(x, y)]
        return frozenset(f"{x}>{y}:{hc._label(ch, o)}" for ch, v in t.comps.items() for o in v)

    def d(self, lab):
        x, y, _ = self._info[lab]
        return self.express(x, y, d_hom(self._hom[lab]))

    def m2(self, l2, l1):
        x, y1, _ = self._info[l1]
        y2, z, _ = self._info[l2]
        if y1 != y2:
            return frozenset()
        return self.express(x, z, compose_homs(self._hom[l2], self._hom[l1]))

    def unit(self, x):
        return self.express(x, x, identity_hom(self.modules[x]))


class DGQuotient:
    """The quotient dg category B/A with bar chains of at most ``cap`` interior objects.

    With ``reduced`` the unit labels are excluded from interior tensor factors.
    Chains never grow under mu^1, so truncating by length gives subcomplexes.
    """

    def __init__(self, b: DGCategory, sub: Sequence[str], cap: Optional[int] = None, reduced: bool = True):
        for x in sub:
            if x not in b.objects:
                raise ValueError(f"unknown object {x}")
        self.b = b
        self.sub = tuple(sub)
        self.cap = len(b.objects) + 2 if cap is None else cap
        self.reduced = reduced and isinstance(b, CategoryDG)

    # element algebra

    def src(self, ch: Chain) -> str:
        return self.b.src(ch[-1])

    def dst(self, ch: Chain) -> str:
        return self.b.dst(ch[0])

    def deg(self, ch: Chain) -> int:
        return sum(self.b.deg(c) for c in ch) - (len(ch) - 1)

    def _degenerate(self, ch: Chain) -> bool:
        return self.reduced and any(self.b.is_unit_label(c) for c in ch[1:-1])

    def clean(self, elem: Iterable[Chain]) -> QElem:
        return frozenset(ch for ch in elem if not self._degenerate(ch))

    def d(self, elem: Iterable[Chain]) -> QElem:
        acc: set = set()
        for ch in elem:
            n = len(ch)
            for i in range(n):
                for o in self.b.d(ch[i]):
                    _xor(acc, [ch[:i] + (o,) + ch[i + 1:]])
            for i in range(n - 1):
                for o in self.b.m2(ch[i], ch[i + 1]):
                    _xor(acc, [ch[:i] + (o,) + ch[i + 2:]])
        return self.clean(acc)

    def m2(self, e2: Iterable[Chain], e1: Iterable[Chain]) -> QElem:
        acc: set = set()
        for c in e2:
            for b in e1:
                if self.src(c) != self.dst(b):
                    continue
                for o in self.b.m2(c[-1], b[0]):
                    _xor(acc, [c[:-1] + (o,) + b[1:]])
        return self.clean(acc)

    def unit(self, x: str) -> QElem:
        return frozenset((lab,) for lab in self.b.unit(x))

    def pi(self, labels: Iterable[str]) -> QElem:
        return frozenset((lab,) for lab in labels)

    @staticmethod
    def tensor(*vecs: Iterable[str]) -> QElem:
        """Expand a pure tensor of label vectors (written b_{d+1}, ..., b_1) into chains."""
        acc: set = set()
        for combo in itertools.product(*[sorted(v) for v in vecs]):
            _xor(acc, [tuple(combo)])
        return frozenset(acc)

    # finite hom complexes

    def chains(self, x: str, y: str, cap: Optional[int] = None) -> List[Chain]:
        cap = self.cap if cap is None else cap
        out = [(lab,) for lab in self.b.labels(x, y)]
        for d in range(1, cap + 1):
            for path in itertools.product(self.sub, repeat=d):
                objs = (x,) + path + (y,)
                factors = []
                for i in range(d + 1):
                    labs = self.b.labels(objs[i], objs[i + 1])
                    if self.reduced and 0 < i < d:
                        labs = [lab for lab in labs if not self.b.is_unit_label(lab)]
                    factors.append(labs)
                if any(not f for f in factors):
                    continue
                for combo in itertools.product(*factors):
                    out.append(tuple(reversed(combo)))
        return out

    def hom_complex(self, x: str, y: str, cap: Optional[int] = None) -> Tuple[ChainComplex, Dict[Chain, Tuple[int, int]]]:
        chs = self.chains(x, y, cap)
        basis: Dict[int, List[Chain]] = {}
        for ch in chs:
            basis.setdefault(self.deg(ch), []).append(ch)
        index = {}
        for k, v in basis.items():
            for i, ch in enumerate(v):
                index[ch] = (k, i)
        space = GradedSpace({k: tuple("|".join(ch) for ch in v) for k, v in basis.items()})
        diff = {}
        for k, v in basis.items():
            cols = []
            for ch in v:
                col = 0
                for o in self.d([ch]):
                    kk, i = index[o]
                    col ^= 1 << i
                cols.append(col)
            diff[k] = GF2Matrix.from_columns(space.dim(k + 1), cols)
        return ChainComplex(space, diff, check=False), index

    def cohomology_dims(self, x: str, y: str, cap: Optional[int] = None) -> Dict[int, int]:
        cx, _ = self.hom_complex(x, y, cap)
        return {k: v for k, v in cohomology(cx).dims.items() if v}

    def truncated(self, x: str, y: str) -> bool:
        """True when chains longer than the cap exist, so the hom is cut off."""
        return len(self.chains(x, y, self.cap + 1)) != len(self.chains(x, y, self.cap))

    def stable(self, x: str, y: str) -> bool:
        return self.cohomology_dims(x, y) == self.cohomology_dims(x, y, self.cap + 1)

    def pi_map(self, x: str, y: str) -> ChainMap:
        """pi^1: hom_B(x, y) -> hom_{B/A}(x, y) as a chain map."""
        src = self.b.hom_complex(x, y)
        tgt, index = self.hom_complex(x, y)
        maps = {}
        for k in sorted(set(src.space.degrees()) | set(tgt.space.degrees())):
            cols = []
            for lab in src.space.labels(k):
                cols.append(1 << index[(lab,)][1])
            maps[k] = GF2Matrix.from_columns(tgt.space.dim(k), cols)
        return ChainMap(src, tgt, maps)

    def dd_failures(self, x: str, y: str) -> List[int]:
        cx, _ = self.hom_complex(x, y)
        return cx.dd_failures()

    def associativity_failures(self, limit: int = 2000) -> List[tuple]:
        bad = []
        objs = self.b.objects
        count = 0
        for x, y, z, w in itertools.product(objs, repeat=4):
            for c1 in self.chains(x, y):
                for c2 in self.chains(y, z):
                    for c3 in self.chains(z, w):
                        count += 1
                        if count > limit:
                            return bad
                        lhs = self.m2(self.m2([c3], [c2]), [c1])
                        rhs = self.m2([c3], self.m2([c2], [c1]))
                        if lhs != rhs:
                            bad.append((c3, c2, c1))
        return bad

    def leibniz_failures(self, limit: int = 2000) -> List[tuple]:
        bad = []
        count = 0
        for x, y, z in itertools.product(self.b.objects, repeat=3):
            for c1 in self.chains(x, y):
                for c2 in self.chains(y, z):
                    count += 1
                    if count > limit:
                        return bad
                    lhs = self.d(self.m2([c2], [c1]))
                    rhs = set(self.m2(self.d([c2]), [c1]))
                    _xor(rhs, self.m2([c2], self.d([c1])))
                    if lhs != frozenset(rhs):
                        bad.append((c2, c1))
        return bad


def dg_quotient(b: AInftyCategory, sub: Sequence[str], cap: Optional[int] = None) -> DGQuotient:
    return DGQuotient(CategoryDG(b), sub, cap)


def orthogonality(b: DGCategory, y: str, sub: Sequence[str]) -> str:
    """'right' if hom(X, y) is acyclic for all X in sub, 'left' for hom(y, X), 'both' or 'none'."""
    def acyclic(x0, x1):
        return not any(cohomology(b.hom_complex(x0, x1)).dims.values())
    right = all(acyclic(x, y) for x in sub)
    left = all(acyclic(y, x) for x in sub)
    if right and left:
        return "both"
    return "right" if right else "left" if left else "none"


def orthogonality_oracle(q: DGQuotient, y: str) -> Dict[str, bool]:
    """When y is orthogonal to the subcategory, check that pi^1 is a quasi-isomorphism on the relevant homs."""
    side = orthogonality(q.b, y, q.sub)
    out = {}
    if side in ("right", "both"):
        for y0 in q.b.objects:
            out[f"{y0}->{y}"] = q.pi_map(y0, y).is_quasi_iso()
    if side in ("left", "both"):
        for y1 in q.b.objects:
            out[f"{y}->{y1}"] = q.pi_map(y, y1).is_quasi_iso()
    return out


@dataclass
class InverseCertificate:
    a: QElem
    checks: Dict[str, bool]
    nondegenerate: Dict[str, str]
    quotient: DGQuotient = field(repr=False)
    cone: Cone = field(repr=False)

    @property
    def identities_hold(self) -> bool:
        return all(self.checks.values())

    @property
    def ok(self) -> bool:
        """Identities hold and [e] is known to survive the quotient on one side."""
        return self.identities_hold and any(v != "none" for v in self.nondegenerate.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "nondegenerate": self.nondegenerate,
                "a": sorted("|".join(ch) for ch in self.a)}


def invert_quasi_unit(t: PreModHom) -> InverseCertificate:
    """a = pi0 (x) iota1 in hom(Y1, Y0) of the quotient by Cone(t), with exact chain-level certificates.

    Checks mu^1(a) = 0, mu^2(t, a) + e_1 = mu^1(pi1 (x) iota1) and
    mu^2(a, t) + e_0 = mu^1(pi0 (x) iota0).
    """
    if t.deg != 0:
        raise ValueError("t must have degree 0")
    if not is_closed(t):
        raise ValueError("t must be closed")
    c = cone(t)
    dg = ModuleDG({"Y0": t.src, "Y1": t.dst, "C": c.module})
    q = DGQuotient(dg, ["C"], cap=1, reduced=False)
    ex = dg.express
    tv = q.pi(ex("Y0", "Y1", t))
    pi0, pi1 = ex("C", "Y0", c.pi0), ex("C", "Y1", c.pi1)
    iota0, iota1 = ex("Y0", "C", c.iota0), ex("Y1", "C", c.iota1)
    a = q.tensor(pi0, iota1)
    e0, e1 = q.unit("Y0"), q.unit("Y1")
    lhs1 = set(q.m2(tv, a))
    _xor(lhs1, e1)
    lhs0 = set(q.m2(a, tv))
    _xor(lhs0, e0)
    checks = {
        "closed": not q.d(a),
        "degree_zero": all(q.deg(ch) == 0 for ch in a),
        "right_inverse": frozenset(lhs1) == q.d(q.tensor(pi1, iota1)),
        "left_inverse": frozenset(lhs0) == q.d(q.tensor(pi0, iota0)),
    }
    nondeg = {y: orthogonality(dg, y, ["C"]) for y in ("Y0", "Y1")}
    return InverseCertificate(a, checks, nondeg, q, c)
