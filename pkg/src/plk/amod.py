"""Modules and bimodules over directed A-infinity categories.

A bimodule N over (A, B) is encoded by the extended category E_N whose objects
are those of B followed by those of A, with hom(Y, X) = N(Y, X). Structure maps
are keyed by full chains ``(a_r, ..., a_1, x, b_s, ..., b_1)``. Right modules
are bimodules over (point, B) and left modules bimodules over (A, point).

Hom complexes, composition and cones are worked out for right modules; left
modules are handled as right modules over the opposite category.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .ainfty import (EMPTY, AInftyCategory, Gen, Report, Vec, complete_structure, dual_label,
                     is_unit, opposite, point_category, random_differential, unit, validate_category)
from .gf2chain import (ChainComplex, ChainMap, GF2Matrix, GradedSpace, bits, cohomology,
                       cohomology_data, rank_of, solve, vec_from_indices)

Chain = Tuple[str, ...]
POINT = "*"


class Bimodule:
    """(A, B)-bimodule: ``elements[x] = (Y, X, deg)`` with Y in B and X in A."""

    def __init__(self, left: AInftyCategory, right: AInftyCategory,
                 elements: Mapping[str, Tuple[str, str, int]],
                 mu: Mapping[Chain, Iterable[str]], shift_n: int = 1):
        self.left = left
        self.right = right
        self.elements = {k: (v[0], v[1], int(v[2])) for k, v in elements.items()}
        self.mu = {tuple(ch): frozenset(v) for ch, v in mu.items() if v}
        self.shift_n = shift_n
        for lab, (y, x, _) in self.elements.items():
            if y not in right.pos or x not in left.pos:
                raise ValueError(f"element {lab} sits over unknown objects ({y}, {x})")
            if lab in left.gens or lab in right.gens or is_unit(lab):
                raise ValueError(f"element label {lab} clashes with a category label")

    def space(self, y: str, x: str) -> GradedSpace:
        basis: Dict[int, List[str]] = {}
        for lab, (yy, xx, k) in self.elements.items():
            if (yy, xx) == (y, x):
                basis.setdefault(k, []).append(lab)
        return GradedSpace({k: tuple(v) for k, v in basis.items()})

    def to_json(self) -> dict:
        return {"left": self.left.to_json(), "right": self.right.to_json(),
                "elements": {k: {"right_object": y, "left_object": x, "deg": d}
                             for k, (y, x, d) in self.elements.items()},
                "mu": [{"inputs": list(ch), "output": sorted(v)} for ch, v in sorted(self.mu.items())],
                "shift_n": self.shift_n}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Bimodule":
        from .ainfty import category_from_json
        left, right = category_from_json(obj["left"]), category_from_json(obj["right"])
        els = {k: (v["right_object"], v["left_object"], int(v["deg"])) for k, v in obj["elements"].items()}
        mu: Dict[Chain, set] = {}
        for e in obj.get("mu", []):
            out = e["output"]
            out = [out] if isinstance(out, str) else out
            cur = mu.setdefault(tuple(e["inputs"]), set())
            for o in out:
                cur ^= {o}
        return cls(left, right, els, mu, int(obj.get("shift_n", 1)))

    def split(self, ch: Chain) -> Tuple[Chain, str, Chain]:
        idx = [i for i, c in enumerate(ch) if c in self.elements]
        if len(idx) != 1:
            raise ValueError(f"chain {ch} must contain exactly one module element")
        i = idx[0]
        return ch[:i], ch[i], ch[i + 1:]


def _tags(n: Bimodule):
    """Object and label renamings making A, B and the elements disjoint in E_N."""
    a, b = n.left, n.right
    clash = bool(set(a.objects) & set(b.objects)) or bool(set(a.gens) & set(b.gens))
    if not clash:
        return {}, {}, {}, {}
    return ({x: f"A.{x}" for x in a.objects}, {g: f"A.{g}" for g in a.gens},
            {y: f"B.{y}" for y in b.objects}, {g: f"B.{g}" for g in b.gens})


def extend_category(n: Bimodule) -> AInftyCategory:
    """E_N: objects of B then of A, hom(Y, X) = N(Y, X), hom(X, Y) = 0."""
    ao, al, bo, bl = _tags(n)
    a = n.left.relabel(ao, al)
    b = n.right.relabel(bo, bl)
    gens = list(b.gens.values()) + list(a.gens.values())
    for lab, (y, x, k) in n.elements.items():
        gens.append(Gen(lab, bo.get(y, y), ao.get(x, x), k))
    mus: Dict[int, Dict[Chain, Vec]] = {}
    for cat in (a, b):
        for d, t in cat.mus.items():
            mus.setdefault(d, {}).update(t)
    for ch, out in n.mu.items():
        a_part, w, b_part = n.split(ch)
        key = tuple(al.get(c, c) for c in a_part) + (w,) + tuple(bl.get(c, c) for c in b_part)
        mus.setdefault(len(ch), {})[key] = out
    return AInftyCategory(list(b.objects) + list(a.objects), gens, mus, n.shift_n)


def restrict_bimodule(e: AInftyCategory, n: Bimodule) -> Bimodule:
    """Read the bimodule part back out of E_N (inverse of extend_category)."""
    ao, al, bo, bl = _tags(n)
    inv = {v: k for k, v in al.items()}
    inv.update({v: k for k, v in bl.items()})
    mu = {}
    for d, t in e.mus.items():
        for ch, out in t.items():
            if any(c in n.elements for c in ch):
                mu[tuple(inv.get(c, c) for c in ch)] = out
    return Bimodule(n.left, n.right, n.elements, mu, n.shift_n)


def validate_bimodule(n: Bimodule) -> Report:
    return validate_category(extend_category(n))


class Module:
    """One-sided module. Right chains are (x, b_{d-1}, ..., b_1); left chains (a_{d-1}, ..., a_1, x)."""

    def __init__(self, side: str, base: AInftyCategory, elements: Mapping[str, Tuple[str, int]],
                 mu: Mapping[Chain, Iterable[str]], shift_n: int = 1):
        if side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        self.side = side
        self.base = base
        self.elements = {k: (v[0], int(v[1])) for k, v in elements.items()}
        self.mu = {tuple(ch): frozenset(v) for ch, v in mu.items() if v}
        self.shift_n = shift_n
        for lab, (y, _) in self.elements.items():
            if y not in base.pos:
                raise ValueError(f"element {lab} sits over unknown object {y}")

    def obj(self, x: str) -> str:
        return self.elements[x][0]

    def deg(self, x: str) -> int:
        return self.elements[x][1]

    def at(self, y: str) -> List[str]:
        return [lab for lab, (yy, _) in self.elements.items() if yy == y]

    def space(self, y: str) -> GradedSpace:
        basis: Dict[int, List[str]] = {}
        for lab in self.at(y):
            basis.setdefault(self.deg(lab), []).append(lab)
        return GradedSpace({k: tuple(v) for k, v in basis.items()})

    def act(self, ch: Chain) -> Vec:
        """mu on a chain that may contain base units."""
        ch = tuple(ch)
        rest = ch[1:] if self.side == "right" else ch[:-1]
        if any(is_unit(c) for c in rest):
            if len(ch) == 2:
                return frozenset([ch[0] if self.side == "right" else ch[1]])
            return EMPTY
        return self.mu.get(ch, EMPTY)

    def complex(self, y: str) -> ChainComplex:
        from .ainfty import vec_complex
        return vec_complex(self.space(y), lambda lab: self.act((lab,)))

    def cohomology_dims(self) -> Dict[str, Dict[int, int]]:
        return {y: {k: v for k, v in cohomology(self.complex(y)).dims.items() if v} for y in self.base.objects}

    def is_acyclic_at(self, y: str) -> bool:
        return not any(cohomology(self.complex(y)).dims.values())

    def bimodule(self) -> Bimodule:
        pt = point_category(POINT)
        if self.side == "right":
            els = {k: (y, POINT, d) for k, (y, d) in self.elements.items()}
            return Bimodule(pt, self.base, els, self.mu, self.shift_n)
        els = {k: (POINT, y, d) for k, (y, d) in self.elements.items()}
        return Bimodule(self.base, pt, els, self.mu, self.shift_n)

    def as_right(self) -> "Module":
        """A left module over A as a right module over A^op (chains reversed)."""
        if self.side == "right":
            return self
        mu = {tuple(reversed(ch)): v for ch, v in self.mu.items()}
        return Module("right", opposite(self.base), self.elements, mu, self.shift_n)

    def relabel(self, fn: Callable[[str], str]) -> "Module":
        els = {fn(k): v for k, v in self.elements.items()}
        mu = {tuple(fn(c) if c in self.elements else c for c in ch): frozenset(fn(o) for o in v)
              for ch, v in self.mu.items()}
        return Module(self.side, self.base, els, mu, self.shift_n)

    def same_as(self, other: "Module") -> bool:
        return (self.side == other.side and self.elements == other.elements and self.mu == other.mu
                and self.base.objects == other.base.objects)

    def to_json(self) -> dict:
        return {"side": self.side, "base": self.base.to_json(),
                "elements": {k: {"object": y, "deg": d} for k, (y, d) in self.elements.items()},
                "mu": [{"inputs": list(ch), "output": sorted(v)} for ch, v in sorted(self.mu.items())],
                "shift_n": self.shift_n}

    @classmethod
    def from_json(cls, obj: Mapping, base: Optional[AInftyCategory] = None) -> "Module":
        from .ainfty import category_from_json
        if base is None:
            base = category_from_json(obj["base"])
        els = {k: (v["object"], int(v["deg"])) for k, v in obj["elements"].items()}
        mu: Dict[Chain, set] = {}
        for e in obj.get("mu", []):
            out = e["output"]
            out = [out] if isinstance(out, str) else out
            cur = mu.setdefault(tuple(e["inputs"]), set())
            for o in out:
                cur ^= {o}
        return cls(obj.get("side", "right"), base, els, mu, int(obj.get("shift_n", 1)))

    def __repr__(self):
        return f"Module({self.side}, elements={len(self.elements)})"


def validate_module(m: Module) -> Report:
    return validate_bimodule(m.bimodule())


def module_from_bimodule(n: Bimodule, side: str) -> Module:
    if side == "right":
        els = {k: (y, d) for k, (y, x, d) in n.elements.items()}
        return Module("right", n.right, els, n.mu, n.shift_n)
    els = {k: (x, d) for k, (y, x, d) in n.elements.items()}
    return Module("left", n.left, els, n.mu, n.shift_n)


def zero_module(base: AInftyCategory, side: str = "right") -> Module:
    return Module(side, base, {}, {})


# Yoneda modules


def yoneda(cat: AInftyCategory, z: str, side: str = "right") -> Module:
    """hom(-, z) as a right module, or hom(z, -) as a left module; labels <g>."""
    tag = lambda g: f"<{g}>"
    els = {tag(unit(z)): (z, 0)}
    if side == "right":
        for g in cat.gens.values():
            if g.dst == z:
                els[tag(g.label)] = (g.src, g.deg)
        allowed = lambda ch: cat.dst(ch[0]) == z
    else:
        for g in cat.gens.values():
            if g.src == z:
                els[tag(g.label)] = (g.dst, g.deg)
        allowed = lambda ch: cat.src(ch[-1]) == z
    mu = {}
    for ch in cat.chains(len(cat.objects)):
        if not allowed(ch):
            continue
        out = cat.mu(ch)
        if not out:
            continue
        if side == "right":
            mu[(tag(ch[0]),) + ch[1:]] = frozenset(tag(o) for o in out)
        else:
            mu[ch[:-1] + (tag(ch[-1]),)] = frozenset(tag(o) for o in out)
    # the unit element acted on by one generator
    for g in cat.gens.values():
        if side == "right" and g.dst == z:
            mu[(tag(unit(z)), g.label)] = frozenset([tag(g.label)])
        if side == "left" and g.src == z:
            mu[(g.label, tag(unit(z)))] = frozenset([tag(g.label)])
    return Module(side, cat, els, mu, cat.shift_n)


def diagonal_bimodule(cat: AInftyCategory) -> Bimodule:
    """A as an (A, A)-bimodule: N(Y, X) = hom(Y, X) including units."""
    tag = lambda g: f"<{g}>"
    els = {tag(unit(x)): (x, x, 0) for x in cat.objects}
    for g in cat.gens.values():
        els[tag(g.label)] = (g.src, g.dst, g.deg)
    mu: Dict[Chain, Vec] = {}
    n = len(cat.objects)
    for ch in cat.chains(n):
        out = cat.mu(ch)
        if not out:
            continue
        for i in range(len(ch)):
            key = ch[:i] + (tag(ch[i]),) + ch[i + 1:]
            mu[key] = frozenset(tag(o) for o in out)
    # unit element acted on by a single generator from either side
    for g in cat.gens.values():
        mu[(g.label, tag(unit(g.src)))] = frozenset([tag(g.label)])
        mu[(tag(unit(g.dst)), g.label)] = frozenset([tag(g.label)])
    return Bimodule(cat, cat, els, mu, cat.shift_n)


# hom complexes between right modules


class PreModHom:
    """Components t^d as a map chain (x, b_{d-1}, ..., b_1) -> vector in the target."""

    def __init__(self, src: Module, dst: Module, comps: Mapping[Chain, Iterable[str]], deg: int):
        self.src = src
        self.dst = dst
        self.comps = {tuple(k): frozenset(v) for k, v in comps.items() if v}
        self.deg = deg

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other):
        return isinstance(other, PreModHom) and self.comps == other.comps

    def __add__(self, other: "PreModHom") -> "PreModHom":
        out = {k: set(v) for k, v in self.comps.items()}
        for k, v in other.comps.items():
            out.setdefault(k, set()).symmetric_difference_update(v)
        return PreModHom(self.src, self.dst, out, self.deg)

    def __repr__(self):
        return f"PreModHom(deg={self.deg}, terms={sum(len(v) for v in self.comps.values())})"


def _add_into(acc: Dict[Chain, set], key: Chain, vec: Iterable[str]):
    cur = acc.setdefault(key, set())
    cur.symmetric_difference_update(vec)


class RightHomCalculus:
    """mu^1 and mu^2 of the dg category of right modules over a directed base."""

    def __init__(self, base: AInftyCategory):
        self.base = base
        n = len(base.objects)
        self.base_chains = base.chains(max(n - 1, 1)) if base.gens else []
        self.into: Dict[str, List[Chain]] = {}
        for ch in self.base_chains:
            self.into.setdefault(base.dst(ch[0]), []).append(ch)
        self.inv_mu: Dict[str, List[Chain]] = {}
        for d, t in base.mus.items():
            for ch, out in t.items():
                for o in out:
                    self.inv_mu.setdefault(o, []).append(ch)

    def extensions(self, y: str) -> List[Chain]:
        """Base chains (b_i, ..., b_1) ending at y, including the empty chain."""
        return [()] + self.into.get(y, [])

    def source_obj(self, m: Module, ch: Chain) -> str:
        return self.base.src(ch[-1]) if len(ch) > 1 else m.obj(ch[0])

    def chains(self, m0: Module) -> List[Chain]:
        out = []
        for x in m0.elements:
            for e in self.extensions(m0.obj(x)):
                out.append((x,) + e)
        return out

    def basis(self, m0: Module, m1: Module) -> Dict[int, List[Tuple[Chain, str]]]:
        by_obj: Dict[str, List[str]] = {}
        for y in m1.elements:
            by_obj.setdefault(m1.obj(y), []).append(y)
        basis: Dict[int, List[Tuple[Chain, str]]] = {}
        for ch in self.chains(m0):
            y0 = self.source_obj(m0, ch)
            d = len(ch)
            sdeg = m0.deg(ch[0]) + sum(self.base.deg(b) for b in ch[1:])
            for y in by_obj.get(y0, []):
                basis.setdefault(m1.deg(y) - sdeg + d - 1, []).append((ch, y))
        return basis

    def inverse_index(self, m: Module) -> Dict[str, List[Chain]]:
        inv: Dict[str, List[Chain]] = {}
        for ch, out in m.mu.items():
            for o in out:
                inv.setdefault(o, []).append(ch)
        return inv

    def d(self, t: Mapping[Chain, Iterable[str]], m0: Module, m1: Module,
          inv0: Optional[Dict[str, List[Chain]]] = None) -> Dict[Chain, Vec]:
        acc: Dict[Chain, set] = {}
        if inv0 is None:
            inv0 = self.inverse_index(m0)
        for ch, ys in t.items():
            if not ys:
                continue
            y0 = self.source_obj(m0, ch)
            # mu_{M1}(t(x, ...), b_i, ..., b_1)
            for e in self.extensions(y0):
                for y in ys:
                    out = m1.mu.get((y,) + e)
                    if out:
                        _add_into(acc, ch + e, out)
            # t(mu_{M0}(x, ...), b_i, ..., b_1)
            for src_ch in inv0.get(ch[0], []):
                _add_into(acc, src_ch + ch[1:], ys)
            # t(x, ..., mu_B(...), ...)
            for k in range(1, len(ch)):
                for bch in self.inv_mu.get(ch[k], []):
                    _add_into(acc, ch[:k] + bch + ch[k + 1:], ys)
        return {k: frozenset(v) for k, v in acc.items() if v}

    def compose(self, t2: Mapping[Chain, Iterable[str]], t1: Mapping[Chain, Iterable[str]]) -> Dict[Chain, Vec]:
        """mu^2(t2, t1): (mu^2(t2,t1))(x, b...) = sum t2(t1(x, upper), lower)."""
        by_first: Dict[str, List[Tuple[Chain, Vec]]] = {}
        for ch, v in t2.items():
            by_first.setdefault(ch[0], []).append((ch, v))
        acc: Dict[Chain, set] = {}
        for ch1, ys in t1.items():
            for y in ys:
                for ch2, v in by_first.get(y, []):
                    _add_into(acc, ch1 + ch2[1:], v)
        return {k: frozenset(v) for k, v in acc.items() if v}


def _calc(m: Module) -> RightHomCalculus:
    key = id(m.base)
    cache = _calc.cache
    hit = cache.get(key)
    if hit is None or hit[0] is not m.base:
        hit = (m.base, RightHomCalculus(m.base))
        cache[key] = hit
    return hit[1]


_calc.cache = {}


def _right(m: Module) -> Module:
    return m.as_right() if m.side == "left" else m


class HomComplex:
    """hom_Q(M0, M1) with its differential, for modules of the same side and base."""

    def __init__(self, m0: Module, m1: Module):
        if m0.side != m1.side:
            raise ValueError("modules must have the same side")
        if m0.base.objects != m1.base.objects or m0.base.mus != m1.base.mus:
            raise ValueError("modules live over different base categories")
        self.m0, self.m1 = m0, m1
        self.r0, self.r1 = _right(m0), _right(m1)
        self.calc = _calc(self.r0)
        self.basis = self.calc.basis(self.r0, self.r1)
        self.index = {}
        labels = {}
        for k, items in self.basis.items():
            labels[k] = tuple(self._label(ch, y) for ch, y in items)
            for i, (ch, y) in enumerate(items):
                self.index[(ch, y)] = (k, i)
        self.space = GradedSpace(labels)
        self._complex = None
        self._inv0 = self.calc.inverse_index(self.r0)

    @staticmethod
    def _label(ch: Chain, y: str) -> str:
        return ",".join(ch) + "->" + y

    def d(self, t: Mapping[Chain, Iterable[str]]) -> Dict[Chain, Vec]:
        return self.calc.d(t, self.r0, self.r1, self._inv0)

    def d_hom(self, t: PreModHom) -> PreModHom:
        return PreModHom(self.m0, self.m1, self.d(t.comps), t.deg + 1)

    def to_bits(self, comps: Mapping[Chain, Iterable[str]], k: int) -> int:
        v = 0
        for ch, ys in comps.items():
            for y in ys:
                kk, i = self.index[(ch, y)]
                if kk != k:
                    raise ValueError(f"term {(ch, y)} has degree {kk}, expected {k}")
                v ^= 1 << i
        return v

    def from_bits(self, v: int, k: int) -> PreModHom:
        comps: Dict[Chain, set] = {}
        items = self.basis.get(k, [])
        for i in bits(v):
            ch, y = items[i]
            comps.setdefault(ch, set()).add(y)
        return PreModHom(self.m0, self.m1, comps, k)

    def complex(self) -> ChainComplex:
        if self._complex is None:
            diff = {}
            for k, items in self.basis.items():
                cols = [self.to_bits(self.d({ch: {y}}), k + 1) for ch, y in items]
                diff[k] = GF2Matrix.from_columns(self.space.dim(k + 1), cols)
            self._complex = ChainComplex(self.space, diff, check=False)
        return self._complex

    def check_dd(self) -> bool:
        return not self.complex().dd_failures()

    def cohomology_dims(self) -> Dict[int, int]:
        return {k: v for k, v in cohomology(self.complex()).dims.items() if v}

    def cocycle_basis(self, k: int) -> List[PreModHom]:
        from .gf2chain import rank_kernel
        _, ker = rank_kernel(self.complex().d(k))
        return [self.from_bits(z, k) for z in ker]

    def classify(self, t: PreModHom) -> int:
        data = cohomology_data(self.complex())
        h = data.get(t.deg)
        if h is None:
            return 0
        return h.classify(self.to_bits(t.comps, t.deg))

    def is_exact(self, t: PreModHom) -> bool:
        return self.classify(t) == 0

    def is_closed(self, t: PreModHom) -> bool:
        return not self.d(t.comps)


def hom_complex(m0: Module, m1: Module) -> ChainComplex:
    return HomComplex(m0, m1).complex()


def _to_right_comps(m: Module, comps: Mapping[Chain, Vec]) -> Dict[Chain, Vec]:
    # components are always stored in right orientation (element first)
    return dict(comps)


def d_hom(t: PreModHom) -> PreModHom:
    r0, r1 = _right(t.src), _right(t.dst)
    comps = _to_right_comps(t.src, t.comps)
    out = _calc(r0).d(comps, r0, r1)
    return PreModHom(t.src, t.dst, _to_right_comps(t.src, out), t.deg + 1)


def compose_homs(t2: PreModHom, t1: PreModHom) -> PreModHom:
    """mu^2_Q(t2, t1) for t1: M0 -> M1 and t2: M1 -> M2."""
    r0 = _right(t1.src)
    c = _calc(r0).compose(_to_right_comps(t1.src, t2.comps), _to_right_comps(t1.src, t1.comps))
    return PreModHom(t1.src, t2.dst, _to_right_comps(t1.src, c), t1.deg + t2.deg)


def identity_hom(m: Module) -> PreModHom:
    return PreModHom(m, m, {(x,): {x} for x in m.elements}, 0)


def is_closed(t: PreModHom) -> bool:
    return d_hom(t).is_zero()


def first_order_map(t: PreModHom, y: str) -> ChainMap:
    """t^1 at the object y as a map of complexes M0(y) -> M1(y)."""
    c0, c1 = t.src.complex(y), t.dst.complex(y)
    maps = {}
    for k in c0.space.degrees():
        idx = c1.space.index(k + t.deg)
        cols = []
        for x in c0.space.labels(k):
            v = 0
            for o in t.comps.get((x,), ()):
                v ^= 1 << idx[o]
            cols.append(v)
        maps[k] = GF2Matrix.from_columns(c1.space.dim(k + t.deg), cols)
    if t.deg != 0:
        raise ValueError("first_order_map expects a degree 0 homomorphism")
    return ChainMap(c0, c1, maps)


def is_quasi_iso(t: PreModHom) -> bool:
    if t.deg != 0 or not is_closed(t):
        return False
    return all(first_order_map(t, y).is_quasi_iso() for y in t.src.base.objects)


# cones


@dataclass
class Cone:
    module: Module
    iota0: PreModHom
    pi0: PreModHom
    iota1: PreModHom
    pi1: PreModHom
    t: PreModHom


def cone(t: PreModHom) -> Cone:
    """Cone(t) = M0[1] + M1 with labels C0.x and C1.y, and its four structure maps."""
    if t.deg != 0:
        raise ValueError("cone needs a degree 0 homomorphism")
    if not is_closed(t):
        raise ValueError("cone needs a closed homomorphism")
    m0, m1 = t.src, t.dst
    r0, r1 = _right(m0), _right(m1)
    c0 = lambda x: f"C0.{x}"
    c1 = lambda y: f"C1.{y}"
    els = {c0(x): (y, k - 1) for x, (y, k) in m0.elements.items()}
    els.update({c1(x): (y, k) for x, (y, k) in m1.elements.items()})
    mu: Dict[Chain, set] = {}
    for ch, out in r0.mu.items():
        _add_into(mu, (c0(ch[0]),) + ch[1:], {c0(o) for o in out})
    for ch, out in t.comps.items():
        _add_into(mu, (c0(ch[0]),) + ch[1:], {c1(o) for o in out})
    for ch, out in r1.mu.items():
        _add_into(mu, (c1(ch[0]),) + ch[1:], {c1(o) for o in out})
    if m0.side == "left":
        mu = {tuple(reversed(ch)): v for ch, v in mu.items()}
    cm = Module(m0.side, m0.base, els, mu, m0.shift_n)
    iota0 = PreModHom(m0, cm, {(x,): {c0(x)} for x in m0.elements}, -1)
    pi0 = PreModHom(cm, m0, {(c0(x),): {x} for x in m0.elements}, 1)
    iota1 = PreModHom(m1, cm, {(y,): {c1(y)} for y in m1.elements}, 0)
    pi1 = PreModHom(cm, m1, {(c1(y),): {y} for y in m1.elements}, 0)
    return Cone(cm, iota0, pi0, iota1, pi1, t)


def cone_identities(c: Cone) -> Dict[str, bool]:
    t = c.t
    e = identity_hom(c.module)
    return {
        "d(iota1)=0": d_hom(c.iota1).is_zero(),
        "d(pi0)=0": d_hom(c.pi0).is_zero(),
        "d(iota0)=iota1.t": d_hom(c.iota0).comps == compose_homs(c.iota1, t).comps,
        "d(pi1)=t.pi0": d_hom(c.pi1).comps == compose_homs(t, c.pi0).comps,
        "pi0.iota1=0": compose_homs(c.pi0, c.iota1).is_zero(),
        "e=iota1.pi1+iota0.pi0": (compose_homs(c.iota1, c.pi1) + compose_homs(c.iota0, c.pi0)).comps == e.comps,
    }


def cone_les_ok(c: Cone) -> bool:
    """dim H^n(C) = dim coker H^n(t) + dim ker H^{n+1}(t) at every object."""
    for y in c.module.base.objects:
        f = first_order_map(c.t, y)
        h0 = cohomology(f.src).dims
        h1 = cohomology(f.dst).dims
        hc = cohomology(c.module.complex(y)).dims
        rk = f.induced_ranks()
        degs = set(h0) | set(h1) | set(hc) | {k - 1 for k in h0}
        for n in degs:
            coker = h1.get(n, 0) - rk.get(n, 0)
            ker = h0.get(n + 1, 0) - rk.get(n + 1, 0)
            if hc.get(n, 0) != coker + ker:
                return False
    return True


# Yoneda maps


def yoneda_map(m: Module, z: str) -> ChainMap:
    """x -> (mu^{d+1}(x, g, b...)) from M(z) into hom(Y^z, M)."""
    yz = yoneda(m.base, z, m.side)
    hc = HomComplex(yz, m)
    src = m.complex(z)
    maps = {}
    for k in sorted(set(src.space.degrees()) | set(hc.space.degrees())):
        cols = []
        for x in src.space.labels(k):
            cols.append(hc.to_bits(yoneda_image(m, z, x, yz).comps, k))
        maps[k] = GF2Matrix.from_columns(hc.space.dim(k), cols)
    return ChainMap(src, hc.complex(), maps)


def yoneda_image(m: Module, z: str, x: str, yz: Optional[Module] = None) -> PreModHom:
    if yz is None:
        yz = yoneda(m.base, z, m.side)
    comps: Dict[Chain, set] = {}
    right = m.side == "right"
    for lab in yz.elements:
        g = lab[1:-1]
        tails = [()] + [ch for ch in m.base.chains(len(m.base.objects))
                        if (m.base.dst(ch[0]) == m.base.src(g) if right else m.base.src(ch[-1]) == m.base.dst(g))]
        for tail in tails:
            if is_unit(g) and tail:
                continue
            if right:
                out = m.act((x, g) + tail)
                key = (lab,) + tail
            else:
                out = m.act(tail + (g, x))
                key = (lab,) + tuple(reversed(tail))
            if out:
                comps[key] = set(out)
    return PreModHom(yz, m, comps, m.deg(x))


# duality


def dualize_bimodule(n: Bimodule, shift_n: Optional[int] = None) -> Bimodule:
    """DN over (B, A): D N(Y, X)[-n]; mu_N(a.., w, b..) containing v gives w* in mu_DN(b.., v*, a..)."""
    sn = n.shift_n if shift_n is None else shift_n
    els = {dual_label(k): (x, y, sn - d) for k, (y, x, d) in n.elements.items()}
    mu: Dict[Chain, set] = {}
    for ch, out in n.mu.items():
        a_part, w, b_part = n.split(ch)
        for v in out:
            key = b_part + (dual_label(v),) + a_part
            _add_into(mu, key, {dual_label(w)})
    return Bimodule(n.right, n.left, els, mu, n.shift_n)


def dualize(m: Module, shift_n: Optional[int] = None) -> Module:
    """Linear dual with shift [-n]: a right module becomes a left module and back."""
    dn = dualize_bimodule(m.bimodule(), shift_n)
    return module_from_bimodule(dn, "left" if m.side == "right" else "right")


# bimodules as functors into right modules


class BimoduleFunctor:
    """r_N: X -> N(-, X), with components r^d(a_d, ..., a_1) read off mu^{d|1|*}."""

    def __init__(self, n: Bimodule):
        self.n = n
        self.modules: Dict[str, Module] = {}
        for x in n.left.objects:
            els = {k: (y, d) for k, (y, xx, d) in n.elements.items() if xx == x}
            mu = {ch: v for ch, v in n.mu.items() if ch[0] in els}
            self.modules[x] = Module("right", n.right, els, mu, n.shift_n)
        self._by_achain: Dict[Chain, Dict[Chain, Vec]] = {}
        for ch, v in n.mu.items():
            a_part, w, b_part = n.split(ch)
            if a_part:
                self._by_achain.setdefault(a_part, {})[(w,) + b_part] = v

    def component(self, achain: Chain) -> PreModHom:
        a = self.n.left
        if len(achain) == 1 and is_unit(achain[0]):
            return identity_hom(self.modules[a.src(achain[0])])
        x0, xd = a.src(achain[-1]), a.dst(achain[0])
        deg = sum(a.deg(c) for c in achain) + 1 - len(achain)
        return PreModHom(self.modules[x0], self.modules[xd], self._by_achain.get(tuple(achain), {}), deg)

    def residual(self, achain: Chain) -> Dict[Chain, Vec]:
        a = self.n.left
        d = len(achain)
        acc: Dict[Chain, set] = {}
        first = d_hom(self.component(achain))
        for k, v in first.comps.items():
            _add_into(acc, k, v)
        for split in range(1, d):
            upper, lower = achain[:split], achain[split:]
            c = compose_homs(self.component(upper), self.component(lower))
            for k, v in c.comps.items():
                _add_into(acc, k, v)
        for j in range(1, d + 1):
            for i in range(0, d - j + 1):
                for o in a.mu(achain[d - i - j:d - i]):
                    c = self.component(achain[:d - i - j] + (o,) + achain[d - i:])
                    for k, v in c.comps.items():
                        _add_into(acc, k, v)
        return {k: frozenset(v) for k, v in acc.items() if v}

    def check(self) -> Report:
        rep = Report()
        a = self.n.left
        for ch in a.chains(max(len(a.objects) - 1, 1)):
            rep.checked += 1
            res = self.residual(ch)
            if res:
                flat = tuple(sorted(f"{','.join(k)}->{o}" for k, v in res.items() for o in v))
                rep.violations.append((len(ch), ch, flat))
        return rep


def bimodule_to_functor(n: Bimodule) -> BimoduleFunctor:
    return BimoduleFunctor(n)


# quasi-isomorphism tools


def post_compose_map(t: PreModHom, n: Module) -> ChainMap:
    """s -> mu^2(t, s) as a map hom(N, M0) -> hom(N, M1)."""
    h0, h1 = HomComplex(n, t.src), HomComplex(n, t.dst)
    return _comp_map(h0, h1, lambda s: compose_homs(t, s), t.deg)


def pre_compose_map(t: PreModHom, n: Module) -> ChainMap:
    """s -> mu^2(s, t) as a map hom(M1, N) -> hom(M0, N)."""
    h0, h1 = HomComplex(t.dst, n), HomComplex(t.src, n)
    return _comp_map(h0, h1, lambda s: compose_homs(s, t), t.deg)


def _comp_map(h0: HomComplex, h1: HomComplex, fn, shift: int) -> ChainMap:
    if shift != 0:
        raise ValueError("composition maps are built for degree 0 homomorphisms")
    maps = {}
    for k in sorted(set(h0.space.degrees()) | set(h1.space.degrees())):
        cols = []
        for i in range(h0.space.dim(k)):
            s = h0.from_bits(1 << i, k)
            cols.append(h1.to_bits(fn(s).comps, k))
        maps[k] = GF2Matrix.from_columns(h1.space.dim(k), cols)
    return ChainMap(h0.complex(), h1.complex(), maps)


def quasi_inverse(t: PreModHom) -> Optional[PreModHom]:
    """Closed s: M1 -> M0 of degree 0 with [mu^2(t, s)] = [e]; None if there is none.

    Solves the linear system over a basis of degree-0 cocycles, taking the first
    solution in echelon order.
    """
    m0, m1 = t.src, t.dst
    back = HomComplex(m1, m0)
    endo = HomComplex(m1, m1)
    zs = back.cocycle_basis(0)
    data = cohomology_data(endo.complex())
    h = data.get(0)
    if h is None or h.dim == 0:
        return None if any(m1.elements) else PreModHom(m1, m0, {}, 0)
    cols = [h.classify(endo.to_bits(compose_homs(t, z).comps, 0)) for z in zs]
    target = h.classify(endo.to_bits(identity_hom(m1).comps, 0))
    x = solve(GF2Matrix.from_columns(h.dim, cols), target)
    if x is None:
        return None
    s = PreModHom(m1, m0, {}, 0)
    for i in bits(x):
        s = s + zs[i]
    return s


def represents_identity(t: PreModHom) -> bool:
    """True if t: M -> M is cohomologous to the identity."""
    hc = HomComplex(t.src, t.dst)
    diff = t + identity_hom(t.src)
    return hc.is_closed(t) and hc.is_exact(PreModHom(t.src, t.dst, diff.comps, 0))


# random modules


def random_module(base: AInftyCategory, rng: np.random.Generator, side: str = "right",
                  max_dim: int = 2, degrees: Sequence[int] = (-1, 0, 1), prefix: str = "m",
                  tries: int = 50) -> Module:
    """Random valid module: random differentials, higher actions solved order by order."""
    for _ in range(tries):
        els = {}
        mu1 = {}
        for y in base.objects:
            by_deg: Dict[int, List[str]] = {}
            for i in range(int(rng.integers(0, max_dim + 1))):
                lab = f"{prefix}{y}_{i}"
                k = int(rng.choice(degrees))
                els[lab] = (y, k)
                by_deg.setdefault(k, []).append(lab)
            for lab, v in random_differential(by_deg, rng).items():
                if v:
                    mu1[(lab,)] = v
        m = Module(side, base, els, mu1, base.shift_n)
        out = complete_module(m, rng)
        if out is not None:
            return out
    raise RuntimeError("could not generate a consistent random module")


def complete_module(m: Module, rng: np.random.Generator) -> Optional[Module]:
    n = m.bimodule()
    e = extend_category(n)
    done = complete_structure(e, lambda ch: any(c in n.elements for c in ch), rng)
    if done is None:
        return None
    return module_from_bimodule(restrict_bimodule(done, n), m.side)


def random_bimodule(left: AInftyCategory, right: AInftyCategory, rng: np.random.Generator,
                    max_dim: int = 1, degrees: Sequence[int] = (0,), prefix: str = "n",
                    tries: int = 50) -> Bimodule:
    for _ in range(tries):
        els = {}
        mu1 = {}
        for y in right.objects:
            for x in left.objects:
                by_deg: Dict[int, List[str]] = {}
                for i in range(int(rng.integers(0, max_dim + 1))):
                    lab = f"{prefix}{y}{x}_{i}"
                    k = int(rng.choice(degrees))
                    els[lab] = (y, x, k)
                    by_deg.setdefault(k, []).append(lab)
                for lab, v in random_differential(by_deg, rng).items():
                    if v:
                        mu1[(lab,)] = v
        n = Bimodule(left, right, els, mu1)
        e = extend_category(n)
        done = complete_structure(e, lambda ch: any(c in n.elements for c in ch), rng)
        if done is not None:
            return restrict_bimodule(done, n)
    raise RuntimeError("could not generate a consistent random bimodule")


def random_closed_hom(m0: Module, m1: Module, rng: np.random.Generator) -> PreModHom:
    """Uniformly random degree-0 cocycle in hom(M0, M1)."""
    hc = HomComplex(m0, m1)
    zs = hc.cocycle_basis(0)
    t = PreModHom(m0, m1, {}, 0)
    for z in zs:
        if rng.random() < 0.5:
            t = t + z
    return t


def random_quasi_iso(m: Module, rng: np.random.Generator) -> PreModHom:
    """e + mu^1(h) for a random degree -1 pre-homomorphism h: M -> M."""
    hc = HomComplex(m, m)
    v = 0
    for i in range(hc.space.dim(-1)):
        if rng.random() < 0.5:
            v |= 1 << i
    h = hc.from_bits(v, -1)
    return identity_hom(m) + PreModHom(m, m, hc.d(h.comps), 0)


def diagonal_shape_category(m: int) -> AInftyCategory:
    """E_Delta for Delta(U_j, S_k) one-dimensional exactly when j = k, with zero bimodule products.

    Both sides are the poset categories on m objects.
    """
    from .ainfty import full_order_category
    a = full_order_category([f"U{i}" for i in range(1, m + 1)], "u")
    b = full_order_category([f"S{i}" for i in range(1, m + 1)], "s")
    delta = Bimodule(a, b, {f"d{k}": (f"S{k}", f"U{k}", 0) for k in range(1, m + 1)}, {})
    return extend_category(delta)
