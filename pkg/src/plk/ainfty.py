"""Finite directed strictly unital A-infinity categories over F2.

Morphisms are F2 combinations of generator labels, stored as frozensets. Units
are never stored: the label ``1_X`` stands for the unit of X and is handled by
the strict unitality rules inside :meth:`AInftyCategory.mu`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .gf2chain import (ChainComplex, CohomologyDegree, GF2Matrix, GradedSpace, bits,
                       cohomology_data, vec_from_indices)

Vec = frozenset
EMPTY: Vec = frozenset()


def unit(obj: str) -> str:
    return f"1_{obj}"


def is_unit(label: str) -> bool:
    return label.startswith("1_")


def vsum(vectors: Iterable[Iterable[str]]) -> Vec:
    acc = set()
    for v in vectors:
        acc ^= set(v)
    return frozenset(acc)


def dual_label(label: str) -> str:
    if label.startswith("D(") and label.endswith(")"):
        return label[2:-1]
    return f"D({label})"


@dataclass(frozen=True)
class Gen:
    label: str
    src: str
    dst: str
    deg: int


class AInftyCategory:
    """Directed category: ``mus[d][(a_d, ..., a_1)]`` is the output of mu^d.

    Chains are written right to left: a_1 leaves the first object.
    """

    def __init__(self, objects: Sequence[str], gens: Iterable[Gen],
                 mus: Optional[Mapping[int, Mapping[Tuple[str, ...], Iterable[str]]]] = None,
                 shift_n: int = 1):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate objects")
        self.pos = {x: i for i, x in enumerate(self.objects)}
        self.gens: Dict[str, Gen] = {}
        for g in gens:
            if g.label in self.gens:
                raise ValueError(f"duplicate generator {g.label}")
            if is_unit(g.label):
                raise ValueError(f"generator label {g.label} clashes with unit naming")
            self.gens[g.label] = g
        self.mus: Dict[int, Dict[Tuple[str, ...], Vec]] = {}
        for d, table in (mus or {}).items():
            clean = {tuple(ch): frozenset(out) for ch, out in table.items() if out}
            if clean:
                self.mus[int(d)] = clean
        self.shift_n = shift_n
        self._homs: Dict[Tuple[str, str], List[str]] = {}
        for g in self.gens.values():
            self._homs.setdefault((g.src, g.dst), []).append(g.label)

    # basic queries

    def src(self, label: str) -> str:
        return label[2:] if is_unit(label) else self.gens[label].src

    def dst(self, label: str) -> str:
        return label[2:] if is_unit(label) else self.gens[label].dst

    def deg(self, label: str) -> int:
        return 0 if is_unit(label) else self.gens[label].deg

    def hom(self, x: str, y: str) -> List[str]:
        """Non-unit basis of hom(x, y)."""
        return list(self._homs.get((x, y), []))

    def hom_space(self, x: str, y: str, with_unit: bool = False) -> GradedSpace:
        basis: Dict[int, List[str]] = {}
        if with_unit and x == y:
            basis.setdefault(0, []).append(unit(x))
        for lab in self.hom(x, y):
            basis.setdefault(self.gens[lab].deg, []).append(lab)
        return GradedSpace({k: tuple(v) for k, v in basis.items()})

    def composable(self, chain: Sequence[str]) -> bool:
        return all(self.dst(chain[k + 1]) == self.src(chain[k]) for k in range(len(chain) - 1))

    def mu(self, chain: Sequence[str]) -> Vec:
        chain = tuple(chain)
        d = len(chain)
        units = [is_unit(c) for c in chain]
        if any(units):
            if d == 1:
                return EMPTY
            if d == 2:
                a, b = chain
                if units[0] and self.src(a) == self.dst(b):
                    return frozenset([b])
                if units[1] and self.dst(b) == self.src(a):
                    return frozenset([a])
                return EMPTY
            return EMPTY
        return self.mus.get(d, {}).get(chain, EMPTY)

    def mu_vec(self, vecs: Sequence[Iterable[str]]) -> Vec:
        """Multilinear extension of mu; non-composable products are dropped."""
        acc = set()
        for combo in itertools.product(*[sorted(v) for v in vecs]):
            if self.composable(combo):
                acc ^= self.mu(combo)
        return frozenset(acc)

    def chains(self, max_len: Optional[int] = None, start_pred: Callable[[str], bool] = None):
        """All composable chains of non-unit generators, as (a_d, ..., a_1) tuples."""
        if max_len is None:
            max_len = max(len(self.objects) - 1, 1)
        out = []
        by_src: Dict[str, List[str]] = {}
        for g in self.gens.values():
            by_src.setdefault(g.src, []).append(g.label)

        def grow(ch):
            out.append(ch)
            if len(ch) >= max_len:
                return
            for nxt in by_src.get(self.dst(ch[0]), []):
                grow((nxt,) + ch)

        for g in self.gens.values():
            if start_pred is None or start_pred(g.label):
                grow((g.label,))
        return out

    def hom_complex(self, x: str, y: str) -> ChainComplex:
        space = self.hom_space(x, y, with_unit=True)
        return vec_complex(space, lambda lab: self.mu((lab,)))

    def relabel(self, objmap: Mapping[str, str], labmap: Mapping[str, str]) -> "AInftyCategory":
        om = lambda x: objmap.get(x, x)
        lm = lambda a: labmap.get(a, a)
        gens = [Gen(lm(g.label), om(g.src), om(g.dst), g.deg) for g in self.gens.values()]
        mus = {d: {tuple(lm(a) for a in ch): frozenset(lm(o) for o in out) for ch, out in t.items()}
               for d, t in self.mus.items()}
        return AInftyCategory([om(x) for x in self.objects], gens, mus, self.shift_n)

    def full_subcategory(self, objects: Sequence[str]) -> "AInftyCategory":
        keep = set(objects)
        objs = [x for x in self.objects if x in keep]
        gens = [g for g in self.gens.values() if g.src in keep and g.dst in keep]
        labs = {g.label for g in gens}
        mus = {d: {ch: out for ch, out in t.items() if all(a in labs for a in ch)}
               for d, t in self.mus.items()}
        return AInftyCategory(objs, gens, mus, self.shift_n)

    def same_as(self, other: "AInftyCategory") -> bool:
        return (self.objects == other.objects
                and set(self.gens.values()) == set(other.gens.values())
                and self.mus == other.mus)

    def to_json(self) -> dict:
        homs: Dict[str, Dict[str, int]] = {}
        for g in self.gens.values():
            homs.setdefault(f"{g.src}->{g.dst}", {})[g.label] = g.deg
        mu = {str(d): [{"inputs": list(ch), "output": sorted(out)} for ch, out in sorted(t.items())]
              for d, t in sorted(self.mus.items())}
        return {"objects": list(self.objects), "homs": homs, "mu": mu,
                "units_implicit": True, "shift_n": self.shift_n}

    @classmethod
    def from_json(cls, obj: Mapping) -> "AInftyCategory":
        return category_from_json(obj)

    def __repr__(self):
        return f"AInftyCategory(objects={list(self.objects)}, gens={len(self.gens)})"


def vec_complex(space: GradedSpace, d_of: Callable[[str], Iterable[str]]) -> ChainComplex:
    """Complex on a labelled graded space from a label -> boundary-vector rule."""
    diff = {}
    for k in space.degrees():
        idx = space.index(k + 1)
        cols = []
        for lab in space.labels(k):
            v = 0
            for o in d_of(lab):
                if o not in idx:
                    raise ValueError(f"d({lab}) contains {o} outside degree {k + 1}")
                v ^= 1 << idx[o]
            cols.append(v)
        diff[k] = GF2Matrix.from_columns(space.dim(k + 1), cols)
    return ChainComplex(space, diff, check=False)


def labels_to_bits(space: GradedSpace, k: int, vec: Iterable[str]) -> int:
    idx = space.index(k)
    return vec_from_indices(idx[a] for a in vec)


def bits_to_labels(space: GradedSpace, k: int, v: int) -> Vec:
    labs = space.labels(k)
    return frozenset(labs[i] for i in bits(v))


def category_from_json(obj: Mapping) -> AInftyCategory:
    objects = list(obj["objects"])
    gens = []
    for key, basis in obj.get("homs", {}).items():
        if "->" not in key:
            raise ValueError(f"homs key {key!r} must look like 'X->Y'")
        x, y = key.split("->")
        for lab, deg in basis.items():
            gens.append(Gen(lab, x.strip(), y.strip(), int(deg)))
    mus: Dict[int, Dict[Tuple[str, ...], set]] = {}
    for d, entries in obj.get("mu", {}).items():
        table = mus.setdefault(int(d), {})
        for e in entries:
            ch = tuple(e["inputs"])
            out = e["output"]
            out = [out] if isinstance(out, str) else list(out)
            cur = table.setdefault(ch, set())
            for o in out:
                cur ^= {o}
    return AInftyCategory(objects, gens, mus, int(obj.get("shift_n", 1)))


# validation


@dataclass
class Report:
    violations: List[Tuple[int, Tuple[str, ...], Tuple[str, ...]]] = field(default_factory=list)
    malformed: List[str] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.malformed

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": self.checked,
                "violations": [{"d": d, "chain": list(ch), "residual": list(r)} for d, ch, r in self.violations],
                "malformed": list(self.malformed)}


def structure_problems(cat: AInftyCategory) -> List[str]:
    """Type, degree and directedness problems of the stored data."""
    probs = []
    for g in cat.gens.values():
        if g.src not in cat.pos or g.dst not in cat.pos:
            probs.append(f"generator {g.label} has unknown endpoint")
        elif cat.pos[g.src] >= cat.pos[g.dst]:
            probs.append(f"generator {g.label}: {g.src}->{g.dst} violates directedness")
    bound = len(cat.objects) - 1
    for d, table in cat.mus.items():
        for ch, out in table.items():
            if len(ch) != d:
                probs.append(f"mu^{d} entry {ch} has wrong arity")
                continue
            if any(a not in cat.gens for a in ch):
                probs.append(f"mu^{d} entry {ch} uses unknown or unit inputs")
                continue
            if not cat.composable(ch):
                probs.append(f"mu^{d} entry {ch} is not composable")
                continue
            if d > bound:
                probs.append(f"mu^{d} entry {ch} exceeds the directedness bound {bound}")
            x0, xd = cat.src(ch[-1]), cat.dst(ch[0])
            want = sum(cat.deg(a) for a in ch) + 2 - d
            for o in out:
                if o not in cat.gens:
                    probs.append(f"mu^{d}{ch} outputs unknown label {o}")
                elif (cat.src(o), cat.dst(o)) != (x0, xd):
                    probs.append(f"mu^{d}{ch} output {o} lies in the wrong hom space")
                elif cat.deg(o) != want:
                    probs.append(f"mu^{d}{ch} output {o} has degree {cat.deg(o)}, expected {want}")
    return probs


def relation_residual(cat: AInftyCategory, ch: Tuple[str, ...]) -> Vec:
    """Left side of the A-infinity relation on the chain (a_d, ..., a_1)."""
    d = len(ch)
    acc = set()
    for j in range(1, d + 1):
        for i in range(0, d - j + 1):
            inner = cat.mu(ch[d - i - j:d - i])
            for o in inner:
                acc ^= cat.mu(ch[:d - i - j] + (o,) + ch[d - i:])
    return frozenset(acc)


def validate_category(cat: AInftyCategory) -> Report:
    rep = Report()
    rep.malformed = structure_problems(cat)
    if rep.malformed:
        return rep
    bound = max(len(cat.objects) - 1, 1)
    chains = cat.chains(bound + 1)
    # directedness: chains of non-units are strictly increasing in the order
    assert all(len(ch) <= len(cat.objects) - 1 for ch in chains)
    for ch in chains:
        rep.checked += 1
        res = relation_residual(cat, ch)
        if res:
            rep.violations.append((len(ch), ch, tuple(sorted(res))))
    return rep


# functors


class AInftyFunctor:
    """Object map plus components ``comps[d][(a_d, ..., a_1)]`` in target labels."""

    def __init__(self, objmap: Mapping[str, str], comps: Mapping[int, Mapping[Tuple[str, ...], Iterable[str]]]):
        self.objmap = dict(objmap)
        self.comps = {int(d): {tuple(ch): frozenset(v) for ch, v in t.items() if v} for d, t in comps.items()}

    def apply(self, chain: Tuple[str, ...], src: AInftyCategory) -> Vec:
        if any(is_unit(a) for a in chain):
            if len(chain) == 1:
                return frozenset([unit(self.objmap[src.src(chain[0])])])
            return EMPTY
        return self.comps.get(len(chain), {}).get(tuple(chain), EMPTY)

    @classmethod
    def identity(cls, cat: AInftyCategory) -> "AInftyFunctor":
        return cls({x: x for x in cat.objects}, {1: {(a,): {a} for a in cat.gens}})

    @classmethod
    def inclusion(cls, sub: AInftyCategory) -> "AInftyFunctor":
        return cls.identity(sub)


def compositions(d: int):
    """Ordered ways to write d as a sum of positive parts."""
    if d == 0:
        yield ()
        return
    for first in range(1, d + 1):
        for rest in compositions(d - first):
            yield (first,) + rest


def functor_residual(f: AInftyFunctor, a: AInftyCategory, b: AInftyCategory, ch: Tuple[str, ...]) -> Vec:
    d = len(ch)
    acc = set()
    # sum over mu_B^r applied to F-images of consecutive blocks; blocks listed from a_1 upward
    for parts in compositions(d):
        pieces = []
        end = d
        for size in parts:
            pieces.append(f.apply(ch[end - size:end], a))
            end -= size
        if any(not p for p in pieces):
            continue
        acc ^= b.mu_vec(list(reversed(pieces)))
    for j in range(1, d + 1):
        for i in range(0, d - j + 1):
            for o in a.mu(ch[d - i - j:d - i]):
                acc ^= f.apply(ch[:d - i - j] + (o,) + ch[d - i:], a)
    return frozenset(acc)


def check_functor(f: AInftyFunctor, a: AInftyCategory, b: AInftyCategory) -> Report:
    rep = Report()
    for x in a.objects:
        if x not in f.objmap or f.objmap[x] not in b.pos:
            rep.malformed.append(f"object {x} has no image")
    if rep.malformed:
        return rep
    for x, y in itertools.combinations(a.objects, 2):
        if a.hom(x, y) and b.pos[f.objmap[x]] > b.pos[f.objmap[y]]:
            rep.malformed.append(f"object map reverses {x} < {y} while hom({x},{y}) != 0")
    for d, t in f.comps.items():
        for ch, out in t.items():
            if not a.composable(ch):
                rep.malformed.append(f"F^{d} entry {ch} not composable")
                continue
            want = sum(a.deg(c) for c in ch) + 1 - d
            x0, xd = f.objmap[a.src(ch[-1])], f.objmap[a.dst(ch[0])]
            for o in out:
                if is_unit(o) or o not in b.gens:
                    rep.malformed.append(f"F^{d}{ch} outputs non-generator {o}")
                elif b.deg(o) != want or (b.src(o), b.dst(o)) != (x0, xd):
                    rep.malformed.append(f"F^{d}{ch} output {o} has wrong type")
    if rep.malformed:
        return rep
    for ch in a.chains(max(len(a.objects) - 1, 1)):
        rep.checked += 1
        res = functor_residual(f, a, b, ch)
        if res:
            rep.violations.append((len(ch), ch, tuple(sorted(res))))
    return rep


# cohomological category


class CohomologyCategory:
    """Cohomology of each hom complex and the composition induced by mu^2."""

    def __init__(self, cat: AInftyCategory):
        self.cat = cat
        self.spaces: Dict[Tuple[str, str], GradedSpace] = {}
        self.data: Dict[Tuple[str, str], Dict[int, CohomologyDegree]] = {}
        self.classes: Dict[Tuple[str, str], List[Tuple[int, Vec]]] = {}
        for i, x in enumerate(cat.objects):
            for y in cat.objects[i:]:
                cx = cat.hom_complex(x, y)
                hd = cohomology_data(cx)
                self.spaces[(x, y)] = cx.space
                self.data[(x, y)] = hd
                cl = []
                for k in sorted(hd):
                    for z in hd[k].reps:
                        cl.append((k, bits_to_labels(cx.space, k, z)))
                self.classes[(x, y)] = cl

    def dims(self, x: str, y: str) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for k, _ in self.classes.get((x, y), []):
            out[k] = out.get(k, 0) + 1
        return out

    def classify(self, x: str, y: str, k: int, vec: Iterable[str]) -> Tuple[int, ...]:
        """Class indices (into self.classes[(x, y)]) of a cocycle of degree k."""
        sp = self.spaces[(x, y)]
        vec = frozenset(vec)
        if not vec:
            return ()
        h = self.data[(x, y)][k]
        coords = h.classify(labels_to_bits(sp, k, vec))
        offset = sum(1 for kk, _ in self.classes[(x, y)] if kk < k)
        return tuple(offset + i for i in bits(coords))

    def compose(self, x: str, y: str, z: str, j: int, i: int) -> Tuple[int, ...]:
        """[mu^2](class j of (y,z), class i of (x,y)) as class indices of (x,z)."""
        ki, u = self.classes[(x, y)][i]
        kj, v = self.classes[(y, z)][j]
        out = self.cat.mu_vec([v, u])
        return self.classify(x, z, ki + kj, out)

    def composition_matrix(self, x: str, y: str, z: str) -> GF2Matrix:
        n1, n2 = len(self.classes[(x, y)]), len(self.classes[(y, z)])
        cols = []
        for j in range(n2):
            for i in range(n1):
                cols.append(vec_from_indices(self.compose(x, y, z, j, i)))
        return GF2Matrix.from_columns(len(self.classes[(x, z)]), cols)

    def associativity_failures(self) -> List[tuple]:
        bad = []
        objs = self.cat.objects
        for a, b, c, d in itertools.combinations_with_replacement(range(len(objs)), 4):
            x, y, z, w = objs[a], objs[b], objs[c], objs[d]
            for i in range(len(self.classes[(x, y)])):
                for j in range(len(self.classes[(y, z)])):
                    for k in range(len(self.classes[(z, w)])):
                        left = set()
                        for m in self.compose(x, y, z, j, i):
                            left ^= set(self.compose(x, z, w, k, m))
                        right = set()
                        for m in self.compose(y, z, w, k, j):
                            right ^= set(self.compose(x, y, w, m, i))
                        if left != right:
                            bad.append((x, y, z, w, i, j, k))
        return bad


def cohomological_category(cat: AInftyCategory) -> CohomologyCategory:
    return CohomologyCategory(cat)


# opposite and rotation


def opposite(cat: AInftyCategory) -> AInftyCategory:
    gens = [Gen(g.label, g.dst, g.src, g.deg) for g in cat.gens.values()]
    mus = {d: {tuple(reversed(ch)): out for ch, out in t.items()} for d, t in cat.mus.items()}
    return AInftyCategory(list(reversed(cat.objects)), gens, mus, cat.shift_n)


def cyclic_rotate(cat: AInftyCategory, shift_n: Optional[int] = None, times: int = 1) -> AInftyCategory:
    """Move the first object to the end, dualizing the homs out of it.

    hom(X_i, X_1) becomes D hom(X_1, X_i)[-n]: a generator x of degree k gives D(x)
    of degree n - k. Compositions ending in the moved object are the transposes
    <mu(D(b), a_{d-1}, ..., a_1), b'> = <D(b), mu(a_{d-1}, ..., a_1, b')>.
    """
    n = cat.shift_n if shift_n is None else shift_n
    out = cat
    for _ in range(times):
        out = _rotate_once(out, n)
    return out


def _rotate_once(cat: AInftyCategory, n: int) -> AInftyCategory:
    if len(cat.objects) < 2:
        raise ValueError("rotation needs at least two objects")
    x1 = cat.objects[0]
    gens = []
    for g in cat.gens.values():
        if g.src == x1:
            gens.append(Gen(dual_label(g.label), g.dst, x1, n - g.deg))
        else:
            gens.append(Gen(g.label, g.src, g.dst, g.deg))
    mus: Dict[int, Dict[Tuple[str, ...], set]] = {}
    for d, table in cat.mus.items():
        for ch, outv in table.items():
            if cat.src(ch[-1]) == x1:
                # mu(a_{d-1}, ..., a_1, b') contains b  =>  mu(D(b), a_{d-1}, ..., a_1) contains D(b')
                bprime = ch[-1]
                rest = ch[:-1]
                for b in outv:
                    key = (dual_label(b),) + rest
                    cur = mus.setdefault(d, {}).setdefault(key, set())
                    cur ^= {dual_label(bprime)}
            else:
                cur = mus.setdefault(d, {}).setdefault(ch, set())
                cur ^= set(outv)
    return AInftyCategory(cat.objects[1:] + (x1,), gens, mus, cat.shift_n)


# random generation


def random_differential(labels_by_deg: Mapping[int, List[str]], rng: np.random.Generator,
                        density: float = 0.5) -> Dict[str, Vec]:
    """Random square-zero degree +1 map on a graded basis.

    A random pairing e -> f (deg f = deg e + 1) is conjugated by random
    degree-preserving elementary basis changes.
    """
    degs = sorted(labels_by_deg)
    used = set()
    d: Dict[str, set] = {lab: set() for k in degs for lab in labels_by_deg[k]}
    for k in degs:
        nxt = [lab for lab in labels_by_deg.get(k + 1, []) if lab not in used]
        for lab in labels_by_deg[k]:
            if lab in used or not nxt:
                continue
            if rng.random() < density:
                tgt = nxt.pop(int(rng.integers(len(nxt))))
                d[lab] = {tgt}
                used.add(lab)
                used.add(tgt)
    # conjugate by E = I + E_ij (basis vector j gets added into i): d <- E d E
    for k in degs:
        labs = labels_by_deg[k]
        if len(labs) < 2:
            continue
        for _ in range(2 * len(labs)):
            i, j = rng.choice(len(labs), size=2, replace=False)
            li, lj = labs[i], labs[j]
            d = _conjugate(d, li, lj)
    return {k: frozenset(v) for k, v in d.items()}


def _conjugate(d: Dict[str, set], li: str, lj: str) -> Dict[str, set]:
    # E maps basis vector lj to lj + li and fixes the rest; E is an involution
    def E(vec):
        v = set(vec)
        if lj in v:
            v ^= {li}
        return v
    # (E d E)(x) = E(d(E x))
    out = {}
    for x in d:
        ex = E({x})
        dx = set()
        for y in ex:
            dx ^= d[y]
        out[x] = E(dx)
    return out


def solve_f2(rows: List[int], rhs: List[int], nvars: int, rng: np.random.Generator):
    """Random solution of A x = b over F2 (rows are bitsets over variables), or None."""
    piv: Dict[int, Tuple[int, int]] = {}
    for r, b in zip(rows, rhs):
        while r:
            lead = r.bit_length() - 1
            hit = piv.get(lead)
            if hit is None:
                break
            r ^= hit[0]
            b ^= hit[1]
        if r:
            piv[r.bit_length() - 1] = (r, b)
        elif b:
            return None
    free = [v for v in range(nvars) if v not in piv]
    x = 0
    for v in free:
        if rng.random() < 0.5:
            x |= 1 << v
    for lead in sorted(piv):
        r, b = piv[lead]
        rest = r & ~(1 << lead)
        val = b ^ (bin(rest & x).count("1") & 1)
        if val:
            x |= 1 << lead
    return x


def complete_structure(cat: AInftyCategory, free: Callable[[Tuple[str, ...]], bool],
                       rng: np.random.Generator, max_len: Optional[int] = None,
                       keep_prob: float = 1.0) -> Optional[AInftyCategory]:
    """Fill in mu^d (d >= 2) on free chains so that the A-infinity relations hold.

    ``cat`` carries mu^1 and the fixed parts of the structure. For each arity in
    turn the relations on chains of that length are linear in the unknowns, so
    a random solution of the linear system is taken. Returns None when the
    system is inconsistent.
    """
    if max_len is None:
        max_len = len(cat.objects) - 1
    mus = {d: {ch: set(v) for ch, v in t.items()} for d, t in cat.mus.items()}
    cur = AInftyCategory(cat.objects, cat.gens.values(), mus, cat.shift_n)
    for N in range(2, max_len + 1):
        chains = [ch for ch in cur.chains(N) if len(ch) == N]
        var_index: Dict[Tuple[Tuple[str, ...], str], int] = {}
        for ch in chains:
            if not free(ch):
                continue
            x0, xd = cur.src(ch[-1]), cur.dst(ch[0])
            want = sum(cur.deg(a) for a in ch) + 2 - N
            for o in cur.hom(x0, xd):
                if cur.deg(o) == want:
                    var_index[(ch, o)] = len(var_index)
        rows, rhs = [], []
        for ch in chains:
            x0, xd = cur.src(ch[-1]), cur.dst(ch[0])
            want = sum(cur.deg(a) for a in ch) + 3 - N
            targets = [o for o in cur.hom(x0, xd) if cur.deg(o) == want]
            if not targets:
                continue
            lin: Dict[str, int] = {o: 0 for o in targets}
            # mu^1 of mu^N(ch)
            for (vch, o), vi in var_index.items():
                if vch == ch:
                    for t in cur.mu((o,)):
                        lin[t] ^= 1 << vi
            # mu^N(..., mu^1(a_k), ...)
            for k in range(N):
                for o1 in cur.mu((ch[k],)):
                    ch2 = ch[:k] + (o1,) + ch[k + 1:]
                    for o in cur.hom(x0, xd):
                        vi = var_index.get((ch2, o))
                        if vi is not None:
                            lin[o] ^= 1 << vi
            const = set()
            # all other terms are known: the residual with the current (zero on free N-chains) data
            const ^= relation_residual(cur, ch)
            for o in targets:
                rows.append(lin[o])
                rhs.append(1 if o in const else 0)
        x = solve_f2(rows, rhs, len(var_index), rng)
        if x is None:
            return None
        table = mus.setdefault(N, {})
        for (ch, o), vi in var_index.items():
            if (x >> vi) & 1:
                table.setdefault(ch, set()).add(o)
        cur = AInftyCategory(cat.objects, cat.gens.values(), mus, cat.shift_n)
    return cur


def random_category(rng: np.random.Generator, n_objects: int = 3, max_dim: int = 2,
                    degrees: Sequence[int] = (-1, 0, 1), tries: int = 50, dg: bool = False) -> AInftyCategory:
    """Random valid directed category with random mu^1 and solved higher products.

    With ``dg`` only mu^2 is solved for and mu^d = 0 for d >= 3 is enforced.
    """
    objs = [f"X{i}" for i in range(1, n_objects + 1)]
    for _ in range(tries):
        gens = []
        mu1 = {}
        for i, x in enumerate(objs):
            for y in objs[i + 1:]:
                k = int(rng.integers(0, max_dim + 1))
                by_deg: Dict[int, List[str]] = {}
                for t in range(k):
                    lab = f"{x[1:]}{y[1:]}_{t}"
                    dg = int(rng.choice(degrees))
                    gens.append(Gen(lab, x, y, dg))
                    by_deg.setdefault(dg, []).append(lab)
                for lab, v in random_differential(by_deg, rng).items():
                    if v:
                        mu1[(lab,)] = v
        base = AInftyCategory(objs, gens, {1: mu1})
        if dg:
            out = complete_structure(base, lambda ch: len(ch) == 2, rng, max_len=max(3, n_objects - 1))
        else:
            out = complete_structure(base, lambda ch: True, rng)
        if out is not None:
            return out
    raise RuntimeError("could not generate a consistent random category")


def mutation_slots(cat: AInftyCategory, degree_compatible: bool = True) -> List[Tuple[Tuple[str, ...], str]]:
    """Entries (chain, output) of the structure tensor with matching endpoints.

    With ``degree_compatible`` only outputs of the degree required by mu^d are kept.
    """
    slots = []
    for ch in cat.chains():
        d = len(ch)
        x0, xd = cat.src(ch[-1]), cat.dst(ch[0])
        want = sum(cat.deg(a) for a in ch) + 2 - d
        for o in cat.hom(x0, xd):
            if not degree_compatible or cat.deg(o) == want:
                slots.append((ch, o))
    return slots


def toggle_entry(cat: AInftyCategory, ch: Tuple[str, ...], o: str) -> AInftyCategory:
    mus = {d: {c: set(v) for c, v in t.items()} for d, t in cat.mus.items()}
    cur = mus.setdefault(len(ch), {}).setdefault(ch, set())
    cur ^= {o}
    return AInftyCategory(cat.objects, cat.gens.values(), mus, cat.shift_n)


def mutate(cat: AInftyCategory, rng: np.random.Generator,
           degree_compatible: bool = True) -> Optional[AInftyCategory]:
    """Flip one entry of the structure tensor (toggle an output in one mu^d slot)."""
    slots = mutation_slots(cat, degree_compatible)
    if not slots:
        return None
    ch, o = slots[int(rng.integers(len(slots)))]
    return toggle_entry(cat, ch, o)


# standard examples


def a2_quiver() -> AInftyCategory:
    """Two objects S1 < S2 with a single degree-0 morphism a."""
    return AInftyCategory(["S1", "S2"], [Gen("a", "S1", "S2", 0)])


def point_category(name: str = "*") -> AInftyCategory:
    return AInftyCategory([name], [])


def full_order_category(objects: Sequence[str], prefix: str = "a") -> AInftyCategory:
    """One degree-0 arrow between every ordered pair, composing as in the poset."""
    gens = []
    lab = lambda i, j: f"{prefix}{i + 1}{j + 1}"
    n = len(objects)
    for i in range(n):
        for j in range(i + 1, n):
            gens.append(Gen(lab(i, j), objects[i], objects[j], 0))
    mu2 = {(lab(j, k), lab(i, j)): {lab(i, k)} for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)}
    return AInftyCategory(objects, gens, {2: mu2} if mu2 else {})
