"""Linear algebra over F2, graded spaces, chain complexes and spectral sequences.

Vectors are Python ints used as bitsets: bit j is the coordinate of basis
vector j. A GF2Matrix of shape (rows, cols) stores its columns, so applying it
to a vector is an xor of the columns selected by the vector's bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple


class GF2Error(ValueError):
    pass


def bits(v: int) -> List[int]:
    """Indices of the set bits of v, ascending."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def vec_from_indices(idx: Iterable[int]) -> int:
    v = 0
    for i in idx:
        v ^= 1 << i
    return v


def to_tuple(v: int, n: int) -> Tuple[int, ...]:
    return tuple((v >> j) & 1 for j in range(n))


class GF2Matrix:
    """Sparse F2 matrix of shape (rows, cols), stored column-wise as bitsets."""

    __slots__ = ("rows", "cols", "columns")

    def __init__(self, rows: int, cols: int, entries: Iterable[Tuple[int, int]] = ()):
        self.rows = int(rows)
        self.cols = int(cols)
        columns = [0] * self.cols
        seen = set()
        for r, c in entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise GF2Error(f"entry {(r, c)} out of bounds for shape {(rows, cols)}")
            if (r, c) in seen:
                raise GF2Error(f"duplicate entry {(r, c)}")
            seen.add((r, c))
            columns[c] |= 1 << r
        self.columns = columns

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[int]) -> "GF2Matrix":
        m = cls(rows, len(columns))
        limit = 1 << rows
        for c in columns:
            if c < 0 or c >= limit:
                raise GF2Error("column out of bounds")
        m.columns = list(columns)
        return m

    @classmethod
    def from_dense(cls, arr) -> "GF2Matrix":
        arr = [[int(x) & 1 for x in row] for row in arr]
        nrows = len(arr)
        ncols = len(arr[0]) if nrows else 0
        ents = [(r, c) for r in range(nrows) for c in range(ncols) if arr[r][c]]
        return cls(nrows, ncols, ents)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "GF2Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls(n, n, [(i, i) for i in range(n)])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> frozenset:
        return frozenset((r, c) for c, col in enumerate(self.columns) for r in bits(col))

    def to_dense(self) -> List[List[int]]:
        return [[(self.columns[c] >> r) & 1 for c in range(self.cols)] for r in range(self.rows)]

    def apply(self, v: int) -> int:
        out = 0
        for j in bits(v):
            out ^= self.columns[j]
        return out

    def __matmul__(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.cols != other.rows:
            raise GF2Error(f"shape mismatch {self.shape} @ {other.shape}")
        return GF2Matrix.from_columns(self.rows, [self.apply(c) for c in other.columns])

    def __add__(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.shape != other.shape:
            raise GF2Error("shape mismatch in sum")
        return GF2Matrix.from_columns(self.rows, [a ^ b for a, b in zip(self.columns, other.columns)])

    def __eq__(self, other) -> bool:
        return isinstance(other, GF2Matrix) and self.shape == other.shape and self.columns == other.columns

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.columns)))

    def is_zero(self) -> bool:
        return not any(self.columns)

    def transpose(self) -> "GF2Matrix":
        return GF2Matrix(self.cols, self.rows, [(c, r) for (r, c) in self.entries])

    def rank(self) -> int:
        return rank_of(self.columns)

    def __repr__(self):
        return f"GF2Matrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


class Echelon:
    """Incremental basis of a subspace, with leading-bit pivots.

    Each stored vector remembers which accepted input vectors it is a sum of,
    so membership tests also return coordinates.
    """

    def __init__(self):
        self.pivots: Dict[int, Tuple[int, int]] = {}
        self.count = 0

    def reduce(self, v: int) -> Tuple[int, int]:
        combo = 0
        while v:
            lead = v.bit_length() - 1
            hit = self.pivots.get(lead)
            if hit is None:
                break
            v ^= hit[0]
            combo ^= hit[1]
        return v, combo

    def add(self, v: int) -> int:
        """Add v; return its index if independent, else -1."""
        res, combo = self.reduce(v)
        if res == 0:
            return -1
        idx = self.count
        self.pivots[res.bit_length() - 1] = (res, combo ^ (1 << idx))
        self.count += 1
        return idx

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def coords(self, v: int) -> int:
        res, combo = self.reduce(v)
        if res:
            raise GF2Error("vector not in span")
        return combo

    @property
    def dim(self) -> int:
        return self.count


def rank_of(vectors: Iterable[int]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.dim


def rref(vectors: Iterable[int]) -> List[int]:
    """Reduced echelon basis of the span, pivots at lowest set bits, ascending."""
    basis: Dict[int, int] = {}
    for v in vectors:
        for p, b in basis.items():
            if (v >> p) & 1:
                v ^= b
        if v == 0:
            continue
        p = (v & -v).bit_length() - 1
        for q in list(basis):
            if (basis[q] >> p) & 1:
                basis[q] ^= v
        basis[p] = v
    return [basis[p] for p in sorted(basis)]


def _kernel_bits(columns: Sequence[int]) -> Tuple[int, List[int]]:
    pivots: Dict[int, Tuple[int, int]] = {}
    kernel = []
    for j, col in enumerate(columns):
        combo = 1 << j
        v = col
        while v:
            lead = v.bit_length() - 1
            hit = pivots.get(lead)
            if hit is None:
                break
            v ^= hit[0]
            combo ^= hit[1]
        if v:
            pivots[v.bit_length() - 1] = (v, combo)
        else:
            kernel.append(combo)
    return len(pivots), rref(kernel)


def rank_kernel(m: GF2Matrix) -> Tuple[int, List[int]]:
    """Rank of m and a reduced echelon basis of its kernel (as bitsets over the columns)."""
    return _kernel_bits(m.columns)


def solve(m: GF2Matrix, b: int):
    """Some x with m x = b, or None."""
    ech = Echelon()
    owner = []
    for j, col in enumerate(m.columns):
        if ech.add(col) >= 0:
            owner.append(j)
    res, combo = ech.reduce(b)
    if res:
        return None
    return vec_from_indices(owner[i] for i in bits(combo))


# graded spaces and complexes


@dataclass(frozen=True)
class GradedSpace:
    """Finitely many degrees, each with an ordered tuple of basis labels."""

    basis: Mapping[int, Tuple[str, ...]]

    def __post_init__(self):
        clean = {int(k): tuple(v) for k, v in self.basis.items() if len(v)}
        object.__setattr__(self, "basis", clean)

    @classmethod
    def from_dims(cls, dims: Mapping[int, int], prefix: str = "v") -> "GradedSpace":
        return cls({k: tuple(f"{prefix}{k}_{i}" for i in range(n)) for k, n in dims.items() if n > 0})

    @property
    def dims(self) -> Dict[int, int]:
        return {k: len(v) for k, v in sorted(self.basis.items())}

    def dim(self, k: int) -> int:
        return len(self.basis.get(k, ()))

    def labels(self, k: int) -> Tuple[str, ...]:
        return self.basis.get(k, ())

    def degrees(self) -> List[int]:
        return sorted(self.basis)

    def index(self, k: int) -> Dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels(k))}

    def total_dim(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def same_dims(self, other: "GradedSpace") -> bool:
        return self.dims == other.dims


class ChainComplex:
    """Cochain complex over F2; differential[k] maps degree k to k+1."""

    def __init__(self, space: GradedSpace, differential: Mapping[int, GF2Matrix], check: bool = True):
        self.space = space
        diff = {}
        for k in set(space.basis) | set(differential):
            m = differential.get(k)
            shape = (space.dim(k + 1), space.dim(k))
            if m is None:
                m = GF2Matrix.zero(*shape)
            if m.shape != shape:
                raise GF2Error(f"differential in degree {k} has shape {m.shape}, expected {shape}")
            diff[k] = m
        self.differential = diff
        if check:
            bad = self.dd_failures()
            if bad:
                raise GF2Error(f"d o d != 0 in degrees {bad}")

    @classmethod
    def from_edges(cls, degrees: Mapping[int, Sequence[str]], edges: Iterable[Tuple[str, str]], check=True):
        space = GradedSpace({int(k): tuple(v) for k, v in degrees.items()})
        where = {lab: (k, i) for k in space.basis for i, lab in enumerate(space.basis[k])}
        ents: Dict[int, set] = {}
        for a, b in edges:
            ka, ia = where[a]
            kb, ib = where[b]
            if kb != ka + 1:
                raise GF2Error(f"edge {a}->{b} does not raise degree by one")
            s = ents.setdefault(ka, set())
            s ^= {(ib, ia)}
        diff = {k: GF2Matrix(space.dim(k + 1), space.dim(k), e) for k, e in ents.items()}
        return cls(space, diff, check=check)

    def d(self, k: int) -> GF2Matrix:
        m = self.differential.get(k)
        if m is None:
            return GF2Matrix.zero(self.space.dim(k + 1), self.space.dim(k))
        return m

    def dd_failures(self) -> List[int]:
        return [k for k in sorted(self.differential) if not (self.d(k + 1) @ self.d(k)).is_zero()]

    def degrees(self) -> List[int]:
        return self.space.degrees()


@dataclass
class CohomologyDegree:
    deg: int
    boundary: Echelon
    n_boundary: int
    reps: List[int]

    @property
    def dim(self) -> int:
        return len(self.reps)

    def classify(self, z: int) -> int:
        """Coordinates (bitset over reps) of the class of the cocycle z."""
        return self.boundary.coords(z) >> self.n_boundary

    def is_exact(self, z: int) -> bool:
        return self.classify(z) == 0


def cohomology_data(c: ChainComplex) -> Dict[int, CohomologyDegree]:
    out = {}
    degs = set(c.space.basis)
    for k in sorted(degs):
        _, ker = rank_kernel(c.d(k))
        ech = Echelon()
        for v in c.d(k - 1).columns:
            ech.add(v)
        nb = ech.dim
        reps = [z for z in ker if ech.add(z) >= 0]
        out[k] = CohomologyDegree(k, ech, nb, reps)
    return out


def cohomology(c: ChainComplex) -> GradedSpace:
    """Cohomology dims, with representative cocycles named by their support."""
    if c.dd_failures():
        raise GF2Error("d o d != 0")
    data = cohomology_data(c)
    basis = {}
    for k, h in data.items():
        labs = c.space.labels(k)
        basis[k] = tuple("[" + "+".join(labs[i] for i in bits(z)) + "]" for z in h.reps)
    return GradedSpace(basis)


def cohomology_dims(c: ChainComplex) -> Dict[int, int]:
    return {k: v for k, v in cohomology(c).dims.items() if v}


@dataclass
class ChainMap:
    src: ChainComplex
    dst: ChainComplex
    maps: Dict[int, GF2Matrix]

    def f(self, k: int) -> GF2Matrix:
        m = self.maps.get(k)
        if m is None:
            return GF2Matrix.zero(self.dst.space.dim(k), self.src.space.dim(k))
        return m

    def is_chain_map(self) -> bool:
        degs = set(self.src.space.basis) | set(self.dst.space.basis)
        return all((self.dst.d(k) @ self.f(k)) == (self.f(k + 1) @ self.src.d(k)) for k in degs)

    def induced_ranks(self) -> Dict[int, int]:
        hs = cohomology_data(self.src)
        ranks = {}
        for k in sorted(set(self.src.space.basis) | set(self.dst.space.basis)):
            _, zs = rank_kernel(self.src.d(k))
            bd = self.dst.d(k - 1).columns
            rb = rank_of(bd)
            ranks[k] = rank_of(list(bd) + [self.f(k).apply(z) for z in zs]) - rb
        return ranks

    def is_quasi_iso(self) -> bool:
        if not self.is_chain_map():
            return False
        h0 = cohomology(self.src).dims
        h1 = cohomology(self.dst).dims
        ranks = self.induced_ranks()
        for k in set(h0) | set(h1):
            a, b = h0.get(k, 0), h1.get(k, 0)
            if a != b or ranks.get(k, 0) != a:
                return False
        return True


# filtrations and spectral sequences


class FilteredComplex:
    """Filtration of a complex by coordinate subspaces.

    ``levels`` lists label sets. For a decreasing filtration levels[i] is F^{start+i}
    and must shrink; for an increasing one levels[i] is F_{start+i} and must grow, and
    it is converted with p = -i. Below the first level the filtration is the whole
    space, above the last it is zero.
    """

    def __init__(self, ambient: ChainComplex, levels: Sequence[Iterable[str]], start: int = 0,
                 increasing: bool = False):
        self.ambient = ambient
        levels = [frozenset(s) for s in levels]
        all_labels = {lab for k in ambient.space.basis for lab in ambient.space.basis[k]}
        for s in levels:
            unknown = s - all_labels
            if unknown:
                raise GF2Error(f"unknown labels in filtration: {sorted(unknown)}")
        if increasing:
            seq = {-(start + i): s for i, s in enumerate(levels)}
        else:
            seq = {start + i: s for i, s in enumerate(levels)}
        ps = sorted(seq)
        for a, b in zip(ps, ps[1:]):
            if not seq[b] <= seq[a]:
                raise GF2Error("filtration is not nested")
        self.increasing = increasing
        self.levels = seq
        self.pmin = ps[0] if ps else 0
        self.pmax = ps[-1] if ps else 0
        self._all = frozenset(all_labels)
        bad = self.closure_failures()
        if bad:
            raise GF2Error(f"filtration level(s) {bad} not closed under the differential")

    def level(self, p: int) -> frozenset:
        if p < self.pmin:
            return self._all
        if p > self.pmax:
            return frozenset()
        return self.levels[p]

    def mask(self, p: int, n: int) -> int:
        lev = self.level(p)
        return vec_from_indices(i for i, lab in enumerate(self.ambient.space.labels(n)) if lab in lev)

    def closure_failures(self) -> List[int]:
        bad = []
        for p in sorted(self.levels):
            for n in self.ambient.space.basis:
                m_in, m_out = self.mask(p, n), self.mask(p, n + 1)
                d = self.ambient.d(n)
                if any(d.columns[j] & ~m_out for j in bits(m_in)):
                    bad.append(p)
                    break
        return bad


@dataclass
class Page:
    r: int
    dims: Dict[Tuple[int, int], int]
    d: Dict[Tuple[int, int], GF2Matrix] = field(default_factory=dict)

    def total(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (p, q), v in self.dims.items():
            if v:
                out[p + q] = out.get(p + q, 0) + v
        return out

    def d_ranks(self) -> Dict[Tuple[int, int], int]:
        return {k: m.rank() for k, m in self.d.items() if m.cols and m.rows}


@dataclass
class SpectralPages:
    pages: List[Page]
    stable_at: int

    @property
    def e1(self) -> Page:
        return self.pages[0]

    @property
    def einf(self) -> Page:
        return self.pages[-1]

    def page(self, r: int) -> Page:
        return self.pages[r - 1]

    def to_json(self) -> dict:
        return {"pages": [{"r": pg.r,
                           "dims": {f"({p},{q})": v for (p, q), v in sorted(pg.dims.items()) if v},
                           "d_rank": {f"({p},{q})": v for (p, q), v in sorted(pg.d_ranks().items())}}
                          for pg in self.pages],
                "stable_at": self.stable_at}


class _SSWorker:
    def __init__(self, f: FilteredComplex):
        self.f = f
        self.c = f.ambient
        self._z = {}

    def z(self, r: int, p: int, n: int) -> List[int]:
        """Basis of Z_r^{p} in degree n: x in F^p with dx in F^{p+r}."""
        key = (r, p, n)
        if key in self._z:
            return self._z[key]
        src = self.f.mask(p, n)
        idx = bits(src)
        bad_rows = ~self.f.mask(p + r, n + 1) & ((1 << self.c.space.dim(n + 1)) - 1)
        cols = [self.c.d(n).columns[j] & bad_rows for j in idx]
        _, ker = _kernel_bits(cols)
        out = [vec_from_indices(idx[i] for i in bits(k)) for k in ker]
        self._z[key] = out
        return out

    def page_space(self, r: int, p: int, n: int):
        """(echelon of denominator + reps, count of denominator, reps)."""
        ech = Echelon()
        for v in self.z(r - 1, p + 1, n):
            ech.add(v)
        for v in self.z(r - 1, p - r + 1, n - 1):
            ech.add(self.c.d(n - 1).apply(v))
        nd = ech.dim
        reps = [v for v in self.z(r, p, n) if ech.add(v) >= 0]
        return ech, nd, reps


def spectral_sequence(f: FilteredComplex, check: bool = True) -> SpectralPages:
    """Pages E_r (r >= 1) of a decreasing filtration, d_r of bidegree (r, 1-r).

    E_r^{p,q} = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}) in total degree p+q with
    Z_r^p = F^p cap d^{-1}(F^{p+r}). Pages are computed until they can no longer
    change, which happens once r exceeds the filtration length.
    """
    w = _SSWorker(f)
    degs = f.ambient.degrees()
    ps = list(range(f.pmin - 1, f.pmax + 1))
    rmax = (f.pmax - f.pmin) + 2
    pages = []
    for r in range(1, rmax + 1):
        spaces = {}
        for n in degs:
            for p in ps:
                spaces[(p, n)] = w.page_space(r, p, n)
        dims = {(p, n - p): len(spaces[(p, n)][2]) for (p, n) in spaces}
        dmaps = {}
        for (p, n), (ech, nd, reps) in spaces.items():
            tgt = spaces.get((p + r, n + 1))
            if not reps:
                continue
            if tgt is None:
                cols = [0] * len(reps)
                for x in reps:
                    if f.ambient.d(n).apply(x):
                        raise GF2Error("spectral sequence escaped the computed range")
                dmaps[(p, n - p)] = GF2Matrix.from_columns(0, cols)
                continue
            tech, tnd, treps = tgt
            cols = [tech.coords(f.ambient.d(n).apply(x)) >> tnd for x in reps]
            dmaps[(p, n - p)] = GF2Matrix.from_columns(len(treps), cols)
        pages.append(Page(r, dims, dmaps))
    if check:
        _check_pages(pages)
    stable = len(pages)
    while stable > 1 and all(m.is_zero() for m in pages[stable - 2].d.values()):
        stable -= 1
    return SpectralPages(pages, stable)


def _check_pages(pages: List[Page]) -> None:
    for pg, nxt in zip(pages, pages[1:]):
        r = pg.r
        for (p, q), m in pg.d.items():
            after = pg.d.get((p + r, q - r + 1))
            if after is not None and m.rows and not (after @ m).is_zero():
                raise GF2Error(f"d_{r} o d_{r} != 0 at {(p, q)}")
        for (p, q), dim in pg.dims.items():
            out = pg.d.get((p, q))
            rk_out = out.rank() if out is not None else 0
            inc = pg.d.get((p - r, q + r - 1))
            rk_in = inc.rank() if inc is not None else 0
            if nxt.dims.get((p, q), 0) != dim - rk_out - rk_in:
                raise GF2Error(f"E_{r + 1} != H(E_{r}) at {(p, q)}")


def page_cohomology_dims(pg: Page) -> Dict[Tuple[int, int], int]:
    """Cohomology of (E_r, d_r) via the generic complex routine, per bidegree."""
    r = pg.r
    out = {}
    for (p, q), dim in pg.dims.items():
        n = p + q
        cs_space = GradedSpace.from_dims({n - 1: pg.dims.get((p - r, q + r - 1), 0), n: dim,
                                          n + 1: pg.dims.get((p + r, q - r + 1), 0)})
        diff = {}
        m_in = pg.d.get((p - r, q + r - 1))
        if m_in is not None and m_in.rows:
            diff[n - 1] = m_in
        m_out = pg.d.get((p, q))
        if m_out is not None and m_out.rows:
            diff[n] = m_out
        cc = ChainComplex(cs_space, diff, check=False)
        out[(p, q)] = cohomology(cc).dim(n)
    return out


# JSON helpers


def complex_from_json(obj: Mapping) -> ChainComplex:
    degrees = {int(k): list(v) for k, v in obj["degrees"].items()}
    edges = [(e["from"], e["to"]) for e in obj.get("differential", [])]
    return ChainComplex.from_edges(degrees, edges)


def complex_to_json(c: ChainComplex) -> dict:
    edges = []
    for k in c.degrees():
        src, dst = c.space.labels(k), c.space.labels(k + 1)
        for j, col in enumerate(c.d(k).columns):
            for i in bits(col):
                edges.append({"from": src[j], "to": dst[i]})
    return {"degrees": {str(k): list(c.space.labels(k)) for k in c.degrees()}, "differential": edges}
