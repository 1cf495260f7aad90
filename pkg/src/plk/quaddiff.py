"""Three-point quadratic differentials, phase functions, characteristic curves and Floer data."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


# quadratic differentials on the three-pointed disk


@dataclass(frozen=True)
class QuadDiff3:
    """phi = b0 (dz/z)^2 + b1 (dz/(1-z))^2 + b2 (dz/(z(1-z)))^2 on the upper half plane."""

    a: Tuple
    b: Tuple

    def numerator(self) -> Tuple:
        """Coefficients (c2, c1, c0) of b0 (1-z)^2 + b1 z^2 + b2, the numerator of phi/dz^2."""
        b0, b1, b2 = self.b
        return (b0 + b1, -2 * b0, b0 + b2)

    def __call__(self, z: complex) -> complex:
        b0, b1, b2 = (float(x) for x in self.b)
        return b0 / z ** 2 + b1 / (1 - z) ** 2 + b2 / (z * (1 - z)) ** 2


def _num(x):
    return Fraction(x) if isinstance(x, Rational) else float(x)


def qd3_from_residues(a0, a1, a2) -> QuadDiff3:
    a = tuple(_num(x) for x in (a0, a1, a2))
    if any(x <= 0 for x in a):
        raise ValueError("residue roots must be positive")
    s0, s1, s2 = (x * x for x in a)
    half = Fraction(1, 2) if all(isinstance(x, Fraction) for x in a) else 0.5
    b = (half * (s0 + s2 - s1), half * (s1 + s2 - s0), half * (s0 + s1 - s2))
    return QuadDiff3(a, b)


def residues_squared(b: Sequence) -> Tuple:
    """Invert the linear system: a0^2 = b0 + b2, a1^2 = b1 + b2, a2^2 = b0 + b1."""
    b0, b1, b2 = b
    return (b0 + b2, b1 + b2, b0 + b1)


def triangle_ok(a0, a1, a2) -> bool:
    return a0 < a1 + a2 and a1 < a0 + a2 and a2 < a0 + a1


def qd3_real_zeros(q: QuadDiff3) -> np.ndarray:
    """Real zeros of phi, from the numerator polynomial."""
    c2, c1, c0 = q.numerator()
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return np.array([])
    if c2 == 0:
        return np.array([-float(c0) / float(c1)]) if c1 != 0 else np.array([])
    if disc == 0:
        return np.array([-float(c1) / (2 * float(c2))])
    roots = np.roots([float(c2), float(c1), float(c0)])
    return np.sort(roots.real)


def qd3_real_zero_test(q: QuadDiff3) -> bool:
    """True iff phi has no zero on the real line (the boundary of the half plane)."""
    return len(qd3_real_zeros(q)) == 0


# phase functions


def smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


@dataclass
class AlphaFunction:
    """Piecewise function through knots (s_i, v_i): constant outside, clamped cubic ramps between."""

    knots: List[Tuple[float, float]]

    def __post_init__(self):
        self.knots = [(float(s), float(v)) for s, v in self.knots]
        ss = [s for s, _ in self.knots]
        if any(b < a for a, b in zip(ss, ss[1:])):
            raise ValueError("knots must be sorted")

    @property
    def left(self) -> float:
        return self.knots[0][1]

    @property
    def right(self) -> float:
        return self.knots[-1][1]

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, self.left)
        for (s0, v0), (s1, v1) in zip(self.knots, self.knots[1:]):
            if s1 > s0:
                m = (s >= s0) & (s <= s1)
                out = np.where(m, v0 + (v1 - v0) * smoothstep((s - s0) / (s1 - s0)), out)
        out = np.where(s >= self.knots[-1][0], self.right, out)
        return out if out.ndim else float(out)

    def breakpoints(self) -> List[float]:
        return [s for s, _ in self.knots]

    def is_monotone(self) -> bool:
        vals = [v for _, v in self.knots]
        d = np.diff(vals)
        return bool(np.all(d >= 0) or np.all(d <= 0))

    def value_range(self) -> Tuple[float, float]:
        vals = [v for _, v in self.knots]
        return min(vals), max(vals)

    def shifted(self, ds: float) -> "AlphaFunction":
        return AlphaFunction([(s + ds, v) for s, v in self.knots])

    def reversed(self, r: float, dv: float = 0.0) -> "AlphaFunction":
        """s -> alpha(r - s) + dv."""
        return AlphaFunction([(r - s, v + dv) for s, v in reversed(self.knots)])


def ramp_alpha(v0: float, v1: float, length: float = math.pi, delta: float = 0.1, start: float = 0.0) -> AlphaFunction:
    """v0 for s <= start + delta, v1 for s >= start + length - delta, monotone in between."""
    return AlphaFunction([(start + delta, v0), (start + length - delta, v1)])


def concat_alpha(a_un: AlphaFunction, a_st: AlphaFunction, r: float, tol: float = 1e-12) -> AlphaFunction:
    """a_un on s <= pi, pi on [pi, R], a_st(s - R) on [R, R + pi], plateaus outside."""
    if r < math.pi:
        raise ValueError("R must be at least pi")
    if abs(a_un.right - math.pi) > tol or abs(a_st.left - math.pi) > tol:
        raise ValueError("plateau mismatch: the pieces must meet at the value pi")
    if a_un.knots[-1][0] > math.pi + tol or a_st.knots[0][0] < -tol:
        raise ValueError("pieces must be constant outside [0, pi]")
    return AlphaFunction(a_un.knots + a_st.shifted(r).knots)


# characteristic curves


@dataclass
class CharCurve:
    s: np.ndarray
    gamma: np.ndarray

    def at(self, s: float) -> complex:
        return complex(np.interp(s, self.s, self.gamma.real) + 1j * np.interp(s, self.s, self.gamma.imag))

    def speeds(self) -> np.ndarray:
        return np.abs(np.diff(self.gamma)) / np.diff(self.s)


def _segment_grid(a: float, b: float, h: float) -> np.ndarray:
    n = max(1, int(math.ceil((b - a) / h - 1e-12)))
    return a + (b - a) * np.arange(n + 1) / n


def characteristic_curve(alpha: AlphaFunction, s_min: float, s_max: float, anchor: Tuple[float, complex] = None,
                         h: Optional[float] = None) -> CharCurve:
    """Solve d gamma/ds = -exp(i alpha(s)) by fourth-order quadrature segment by segment.

    Grids break at the knots, so plateau pieces are exact straight segments.
    ``anchor = (s0, value)`` fixes the translation; by default gamma(s_min) = 0.
    """
    if h is None:
        ramps = [b - a for (a, _), (b, _) in zip(alpha.knots, alpha.knots[1:]) if b > a]
        h = min([0.01] + [r / 8 for r in ramps])
    cuts = sorted({s_min, s_max} | {s for s in alpha.breakpoints() if s_min < s < s_max})
    ss = [np.array([s_min])]
    gs = [np.array([0j])]
    cur = 0j
    f = lambda s: -np.exp(1j * np.asarray(alpha(s)))
    for a, b in zip(cuts, cuts[1:]):
        grid = _segment_grid(a, b, h)
        lo, hi = grid[:-1], grid[1:]
        mid = 0.5 * (lo + hi)
        incr = (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi))
        vals = cur + np.cumsum(incr)
        ss.append(grid[1:])
        gs.append(vals)
        cur = vals[-1]
    s = np.concatenate(ss)
    g = np.concatenate(gs)
    curve = CharCurve(s, g)
    if anchor is not None:
        s0, v0 = anchor
        curve = CharCurve(s, g + (complex(v0) - curve.at(s0)))
    return curve


def normalized_concat_curve(alpha: AlphaFunction, r: float, s_min: float, s_max: float,
                            h: Optional[float] = None) -> CharCurve:
    """Curve of a concatenated phase function with gamma(s) on R^+ e^{i alpha(-inf)} for s < 0
    and gamma real on the middle plateau [pi, R]."""
    c = characteristic_curve(alpha, min(s_min, 0.0), max(s_max, math.pi), h=h)
    d = c.at(math.pi) - c.at(0.0)
    phase = cmath.exp(1j * alpha.left)
    if abs(phase.imag) < 1e-14:
        raise ValueError("left plateau direction is real; the normalization is not determined")
    t = -d.imag / phase.imag
    g0 = t * phase
    return CharCurve(c.s, c.gamma - c.at(0.0) + g0)


# Floer data


@dataclass
class DeltaH:
    """Bump Hamiltonian c * chi(s) * Re(phi(z)) with chi a smooth bump on [a, b] and polynomial phi.

    Norms are taken over the disk of radius ``radius``, where the paths are expected to live.
    """

    c: float
    a: float
    b: float
    phi: Tuple[complex, ...]
    radius: float = 3.0

    def chi(self, s):
        s = np.asarray(s, dtype=float)
        t = np.clip((s - self.a) / (self.b - self.a), 0.0, 1.0)
        return np.where((s > self.a) & (s < self.b), np.sin(np.pi * t) ** 2, 0.0)

    def grad_term(self, s, z):
        """J grad(delta H_s) at z, as a complex number (J is multiplication by i)."""
        dphi = np.polyval(np.polyder(np.array(self.phi, dtype=complex)), z)
        return 1j * self.c * self.chi(s) * np.conj(dphi)

    def norms(self, n: int = 200) -> Tuple[float, float]:
        """(int sup|dH|, int sup(|dH| + |grad dH|)^2) over the disk, by sampling."""
        r = np.linspace(0, self.radius, 40)
        th = np.linspace(0, 2 * np.pi, 80)
        zz = (r[:, None] * np.exp(1j * th[None, :])).ravel()
        p = np.array(self.phi, dtype=complex)
        sup0 = float(np.max(np.abs(np.polyval(p, zz).real)))
        sup1 = sup0 + float(np.max(np.abs(np.polyval(np.polyder(p), zz))))
        s = np.linspace(self.a, self.b, n)
        chi = self.chi(s)
        w = np.trapezoid if hasattr(np, "trapezoid") else np.trapz
        return (abs(self.c) * sup0 * float(w(chi, s)), (self.c * sup1) ** 2 * float(w(chi ** 2, s)))


@dataclass
class FloerDatum:
    r: float
    alpha: AlphaFunction
    beta: float
    eps: float
    dh: Optional[DeltaH] = None

    @property
    def theta0(self) -> float:
        return self.alpha.left + math.pi

    @property
    def theta1(self) -> float:
        return self.alpha.right

    def to_json(self) -> dict:
        return {"R": self.r, "alpha_knots": self.alpha.knots, "beta": self.beta, "eps01": self.eps,
                "delta_H": None if self.dh is None else {"c": self.dh.c, "support": [self.dh.a, self.dh.b],
                                                         "phi": [[z.real, z.imag] for z in map(complex, self.dh.phi)]}}

    @classmethod
    def from_json(cls, obj: dict) -> "FloerDatum":
        dh = obj.get("delta_H")
        if dh is not None:
            dh = DeltaH(dh["c"], dh["support"][0], dh["support"][1], tuple(complex(a, b) for a, b in dh["phi"]))
        return cls(float(obj["R"]), AlphaFunction([tuple(k) for k in obj["alpha_knots"]]), float(obj["beta"]),
                   float(obj["eps01"]), dh)


def standard_datum(theta0: float, theta1: float, r: float = math.pi, delta: float = 0.1,
                   eps: Optional[float] = None) -> FloerDatum:
    """Monotone ramp from theta0 - pi to theta1, with beta at the center of the phase range."""
    alpha = ramp_alpha(theta0 - math.pi, theta1, r, delta)
    lo, hi = alpha.value_range()
    beta = 0.5 * (lo + hi)
    margin = math.cos(0.5 * (hi - lo))
    if eps is None:
        eps = 0.5 * margin
    return FloerDatum(r, alpha, beta, eps)


# rays


@dataclass(frozen=True)
class Ray:
    origin: complex
    angle: float

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * self.angle)

    def contains(self, z: complex, tol: float = 1e-9, strict: bool = True) -> bool:
        """z on the ray; with ``strict`` the origin itself is excluded."""
        w = (z - self.origin) * self.direction.conjugate()
        on = abs(w.imag) <= tol * max(1.0, abs(w)) and w.real >= -tol
        if strict and abs(z - self.origin) <= tol:
            return False
        return on


@dataclass
class RayHit:
    point: Optional[complex]
    degenerate: bool = False
    collinear: bool = False


def ray_intersect(l1: Ray, l2: Ray, tol: float = 1e-12) -> RayHit:
    d1, d2 = l1.direction, l2.direction
    cross = (d1.conjugate() * d2).imag
    diff = l2.origin - l1.origin
    if abs(cross) <= tol:
        # parallel: overlap only if collinear
        if abs((d1.conjugate() * diff).imag) > tol * max(1.0, abs(diff)):
            return RayHit(None)
        t = (d1.conjugate() * diff).real
        same = (d1.conjugate() * d2).real > 0
        if same or t >= -tol:
            return RayHit(l2.origin if t >= 0 else l1.origin, degenerate=True, collinear=True)
        return RayHit(None)
    # l1.origin + t d1 = l2.origin + u d2
    t = (diff.conjugate() * d2).imag / cross
    u = (diff.conjugate() * d1).imag / cross
    if t < -tol or u < -tol:
        return RayHit(None)
    p = l1.origin + max(t, 0.0) * d1
    deg = abs(t) <= tol or abs(u) <= tol
    return RayHit(p, degenerate=deg)


def _on_segment(z: complex, a: complex, b: complex, tol: float = 1e-9) -> bool:
    ab = b - a
    if abs(ab) <= tol:
        return abs(z - a) <= tol
    w = (z - a) / ab
    return abs(w.imag) * abs(ab) <= tol and -tol <= w.real <= 1 + tol


@dataclass
class DatumReport:
    clauses: Dict[str, bool] = field(default_factory=dict)
    margin: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.clauses.values())

    def failed(self) -> List[str]:
        return [k for k, v in self.clauses.items() if not v]

    def to_json(self) -> dict:
        return {"ok": self.ok, "clauses": self.clauses, "margin": self.margin, "notes": self.notes}


def validate_floer_datum(d: FloerDatum, rays: Optional[Tuple[Ray, Ray]] = None,
                         crit_values: Optional[Sequence[complex]] = None, n_samples: int = 4001,
                         tol: float = 1e-9) -> DatumReport:
    rep = DatumReport()
    ks = [s for s, _ in d.alpha.knots]
    s = np.linspace(min(ks) - 1.0, max(ks) + 1.0, n_samples)
    s = np.union1d(s, np.array(ks))
    vals = np.cos(d.beta - np.asarray(d.alpha(s)))
    rep.margin = float(vals.min() - d.eps)
    rep.clauses["eps_range"] = 0.0 < d.eps < 1.0
    rep.clauses["cosine_bound"] = rep.margin > 0
    rep.clauses["beta_window"] = d.theta1 - math.pi / 2 < d.beta < d.theta0 - math.pi / 2
    rep.clauses["R_at_least_pi"] = d.r >= math.pi - 1e-12
    rep.clauses["plateaus"] = ks[0] >= -tol and ks[-1] <= d.r + tol
    if d.dh is not None:
        n0, n1 = d.dh.norms()
        rep.clauses["perturbation_norms"] = n0 < 1 and n1 < 1
        rep.clauses["perturbation_support"] = d.dh.a >= -tol and d.dh.b <= d.r + tol
    if rays is not None and crit_values is not None:
        l0, l1 = rays
        bad = [c for c in crit_values for l in (l0, l1) if l.contains(c, strict=True)]
        if not bad:
            rep.clauses["rays_avoid_critical_values"] = True
        elif d.alpha.is_monotone():
            hit = ray_intersect(l0, l1)
            ok = True
            if hit.point is not None:
                for c in crit_values:
                    for o in (l0.origin, l1.origin):
                        if abs(c - o) > tol and _on_segment(c, hit.point, o):
                            if abs(c - l0.origin) > tol and abs(c - l1.origin) > tol:
                                ok = False
            rep.clauses["rays_avoid_critical_values"] = ok
            rep.notes.append("monotone phase function: relaxed ray condition applied")
        else:
            rep.clauses["rays_avoid_critical_values"] = False
    return rep


def dual_datum(d: FloerDatum) -> FloerDatum:
    """alpha'(s) = alpha(R - s) - pi, beta' = beta - pi, delta H pulled back by s -> R - s."""
    dh = None
    if d.dh is not None:
        dh = DeltaH(d.dh.c, d.r - d.dh.b, d.r - d.dh.a, d.dh.phi, d.dh.radius)
    return FloerDatum(d.r, d.alpha.reversed(d.r, -math.pi), d.beta - math.pi, d.eps, dh)
