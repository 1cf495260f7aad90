"""Landau-Ginzburg models on C: critical data, thimbles, solitons, actions, gradings and gluing.

Conventions
-----------
* ``W`` is a polynomial; ``L = Re W`` and ``H = Im W``.
* The thimble ``Lambda_{q,theta}`` is the set of points flowing into ``q`` under
  ``-grad Re(e^{-i theta} W)``, so ``W(Lambda) - W(q)`` lies on the ray ``R_{>=0} e^{i theta}``.
* Solitons solve ``dp/ds = -e^{i alpha(s)} conj(W'(p)) + J grad(delta H)`` with
  ``p(s) -> q0`` on the left plateau and ``p(s) -> q1`` on the right plateau.
* The primitive of the area form is ``lambda = (x dy - y dx)/2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import eigvalsh_tridiagonal

from .quaddiff import (AlphaFunction, FloerDatum, Ray, RayHit, concat_alpha, dual_datum, ramp_alpha,
                       ray_intersect, smoothstep, validate_floer_datum)

TWO_PI = 2.0 * math.pi


class LGError(ValueError):
    pass


# models and critical data


@dataclass
class LGModel:
    """Polynomial superpotential; ``coeffs`` ascending (coeffs[k] multiplies z^k)."""

    coeffs: Sequence[complex]
    primitive: str = "half-symplectic"

    def __post_init__(self):
        c = list(np.asarray(self.coeffs, dtype=complex))
        while c and c[-1] == 0:
            c.pop()
        if len(c) < 3:
            raise LGError("deg W must be at least 2")
        if self.primitive != "half-symplectic":
            raise LGError("only the primitive (x dy - y dx)/2 is supported")
        self.coeffs = np.array(c)
        self._p = self.coeffs[::-1].copy()
        self._d1 = np.polyder(self._p)
        self._d2 = np.polyder(self._p, 2)
        self._d3 = np.polyder(self._p, 3) if len(self._p) > 3 else np.array([0j])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def W(self, z):
        return np.polyval(self._p, z)

    def dW(self, z):
        return np.polyval(self._d1, z)

    def d2W(self, z):
        return np.polyval(self._d2, z)

    def d3W(self, z):
        return np.polyval(self._d3, z)

    @property
    def scale(self) -> float:
        z = np.roots(self._d1)
        return float(max(1.0, np.max(np.abs(self.W(z))) if len(z) else 1.0))

    def to_json(self) -> dict:
        return {"W": [[float(c.real), float(c.imag)] for c in self.coeffs], "primitive": self.primitive}

    @classmethod
    def from_json(cls, obj: dict) -> "LGModel":
        if "W" not in obj:
            raise LGError("model JSON needs field 'W'")
        return cls([complex(a, b) for a, b in obj["W"]], obj.get("primitive", "half-symplectic"))

    @classmethod
    def quadratic(cls) -> "LGModel":
        return cls([0, 0, 0.5])

    @classmethod
    def rotated_cubic(cls, rot: float = math.pi / 6) -> "LGModel":
        """z^3/3 - e^{i rot} z."""
        return cls([0, -cmath.exp(1j * rot), 0, 1.0 / 3.0])


@dataclass(frozen=True)
class CriticalPoint:
    z: complex
    value: complex
    hess: complex
    index: int

    @property
    def H(self) -> float:
        return self.value.imag


def critical_points(m: LGModel, strict: bool = True, tol: float = 1e-12) -> List[CriticalPoint]:
    """Roots of W', sorted by H = Im W ascending. ``strict`` rejects H-ties."""
    z = np.roots(m._d1).astype(complex)
    for _ in range(8):
        h = m.d2W(z)
        z = z - np.where(h != 0, m.dW(z) / np.where(h != 0, h, 1), 0)
    sc = m.scale
    if np.any(np.abs(m.dW(z)) > tol * sc * max(1.0, float(np.max(np.abs(z))) ** (m.degree - 1))):
        raise LGError("critical point solve did not converge")
    hs = m.d2W(z)
    if np.any(np.abs(hs) < 1e-8 * sc):
        raise LGError("degenerate critical point: W'' vanishes")
    vals = m.W(z)
    for i in range(len(z)):
        for j in range(i):
            if abs(vals[i] - vals[j]) < 1e-9 * sc:
                raise LGError("coincident critical values")
            if strict and abs(vals[i].imag - vals[j].imag) < 1e-9 * sc:
                raise LGError("critical points with equal H = Im W")
    order = np.argsort(vals.imag, kind="stable")
    return [CriticalPoint(complex(z[k]), complex(vals[k]), complex(hs[k]), i + 1) for i, k in enumerate(order)]


def critical_angles(m: LGModel) -> List[float]:
    cps = critical_points(m, strict=False)
    out = set()
    for a in cps:
        for b in cps:
            if a is not b:
                out.add(round(cmath.phase(b.value - a.value) % TWO_PI, 14))
    return sorted(out)


def _wrap(x: float) -> float:
    return (x + math.pi) % TWO_PI - math.pi


def admissible(m: LGModel, theta_star: float, tol: float = 1e-9) -> bool:
    return all(abs(_wrap(theta_star - c)) > tol for c in critical_angles(m))


def theta_crit(m: LGModel, theta_star: float) -> Optional[float]:
    """Smallest critical angle strictly greater than theta_star, lifted above it."""
    cs = critical_angles(m)
    if not cs:
        return None
    gaps = [(c - theta_star) % TWO_PI for c in cs]
    gaps = [g if g > 1e-12 else TWO_PI for g in gaps]
    return theta_star + min(gaps)


def holomorphy_residual(m: LGModel, pts) -> float:
    """max |grad L + J grad H| from the real partials dW/dx = W', dW/dy = i W'."""
    pts = np.asarray(pts, dtype=complex)
    wx = m.dW(pts)
    wy = 1j * wx
    gl = np.stack([wx.real, wy.real])
    gh = np.stack([wx.imag, wy.imag])
    jgh = np.stack([-gh[1], gh[0]])
    return float(np.max(np.abs(gl + jgh))) if pts.size else 0.0


def o_radius(m: LGModel) -> float:
    """Radius of the neighbourhoods used to label critical points."""
    cps = critical_points(m, strict=False)
    if len(cps) < 2:
        return 0.5
    dmin = min(abs(a.z - b.z) for a in cps for b in cps if a is not b)
    return 0.5 * min(1.0, dmin / 4.0)


# graded lines


@dataclass(frozen=True)
class GradedLagLine:
    """Line R e^{i phi} with a real lift xi, e^{2 pi i xi} = e^{2 i phi}."""

    phi: float
    xi: float

    def __post_init__(self):
        if abs(_wrap(TWO_PI * self.xi - 2 * self.phi)) > 1e-9:
            raise LGError("grading lift inconsistent with the angle")

    @classmethod
    def from_lift(cls, xi: float) -> "GradedLagLine":
        return cls(math.pi * xi, xi)

    def shifted(self, k: int) -> "GradedLagLine":
        return GradedLagLine(self.phi, self.xi + k)


def maslov_index(l0: GradedLagLine, l1: GradedLagLine) -> int:
    """floor(xi0 - xi1); thimble lines with xi = theta/2pi give floor((theta0 - theta1)/2pi)."""
    diff = l0.xi - l1.xi
    if abs(diff - round(diff)) < 1e-12:
        raise LGError("lines are not transverse")
    return int(math.floor(diff))


# thimbles


@dataclass
class Thimble:
    q: CriticalPoint
    theta: float
    tau: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    cap: float

    @property
    def xi(self) -> float:
        return self.theta / TWO_PI

    @property
    def ray(self) -> Ray:
        return Ray(self.q.value, self.theta)

    @property
    def tangent_angle(self) -> float:
        return 0.5 * (self.theta - cmath.phase(self.q.hess))

    def line(self) -> GradedLagLine:
        """Tangent line at q, measured in the frame of the quadratic volume form W''(q) dz^2."""
        return GradedLagLine(0.5 * self.theta, self.xi)

    def ray_residuals(self, m: LGModel) -> Tuple[float, float]:
        w = np.exp(-1j * self.theta) * (m.W(self.points) - self.q.value)
        return float(np.max(np.abs(w.imag))), float(np.min(w.real))

    def point_at(self, tau):
        if not hasattr(self, "_spline"):
            y = np.stack([self.points.real, self.points.imag], axis=1)
            dy = np.stack([self.tangents.real, self.tangents.imag], axis=1)
            self._spline = CubicHermiteSpline(self.tau, y, dy)
        v = self._spline(np.asarray(tau, dtype=float))
        return v[..., 0] + 1j * v[..., 1]


def _project_ray(m: LGModel, p: complex, wq: complex, rot: complex) -> complex:
    for _ in range(3):
        g = (rot * (m.W(p) - wq)).imag
        grad = 1j * np.conj(rot * m.dW(p))
        n2 = abs(grad) ** 2
        if n2 == 0:
            break
        p = p - g * grad / n2
    return p


def thimble(m: LGModel, q: CriticalPoint, theta: float, cap: Optional[float] = None, ds: float = 0.01,
            max_len: float = 50.0) -> Thimble:
    """Trace both branches of the thimble by arclength RK4 from q, halting at |W - W(q)| = cap."""
    if abs(q.hess) < 1e-12:
        raise LGError("thimble needs a Morse critical point")
    if cap is None:
        cap = 4.0 * m.scale
    rot = cmath.exp(-1j * theta)
    ei = cmath.exp(1j * theta)
    phi = 0.5 * (theta - cmath.phase(q.hess))

    def u(p):
        g = ei * np.conj(m.dW(p))
        return g / abs(g)

    branches = []
    for sgn in (1.0, -1.0):
        p = q.z + sgn * cmath.exp(1j * phi) * ds
        p = _project_ray(m, p, q.value, rot)
        pts, arc = [p], [ds]
        while abs(m.W(p) - q.value) < cap and arc[-1] < max_len:
            k1 = u(p)
            k2 = u(p + 0.5 * ds * k1)
            k3 = u(p + 0.5 * ds * k2)
            k4 = u(p + ds * k3)
            p = p + ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            p = _project_ray(m, p, q.value, rot)
            pts.append(p)
            arc.append(arc[-1] + ds)
        branches.append((np.array(pts), np.array(arc)))
    (pp, ap), (pm, am) = branches
    tang_p = np.array([u(z) for z in pp])
    tang_m = np.array([-u(z) for z in pm])
    e = cmath.exp(1j * phi)
    tau = np.concatenate([-am[::-1], [0.0], ap])
    pts = np.concatenate([pm[::-1], [q.z], pp])
    tang = np.concatenate([tang_m[::-1], [e], tang_p])
    return Thimble(q, float(theta), tau, pts, tang, float(cap))


# Floer data for the arrangement of unstable and stable thimbles


def central_datum(alpha: AlphaFunction, r: float, eps_frac: float = 0.5) -> FloerDatum:
    """beta at the center of the phase range; eps a fraction of the cosine margin."""
    lo, hi = alpha.value_range()
    margin = math.cos(0.5 * (hi - lo))
    if margin <= 0:
        raise LGError("phase range too wide for any beta")
    return FloerDatum(r, alpha, 0.5 * (lo + hi), eps_frac * margin)


@dataclass
class Arrangement:
    """Unstable thimbles U_j = Lambda_{x_j, eta_j} and stable thimbles S_k = Lambda_{x_k, theta_k}.

    Angles satisfy theta* < theta_m < ... < theta_1 < theta_0 < theta_crit and
    pi + theta* < eta_0 < eta_1 < ... < eta_m < pi + theta_crit.
    """

    model: LGModel
    crit: List[CriticalPoint]
    theta: Dict[int, float]
    eta: Dict[int, float]
    delta: float = 0.1

    def x(self, j: int) -> CriticalPoint:
        return self.crit[j - 1]

    def un_datum(self, j: int) -> FloerDatum:
        return central_datum(ramp_alpha(self.eta[j] - math.pi, math.pi, math.pi, self.delta), math.pi)

    def st_datum(self, k: int) -> FloerDatum:
        return central_datum(ramp_alpha(math.pi, self.theta[k], math.pi, self.delta), math.pi)

    def pair_datum(self, j: int, k: int, r: float) -> FloerDatum:
        a = concat_alpha(self.un_datum(j).alpha, self.st_datum(k).alpha, r)
        return central_datum(a, r + math.pi)

    def U(self, j: int, cap: Optional[float] = None) -> Thimble:
        return thimble(self.model, self.x(j), self.eta[j], cap)

    def S(self, k: int, cap: Optional[float] = None) -> Thimble:
        return thimble(self.model, self.x(k), self.theta[k], cap)


def fs_arrangement(m: LGModel, theta_star: float = 0.0, delta: float = 0.1) -> Arrangement:
    if not admissible(m, theta_star):
        raise LGError("theta* is a critical angle")
    crit = critical_points(m)
    n = len(crit)
    tc = theta_crit(m, theta_star)
    span = (tc - theta_star) if tc is not None else math.pi / 2
    theta = {k: theta_star + span * (n + 1 - k) / (n + 2) for k in range(n + 1)}
    eta = {j: math.pi + theta_star + span * (j + 1) / (n + 2) for j in range(n + 1)}
    return Arrangement(m, crit, theta, eta, delta)


# integration


def _rhs(m: LGModel, d: FloerDatum, s, ea, p):
    out = -ea * np.conj(m.dW(p))
    if d.dh is not None:
        out = out + d.dh.grad_term(s, p)
    return out


def integrate(m: LGModel, d: FloerDatum, p0, s0: float, s1: float, h: float = 0.01, pmax: float = np.inf,
              store: bool = False, times: bool = False):
    """Vectorized RK4 for the soliton equation; paths leaving |p| < pmax are frozen and flagged.

    With ``times`` the survival time of each path (s1 if it never escapes) is returned as well.
    """
    p = np.array(p0, dtype=complex, copy=True)
    n = max(1, int(math.ceil(abs(s1 - s0) / h - 1e-9)))
    hh = (s1 - s0) / n
    grid = s0 + hh * np.arange(n + 1)
    half = grid[:-1] + 0.5 * hh
    ea_g = np.exp(1j * np.asarray(d.alpha(grid)))
    ea_h = np.exp(1j * np.asarray(d.alpha(half)))
    alive = np.ones(p.shape, dtype=bool)
    death = np.full(p.shape, float(s1))
    traj = [p.copy()] if store else None
    for i in range(n):
        s = grid[i]
        k1 = _rhs(m, d, s, ea_g[i], p)
        k2 = _rhs(m, d, s + 0.5 * hh, ea_h[i], p + 0.5 * hh * k1)
        k3 = _rhs(m, d, s + 0.5 * hh, ea_h[i], p + 0.5 * hh * k2)
        k4 = _rhs(m, d, s + hh, ea_g[i + 1], p + hh * k3)
        pn = p + hh / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        bad = ~np.isfinite(pn) | (np.abs(pn) > pmax)
        death = np.where(alive & bad, s, death)
        alive &= ~bad
        p = np.where(alive, pn, p)
        if store:
            traj.append(p.copy())
    if store:
        return grid, np.array(traj), alive
    if times:
        return p, alive, death
    return p, alive


def signed_distance(pts, poly, chunk: int = 256):
    """Signed distance from each point to the polyline; also flags projections onto its ends."""
    pts = np.asarray(pts, dtype=complex)
    a, b = poly[:-1], poly[1:]
    ab = b - a
    l2 = np.abs(ab) ** 2
    l2 = np.where(l2 > 0, l2, 1.0)
    dist = np.empty(pts.shape)
    clip = np.zeros(pts.shape, dtype=bool)
    for i in range(0, len(pts), chunk):
        z = pts[i:i + chunk]
        w = z[:, None] - a[None, :]
        t = np.clip((w * np.conj(ab)[None, :]).real / l2[None, :], 0.0, 1.0)
        proj = a[None, :] + t * ab[None, :]
        dd = np.abs(z[:, None] - proj)
        k = np.argmin(dd, axis=1)
        r = np.arange(len(z))
        cross = (np.conj(ab[k]) * (z - proj[r, k])).imag
        dist[i:i + chunk] = np.where(cross >= 0, 1.0, -1.0) * dd[r, k]
        tk = t[r, k]
        clip[i:i + chunk] = ((k == 0) & (tk <= 0)) | ((k == len(ab) - 1) & (tk >= 1))
    return dist, clip


# solitons


@dataclass
class Soliton:
    s: np.ndarray
    p: np.ndarray
    q0: CriticalPoint
    q1: CriticalPoint
    datum: FloerDatum
    tau: float = float("nan")
    slope: float = float("nan")
    newton: dict = field(default_factory=dict)

    def at(self, s):
        s = np.asarray(s, dtype=float)
        re = np.interp(s, self.s, self.p.real, left=self.q0.z.real, right=self.q1.z.real)
        im = np.interp(s, self.s, self.p.imag, left=self.q0.z.imag, right=self.q1.z.imag)
        return re + 1j * im

    def residual(self, m: LGModel) -> float:
        """Max trapezoid residual of the soliton equation, per unit length."""
        return float(np.max(np.abs(_bvp_residual(m, self.datum, self.s, self.p)) / np.diff(self.s)))

    def tail_norms(self) -> Tuple[float, float]:
        return abs(self.p[0] - self.q0.z), abs(self.p[-1] - self.q1.z)

    def is_constant(self, tol: float = 1e-8) -> bool:
        return self.q0.z == self.q1.z and float(np.max(np.abs(self.p - self.q0.z))) < tol

    def reversed(self) -> "Soliton":
        r = self.datum.r
        return Soliton(r - self.s[::-1], self.p[::-1].copy(), self.q1, self.q0, dual_datum(self.datum))

    def to_csv_rows(self):
        return [(float(a), float(z.real), float(z.imag)) for a, z in zip(self.s, self.p)]


def make_grid(d: FloerDatum, tail: float = 8.0, h: float = 0.01, extra: Sequence[float] = ()) -> np.ndarray:
    """Piecewise uniform grid on [-tail, R + tail] containing 0, R and any extra breakpoints."""
    cuts = sorted({-tail, 0.0, d.r, d.r + tail} | {float(x) for x in extra if -tail < x < d.r + tail})
    parts = [np.array([cuts[0]])]
    for a, b in zip(cuts, cuts[1:]):
        n = max(1, int(math.ceil((b - a) / h - 1e-9)))
        parts.append(a + (b - a) * np.arange(1, n + 1) / n)
    return np.concatenate(parts)


def _f_and_a(m: LGModel, d: FloerDatum, s, p):
    c = -np.exp(1j * np.asarray(d.alpha(s)))
    f = c * np.conj(m.dW(p))
    a = c * np.conj(m.d2W(p))
    if d.dh is not None:
        f = f + d.dh.grad_term(s, p)
        dd = np.polyder(np.array(d.dh.phi, dtype=complex), 2)
        a = a + 1j * d.dh.c * d.dh.chi(s) * np.conj(np.polyval(dd, p))
    return f, a


def _bvp_residual(m, d, s, p):
    f, _ = _f_and_a(m, d, s, p)
    h = np.diff(s)
    return p[1:] - p[:-1] - 0.5 * h * (f[1:] + f[:-1])


def newton_bvp(m: LGModel, d: FloerDatum, s: np.ndarray, p_init: np.ndarray, q0: CriticalPoint,
               q1: CriticalPoint, tol: float = 1e-11, maxit: int = 40) -> Tuple[np.ndarray, dict]:
    """Damped Newton for the trapezoid discretization with linear thimble boundary conditions.

    The left end is constrained to the tangent line of Lambda_{q0, theta0}, the right end to the
    tangent line of Lambda_{q1, theta1}.
    """
    n = len(s)
    h = np.diff(s)
    e0 = cmath.exp(-1j * 0.5 * (d.theta0 - cmath.phase(q0.hess)))
    e1 = cmath.exp(-1j * 0.5 * (d.theta1 - cmath.phase(q1.hess)))

    def F(p):
        r = _bvp_residual(m, d, s, p)
        out = np.empty(2 * n)
        out[0] = (e0 * (p[0] - q0.z)).imag
        out[1:-1:2] = r.real
        out[2:-1:2] = r.imag
        out[-1] = (e1 * (p[-1] - q1.z)).imag
        return out

    # fixed sparsity pattern
    i = np.arange(n - 1)
    rows_x, rows_y = 1 + 2 * i, 2 + 2 * i
    base_rows, base_cols = [], []
    for rr in (rows_x, rows_y):
        for cc in (2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3):
            base_rows.append(rr)
            base_cols.append(cc)
    base_rows = np.concatenate(base_rows + [np.array([0, 0, 2 * n - 1, 2 * n - 1])])
    base_cols = np.concatenate(base_cols + [np.array([0, 1, 2 * n - 2, 2 * n - 1])])

    def J(p):
        _, a = _f_and_a(m, d, s, p)
        ar, ai = a.real, a.imag
        hh = 0.5 * h
        # d(residual)/dp_i = -I - hh A_i, d/dp_{i+1} = I - hh A_{i+1}, A = [[ar, ai], [ai, -ar]]
        vx = [-1 - hh * ar[:-1], -hh * ai[:-1], 1 - hh * ar[1:], -hh * ai[1:]]
        vy = [-hh * ai[:-1], -1 + hh * ar[:-1], -hh * ai[1:], 1 + hh * ar[1:]]
        vals = np.concatenate(vx + vy + [np.array([e0.imag, e0.real, e1.imag, e1.real])])
        return sp.csc_matrix((vals, (base_rows, base_cols)), shape=(2 * n, 2 * n))

    p = np.array(p_init, dtype=complex, copy=True)
    res = F(p)
    hist = [float(np.max(np.abs(res)))]
    it = 0
    info = {"converged": hist[0] < tol, "iterations": 0, "history": hist, "singular": False}
    while hist[-1] >= tol and it < maxit:
        it += 1
        try:
            dx = spla.spsolve(J(p), -res)
        except RuntimeError:
            info["singular"] = True
            break
        if not np.all(np.isfinite(dx)):
            info["singular"] = True
            break
        dp = dx[0::2] + 1j * dx[1::2]
        lam = 1.0
        while True:
            cand = p + lam * dp
            rc = F(cand)
            if np.all(np.isfinite(rc)) and np.max(np.abs(rc)) < (1 - 0.25 * lam) * hist[-1] or lam < 1e-4:
                break
            lam *= 0.5
        p, res = cand, rc
        hist.append(float(np.max(np.abs(res))))
        if not np.isfinite(hist[-1]):
            break
    info["iterations"] = it
    info["converged"] = bool(hist[-1] < tol)
    info["residual"] = hist[-1]
    return p, info


def _thimble_tail(m: LGModel, th: Thimble, tau0: float, length: float, h: float) -> np.ndarray:
    """Plateau flow toward q along the traced thimble, as a scalar flow in arclength tau.

    Samples are spaced h apart in flow time; the flow is stable in this direction.
    """
    n = max(1, int(math.ceil(length / h - 1e-9)))
    hh = length / n
    f = lambda t: -np.sign(t) * abs(complex(m.dW(th.point_at(t))))
    t = float(tau0)
    out = [t]
    for _ in range(n):
        k1 = f(t)
        k2 = f(t + 0.5 * hh * k1)
        k3 = f(t + 0.5 * hh * k2)
        k4 = f(t + hh * k3)
        tn = t + hh / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = 0.0 if np.sign(tn) != np.sign(t) else tn
        out.append(t)
    return th.point_at(np.array(out))


def _nearest_tau(th: Thimble, z: complex) -> float:
    k = int(np.argmin(np.abs(th.points - z)))
    lo, hi = th.tau[max(k - 1, 0)], th.tau[min(k + 1, len(th.tau) - 1)]
    ts = np.linspace(lo, hi, 201)
    return float(ts[int(np.argmin(np.abs(th.point_at(ts) - z)))])


@dataclass
class SolitonSearch:
    solitons: List[Soliton]
    nontransversal: List[float]
    rejected: int
    n_tau: int
    cap: float
    h_tau: float
    h_s: float

    @property
    def count(self) -> int:
        return len(self.solitons)

    @property
    def mod2(self) -> int:
        return self.count % 2

    def to_json(self) -> dict:
        return {"count": self.count, "mod2": self.mod2, "taus": [s.tau for s in self.solitons],
                "nontransversal": self.nontransversal, "rejected_sign_changes": self.rejected,
                "n_tau": self.n_tau, "energy_cap": self.cap, "h_tau": self.h_tau, "h_s": self.h_s}


def _shoot_eval(m, d, th0, th1, taus, h_s, pmax):
    pr, alive, death = integrate(m, d, th0.point_at(taus), 0.0, d.r, h_s, pmax, times=True)
    dist, clip = signed_distance(pr, th1.points)
    return np.where(alive & ~clip, dist, np.nan), death


def _scan(taus, dist, death, h_s):
    """Sign changes among surviving paths, plus regions to refine.

    Regions are survivor/escape borders (peak None) and local maxima of the survival time
    of escaping paths; a soliton sits inside an exponentially thin survival window.
    """
    fin = np.isfinite(dist)
    br, reg = [], []
    for i in range(len(taus) - 1):
        if fin[i] and fin[i + 1]:
            if np.sign(dist[i]) != np.sign(dist[i + 1]):
                br.append((taus[i], taus[i + 1], dist[i], dist[i + 1]))
        elif fin[i] != fin[i + 1]:
            reg.append((taus[i], taus[i + 1], None))
    for i in range(1, len(taus) - 1):
        t = death[i]
        if not fin[i] and t >= death[i - 1] and t >= death[i + 1] and max(t - death[i - 1], t - death[i + 1]) > 0.5 * h_s:
            reg.append((taus[i - 1], taus[i + 1], t))
    return br, reg


def _refine_brackets(m, d, th0, th1, lo, hi, dlo, dhi, h_s, pmax, tau_tol, k=16):
    lo, hi, dlo, dhi = (np.array(x, dtype=float) for x in (lo, hi, dlo, dhi))
    live = np.ones(len(lo), dtype=bool)
    while np.any(live & (hi - lo > tau_tol)):
        act = np.where(live & (hi - lo > tau_tol))[0]
        frac = np.arange(1, k + 1) / (k + 1)
        t = lo[act, None] + (hi - lo)[act, None] * frac[None, :]
        dd, _ = _shoot_eval(m, d, th0, th1, t.ravel(), h_s, pmax)
        dd = dd.reshape(t.shape)
        for n, b in enumerate(act):
            tt = np.concatenate([[lo[b]], t[n], [hi[b]]])
            vv = np.concatenate([[dlo[b]], dd[n], [dhi[b]]])
            sg = np.sign(vv)
            idx = [i for i in range(k + 1) if np.isfinite(vv[i]) and np.isfinite(vv[i + 1]) and sg[i] != sg[i + 1]]
            if not idx:
                live[b] = False
                continue
            i = idx[0]
            lo[b], hi[b], dlo[b], dhi[b] = tt[i], tt[i + 1], vv[i], vv[i + 1]
    return lo, hi, dlo, dhi, live


def _shoot_roots(m, d, th0, th1, h_tau, h_s, tau_tol, accept_tol, k, max_regions, max_passes):
    """Refined sign-change brackets (lo, hi, dlo, dhi) of the shooting function, and the grid size."""
    ext = float(np.max(np.abs(np.concatenate([th0.points, th1.points]))))
    pmax = 4.0 * ext + 1.0
    n_lo = int(math.floor(-th0.tau[0] / h_tau - 0.5))
    n_hi = int(math.floor(th0.tau[-1] / h_tau - 0.5))
    taus = (np.arange(-n_lo - 1, n_hi + 1) + 0.5) * h_tau
    dist, death = _shoot_eval(m, d, th0, th1, taus, h_s, pmax)
    brackets, regions = _scan(taus, dist, death, h_s)
    regions = [(lo, hi, pk, 0) for lo, hi, pk in regions]
    passes = 0
    while regions and passes < max_passes:
        passes += 1
        regions.sort(key=lambda r: -(np.inf if r[2] is None else r[2]))
        regions = regions[:max_regions]
        grids = [np.linspace(lo, hi, k + 2) for lo, hi, _, _ in regions]
        dd, tt = _shoot_eval(m, d, th0, th1, np.concatenate(grids), h_s, pmax)
        new = []
        for n, (lo, hi, pk, strikes) in enumerate(regions):
            sl = slice(n * (k + 2), (n + 1) * (k + 2))
            b, rg = _scan(grids[n], dd[sl], tt[sl], h_s)
            brackets += b
            for lo2, hi2, pk2 in rg:
                if hi2 - lo2 <= tau_tol * max(1.0, abs(lo2)):
                    continue
                st = strikes
                if pk is not None and pk2 is not None and pk2 <= pk + 0.5 * h_s:
                    st += 1
                if st < 2:
                    new.append((lo2, hi2, pk2, st))
        regions = new
    out, rejected = [], 0
    if brackets:
        bl = np.array(brackets)
        lo, hi, dlo, dhi, live = _refine_brackets(m, d, th0, th1, bl[:, 0], bl[:, 1], bl[:, 2], bl[:, 3],
                                                  h_s, pmax, tau_tol)
        seen = []
        for b in range(len(lo)):
            ends = np.array([dlo[b], dhi[b]])
            best = np.nanmin(np.abs(ends)) if np.isfinite(ends).any() else np.inf
            if not live[b] or not best <= accept_tol * m.scale:
                rejected += 1
                continue
            if any(abs(lo[b] - t) <= 4 * tau_tol * max(1.0, abs(t)) for t in seen):
                continue
            seen.append(lo[b])
            out.append((lo[b], hi[b], dlo[b], dhi[b]))
    return out, rejected, len(taus)


def _accurate_path(m, d, th0, lo, hi, h_s, sep=1e-3):
    """Mean of the two bracket trajectories and the time up to which they agree."""
    grid, traj, _ = integrate(m, d, th0.point_at(np.array([lo, hi])), 0.0, d.r, h_s, store=True)
    gap = np.abs(traj[:, 0] - traj[:, 1])
    bad = np.where(~(gap < sep))[0]
    t_ok = grid[bad[0] - 1] if len(bad) else grid[-1]
    return grid, 0.5 * (traj[:, 0] + traj[:, 1]), t_ok


def solitons(m: LGModel, th0: Thimble, th1: Thimble, d: FloerDatum, h_tau: float = 0.004, h_s: float = 0.01,
             tail: float = 8.0, h_bvp: float = 0.01, tau_tol: float = 1e-13, accept_tol: float = 1e-2,
             slope_tol: float = 1e-6, check_datum: bool = True, k: int = 16, max_regions: int = 400,
             max_passes: int = 14) -> SolitonSearch:
    """Shooting over p(0) in Lambda_0 by signed arclength tau, scoring p(R) against Lambda_1.

    A symmetric offset grid in tau is scanned first; survival windows too thin for the grid are
    found by refining around survival-time peaks and survivor borders. Sign changes of the signed
    distance are bisected, and each root is polished by the boundary-value Newton solve, whose
    convergence (an invertible linearization) certifies the soliton. When the forward trajectory
    of a root is too sensitive to serve as a Newton guess, the reversed problem is shot as well and
    the two accurate halves are joined.
    """
    if abs(d.theta0 - th0.theta) > 1e-9 or abs(d.theta1 - th1.theta) > 1e-9:
        raise LGError("datum plateaus do not match the thimble angles")
    if check_datum:
        cv = [c.value for c in critical_points(m, strict=False)]
        rep = validate_floer_datum(d, (th0.ray, th1.ray), cv)
        if not rep.ok:
            raise LGError("Floer datum rejected: " + ", ".join(rep.failed()))
    args = (h_tau, h_s, tau_tol, accept_tol, k, max_regions, max_passes)
    roots, rejected, n_tau = _shoot_roots(m, d, th0, th1, *args)
    found, nontr, pending = [], [], []

    def keep(sol, slope):
        if any(float(np.max(np.abs(o.p - sol.p))) < 1e-6 for o in found):
            return
        sol.slope = float(slope)
        found.append(sol)

    for lo, hi, dlo, dhi in roots:
        tau = 0.5 * (lo + hi)
        slope = (dhi - dlo) / max(hi - lo, 1e-300)
        if abs(slope) < slope_tol:
            nontr.append(float(tau))
            continue
        grid, path, t_ok = _accurate_path(m, d, th0, lo, hi, h_s)
        if t_ok >= d.r:
            sol = _build_soliton(m, d, th0, th1, tau, tail, h_bvp, grid, path)
            if sol is not None:
                keep(sol, slope)
                continue
        pending.append((tau, slope, grid, path, t_ok))
    if pending:
        dd = dual_datum(d)
        r0 = thimble(m, th1.q, th1.theta, th1.cap)
        r1 = thimble(m, th0.q, th0.theta - TWO_PI, th0.cap)
        droots, _, _ = _shoot_roots(m, dd, r0, r1, *args)
        back = []
        for lo, hi, _, _ in droots:
            g, path, t_ok = _accurate_path(m, dd, r0, lo, hi, h_s)
            # reverse: s -> R - s
            back.append((d.r - g[::-1], path[::-1], d.r - t_ok, complex(r0.point_at(0.5 * (lo + hi)))))
        for tau, slope, grid, path, t_ok in pending:
            done = False
            for gs, gp, g_ok, p_end in back:
                lo_s, hi_s = g_ok, t_ok
                if lo_s > hi_s:
                    continue
                msk = (grid >= lo_s) & (grid <= hi_s)
                if not msk.any():
                    continue
                gi = np.interp(grid, gs, gp.real) + 1j * np.interp(grid, gs, gp.imag)
                gap = np.where(msk, np.abs(path - gi), np.inf)
                j = int(np.argmin(gap))
                if gap[j] > 1e-2:
                    continue
                joined = np.where(grid <= grid[j], path, gi)
                sol = _build_soliton(m, d, th0, th1, tau, tail, h_bvp, grid, joined)
                if sol is not None:
                    keep(sol, slope)
                    done = True
                    break
            if not done:
                rejected += 1
    if nontr:
        raise LGError("non-transversal soliton at tau = %s; datum is not generic" % nontr)
    found.sort(key=lambda x: x.tau)
    return SolitonSearch(found, nontr, rejected, n_tau, th0.cap, h_tau, h_s)


def _build_soliton(m, d, th0, th1, tau, tail, h_bvp, ts, path) -> Optional[Soliton]:
    """Newton-polish a guess: plateau tails on the thimbles around the sampled middle path."""
    p0 = complex(th0.point_at(tau))
    grid = make_grid(d, tail, h_bvp)
    mid = grid[(grid >= 0) & (grid <= d.r)]
    pm = np.interp(mid, ts, path.real) + 1j * np.interp(mid, ts, path.imag)
    left_s = grid[grid < 0]
    right_s = grid[grid > d.r]
    left = _thimble_tail(m, th0, tau, tail, h_bvp)
    right = _thimble_tail(m, th1, _nearest_tau(th1, pm[-1]), tail, h_bvp)
    ls = np.linspace(0.0, -tail, len(left))
    rs = np.linspace(d.r, d.r + tail, len(right))
    pl = np.interp(left_s, ls[::-1], left[::-1].real) + 1j * np.interp(left_s, ls[::-1], left[::-1].imag)
    pr = np.interp(right_s, rs, right.real) + 1j * np.interp(right_s, rs, right.imag)
    p_init = np.concatenate([pl, pm, pr])
    if not np.all(np.isfinite(p_init)) or np.max(np.abs(p_init)) > 1e3:
        return None
    with np.errstate(all="ignore"):
        p, info = newton_bvp(m, d, grid, p_init, th0.q, th1.q)
    if not info["converged"]:
        return None
    sol = Soliton(grid, p, th0.q, th1.q, d, float(tau), newton=info)
    t0, t1 = sol.tail_norms()
    if max(t0, t1) > 1e-4:
        return None
    return sol


# action, energy, filtration


def _trap(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def _action_parts(m: LGModel, sol: Soliton, s, p):
    d = sol.datum
    lam = 0.5 * float(np.sum((np.conj(p[:-1]) * p[1:]).imag))
    lam += 0.5 * (np.conj(sol.q0.z) * p[0]).imag + 0.5 * (np.conj(p[-1]) * sol.q1.z).imag
    g = (np.exp(-1j * np.asarray(d.alpha(s))) * m.W(p)).imag
    c0 = (cmath.exp(-1j * d.theta0) * sol.q0.value).imag
    c1 = (cmath.exp(-1j * d.theta1) * sol.q1.value).imag
    total = -lam
    for a, b, corr in ((-np.inf, 0.0, c0), (0.0, d.r, 0.0), (d.r, np.inf, -c1)):
        msk = (s >= a - 1e-12) & (s <= b + 1e-12)
        if msk.sum() >= 2:
            total += _trap(g[msk] + corr, s[msk])
    return total


def action(sol: Soliton, m: LGModel) -> Tuple[float, float]:
    """Action with lambda = (x dy - y dx)/2; returns (value, error estimate from the 2h grid)."""
    s, p = sol.s, sol.p
    if not (np.any(np.isclose(s, 0.0)) and np.any(np.isclose(s, sol.datum.r))):
        raise LGError("soliton grid must contain s = 0 and s = R")
    t0, t1 = sol.tail_norms()
    if max(t0, t1) > 1e-4:
        raise LGError("soliton tails do not decay")
    a = _action_parts(m, sol, s, p)
    keep = np.zeros(len(s), dtype=bool)
    keep[::2] = True
    keep[-1] = True
    keep |= np.isclose(s, 0.0) | np.isclose(s, sol.datum.r)
    a2 = _action_parts(m, sol, s[keep], p[keep])
    return a, abs(a - a2) / 3.0


def constant_action(q: CriticalPoint, d: FloerDatum, n: int = 20001) -> float:
    """Closed form for a constant soliton: integral over [0, R] of Im(e^{-i alpha} W(q))."""
    s = np.linspace(0.0, d.r, n)
    g = (np.exp(-1j * np.asarray(d.alpha(s))) * q.value).imag
    return _trap(g, s)


@dataclass
class EnergyCheck:
    energy: float
    bound: float
    lhs: float
    eps_prime: float

    @property
    def ok(self) -> bool:
        return self.energy <= self.bound + 1e-9 * max(1.0, self.bound)


def energy_check(sol: Soliton, m: LGModel) -> EnergyCheck:
    """Soliton form of the energy estimate with delta H = 0.

    Energy int |p'|^2 + |grad H|^2 must not exceed (2/eps') eps Re(e^{-i beta}(W(q0) - W(q1))),
    with eps' = eps^2/2.
    """
    d = sol.datum
    if d.dh is not None:
        raise LGError("energy check is stated for delta H = 0")
    s, p = sol.s, sol.p
    dp = np.diff(p) / np.diff(s)
    pm = 0.5 * (p[1:] + p[:-1])
    e = float(np.sum((np.abs(dp) ** 2 + np.abs(m.dW(pm)) ** 2) * np.diff(s)))
    lhs = d.eps * (cmath.exp(-1j * d.beta) * (sol.q0.value - sol.q1.value)).real
    epsp = d.eps ** 2 / 2.0
    return EnergyCheck(e, 2.0 * lhs / epsp, lhs, epsp)


def filtration_label(sol: Soliton, m: LGModel, r_mid: Optional[float] = None) -> Tuple[CriticalPoint, float]:
    """Critical point visited on the middle plateau [pi, R] of a concatenated datum."""
    if r_mid is None:
        r_mid = sol.datum.r - math.pi
    if r_mid < math.pi:
        raise LGError("datum has no middle plateau")
    s = np.linspace(math.pi, r_mid, 200)
    p = sol.at(s)
    rad = o_radius(m)
    best = None
    for c in critical_points(m):
        dist = float(np.min(np.abs(p - c.z)))
        if best is None or dist < best[1]:
            best = (c, dist)
    if best[1] > rad:
        raise LGError("middle window not localized near a critical point")
    return best


@dataclass
class LinearLaw:
    slope: float
    intercept: float
    target: float
    residual: float

    @property
    def rel_err(self) -> float:
        return abs(self.slope - self.target) / max(abs(self.target), 1e-300)

    def ok(self, rel: float = 0.01, bound: float = 10.0) -> bool:
        return self.rel_err < rel and self.residual < bound

    def to_json(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "target": self.target,
                "rel_err": self.rel_err, "max_residual": self.residual}


def action_linear_law(rs: Sequence[float], actions: Sequence[float], h_label: float) -> LinearLaw:
    rs = np.asarray(rs, dtype=float)
    a = np.asarray(actions, dtype=float)
    slope, icpt = np.polyfit(rs, a, 1)
    res = float(np.max(np.abs(a - (slope * rs + icpt))))
    return LinearLaw(float(slope), float(icpt), -h_label, res)


# gradings


def _log_volume(m: LGModel) -> np.ndarray:
    """Polynomial h with exp(h) = W'' at every critical point (principal logarithms)."""
    cps = critical_points(m, strict=False)
    z = np.array([c.z for c in cps])
    v = np.log(np.array([c.hess for c in cps]))
    if len(z) == 1:
        return np.array([v[0]])
    return np.polyfit(z, v, len(z) - 1)


def transport_lift(sol: Soliton, m: LGModel) -> float:
    """Lift of the tangent line of Lambda_0 carried along the linearized flow to the right end."""
    d = sol.datum
    hc = _log_volume(m)
    phi0 = 0.5 * (d.theta0 - np.polyval(hc, sol.q0.z).imag)
    s, p = sol.s, sol.p
    v = cmath.exp(1j * phi0)
    ang = phi0
    _, a = _f_and_a(m, d, s, p)
    sm = 0.5 * (s[1:] + s[:-1])
    _, am = _f_and_a(m, d, sm, 0.5 * (p[1:] + p[:-1]))
    for i in range(len(s) - 1):
        hh = s[i + 1] - s[i]
        f1 = lambda w, c: c * np.conj(w)
        k1 = f1(v, a[i])
        k2 = f1(v + 0.5 * hh * k1, am[i])
        k3 = f1(v + 0.5 * hh * k2, am[i])
        k4 = f1(v + hh * k3, a[i + 1])
        w = v + hh / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        w /= abs(w)
        ang += cmath.phase(w / v)
        v = w
    return (np.polyval(hc, p[-1]).imag + 2.0 * ang) / TWO_PI


def grading(sol: Soliton, m: LGModel) -> int:
    """Maslov index of the transported line of Lambda_0 against the tangent line of Lambda_1."""
    xi = transport_lift(sol, m)
    return maslov_index(GradedLagLine.from_lift(xi), GradedLagLine.from_lift(sol.datum.theta1 / TWO_PI))


def hessian_tridiagonal(m: LGModel, d: FloerDatum, s: np.ndarray, p: np.ndarray, phi_l: float, phi_r: float):
    """Staggered discretization of J d/ds + Hess Im(e^{-i alpha} W) with Lagrangian end conditions.

    x-components live on the nodes, y-components on the midpoints, in a frame rotating linearly
    from angle phi_l to phi_r; y vanishes beyond both ends, so v(ends) lies on those lines.
    Returns (diag, offdiag) in the interleaved order x_0, y_1/2, x_1, ..., x_N.
    """
    h = float(s[1] - s[0])
    if not np.allclose(np.diff(s), h, rtol=1e-9, atol=1e-12):
        raise LGError("spectral flow needs a uniform grid")
    n = len(s) - 1
    length = s[-1] - s[0]
    dpsi = (phi_r - phi_l) / length
    psi = lambda t: phi_l + dpsi * (t - s[0])

    def fw(t, z):
        return np.exp(-1j * np.asarray(d.alpha(t))) * m.d2W(z) * np.exp(2j * psi(t))

    def pat(t):
        return np.interp(t, s, p.real) + 1j * np.interp(t, s, p.imag)

    sh = s[:-1] + 0.5 * h
    fx = fw(s, p)
    fy = fw(sh, pat(sh))
    diag = np.empty(2 * n + 1)
    diag[0::2] = fx.imag - dpsi
    diag[1::2] = -fy.imag - dpsi
    q1 = s[:-1] + 0.25 * h
    q3 = s[:-1] + 0.75 * h
    c1 = fw(q1, pat(q1)).real
    c3 = fw(q3, pat(q3)).real
    off = np.empty(2 * n)
    off[0::2] = -1.0 / h + 0.5 * c1
    off[1::2] = 1.0 / h + 0.5 * c3
    return diag, off


def hessian_spectrum(m: LGModel, d: FloerDatum, s, p, phi_l, phi_r) -> np.ndarray:
    dg, off = hessian_tridiagonal(m, d, s, p, phi_l, phi_r)
    return eigvalsh_tridiagonal(dg, off)


def n_negative(ev: np.ndarray) -> int:
    return int(np.sum(ev < 0))


def sturm_count(diag: np.ndarray, off: np.ndarray) -> int:
    """Number of negative eigenvalues of a symmetric tridiagonal matrix (LDL^T pivots)."""
    cnt = 0
    piv = 1.0
    tiny = 1e-300
    e2 = off * off
    for i in range(len(diag)):
        piv = diag[i] - (e2[i - 1] / piv if i else 0.0)
        if piv == 0.0:
            piv = -tiny
        if piv < 0:
            cnt += 1
    return cnt


def min_abs_eig(diag: np.ndarray, off: np.ndarray, window: float = 1.0) -> float:
    ev = eigvalsh_tridiagonal(diag, off, select="v", select_range=(-window, window))
    return float(np.min(np.abs(ev))) if len(ev) else window


@dataclass
class SpectralFlow:
    value: int
    crossings: List[Tuple[float, int]]
    min_abs_ends: Tuple[float, float]
    counts: List[int]

    def to_json(self) -> dict:
        return {"value": self.value, "crossings": self.crossings, "min_abs_ends": list(self.min_abs_ends)}


def spectral_flow(m: LGModel, a: Soliton, b: Soliton, steps: int = 64, h: float = 0.02,
                  degenerate_tol: float = 1e-6, bisect: int = 12) -> SpectralFlow:
    """Relative grading gr(a) - gr(b) from the Hessian operator along the linear homotopy a -> b.

    Counts eigenvalues crossing from positive to negative, i.e. n_neg(b) - n_neg(a); this is the
    sign matching the Maslov convention of ``maslov_index``.
    """
    d = a.datum
    if a.q0 != b.q0 or a.q1 != b.q1:
        raise LGError("solitons must share endpoints")
    lo = max(a.s[0], b.s[0])
    hi = min(a.s[-1], b.s[-1])
    n = int(math.ceil((hi - lo) / h))
    s = np.linspace(lo, hi, n + 1)
    pa, pb = a.at(s), b.at(s)
    phi_l = 0.5 * (d.theta0 - cmath.phase(a.q0.hess))
    phi_r = 0.5 * (d.theta1 - cmath.phase(a.q1.hess))

    def op(t):
        return hessian_tridiagonal(m, d, s, (1 - t) * pa + t * pb, phi_l, phi_r)

    ends = (min_abs_eig(*op(0.0)), min_abs_eig(*op(1.0)))
    if min(ends) < degenerate_tol:
        raise LGError("degenerate Hessian at an endpoint of the homotopy")
    ts = np.linspace(0.0, 1.0, steps + 1)
    counts = [sturm_count(*op(t)) for t in ts]
    crossings = []
    for i in range(steps):
        if counts[i] != counts[i + 1]:
            t0, t1, c0 = ts[i], ts[i + 1], counts[i]
            for _ in range(bisect):
                tm = 0.5 * (t0 + t1)
                if sturm_count(*op(tm)) == c0:
                    t0 = tm
                else:
                    t1 = tm
            crossings.append((float(0.5 * (t0 + t1)), counts[i + 1] - counts[i]))
    return SpectralFlow(counts[-1] - counts[0], crossings, ends, counts)


def constant_spectrum(m: LGModel, q: CriticalPoint, d: FloerDatum, tail: float = 8.0, h: float = 0.02):
    s = np.linspace(-tail, d.r + tail, int(math.ceil((d.r + 2 * tail) / h)) + 1)
    p = np.full(len(s), q.z)
    phi_l = 0.5 * (d.theta0 - cmath.phase(q.hess))
    phi_r = 0.5 * (d.theta1 - cmath.phase(q.hess))
    return hessian_spectrum(m, d, s, p, phi_l, phi_r)


# gluing


@dataclass
class Preglued:
    s: np.ndarray
    p: np.ndarray
    datum: FloerDatum
    q0: CriticalPoint
    q1: CriticalPoint
    x_l: CriticalPoint
    r: float


def _cutoffs(s, r):
    a, ln = math.pi, r - math.pi
    b_un = 1.0 - smoothstep((s - (a + ln / 4)) / (3 * ln / 16))
    b_st = smoothstep((s - (a + 9 * ln / 16)) / (3 * ln / 16))
    return b_un, b_st


def preglue(p_st: Soliton, p_un: Soliton, r: float, h: float = 0.01) -> Preglued:
    """Cutoff blend of p_un on the left and p_st shifted by R on the right; equals x_l mid-window.

    The grid is p_un's grid left of the window center and p_st's grid (shifted by R) right of it,
    so the blend reproduces both pieces exactly where their cutoffs equal one. The pieces should
    carry tails of length at least (R - pi)/2.
    """
    if p_un.q1 != p_st.q0:
        raise LGError("p_un must end where p_st begins")
    if r <= math.pi:
        raise LGError("R must exceed pi")
    x = p_un.q1
    alpha = concat_alpha(p_un.datum.alpha, p_st.datum.alpha, r)
    d = central_datum(alpha, r + math.pi)
    c = math.pi + 0.5 * (r - math.pi)
    left = p_un.s[p_un.s < c]
    right = p_st.s + r
    right = right[right > c]
    fill_lo = left[-1] if len(left) else c
    fill_hi = right[0] if len(right) else c
    n = max(1, int(math.ceil((fill_hi - fill_lo) / h - 1e-9)))
    mid = fill_lo + (fill_hi - fill_lo) * np.arange(1, n) / n
    s = np.concatenate([left, mid, right])
    b_un, b_st = _cutoffs(s, r)
    phi = x.z + b_un * (p_un.at(s) - x.z) + b_st * (p_st.at(s - r) - x.z)
    return Preglued(s, phi, d, p_un.q0, p_st.q1, x, r)


@dataclass
class Glued:
    soliton: Soliton
    preglued: Preglued
    sup_dist: float
    l21_dist: float
    iterations: int


def newton_glue(pg: Preglued, m: LGModel, tol: float = 1e-11, maxit: int = 40) -> Glued:
    p, info = newton_bvp(m, pg.datum, pg.s, pg.p, pg.q0, pg.q1, tol, maxit)
    if info["singular"]:
        raise LGError("singular Jacobian in the gluing Newton solve")
    if not info["converged"]:
        raise LGError("Newton stagnated after %d iterations" % info["iterations"])
    sol = Soliton(pg.s, p, pg.q0, pg.q1, pg.datum, newton=info)
    diff = p - pg.p
    hs = np.diff(pg.s)
    dd = np.diff(diff) / hs
    dm = 0.5 * (diff[1:] + diff[:-1])
    l21 = math.sqrt(float(np.sum((np.abs(dm) ** 2 + np.abs(dd) ** 2) * hs)))
    return Glued(sol, pg, float(np.max(np.abs(diff))), l21, info["iterations"])


@dataclass
class GluePieces:
    """Unstable pieces U_j -> Lambda_{x_l, pi} and stable pieces Lambda_{x_l, 2pi} -> S_k, per l."""
    j: int
    k: int
    un: Dict[int, List[Soliton]]
    st: Dict[int, List[Soliton]]

    def pairs(self):
        for l in sorted(self.un):
            for a in self.st.get(l, []):
                for b in self.un[l]:
                    yield l, a, b


def glue_pieces(arr: Arrangement, j: int, k: int, tail: float = 20.0, cap: float = 12.0) -> GluePieces:
    m = arr.model
    un, st = {}, {}
    for l in range(1, len(arr.crit) + 1):
        xl = arr.x(l)
        un[l] = solitons(m, arr.U(j, cap), thimble(m, xl, math.pi, cap), arr.un_datum(j), tail=tail).solitons
        st[l] = solitons(m, thimble(m, xl, TWO_PI, cap), arr.S(k, cap), arr.st_datum(k), tail=tail).solitons
    return GluePieces(j, k, un, st)


def glue_family(pieces: GluePieces, m: LGModel, r: float) -> List[Tuple[int, Glued]]:
    """Preglue and Newton-correct every piece pair at neck length R."""
    return [(l, newton_glue(preglue(a, b, r), m)) for l, a, b in pieces.pairs()]


# duality


def duality_transform(d: FloerDatum) -> FloerDatum:
    return dual_datum(d)


@dataclass
class DualityReport:
    count: int
    dual_count: int
    matched: int
    max_mismatch: float

    @property
    def ok(self) -> bool:
        return self.count == self.dual_count == self.matched


def duality_check(m: LGModel, th0: Thimble, th1: Thimble, d: FloerDatum, tol: float = 1e-5, **kw) -> DualityReport:
    """Shoot on the datum and on its transform; solitons must match under s -> R - s."""
    a = solitons(m, th0, th1, d, **kw)
    dd = duality_transform(d)
    t0 = thimble(m, th1.q, th1.theta, th1.cap)
    t1 = thimble(m, th0.q, th0.theta - TWO_PI, th0.cap)
    b = solitons(m, t0, t1, dd, **kw)
    matched, worst = 0, 0.0
    used = set()
    for sa in a.solitons:
        ra = sa.reversed()
        best, bi = np.inf, None
        for i, sb in enumerate(b.solitons):
            if i in used:
                continue
            err = float(np.max(np.abs(sb.at(ra.s) - ra.p)))
            if err < best:
                best, bi = err, i
        if bi is not None and best < tol:
            matched += 1
            used.add(bi)
            worst = max(worst, best)
    return DualityReport(a.count, b.count, matched, worst)
