"""Command-line front end: load JSON descriptors, run a pipeline, emit a JSON report and CSV data.

Exit status is 0 when every check passes, 1 when a check fails and 2 when an input does not
match its schema (the message names the offending field as a JSON pointer).
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
from typing import Dict, List, Optional, Sequence

import click
import numpy as np

SCHEMA = "plk/1"


class SchemaError(Exception):
    def __init__(self, pointer: str, msg: str):
        super().__init__(f"{pointer or '/'}: {msg}")
        self.pointer = pointer or "/"
        self.msg = msg


# schema checks


def _need(obj, key, typ, ptr):
    if not isinstance(obj, dict):
        raise SchemaError(ptr, "expected an object")
    if key not in obj:
        raise SchemaError(f"{ptr}/{key}", "missing field")
    val = obj[key]
    if not isinstance(val, typ):
        name = typ.__name__ if isinstance(typ, type) else "/".join(t.__name__ for t in typ)
        raise SchemaError(f"{ptr}/{key}", f"expected {name}")
    return val


def _check_mu_entries(entries, ptr):
    if not isinstance(entries, list):
        raise SchemaError(ptr, "expected a list")
    for i, e in enumerate(entries):
        ins = _need(e, "inputs", list, f"{ptr}/{i}")
        if not all(isinstance(x, str) for x in ins):
            raise SchemaError(f"{ptr}/{i}/inputs", "labels must be strings")
        out = _need(e, "output", (str, list), f"{ptr}/{i}")
        if isinstance(out, list) and not all(isinstance(x, str) for x in out):
            raise SchemaError(f"{ptr}/{i}/output", "labels must be strings")


def check_category_schema(obj, ptr=""):
    objs = _need(obj, "objects", list, ptr)
    if not objs or not all(isinstance(x, str) for x in objs):
        raise SchemaError(f"{ptr}/objects", "expected a nonempty list of names")
    homs = obj.get("homs", {})
    if not isinstance(homs, dict):
        raise SchemaError(f"{ptr}/homs", "expected an object")
    for key, basis in homs.items():
        kp = f"{ptr}/homs/{key}"
        if "->" not in key:
            raise SchemaError(kp, "key must look like 'X->Y'")
        x, y = (s.strip() for s in key.split("->", 1))
        if x not in objs or y not in objs:
            raise SchemaError(kp, "unknown object")
        if not isinstance(basis, dict):
            raise SchemaError(kp, "expected label -> degree")
        for lab, deg in basis.items():
            if not isinstance(deg, int) or isinstance(deg, bool):
                raise SchemaError(f"{kp}/{lab}", "degree must be an integer")
    mu = obj.get("mu", {})
    if not isinstance(mu, dict):
        raise SchemaError(f"{ptr}/mu", "expected an object keyed by arity")
    for d, entries in mu.items():
        if not str(d).isdigit():
            raise SchemaError(f"{ptr}/mu/{d}", "arity must be a positive integer")
        _check_mu_entries(entries, f"{ptr}/mu/{d}")


def check_module_schema(obj, ptr=""):
    check_category_schema(_need(obj, "base", dict, ptr), f"{ptr}/base")
    side = obj.get("side", "right")
    if side not in ("left", "right"):
        raise SchemaError(f"{ptr}/side", "must be 'left' or 'right'")
    els = _need(obj, "elements", dict, ptr)
    for k, v in els.items():
        _need(v, "object", str, f"{ptr}/elements/{k}")
        _need(v, "deg", int, f"{ptr}/elements/{k}")
    _check_mu_entries(obj.get("mu", []), f"{ptr}/mu")


def check_bimodule_schema(obj, ptr=""):
    check_category_schema(_need(obj, "left", dict, ptr), f"{ptr}/left")
    check_category_schema(_need(obj, "right", dict, ptr), f"{ptr}/right")
    els = _need(obj, "elements", dict, ptr)
    for k, v in els.items():
        for f in ("right_object", "left_object"):
            _need(v, f, str, f"{ptr}/elements/{k}")
        _need(v, "deg", int, f"{ptr}/elements/{k}")
    _check_mu_entries(obj.get("mu", []), f"{ptr}/mu")


def check_model_schema(obj, ptr=""):
    w = _need(obj, "W", list, ptr)
    for i, c in enumerate(w):
        if (not isinstance(c, list) or len(c) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in c)):
            raise SchemaError(f"{ptr}/W/{i}", "coefficient must be [re, im]")
    if len(w) < 3:
        raise SchemaError(f"{ptr}/W", "degree must be at least 2")
    prim = obj.get("primitive", "half-symplectic")
    if prim != "half-symplectic":
        raise SchemaError(f"{ptr}/primitive", "only 'half-symplectic' is supported")


def load_json(path: str, check=None):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"{path} is not valid JSON ({e.msg}, line {e.lineno})")
    except OSError as e:
        raise SchemaError("", f"cannot read {path}: {e.strerror}")
    if check is not None:
        check(obj)
    return obj


# report plumbing


class Ctx:
    def __init__(self, out: Optional[str], seed: int, config: dict):
        self.out = out
        self.seed = seed
        self.config = config

    def opts(self, section: str, **kw) -> dict:
        """Flag values, overridden by the matching section of the config file."""
        over = self.config.get(section, {})
        kw.update({k: v for k, v in over.items() if k in kw})
        return kw

    def path(self, name: str) -> Optional[str]:
        if self.out is None:
            return None
        os.makedirs(self.out, exist_ok=True)
        return os.path.join(self.out, name)


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def emit(ctx: Ctx, command: str, ok: bool, tolerances: dict, body: dict) -> None:
    rep = {"schema": SCHEMA, "command": command, "ok": bool(ok), "seed": ctx.seed,
           "tolerances": tolerances}
    rep.update(body)
    text = json.dumps(_clean(rep), indent=2, sort_keys=True)
    p = ctx.path("report.json")
    if p:
        with open(p, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)
    sys.exit(0 if ok else 1)


def write_csv(ctx: Ctx, name: str, header: Sequence[str], rows) -> Optional[str]:
    p = ctx.path(name)
    if p is None:
        return None
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return p


class PlkGroup(click.Group):
    """Maps schema errors to exit status 2."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except SchemaError as e:
            click.echo(json.dumps({"schema": SCHEMA, "ok": False, "error": "schema",
                                   "pointer": e.pointer, "message": e.msg}, sort_keys=True), err=True)
            sys.exit(2)


@click.group(cls=PlkGroup)
@click.option("--out", default=None, help="Directory for report.json and CSV files.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--config", default=None, help="JSON file whose sections override flags.")
@click.pass_context
def main(ctx, out, seed, config):
    """Directed A-infinity algebra, tree combinatorics and Landau-Ginzburg soliton numerics."""
    cfg = load_json(config) if config else {}
    if not isinstance(cfg, dict):
        raise SchemaError("", "config must be an object of sections")
    ctx.obj = Ctx(cfg.get("out", out), int(cfg.get("seed", seed)), cfg)


# algebra


@main.group()
def ainfty():
    """A-infinity categories."""


@ainfty.command("check")
@click.argument("path")
@click.pass_obj
def ainfty_check(ctx, path):
    """Validate the A-infinity relations of a category JSON."""
    from .ainfty import category_from_json, validate_category
    obj = load_json(path, check_category_schema)
    try:
        cat = category_from_json(obj)
    except ValueError as e:
        raise SchemaError("", str(e))
    rep = validate_category(cat)
    emit(ctx, "ainfty check", rep.ok, {"field": "F2 exact"}, {"input": path, "report": rep.to_json()})


@main.group()
def koszul():
    """Koszul duality."""


@koszul.command("verify")
@click.option("--input", "path", default=None, help="JSON with a Delta bimodule (left A, right B).")
@click.option("--example", type=click.Choice(["m2", "point"]), default="m2", show_default=True)
@click.pass_obj
def koszul_verify_cmd(ctx, path, example):
    """Check a Koszul pair and its dual."""
    from .amod import Bimodule
    from .koszul import dual_koszul_check, koszul_verify, m2_example, point_pair
    if path:
        obj = load_json(path, check_bimodule_schema)
        try:
            delta = Bimodule.from_json(obj)
        except ValueError as e:
            raise SchemaError("/elements", str(e))
        a, b = delta.left, delta.right
        src = path
    else:
        a, b, delta = m2_example() if example == "m2" else point_pair()
        src = f"example:{example}"
    w = koszul_verify(a, b, delta)
    dw = dual_koszul_check(w) if w.ok else None
    ok = w.ok and dw is not None and dw.ok
    emit(ctx, "koszul verify", ok, {"field": "F2 exact"},
         {"input": src, "forward": w.to_json(), "dual": dw.to_json() if dw else None})


@main.group()
def ss():
    """Spectral sequences."""


@ss.command("compute")
@click.option("--source", required=True, help="Module JSON for M.")
@click.option("--target", required=True, help="Module JSON for N (same base).")
@click.pass_obj
def ss_compute(ctx, source, target):
    """Pages of the filtration spectral sequence of hom(M, N), checked against the E1 tensor formula."""
    from .amod import Module, hom_complex
    from .gf2chain import cohomology_dims
    from .koszul import algebraic_ss, e1_formula
    mo, no = load_json(source, check_module_schema), load_json(target, check_module_schema)
    try:
        m, n = Module.from_json(mo), Module.from_json(no)
    except ValueError as e:
        raise SchemaError("/elements", str(e))
    if not m.base.same_as(n.base):
        raise SchemaError("/base", "modules must share a base category")
    pages = algebraic_ss(m, n)
    e1 = {k: v for k, v in pages.e1.dims.items() if v}
    formula = e1_formula(m, n)
    h = {k: v for k, v in cohomology_dims(hom_complex(m, n)).items() if v}
    tot: Dict[int, int] = {}
    for (p, q), v in pages.einf.dims.items():
        tot[p + q] = tot.get(p + q, 0) + v
    tot = {k: v for k, v in tot.items() if v}
    ok = e1 == formula and tot == h
    emit(ctx, "ss compute", ok, {"field": "F2 exact"},
         {"pages": pages.to_json(), "e1_matches_formula": e1 == formula,
          "einf_total": {str(k): v for k, v in sorted(tot.items())},
          "cohomology": {str(k): v for k, v in sorted(h.items())}})


@main.command("quotient")
@click.argument("path")
@click.option("--sub", required=True, help="Comma separated objects to quotient by.")
@click.option("--cap", default=None, type=int, help="Bar length cap (default: objects + 2).")
@click.pass_obj
def quotient_cmd(ctx, path, sub, cap):
    """Cohomology of the dg quotient by a set of objects, with the orthogonality check."""
    from .ainfty import category_from_json
    from .localize import dg_quotient, orthogonality, orthogonality_oracle
    o = ctx.opts("quotient", sub=sub, cap=cap)
    cat = category_from_json(load_json(path, check_category_schema))
    names = [s.strip() for s in o["sub"].split(",") if s.strip()]
    for i, s in enumerate(names):
        if s not in cat.objects:
            raise SchemaError(f"/objects", f"--sub names unknown object {s}")
    q = dg_quotient(cat, names, o["cap"])
    dims = {f"{x}->{y}": {str(k): v for k, v in sorted(q.cohomology_dims(x, y).items()) if v}
            for x in cat.objects for y in cat.objects}
    orth = {y: {"side": orthogonality(q.b, y, names), "pi_quasi_iso": orthogonality_oracle(q, y)}
            for y in cat.objects if y not in names}
    stable = all(q.stable(x, y) for x in cat.objects for y in cat.objects)
    ok = stable and all(all(v["pi_quasi_iso"].values()) for v in orth.values())
    emit(ctx, "quotient", ok, {"field": "F2 exact", "cap": q.cap},
         {"input": path, "sub": names, "cohomology": dims, "orthogonal": orth, "cap_stable": stable})


# combinatorics


@main.group()
def trees():
    """Stable planar trees."""


@trees.command("enum")
@click.option("--leaves", required=True, type=int)
@click.option("--pretty", "show", is_flag=True, help="Print each tree to stderr.")
@click.pass_obj
def trees_enum(ctx, leaves, show):
    """Enumerate stable trees with the given number of leaves and check the collapse order."""
    from .trees import enumerate_stable, poset_failures, pretty, tree_to_json
    if leaves < 2:
        raise SchemaError("/leaves", "need at least two leaves")
    ts = enumerate_stable(leaves)
    fails = poset_failures(ts) if leaves <= 5 else []
    if show:
        for t in ts:
            click.echo(pretty(t) + "\n", err=True)
    emit(ctx, "trees enum", not fails, {"poset_checked_up_to": 5},
         {"leaves": leaves, "count": len(ts), "poset_failures": fails,
          "trees": [tree_to_json(t) for t in ts]})


@main.group()
def qd():
    """Quadratic differentials on the three-punctured sphere."""


@qd.command("three-point")
@click.option("--residues", required=True, help="a0,a1,a2 (integers or fractions like 1/2).")
@click.pass_obj
def qd_three_point(ctx, residues):
    """Coefficients b from residue roots; report real zeros on the boundary."""
    from fractions import Fraction
    from .quaddiff import qd3_from_residues, qd3_real_zeros, residues_squared, triangle_ok
    parts = residues.split(",")
    if len(parts) != 3:
        raise SchemaError("/residues", "expected three comma separated values")
    try:
        a = [Fraction(p.strip()) for p in parts]
    except ValueError:
        raise SchemaError("/residues", "values must be rational")
    try:
        q = qd3_from_residues(*a)
    except ValueError as e:
        raise SchemaError("/residues", str(e))
    zeros = qd3_real_zeros(q)
    back = residues_squared(q.b)
    roundtrip = all(x == y * y for x, y in zip(back, a))
    emit(ctx, "qd three-point", roundtrip, {"arithmetic": "exact rational"},
         {"a": [str(x) for x in a], "b": [str(x) for x in q.b], "triangle": triangle_ok(*a),
          "boundary_zeros": [float(z) for z in zeros], "zero_free_boundary": len(zeros) == 0,
          "residue_roundtrip": roundtrip})


# Landau-Ginzburg numerics


SHOOT_MAX_R = 10.0


def _model(path):
    from .lgflow import LGModel
    return LGModel.from_json(load_json(path, check_model_schema))


def _pair(text: str, n: int):
    parts = [p.strip().upper() for p in text.split(",")]
    if len(parts) != 2 or not parts[0].startswith("U") or not parts[1].startswith("S"):
        raise SchemaError("/pair", "expected Uj,Sk")
    try:
        j, k = int(parts[0][1:]), int(parts[1][1:])
    except ValueError:
        raise SchemaError("/pair", "indices must be integers")
    if not (1 <= j <= n and 1 <= k <= n):
        raise SchemaError("/pair", f"indices must lie in 1..{n}")
    return j, k


def _lg_guard(fn):
    from .lgflow import LGError

    def run(*a, **kw):
        try:
            return fn(*a, **kw)
        except LGError as e:
            raise SchemaError("/model", str(e))
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _soliton_row(sol, m, extra=None):
    from .lgflow import action, energy_check, filtration_label, grading
    a, err = action(sol, m)
    e = energy_check(sol, m)
    row = {"q0": sol.q0.index, "q1": sol.q1.index, "label": filtration_label(sol, m)[0].index,
           "grading": grading(sol, m), "action": a, "action_err": err, "energy": e.energy,
           "energy_bound": e.bound, "energy_ok": e.ok, "constant": sol.is_constant(),
           "residual": sol.residual(m)}
    row.update(extra or {})
    return row


@main.group()
def lg():
    """Landau-Ginzburg models on the complex plane."""


@lg.command("crit")
@click.option("--model", "model_path", required=True)
@click.option("--theta-star", default=0.0, type=float, show_default=True)
@click.pass_obj
@_lg_guard
def lg_crit(ctx, model_path, theta_star):
    """Critical points, values and the critical angles."""
    from .lgflow import admissible, critical_angles, critical_points, o_radius, theta_crit
    m = _model(model_path)
    cps = critical_points(m, strict=False)
    ok = admissible(m, theta_star)
    emit(ctx, "lg crit", ok, {"newton": 1e-12},
         {"model": m.to_json(), "critical_points": [
             {"index": c.index, "z": c.z, "value": c.value, "H": c.H, "hessian": c.hess} for c in cps],
          "critical_angles": critical_angles(m), "theta_star": theta_star,
          "theta_crit": theta_crit(m, theta_star) if ok else None, "o_radius": o_radius(m)})


@lg.command("thimble")
@click.option("--model", "model_path", required=True)
@click.option("--crit", "ci", required=True, type=int, help="Critical point index (1-based, by H).")
@click.option("--theta", required=True, type=float)
@click.option("--cap", default=None, type=float)
@click.option("--ds", default=0.01, type=float, show_default=True)
@click.option("--tol", default=1e-6, type=float, show_default=True, help="Ray residual tolerance / scale.")
@click.pass_obj
@_lg_guard
def lg_thimble(ctx, model_path, ci, theta, cap, ds, tol):
    """Trace a thimble; CSV columns: tau, Re p, Im p, Re W, Im W."""
    from .lgflow import critical_points, thimble
    m = _model(model_path)
    cps = critical_points(m)
    if not 1 <= ci <= len(cps):
        raise SchemaError("/crit", f"index must lie in 1..{len(cps)}")
    th = thimble(m, cps[ci - 1], theta, cap, ds)
    im, re_min = th.ray_residuals(m)
    w = m.W(th.points)
    path = write_csv(ctx, "thimble.csv", ["tau", "re_p", "im_p", "re_W", "im_W"],
                     zip(th.tau, th.points.real, th.points.imag, w.real, w.imag))
    ok = im <= tol * m.scale and re_min >= -tol * m.scale
    emit(ctx, "lg thimble", ok, {"ray": tol, "scale": m.scale, "ds": ds},
         {"crit": ci, "theta": theta, "cap": th.cap, "samples": len(th.tau),
          "max_im_residual": im, "min_re": re_min, "csv": path})


def _glued_solitons(arr, j, k, r):
    from .lgflow import glue_family, glue_pieces
    pieces = glue_pieces(arr, j, k)
    return pieces, glue_family(pieces, arr.model, r)


@lg.command("solitons")
@click.option("--model", "model_path", required=True)
@click.option("--pair", required=True, help="Uj,Sk")
@click.option("--R", "r", required=True, type=float)
@click.option("--method", type=click.Choice(["auto", "shoot", "glue"]), default="auto", show_default=True)
@click.option("--theta-star", default=0.0, type=float, show_default=True)
@click.option("--h-tau", default=0.004, type=float, show_default=True)
@click.option("--h-s", default=0.01, type=float, show_default=True)
@click.pass_obj
@_lg_guard
def lg_solitons(ctx, model_path, pair, r, method, theta_star, h_tau, h_s):
    """Solitons from U_j to S_k at neck length R; CSV columns: soliton, s, Re p, Im p.

    ``auto`` shoots for R up to 10 and glues beyond, where shooting loses double precision.
    """
    from .lgflow import fs_arrangement, solitons
    o = ctx.opts("lg solitons", r=r, method=method, h_tau=h_tau, h_s=h_s)
    m = _model(model_path)
    arr = fs_arrangement(m, theta_star)
    j, k = _pair(pair, len(arr.crit))
    meth = o["method"]
    if meth == "auto":
        meth = "shoot" if o["r"] <= SHOOT_MAX_R else "glue"
    tol = {"h_tau": o["h_tau"], "h_s": o["h_s"], "newton": 1e-11, "accept": 1e-2}
    if meth == "shoot":
        res = solitons(m, arr.U(j, 12.0), arr.S(k, 12.0), arr.pair_datum(j, k, o["r"]),
                       h_tau=o["h_tau"], h_s=o["h_s"])
        sols = [(s, {"tau": s.tau}) for s in res.solitons]
        extra = {"search": res.to_json()}
    else:
        _, fam = _glued_solitons(arr, j, k, o["r"])
        sols = [(g.soliton, {"via": l, "glue_iterations": g.iterations, "glue_sup_dist": g.sup_dist})
                for l, g in fam]
        extra = {}
    rows = [_soliton_row(s, m, e) for s, e in sols]
    path = write_csv(ctx, "solitons.csv", ["soliton", "s", "re_p", "im_p"],
                     ((i, a, b, c) for i, (s, _) in enumerate(sols) for a, b, c in s.to_csv_rows()))
    ok = all(x["energy_ok"] for x in rows)
    extra.update({"pair": [j, k], "R": o["r"], "method": meth, "count": len(rows), "mod2": len(rows) % 2,
                  "solitons": rows, "csv": path})
    emit(ctx, "lg solitons", ok, tol, extra)


@lg.command("glue")
@click.option("--model", "model_path", required=True)
@click.option("--pair", required=True, help="Uj,Sk")
@click.option("--R", "rs", default="10,20,40", show_default=True, help="Comma separated neck lengths.")
@click.option("--theta-star", default=0.0, type=float, show_default=True)
@click.pass_obj
@_lg_guard
def lg_glue(ctx, model_path, pair, rs, theta_star):
    """Preglue stable and unstable pieces and correct by Newton; checks grading additivity."""
    from .lgflow import fs_arrangement, grading, preglue, newton_glue
    m = _model(model_path)
    arr = fs_arrangement(m, theta_star)
    j, k = _pair(pair, len(arr.crit))
    try:
        radii = [float(x) for x in rs.split(",")]
    except ValueError:
        raise SchemaError("/R", "expected comma separated numbers")
    from .lgflow import glue_pieces
    pieces = glue_pieces(arr, j, k)
    out, ok = [], True
    for l, a, b in pieces.pairs():
        ga, gb = grading(a, m), grading(b, m)
        fam = []
        for r in radii:
            g = newton_glue(preglue(a, b, r), m)
            gr = grading(g.soliton, m)
            ok &= gr == ga + gb
            fam.append({"R": r, "iterations": g.iterations, "sup_dist": g.sup_dist, "l21_dist": g.l21_dist,
                        "grading": gr})
        d = [f["sup_dist"] for f in fam]
        dec = all(x > y or (x == y == 0.0) for x, y in zip(d, d[1:]))
        out.append({"via": l, "grading_st": ga, "grading_un": gb, "family": fam, "distance_decreasing": dec})
    emit(ctx, "lg glue", ok, {"newton": 1e-11}, {"pair": [j, k], "R": radii, "glued": out})


@lg.command("filtration")
@click.option("--model", "model_path", required=True)
@click.option("--pair", required=True, help="Uj,Sk")
@click.option("--R", "rs", default="5,10,20,40", show_default=True)
@click.option("--rel", default=0.01, type=float, show_default=True, help="Relative slope tolerance.")
@click.option("--theta-star", default=0.0, type=float, show_default=True)
@click.pass_obj
@_lg_guard
def lg_filtration(ctx, model_path, pair, rs, rel, theta_star):
    """Labels k <= l <= j and the action-vs-R law; CSV columns: via, R, action."""
    from .lgflow import action, action_linear_law, filtration_label, fs_arrangement, glue_pieces
    from .lgflow import newton_glue, preglue
    m = _model(model_path)
    arr = fs_arrangement(m, theta_star)
    j, k = _pair(pair, len(arr.crit))
    try:
        radii = [float(x) for x in rs.split(",")]
    except ValueError:
        raise SchemaError("/R", "expected comma separated numbers")
    pieces = glue_pieces(arr, j, k)
    laws, rows, ok = [], [], True
    for l, a, b in pieces.pairs():
        acts, labels = [], []
        for r in radii:
            g = newton_glue(preglue(a, b, r), m)
            acts.append(action(g.soliton, m)[0])
            labels.append(filtration_label(g.soliton, m)[0].index)
            rows.append((l, r, acts[-1]))
        law = action_linear_law(radii, acts, arr.x(l).H)
        in_range = all(k <= x <= j for x in labels)
        ok &= law.ok(rel) and in_range
        laws.append({"via": l, "labels": labels, "labels_in_range": in_range, "law": law.to_json()})
    path = write_csv(ctx, "action_vs_R.csv", ["via", "R", "action"], rows)
    emit(ctx, "lg filtration", ok, {"slope_rel": rel}, {"pair": [j, k], "R": radii, "families": laws,
                                                       "csv": path})


if __name__ == "__main__":
    main()
