"""Scenario-driven batch front end.

Usage::

    nlhodge run --scenario file.json [--grid N] [--tol T] [--report out.json] [--format json|csv]
    nlhodge rank1 --scenario rank1-uniformizing          # bundled scenario by name
    nlhodge list

Exit status: 0 when the verdict passes, 2 when it fails, 1 on errors.
Reports are deterministic apart from the ``timings`` block.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .bundles import ConnectionChart, DBarChart, FiberChart, HiggsChart, canonical_dbar
from .chern import (
    chern_connection,
    classical_chern,
    closedness_residuals,
    metric_from_linear_hermitian,
    orthogonality_residual,
    projective_fs_connection,
)
from .curvature import (
    Grid,
    HarmonicScenario,
    assemble_F,
    assemble_G,
    curvature_F02,
    curvature_F11,
    curvature_F20,
    curvature_G11,
    curvature_G20,
    is_harmonic,
)
from .errors import NLHodgeError, ScenarioError
from .jets import JetMatrixFunction, PolyMatrix
from .monodromy import (
    Arc,
    BasePath,
    Line,
    PolyAuto,
    RationalODE,
    continue_along_path,
    jacobian_degree_growth,
    loop_monodromy,
    max_degree_by_length,
    ode_to_foliation,
    evaluate_word,
    power_degrees,
    reduced_words,
    rho1_generators,
    rho1_normal_form,
    rho2_generators,
)
from .rank1 import PeriodScenario, is_isotrivial, ks_metric, rank1_harmonicity
from .simpson import BetaMap, flat_to_higgs, higgs_to_flat
from .symcore import WirtingerPoly

SCHEMA_VERSION = 1
KINDS = ("chern", "curvature-F", "curvature-G", "simpson-forward", "simpson-backward",
         "harmonic-check", "monodromy", "autgroup", "rank1")

_COMPLEX = {"oneOf": [{"type": "number"},
                      {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_POLY = {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                    "prefixItems": [{"type": "array", "items": {"type": "integer", "minimum": 0}},
                                                    _COMPLEX]}}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _POLY}}
_METRIC = {"type": "object", "required": ["poly"], "additionalProperties": False,
           "properties": {"poly": _MATRIX, "exp": _POLY}}
_GRID = {"type": "object", "additionalProperties": False,
         "properties": {"center": {"anyOf": [_COMPLEX, {"type": "array", "items": {
                            "type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}}]},
                        "radius": {"type": "number", "exclusiveMinimum": 0},
                        "n": {"type": "integer", "minimum": 1},
                        "n_fiber": {"type": "integer", "minimum": 1},
                        "fiber_radius": {"type": "number", "exclusiveMinimum": 0}}}
_SEGMENT = {"type": "object", "additionalProperties": False,
            "properties": {"line": {"type": "array", "items": _COMPLEX, "minItems": 2, "maxItems": 2},
                           "arc": {"type": "object", "required": ["center", "radius", "phi0", "phi1"],
                                   "properties": {"center": _COMPLEX, "radius": {"type": "number"},
                                                  "phi0": {"type": "number"}, "phi1": {"type": "number"}}},
                           "circle": {"type": "object", "required": ["center", "radius"],
                                      "properties": {"center": _COMPLEX, "radius": {"type": "number"},
                                                     "start_angle": {"type": "number"},
                                                     "turns": {"type": "number"}}}}}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "kind"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "dims": {"type": "object", "required": ["m", "r"], "additionalProperties": False,
                 "properties": {"m": {"type": "integer", "minimum": 1}, "r": {"type": "integer", "minimum": 1}}},
        "metric": _METRIC,
        "theta": _MATRIX,
        "theta_linear": {"type": "array", "items": _MATRIX},
        "connection": _MATRIX,
        "dbar": _MATRIX,
        "beta": {"type": "object", "required": ["mode"],
                 "properties": {"mode": {"enum": ["identity", "vertical-linear"]}, "matrix": _MATRIX}},
        "projective": {"type": "boolean"},
        "grid": _GRID,
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "ode": {"type": "object", "required": ["order", "numerator"],
                "properties": {"order": {"type": "integer", "minimum": 1}, "numerator": _POLY,
                               "denominator": _POLY}},
        "path": {"type": "object", "required": ["segments"],
                 "properties": {"segments": {"type": "array", "items": _SEGMENT, "minItems": 1},
                                "punctures": {"type": "array", "items": _COMPLEX},
                                "margin": {"type": "number"}, "max_step": {"type": "number"}}},
        "samples": {"type": "array", "items": {"type": "array", "items": _COMPLEX}},
        "expected": {"type": "array", "items": {"type": "array", "items": _COMPLEX}},
        "generators": {"oneOf": [{"enum": ["rho1", "rho2"]},
                                 {"type": "array", "items": {
                                     "type": "object", "required": ["components"],
                                     "properties": {"name": {"type": "string"},
                                                    "components": {"type": "array", "items": _POLY}}}}]},
        "max_len": {"type": "integer", "minimum": 1},
        "power": {"type": "object", "required": ["word", "kmax"],
                  "properties": {"word": {"type": "array", "items": {"type": "string"}},
                                 "kmax": {"type": "integer", "minimum": 1}}},
        "expected_degrees": {"type": "array", "items": {"type": "integer"}},
        "tau": {"type": "array", "items": _COMPLEX, "minItems": 1},
        "hodge_factor": {"type": "number"},
        "metric_override": _METRIC,
    },
}


# -- parsing --------------------------------------------------------------------------------

def _cplx(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x)


def _cjson(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _poly(data, dims, path) -> WirtingerPoly:
    n = 2 * sum(dims)
    for k, (exp, _) in enumerate(data):
        if len(exp) != n:
            raise ScenarioError(f"exponent vector has length {len(exp)}, expected {n} for dims {dims}",
                                f"{path}[{k}][0]")
    return WirtingerPoly.from_json(*dims, data)


def _matrix(data, dims, shape, path) -> PolyMatrix:
    if len(data) != shape[0] or any(len(row) != shape[1] for row in data):
        got = (len(data), len(data[0]) if data else 0)
        raise ScenarioError(f"matrix has shape {got}, expected {shape}", path)
    return PolyMatrix([[_poly(p, dims, f"{path}[{i}][{j}]") for j, p in enumerate(row)]
                       for i, row in enumerate(data)], dims)


def _dims(sc) -> tuple[int, int]:
    if "dims" not in sc:
        raise ScenarioError("missing field 'dims'", "$")
    return sc["dims"]["m"], sc["dims"]["r"]


def _metric(spec, dims, path):
    r = dims[1]
    P = _matrix(spec["poly"], dims, (r, r), f"{path}.poly")
    if "exp" not in spec:
        return P
    q = _poly(spec["exp"], dims, f"{path}.exp")

    def fn(V):
        return P.jet(V.points, V.order) * q.jet(V.points, V.order).exp().reshape((V.npoints, 1, 1))

    return JetMatrixFunction((r, r), dims, fn, "poly*exp")


def _base_only(p: WirtingerPoly, path) -> WirtingerPoly:
    """Move a polynomial in ``s, sbar`` from dims ``(1, r)`` to dims ``(1, 1)``."""
    terms = {}
    for exp, c in p.items():
        if any(exp[2:]):
            raise ScenarioError("metric must not depend on the fiber", path)
        terms[(exp[0], exp[1], 0, 0)] = c
    return WirtingerPoly(1, 1, terms)


def _grid(sc, dims, overrides) -> Grid:
    g = dict(sc.get("grid", {}))
    if overrides.get("grid") is not None:
        g["n"] = overrides["grid"]
    center = g.get("center", 0.0)
    if isinstance(center, list) and center and isinstance(center[0], list):
        center = [_cplx(c) for c in center]
    else:
        center = _cplx(center)
    return Grid.polydisc(dims[0], dims[1], center, g.get("radius", 1.0), g.get("n", 5),
                         g.get("n_fiber", 3), g.get("fiber_radius", 1.0))


def _beta(sc, dims) -> BetaMap:
    b = sc.get("beta", {"mode": "identity"})
    if b["mode"] == "identity":
        return BetaMap()
    if "matrix" not in b:
        raise ScenarioError("vertical-linear beta needs 'matrix'", "$.beta")
    return BetaMap("vertical-linear", _matrix(b["matrix"], dims, (dims[1], dims[1]), "$.beta.matrix"))


def _theta(sc, chart) -> HiggsChart:
    dims = chart.dims
    if "theta_linear" in sc:
        mats = sc["theta_linear"]
        if len(mats) != chart.m:
            raise ScenarioError(f"need {chart.m} matrices", "$.theta_linear")
        return HiggsChart.from_linear(chart, [_matrix(M, dims, (chart.r, chart.r), f"$.theta_linear[{k}]")
                                              for k, M in enumerate(mats)])
    if "theta" in sc:
        T = _matrix(sc["theta"], dims, (chart.m, chart.r), "$.theta")
        return HiggsChart(chart, T, holomorphic=not T.depends_on(chart.barred_slots))
    raise ScenarioError("missing Higgs field ('theta' or 'theta_linear')", "$")


def _path(spec) -> BasePath:
    segs = []
    for k, seg in enumerate(spec["segments"]):
        if "line" in seg:
            segs.append(Line(_cplx(seg["line"][0]), _cplx(seg["line"][1])))
        elif "arc" in seg:
            a = seg["arc"]
            segs.append(Arc(_cplx(a["center"]), a["radius"], a["phi0"], a["phi1"]))
        elif "circle" in seg:
            c = seg["circle"]
            segs.extend(BasePath.circle(_cplx(c["center"]), c["radius"], c.get("start_angle", 0.0),
                                        c.get("turns", 1.0)).segments)
        else:
            raise ScenarioError("segment needs 'line', 'arc' or 'circle'", f"$.path.segments[{k}]")
    return BasePath(tuple(segs), tuple(_cplx(z) for z in spec.get("punctures", [])),
                    spec.get("margin", 1e-3), spec.get("max_step", np.inf))


def validate(sc) -> None:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(sc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ScenarioError(e.message, e.json_path)


# -- execution ------------------------------------------------------------------------------

def _sup(x) -> float:
    return float(np.max(np.abs(x), initial=0.0))


class Outcome:
    def __init__(self, verdict: bool, results: dict, rows: list | None = None):
        self.verdict = bool(verdict)
        self.results = results
        self.rows = rows or []


def _tensor_rows(name: str, values: np.ndarray, grid: Grid) -> list:
    rows = []
    P, m, _, r = values.shape
    for p in range(P):
        for i in range(m):
            for j in range(m):
                for k in range(r):
                    z = values[p, i, j, k]
                    rows.append([p, *(f"{v:.17g}" for s in grid.points.s[p] for v in (s.real, s.imag)),
                                 *(f"{v:.17g}" for t in grid.points.t[p] for v in (t.real, t.imag)),
                                 name, i, j, k, f"{z.real:.17g}", f"{z.imag:.17g}"])
    return rows


def _run_chern(sc, ov) -> Outcome:
    dims = _dims(sc)
    chart = FiberChart(*dims)
    grid = _grid(sc, dims, ov)
    tol = ov.get("tol") or sc.get("tol", 1e-10)
    h = _metric(sc["metric"], dims, "$.metric")
    omega = metric_from_linear_hermitian(h, chart, grid.points)
    conn = chern_connection(omega)
    pts = grid.points
    res = {"orthogonality_residual": _sup(orthogonality_residual(conn, omega, pts)),
           "classical_residual": _sup(conn.C(pts) - classical_chern(h, pts))}
    if isinstance(h, PolyMatrix):
        res["closed"] = not closedness_residuals(omega)
    ok = res["orthogonality_residual"] < tol and res["classical_residual"] < tol and res.get("closed", True)
    if sc.get("projective"):
        if dims != (1, 2) or "exp" in sc["metric"]:
            raise ScenarioError("projective check needs a polynomial 2x2 metric with dims m=1, r=2",
                                "$.projective")
        hp = PolyMatrix([[_base_only(p, "$.metric.poly") for p in row] for row in h.entries], (1, 1))
        fs = projective_fs_connection(hp)
        g = sc.get("grid", {})
        fgrid = Grid.polydisc(1, 1, _cplx(g.get("center", 0.0)), g.get("radius", 1.0), g.get("n", 5),
                              g.get("n_fiber", 3), g.get("fiber_radius", 1.0))
        res["fubini_study_residual"] = _sup(fs.chern(fgrid.points) - fs.quadratic(fgrid.points))
        ok = ok and res["fubini_study_residual"] < tol
    return Outcome(ok, res)


def _run_curvature_F(sc, ov) -> Outcome:
    dims = _dims(sc)
    chart = FiberChart(*dims)
    grid = _grid(sc, dims, ov)
    tol = ov.get("tol") or sc.get("tol", 1e-9)
    omega = metric_from_linear_hermitian(_metric(sc["metric"], dims, "$.metric"), chart, grid.points)
    theta = _theta(sc, chart)
    beta = _beta(sc, dims)
    dbar_g = DBarChart(chart, _matrix(sc["dbar"], dims, dims, "$.dbar")) if "dbar" in sc else None
    rep = assemble_F(theta, omega, beta, grid, tol, None, dbar_g)
    rows = []
    if ov.get("format") == "csv":
        d, c = higgs_to_flat(theta, omega, beta, None, dbar_g)
        for name, vals in (("F0,2", curvature_F02(d, grid)), ("F1,1", curvature_F11(c, grid, d)),
                           ("F2,0", curvature_F20(c, grid))):
            rows += _tensor_rows(name, vals, grid)
    return Outcome(rep.verdict, {"curvature": rep.to_dict()}, rows)


def _flat_side(sc, chart):
    dims = chart.dims
    nabla = ConnectionChart(chart, _matrix(sc["connection"], dims, dims, "$.connection"))
    dbar = DBarChart(chart, _matrix(sc["dbar"], dims, dims, "$.dbar")) if "dbar" in sc else canonical_dbar(chart)
    return nabla, dbar


def _run_curvature_G(sc, ov) -> Outcome:
    dims = _dims(sc)
    chart = FiberChart(*dims)
    grid = _grid(sc, dims, ov)
    tol = ov.get("tol") or sc.get("tol", 1e-9)
    omega = metric_from_linear_hermitian(_metric(sc["metric"], dims, "$.metric"), chart, grid.points)
    nabla, dbar = _flat_side(sc, chart)
    beta = _beta(sc, dims)
    rep = assemble_G(nabla, dbar, omega, beta, grid, tol)
    rows = []
    if ov.get("format") == "csv":
        th, d = flat_to_higgs(nabla, dbar, omega, beta)
        for name, vals in (("G0,2", curvature_F02(d, grid)), ("G1,1", curvature_G11(th, d, grid)),
                           ("G2,0", curvature_G20(th, grid, beta))):
            rows += _tensor_rows(name, vals, grid)
    return Outcome(rep.verdict, {"curvature": rep.to_dict()}, rows)


def _run_simpson(sc, ov, forward: bool) -> Outcome:
    dims = _dims(sc)
    chart = FiberChart(*dims)
    grid = _grid(sc, dims, ov)
    tol = ov.get("tol") or sc.get("tol", 1e-12)
    omega = metric_from_linear_hermitian(_metric(sc["metric"], dims, "$.metric"), chart, grid.points)
    beta = _beta(sc, dims)
    pts = grid.points
    if forward:
        theta = _theta(sc, chart)
        d, c = higgs_to_flat(theta, omega, beta)
        th2, d2 = flat_to_higgs(c, d, omega, beta)
        res = {"round_trip_theta": _sup(th2.Theta(pts) - theta.Theta(pts)),
               "round_trip_dbar": _sup(d2.U(pts))}
        outputs = {"U": d.U(pts[:3]), "C": c.C(pts[:3])}
    else:
        nabla, dbar = _flat_side(sc, chart)
        th, d = flat_to_higgs(nabla, dbar, omega, beta)
        d2, c2 = higgs_to_flat(th, omega, beta, None, d)
        res = {"round_trip_connection": _sup(c2.C(pts) - nabla.C(pts)),
               "round_trip_dbar": _sup(d2.U(pts) - dbar.U(pts))}
        outputs = {"theta": th.Theta(pts[:3]), "U": d.U(pts[:3])}
    res["sample_outputs"] = {k: [[[_cjson(z) for z in row] for row in mat] for mat in v] for k, v in outputs.items()}
    ok = all(v < tol for k, v in res.items() if k.startswith("round_trip"))
    return Outcome(ok, res)


def _run_harmonic(sc, ov) -> Outcome:
    dims = _dims(sc)
    chart = FiberChart(*dims)
    grid = _grid(sc, dims, ov)
    tol = ov.get("tol") or sc.get("tol", 1e-9)
    omega = metric_from_linear_hermitian(_metric(sc["metric"], dims, "$.metric"), chart, grid.points)
    hs = HarmonicScenario(omega, beta=_beta(sc, dims), grid=grid)
    if "connection" in sc:
        hs.nabla, hs.dbar = _flat_side(sc, chart)
    else:
        hs.theta = _theta(sc, chart)
        if "dbar" in sc:
            hs.dbar = DBarChart(chart, _matrix(sc["dbar"], dims, dims, "$.dbar"))
    v = is_harmonic(hs, tol)
    res = {"allowability": v.allowability, "harmonic": v.harmonic}
    if v.report is not None:
        res["curvature"] = v.report.to_dict()
    return Outcome(v.harmonic, res)


def _run_monodromy(sc, ov) -> Outcome:
    o = sc["ode"]
    n = o["order"]
    ode = RationalODE(n, _poly(o["numerator"], (1, n), "$.ode.numerator"),
                      _poly(o["denominator"], (1, n), "$.ode.denominator") if "denominator" in o else None)
    fol = ode_to_foliation(ode)
    path = _path(sc["path"])
    tol = ov.get("tol") or sc.get("tol", 1e-8)
    samples = [np.array([_cplx(z) for z in smp]) for smp in sc.get("samples", [[1.0] * n])]
    threads = ov.get("threads") or 1

    def one(t0):
        try:
            return {"input": t0, "output": continue_along_path(fol, path, t0, ode=ode)}
        except NLHodgeError as exc:
            return {"input": t0, "output": None, "escape": str(exc), "parameter": getattr(exc, "parameter", None)}

    with ThreadPoolExecutor(max_workers=threads) as ex:
        records = list(ex.map(one, samples))
    res = {"closed": path.closed, "records": [
        {"input": [_cjson(z) for z in r["input"]],
         "output": None if r["output"] is None else [_cjson(z) for z in r["output"]],
         **({"escape": r["escape"], "parameter": r["parameter"]} if r["output"] is None else {})}
        for r in records]}
    ok = all(r["output"] is not None for r in records)
    if path.closed and ode.is_linear():
        mono = loop_monodromy(fol, path, samples, linear=True, ode=ode)
        if mono.matrix is not None:
            res["monodromy_matrix"] = [[_cjson(z) for z in row] for row in mono.matrix]
            res["fit_residual"] = mono.residual
    if "expected" in sc:
        exp = [np.array([_cplx(z) for z in e]) for e in sc["expected"]]
        errs = [_sup(r["output"] - e) if r["output"] is not None else float("inf") for r, e in zip(records, exp)]
        res["max_error"] = max(errs)
        ok = ok and res["max_error"] < tol
    return Outcome(ok, res)


def _generators(sc) -> list[PolyAuto]:
    g = sc.get("generators", "rho2")
    if g == "rho1":
        return rho1_generators()
    if g == "rho2":
        return rho2_generators()
    out = []
    for k, spec in enumerate(g):
        n = len(spec["components"])
        comps = tuple(_poly(c, (0, n), f"$.generators[{k}].components[{j}]") for j, c in enumerate(spec["components"]))
        out.append(PolyAuto(comps, spec.get("name", f"g{k}")))
    return out


def _run_autgroup(sc, ov) -> Outcome:
    gens = _generators(sc)
    res = {}
    ok = True
    if "power" in sc:
        names = {g.name: g for g in gens}
        try:
            word = [names[w] for w in sc["power"]["word"]]
        except KeyError as exc:
            raise ScenarioError(f"unknown generator {exc.args[0]!r}", "$.power.word") from None
        degs = power_degrees(evaluate_word(word), sc["power"]["kmax"])
        res["power_degrees"] = degs
        if "expected_degrees" in sc:
            ok = degs == sc["expected_degrees"]
    if "max_len" in sc:
        table = jacobian_degree_growth(gens, sc["max_len"])
        res["max_jacobian_degree_by_length"] = {str(k): v for k, v in max_degree_by_length(table).items()}
        res["word_count"] = len(table)
        if sc.get("generators") == "rho1":
            normal = all(rho1_normal_form(evaluate_word([gens[i] for i in w])) is not None
                         for w in reduced_words(gens, sc["max_len"]))
            res["rho1_normal_form"] = normal
            ok = ok and normal
    return Outcome(ok, res)


def _run_rank1(sc, ov) -> Outcome:
    g = sc.get("grid", {})
    center = _cplx(g.get("center", [0.0, 2.0]))
    p = PeriodScenario.from_coefficients([_cplx(c) for c in sc["tau"]], center=center,
                                         radius=g.get("radius", 0.5))
    n = ov.get("grid") or g.get("n", 5)
    grid = p.grid(n, g.get("n_fiber", 3), g.get("fiber_radius", 1.0))
    tol = ov.get("tol") or sc.get("tol", 1e-8)
    H = _metric(sc["metric_override"], (1, 2), "$.metric_override") if "metric_override" in sc else None
    rep = rank1_harmonicity(p, grid, tol, sc.get("hodge_factor", 2.0), H)
    rows = []
    if ov.get("format") == "csv":
        theta, omega = ks_metric(p, sc.get("hodge_factor", 2.0), H, grid)
        d, c = higgs_to_flat(theta, omega)
        for name, vals in (("F0,2", curvature_F02(d, grid)), ("F1,1", curvature_F11(c, grid, d)),
                           ("F2,0", curvature_F20(c, grid))):
            rows += _tensor_rows(name, vals, grid)
    return Outcome(rep.verdict, {"isotrivial": is_isotrivial(p), "curvature": rep.to_dict()}, rows)


RUNNERS = {
    "chern": _run_chern,
    "curvature-F": _run_curvature_F,
    "curvature-G": _run_curvature_G,
    "simpson-forward": lambda sc, ov: _run_simpson(sc, ov, True),
    "simpson-backward": lambda sc, ov: _run_simpson(sc, ov, False),
    "harmonic-check": _run_harmonic,
    "monodromy": _run_monodromy,
    "autgroup": _run_autgroup,
    "rank1": _run_rank1,
}


def scenario_hash(sc: dict) -> str:
    return hashlib.sha256(json.dumps(sc, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def run_scenario(sc: dict, overrides: dict | None = None) -> tuple[dict, Outcome]:
    """Validate and execute a scenario dictionary; returns the report and the raw outcome."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    validate(sc)
    t0 = time.perf_counter()
    try:
        outcome = RUNNERS[sc["kind"]](sc, overrides)
    except ScenarioError:
        raise
    except NLHodgeError as exc:
        raise NLHodgeError(f"[{exc.module}] {exc}") from exc
    elapsed = time.perf_counter() - t0
    report = {
        "schema_version": SCHEMA_VERSION,
        "generator": f"nlhodge {__version__}",
        "kind": sc["kind"],
        "name": sc.get("name", ""),
        "scenario_hash": scenario_hash(sc),
        "scenario": copy.deepcopy(sc),
        "overrides": {k: v for k, v in overrides.items() if k in ("grid", "tol")},
        "verdict": "pass" if outcome.verdict else "fail",
        "results": outcome.results,
        "timings": {"seconds": round(elapsed, 6)},
    }
    return report, outcome


def bundled_scenarios() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("nlhodge").joinpath("scenarios").iterdir()
                  if p.name.endswith(".json"))


def load_scenario(ref: str) -> dict:
    path = Path(ref)
    if path.exists():
        text = path.read_text()
    else:
        res = resources.files("nlhodge").joinpath("scenarios", f"{ref}.json")
        if not res.is_file():
            raise ScenarioError(f"no scenario file or bundled scenario named {ref!r}", "$")
        text = res.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}", "$") from None


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o)}")


def render(report: dict, outcome: Outcome, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        dims = report["scenario"].get("dims", {"m": 1, "r": 2})
        coords = [f"{v}{k}_{part}" for v, n in (("s", dims["m"]), ("t", dims["r"]))
                  for k in range(1, n + 1) for part in ("re", "im")]
        w.writerow(["point", *coords, "tensor", "i", "j", "k", "re", "im"])
        w.writerows(outcome.rows)
        return buf.getvalue()
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlhodge", description="Run nonlinear Hodge chart scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run",) + KINDS:
        p = sub.add_parser(name, help="run a scenario" if name == "run" else f"run a '{name}' scenario")
        p.add_argument("--scenario", required=True, help="scenario file or bundled scenario name")
        p.add_argument("--grid", type=int, help="lattice points per base axis")
        p.add_argument("--tol", type=float, help="verdict tolerance")
        p.add_argument("--report", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--threads", type=int, default=1)
    sub.add_parser("list", help="list bundled scenarios")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        print("\n".join(bundled_scenarios()))
        return 0
    try:
        sc = load_scenario(args.scenario)
        if args.command != "run" and isinstance(sc, dict) and sc.get("kind") != args.command:
            raise ScenarioError(f"scenario kind {sc.get('kind')!r} does not match subcommand {args.command!r}",
                                "$.kind")
        overrides = {"grid": args.grid, "tol": args.tol, "format": args.format, "threads": args.threads}
        report, outcome = run_scenario(sc, overrides)
    except (NLHodgeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = render(report, outcome, args.format)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if outcome.verdict else 2


if __name__ == "__main__":
    sys.exit(main())
