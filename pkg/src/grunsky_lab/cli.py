"""Command line interface.

Four subcommands cover the pipeline: `map` solves the exterior map of a
convex quadrilateral, `grunsky` tabulates Grunsky norms along truncation
orders, `extremality` measures a Beltrami coefficient against boundary
concentration probes and the extremal pairing bracket, and `deform`
assembles pullback metric envelopes with curvature certificates.

Exit codes: 0 success, 1 usage or input-format problems, 2 numerical or
validation failures.  Reports are JSON with sorted keys and no
timestamps, so a fixed input and seed reproduce byte-identical output.
The GRUNSKY_LAB_THREADS environment variable caps worker threads.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__
from .beltrami import (ahlfors_weill, boundary_probe, infinitesimal_grunsky,
                       teichmuller_norm_bracket)
from .disk import constant_field
from .grunsky import convergence_report, grunsky_matrix, grunsky_norm
from .metrics import DeformationGrid, curvature_certificate, metric_comparison
from .quaddiff import QuadratureError, psi_from_x, teichmuller_beltrami
from .scmap import (EllipseMapSpec, LaurentAccuracyError, PolygonError,
                    PolygonSpec, SolverError, boundary_trace,
                    hyperbolic_sup_norm, laurent_coeffs, polygon_boundary_distance,
                    schwarzian, solve_parameters)

_USAGE_ERRORS = (FileNotFoundError, IsADirectoryError, PermissionError,
                 json.JSONDecodeError, KeyError, TypeError)
_NUMERIC_ERRORS = (PolygonError, SolverError, LaurentAccuracyError,
                   QuadratureError, ValueError, ArithmeticError, RuntimeError)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _n_workers() -> int:
    cap = os.environ.get("GRUNSKY_LAB_THREADS")
    default = min(4, os.cpu_count() or 1)
    if cap is None:
        return default
    try:
        return max(1, min(default, int(cap))) if int(cap) > 0 else 1
    except ValueError:
        raise _UsageError(f"GRUNSKY_LAB_THREADS must be an integer, got {cap!r}")


def _as_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise _UsageError(f"expected a number or [re, im] pair, got {value!r}")


def _c2l(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise _UsageError("input JSON must be an object")
    return data


def _load_map_spec(data: dict):
    """Polygon {"vertices": [[x, y], ...]} or {"type": "ellipse", "b": ...}."""
    kind = data.get("type", "polygon")
    if kind == "ellipse":
        return EllipseMapSpec(_as_complex(data["b"])), {"type": "ellipse",
                                                        "b": _c2l(_as_complex(data["b"]))}
    if kind == "polygon":
        if "vertices" not in data:
            raise _UsageError('polygon input needs a "vertices" array')
        polygon = PolygonSpec(np.asarray(data["vertices"], dtype=float))
        return solve_parameters(polygon), {
            "type": "polygon",
            "vertices": [ _c2l(v) for v in polygon.vertices ],
        }
    raise _UsageError(f"unknown map spec type {kind!r}")


def _load_mu_spec(data: dict, seed: int):
    """Beltrami coefficient spec; see README for the accepted forms."""
    kind = data.get("type")
    if kind == "constant":
        value = _as_complex(data["value"])
        return constant_field(value), {"type": "constant", "value": _c2l(value)}
    if kind == "teichmuller":
        k = float(data["k"])
        x = np.asarray([_as_complex(v) for v in data["x"]], dtype=complex)
        mu = teichmuller_beltrami(psi_from_x(x), k)
        return mu, {"type": "teichmuller", "k": k, "x": [_c2l(v) for v in x]}
    if kind == "ahlfors_weill":
        spec, described = _load_map_spec(data["map"])
        target = float(data.get("target_bnorm", 1.6))
        if not 0.0 < target < 2.0:
            raise _UsageError(f"target_bnorm must lie in (0, 2), got {target}")
        base_norm = hyperbolic_sup_norm(spec)
        factor = target / base_norm
        phi = lambda z: factor * schwarzian(spec, z)
        mu = ahlfors_weill(phi)
        return mu, {"type": "ahlfors_weill", "map": described,
                    "target_bnorm": target, "base_bnorm": float(base_norm)}
    raise _UsageError(f"unknown coefficient spec type {kind!r}")


def _report(command: str, config: dict, tolerances: dict, results: dict) -> dict:
    return {
        "command": command,
        "config": config,
        "results": results,
        "tolerances": tolerances,
        "versions": {"grunsky_lab": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__},
    }


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_map(args) -> int:
    spec, described = _load_map_spec(_load_json(args.input))
    series = laurent_coeffs(spec, args.N)
    results = {"laurent": {str(k): _c2l(series.coeff(k))
                           for k in range(series.lo, series.hi + 1)}}
    if isinstance(spec, EllipseMapSpec):
        results["map"] = {"kind": "ellipse"}
    else:
        trace = boundary_trace(spec, 256)
        dist = polygon_boundary_distance(spec.polygon, trace)
        results["map"] = {
            "kind": "polygon",
            "prevertices": [_c2l(e) for e in spec.prevertices],
            "prevertex_angles": [float(a) for a in np.angle(spec.prevertices)],
            "exponents": [float(a) for a in spec.exponents],
            "scale": _c2l(spec.scale),
            "offset": _c2l(spec.offset),
            "solver_residual": float(spec.solver_residual),
            "max_boundary_distance": float(np.max(dist)),
        }
    payload = _report("map", {"N": args.N, "input": os.path.basename(args.input),
                              "tol": args.tol},
                      {"solver_tol": args.tol}, results)
    _write_json(args.out, payload)
    if args.csv:
        rows = [(k, f"{float(series.coeff(k).real)!r}",
                 f"{float(series.coeff(k).imag)!r}")
                for k in range(series.hi, series.lo - 1, -1)]
        _write_csv(args.csv, ["n", "re", "im"], rows)
        ts = 2.0 * np.pi * np.arange(256) / 256
        zs = np.exp(1j * ts)
        ws = boundary_trace(spec, 256)
        _write_csv(_sibling(args.csv, "trace"),
                   ["z_re", "z_im", "w_re", "w_im"],
                   [(f"{float(z.real)!r}", f"{float(z.imag)!r}",
                     f"{float(w.real)!r}", f"{float(w.imag)!r}")
                    for z, w in zip(zs, ws)])
    return 0


def _cmd_grunsky(args) -> int:
    spec, described = _load_map_spec(_load_json(args.input))
    orders = sorted({1 << j for j in range(2, 12) if (1 << j) <= args.N} | {args.N})
    series = laurent_coeffs(spec, 2 * args.N - 1)
    report = convergence_report(series, orders)
    results = {
        "orders": report["orders"],
        "kappa": [float(v) for v in report["kappa"]],
        "delta": [None if np.isnan(d) else float(d) for d in report["delta"]],
        "extrapolated": report["extrapolated"],
        "uncertainty": report["uncertainty"],
        "monotone": report["monotone"],
        "input": described,
    }
    payload = _report("grunsky", {"N": args.N, "input": os.path.basename(args.input)},
                      {}, results)
    _write_json(args.out, payload)
    if args.csv:
        rows = [(n, f"{k!r}", "" if d is None else f"{d!r}")
                for n, k, d in zip(results["orders"], results["kappa"], results["delta"])]
        _write_csv(args.csv, ["N", "kappa_N", "delta"], rows)
    return 0


def _cmd_extremality(args) -> int:
    mu, described = _load_mu_spec(_load_json(args.input), args.seed)
    norm = infinitesimal_grunsky(mu, args.N)
    lower, upper = teichmuller_norm_bracket(mu, order=args.N, seed=args.seed)
    points = np.exp(2j * np.pi * np.arange(args.probe_points) / args.probe_points)

    def probe(z0):
        return boundary_probe(mu, z0, p_max=args.p_max)

    with ThreadPoolExecutor(max_workers=_n_workers()) as pool:
        probes = list(pool.map(probe, points))

    k = float(mu.sup_norm)
    probe_limit = max((max(0.0, pr["extrapolated"]) for pr in probes),
                      default=0.0)
    extremal_flag = bool(lower >= k - max(1e-6, 1e-3 * k))
    teichmuller_flag = bool(extremal_flag
                            and (k == 0.0 or probe_limit < 0.05 * k))
    results = {
        "alpha_N": float(norm),
        "bracket": {"lower": float(lower), "upper": float(upper),
                    "extremal_flag": extremal_flag},
        "sup_norm": k,
        "extremal_flag": extremal_flag,
        "teichmuller_flag": teichmuller_flag,
        "probe_limit": float(probe_limit),
        "probes": [{"z0": _c2l(pr["z0"]), "p": pr["p"], "value": pr["value"],
                    "extrapolated": pr["extrapolated"]} for pr in probes],
        "input": described,
    }
    payload = _report("extremality",
                      {"N": args.N, "p_max": args.p_max,
                       "probe_points": args.probe_points, "seed": args.seed,
                       "input": os.path.basename(args.input)},
                      {}, results)
    _write_json(args.out, payload)
    if args.csv:
        best = np.max([pr["value"] for pr in probes], axis=0)
        rows = [(p, f"{float(v)!r}") for p, v in zip(range(1, args.p_max + 1), best)]
        _write_csv(args.csv, ["p", "value"], rows)
    return 0


def _grid_rows(grid, lam, margins=None):
    rows = []
    for idx in np.ndindex(grid.shape):
        if not grid.mask[idx]:
            continue
        t = grid.t[idx]
        m = np.nan if margins is None else margins[idx]
        rows.append((f"{float(t.real)!r}", f"{float(t.imag)!r}",
                     f"{float(lam[idx])!r}",
                     "" if not np.isfinite(m) else f"{float(m)!r}"))
    return rows


def _sibling(path: str, tag: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_{tag}{ext or '.csv'}"


def _cmd_deform(args) -> int:
    mu, described = _load_mu_spec(_load_json(args.input), args.seed)
    grid = DeformationGrid(radius=0.5, spacing=args.grid)

    if mu.sup_norm == 0.0:
        zero = np.zeros(grid.shape)
        results = {
            "center_values": {"lambda_inf": 0.0, "lambda_kappa": 0.0,
                              "ceiling": 0.0, "sup_norm": 0.0},
            "ordered": True,
            "max_violation_inf_kappa": 0.0,
            "max_violation_kappa_teich": 0.0,
            "chain_round_trip": 0.0,
            "curvature": {"min_margin": None, "n_checked": 0,
                          "n_excluded": int(zero.size)},
            "input": described,
        }
        grids = {"inf": zero, "kappa": zero, "upper": zero}
        margins = None
    else:
        catalogue = []
        for j in (0, 1):
            e = np.zeros(args.N, dtype=complex)
            e[min(j, args.N - 1)] = 1.0
            catalogue.append(e)
        comparison = metric_comparison(mu, catalogue, order=args.N, grid=grid,
                                       seed=args.seed)
        cert = curvature_certificate(comparison["lambda_kappa"], grid.spacing,
                                     mask=grid.mask)
        results = {
            "center_values": comparison["center_values"],
            "ordered": comparison["ordered"],
            "max_violation_inf_kappa": comparison["max_violation_inf_kappa"],
            "max_violation_kappa_teich": comparison["max_violation_kappa_teich"],
            "chain_round_trip": comparison["chain_round_trip"],
            "base_bracket": {"lower": comparison["base_bracket"][0],
                             "upper": comparison["base_bracket"][1]},
            "curvature": {"min_margin": cert["min_margin"],
                          "n_checked": cert["n_checked"],
                          "n_excluded": cert["n_excluded"]},
            "input": described,
        }
        grids = {"inf": comparison["lambda_inf"],
                 "kappa": comparison["lambda_kappa"],
                 "upper": comparison["lambda_teich_upper"]}
        margins = cert["margins"]
    payload = _report("deform",
                      {"N": args.N, "grid": args.grid, "seed": args.seed,
                       "input": os.path.basename(args.input)},
                      {"curvature_margin": -1e-2}, results)
    _write_json(args.out, payload)
    if args.csv:
        header = ["t_re", "t_im", "lambda", "margin"]
        _write_csv(args.csv, header, _grid_rows(grid, grids["kappa"], margins))
        _write_csv(_sibling(args.csv, "inf"), header,
                   _grid_rows(grid, grids["inf"]))
        _write_csv(_sibling(args.csv, "upper"), header,
                   _grid_rows(grid, grids["upper"]))
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> _Parser:
    parser = _Parser(prog="grunsky-lab",
                     description="Numerics for Grunsky norms, exterior maps of "
                                 "convex quadrilaterals, and deformation metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default):
        p.add_argument("--input", required=True, help="input spec JSON")
        p.add_argument("--out", required=True, help="output report JSON")
        p.add_argument("--csv", default=None, help="optional CSV table")
        p.add_argument("--N", type=int, default=n_default, help="truncation order")
        p.add_argument("--seed", type=int, default=0, help="random seed")

    p_map = sub.add_parser("map", help="solve the exterior map of a polygon")
    common(p_map, 16)
    p_map.add_argument("--tol", type=float, default=1e-10,
                       help="solver residual tolerance")

    p_gr = sub.add_parser("grunsky", help="Grunsky norm convergence table")
    common(p_gr, 32)

    p_ex = sub.add_parser("extremality", help="pairing bracket and boundary probes")
    common(p_ex, 16)
    p_ex.add_argument("--probe-points", type=int, default=4,
                      help="number of boundary probe points")
    p_ex.add_argument("--p-max", type=int, default=12,
                      help="largest concentration level")

    p_df = sub.add_parser("deform", help="pullback metric envelopes and certificates")
    common(p_df, 8)
    p_df.add_argument("--grid", type=float, default=1.0 / 128.0,
                      help="parameter lattice spacing")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"map": _cmd_map, "grunsky": _cmd_grunsky,
                "extremality": _cmd_extremality, "deform": _cmd_deform}
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"grunsky-lab: error: {exc}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as exc:
        print(f"grunsky-lab: error: {exc}", file=sys.stderr)
        return 1
    except _NUMERIC_ERRORS as exc:
        print(f"grunsky-lab: failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
