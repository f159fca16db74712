"""Command line front end.

Every subcommand writes its report files into ``--out`` and prints a single
verdict line.  Exit codes: 0 pass (or computation done, or a declared
negative control that failed), 1 verification failure, 2 bad input,
3 numerical non-convergence.  Reports hold no timestamps or timings, so the
same arguments reproduce them byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import comb_geometry as comb, fast_eval
from .constructions import GapRootError, harmonic_measure
from .identities import (
    default_test_points,
    maximal_summability,
    verify_quadratic,
    verify_reflectionless,
    write_report_csv,
)
from .measure_model import MeasureError
from .specfile import SpecError, dump_spec, load_spec
from .transforms import PrincipalValueError, cauchy_eps, cauchy_pv

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    spec: str | None = None
    tol: float | None = None
    nodes: int | None = None
    eps_min: float | None = None
    eps_rungs: int = 40
    points: str | None = None
    out: str = "pvc_out"
    seed: int = 0
    intervals: str | None = None

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.nodes is not None and self.nodes < 2:
            raise InputError("--nodes must be at least 2")
        if self.eps_min is not None and not self.eps_min > 0:
            raise InputError("--eps-min must be positive")
        if self.eps_rungs < 2:
            raise InputError("--eps-rungs must be at least 2")


# ---------------------------------------------------------------------------
# argument helpers


def parse_points(text):
    """Points from a file (one per line, ``x,y`` or a complex literal) or an inline list."""
    if text is None:
        return None
    if os.path.isfile(text):
        pts = []
        with open(text) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                toks = [t for t in line.replace(",", " ").split() if t]
                if len(toks) == 2:
                    pts.append(complex(_float(toks[0]), _float(toks[1])))
                elif len(toks) == 1:
                    pts.append(_complex(toks[0]))
                else:
                    raise InputError(f"cannot read point from line {line!r}")
        return np.array(pts, complex)
    toks = [t for t in text.replace(",", " ").split() if t]
    if not toks:
        raise InputError("no points given")
    return np.array([_complex(t) for t in toks], complex)


def _float(tok):
    try:
        return float(tok)
    except ValueError:
        raise InputError(f"not a number: {tok!r}") from None


def _complex(tok):
    try:
        return complex(tok.replace("i", "j"))
    except ValueError:
        raise InputError(f"not a complex number: {tok!r}") from None


def parse_intervals(text):
    """``"[-1,-0.3],[0.3,1]"`` into a list of pairs."""
    if text is None:
        raise InputError("--intervals is required")
    try:
        data = json.loads("[" + text + "]")
    except json.JSONDecodeError:
        raise InputError(f"cannot parse intervals {text!r}") from None
    if not data or not all(isinstance(iv, list) and len(iv) == 2 for iv in data):
        raise InputError("intervals must look like [a,b],[c,d]")
    try:
        return [(float(a), float(b)) for a, b in data]
    except (TypeError, ValueError):
        raise InputError("interval endpoints must be numbers") from None


def _need_spec(cfg):
    if cfg.spec is None:
        raise InputError(f"{cfg.command} needs --spec")
    return load_spec(cfg.spec)


# ---------------------------------------------------------------------------
# report writing


def _clean(obj):
    """JSON-ready copy: numpy scalars unwrapped, complex split, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(float(obj.real)), _clean(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_clean(data), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _envelope(cfg, verdict, nodes, tolerance, result):
    return {"tool": "pvcauchy", "version": __version__, "config": asdict(cfg), "nodes": nodes,
            "tolerance": tolerance, "verdict": verdict, "result": result}


# ---------------------------------------------------------------------------
# subcommands; each returns (verdict, exit code, one-line detail)


def cmd_eval(cfg, out):
    ms = _need_spec(cfg)
    pts = parse_points(cfg.points)
    if pts is None:
        raise InputError("eval needs --points")
    n = cfg.nodes or 64
    tol = cfg.tol or 1e-10
    rows, records, bad = [], [], 0
    for z in pts:
        try:
            res = cauchy_pv(ms.measure, z, tol=tol, n=n, rungs=cfg.eps_rungs)
        except PrincipalValueError as e:
            raise InputError(f"point {z}: {e}") from None
        eps_val = cauchy_eps(ms.measure, z, cfg.eps_min, n) if cfg.eps_min else complex(math.nan, math.nan)
        bad += not res.reliable
        rows.append([z.real, z.imag, res.value.real, res.value.imag, eps_val.real, eps_val.imag,
                     res.method, res.status, res.tail_estimate])
        records.append({"point": z, "value": res.value, "method": res.method, "status": res.status,
                        "tail": res.tail_estimate})
    write_csv(out / "eval.csv", ["point_re", "point_im", "value_re", "value_im", "eps_re", "eps_im",
                                 "method", "status", "tail"], rows)
    verdict = "ok" if bad == 0 else "non-converged"
    write_json(out / "eval.json", _envelope(cfg, verdict, n, tol, {"points": records, "non_converged": bad}))
    return verdict, EXIT_OK if bad == 0 else EXIT_NUMERIC, f"{len(pts)} points, {bad} non-converged"


def cmd_maximal(cfg, out):
    ms = _need_spec(cfg)
    n = cfg.nodes or 8
    ladder = None
    if cfg.eps_min:
        ladder = np.geomspace(cfg.eps_min, 2 * ms.measure.scale, cfg.eps_rungs)
    st = maximal_summability(ms.measure, n=n, eps_ladder=ladder)
    write_csv(out / "maximal.csv", ["node_re", "node_im", "weight", "maximal"],
              [[z.real, z.imag, w, c] for z, w, c in zip(st.nodes, st.weights, st.maximal_values)])
    result = {"classification": st.classification, "cutoffs": st.cutoffs, "l1_truncated": st.l1_truncated,
              "weak_quasinorm": st.weak_quasinorm, "log_slope": st.log_slope, "log_r2": st.log_r2,
              "epsilons": st.epsilons, "eps_l1_norms": st.eps_l1_norms}
    write_json(out / "maximal.json", _envelope(cfg, st.classification, len(st.nodes), None, result))
    return st.classification, EXIT_OK, f"R2={st.log_r2:.6f} slope={st.log_slope:.6g}"


def _identity(cfg, out, report):
    write_report_csv(report, out / f"{cfg.command}.csv")
    worst = int(np.nanargmax(np.where(np.isfinite(report.residuals), report.residuals, -1.0)))
    result = dict(report.summary(), worst_point=report.test_points[worst])
    write_json(out / f"{cfg.command}.json",
               _envelope(cfg, report.label, report.nodes, report.tolerance, result))
    detail = f"max residual {report.max_residual:.6g} at {report.test_points[worst]:.6g}"
    if np.any(report.inconclusive) and report.expected != "fail":
        return "inconclusive", EXIT_NUMERIC, detail
    return report.label, EXIT_OK if report.ok else EXIT_FAIL, detail


def cmd_verify_quadratic(cfg, out):
    ms = _need_spec(cfg)
    pts = parse_points(cfg.points)
    if pts is None:
        pts = default_test_points(ms.measure)
    rep = verify_quadratic(ms.measure, pts, cfg.tol or 1e-6, cfg.nodes or 32, ms.expect)
    return _identity(cfg, out, rep)


def cmd_verify_reflectionless(cfg, out):
    ms = _need_spec(cfg)
    rep = verify_reflectionless(ms.measure, cfg.nodes or 64, cfg.tol or 1e-6, ms.expect,
                                points=parse_points(cfg.points))
    return _identity(cfg, out, rep)


def cmd_harmonic_measure(cfg, out):
    iv = parse_intervals(cfg.intervals)
    spec = harmonic_measure(iv, cfg.nodes or 64)
    dump_spec(spec.to_spec_dict(), out / "harmonic_spec.json")
    write_json(out / "harmonic_sidecar.json", spec.sidecar())
    rep = verify_reflectionless(spec.measure, cfg.nodes or 64, cfg.tol or 1e-6)
    mass = spec.measure.total_mass()
    result = dict(spec.sidecar(), mass=mass, reflectionless=rep.summary())
    write_json(out / "harmonic-measure.json", _envelope(cfg, rep.label, rep.nodes, rep.tolerance, result))
    roots = ", ".join(f"{c:.12g}" for c in spec.gap_roots) or "none"
    return rep.label, EXIT_OK if rep.ok else EXIT_FAIL, f"gap roots [{roots}], pv residual {rep.max_residual:.3g}"


def cmd_comb(cfg, out):
    ms = _need_spec(cfg)
    n = cfg.nodes or 64
    rep = comb.comb_report(ms.measure, n=n)
    comb.write_trace_csv(rep, out / "comb_trace.csv")
    verdict = "pass" if rep.comb_like else "fail"
    result = dict(rep.summary(), violation_pairs=rep.violations)
    write_json(out / "comb.json", _envelope(cfg, verdict, n, cfg.tol, result))
    fr = rep.vh_fractions
    return verdict, EXIT_OK if rep.comb_like else EXIT_FAIL, (
        f"strip height {rep.strip_height:.10g}, V/H/N = {fr['vertical']:.3f}/{fr['horizontal']:.3f}/"
        f"{fr['neither']:.3f}")


def cmd_widom(cfg, out):
    iv = parse_intervals(cfg.intervals)
    n = cfg.nodes or 64
    spec = harmonic_measure(iv, n)
    rep = comb.widom_sum(spec, n)
    result = {"intervals": iv, "critical_points": rep.critical_points, "green_values": rep.green_values,
              "partial_sums": rep.partial_sums, "sum": rep.partial_sum}
    write_json(out / "widom.json", _envelope(cfg, "ok", n, None, result))
    return "ok", EXIT_OK, f"{len(iv) - 1} gaps, sum of Green values {rep.partial_sum:.12g}"


def cmd_bench(cfg, out):
    n = cfg.nodes or (1 << 14)
    tol = cfg.tol or 1e-9
    rng = np.random.default_rng(cfg.seed)
    pts = parse_points(cfg.points)
    src = fast_eval.SourceSet(rng.random(n) + 1j * rng.random(n), rng.random(n) / n)
    tgt = pts if pts is not None else rng.random(n) + 1j * rng.random(n)
    eps = cfg.eps_min or 0.0
    t0 = time.perf_counter()
    tree = fast_eval.build_tree(src, 12)
    vals = fast_eval.batch_cauchy(tree, tgt, eps)
    dt = time.perf_counter() - t0
    aud = fast_eval.audit(tree, tgt, vals, eps, seed=cfg.seed)
    verdict = "pass" if aud.max_rel_error < tol else "fail"
    result = {"sources": n, "targets": len(tgt), "order": 12, "cells": tree.n_cells, "eps": eps,
              "audited": aud.audited, "max_rel_error": aud.max_rel_error}
    write_json(out / "bench.json", _envelope(cfg, verdict, n, tol, result))
    # timings go to the terminal only, so reports stay reproducible
    return verdict, EXIT_OK if verdict == "pass" else EXIT_FAIL, (
        f"max rel error {aud.max_rel_error:.3g} on {aud.audited} targets; treecode {dt:.3f} s, "
        f"naive on audit set {aud.naive_seconds:.3f} s")


COMMANDS = {
    "eval": (cmd_eval, "pv or truncated Cauchy transform at points"),
    "maximal": (cmd_maximal, "maximal function summability statistics"),
    "verify-quadratic": (cmd_verify_quadratic, "check 2 C[C dmu] = C^2 off the support"),
    "verify-reflectionless": (cmd_verify_reflectionless, "check pv C = 0 on the support"),
    "harmonic-measure": (cmd_harmonic_measure, "harmonic measure of a union of intervals"),
    "comb": (cmd_comb, "boundary trace of the comb map and its classification"),
    "widom": (cmd_widom, "Green function values at the gap critical points"),
    "bench": (cmd_bench, "treecode against the direct sum"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="measure spec file (JSON)")
    common.add_argument("--tol", type=float, help="tolerance")
    common.add_argument("--nodes", type=int, help="quadrature node count (bench: number of sources)")
    common.add_argument("--eps-min", type=float, help="smallest truncation radius")
    common.add_argument("--eps-rungs", type=int, default=40, help="number of truncation radii")
    common.add_argument("--points", help="points file or inline list like '0.5, 1+2j'")
    common.add_argument("--out", default="pvc_out", help="output directory")
    common.add_argument("--seed", type=int, default=0, help="seed for random samples")
    common.add_argument("--intervals", help="interval list like '[-1,-0.3],[0.3,1]'")
    parser = argparse.ArgumentParser(prog="pvcauchy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        cfg = RunConfig(args.command, args.spec, args.tol, args.nodes, args.eps_min, args.eps_rungs,
                        args.points, args.out, args.seed, args.intervals)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        verdict, code, detail = COMMANDS[cfg.command][0](cfg, out)
    except (InputError, SpecError, MeasureError, PrincipalValueError, OSError, ValueError) as e:
        print(f"{args.command}: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (GapRootError, RuntimeError, FloatingPointError) as e:
        print(f"{args.command}: non-convergence: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"{cfg.command}: {verdict} ({detail})")
    return code


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)
