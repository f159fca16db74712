"""Numerical verifiers for identities satisfied by Cauchy transforms.

Each verifier returns a small report object; the report writers at the end
serialize them to CSV/JSON for the command line tool.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .measure_model import ComplexMeasure, MeasureError, quadrature_nodes
from .transforms import (
    KernelSpec,
    PrincipalValueError,
    _require_odd,
    cauchy,
    cauchy_eps,
    cauchy_pv,
    eps_grid,
    mass_in_ball,
    odd_kernel_eps,
    riesz_r1,
)


@dataclass
class IdentityReport:
    name: str
    test_points: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    tolerance: float
    nodes: int
    expected: str = "pass"

    @property
    def residuals(self):
        return np.abs(self.lhs - self.rhs)

    @property
    def inconclusive(self):
        return ~np.isfinite(self.residuals)

    @property
    def max_residual(self):
        r = self.residuals
        r = r[np.isfinite(r)]
        return float(r.max()) if len(r) else math.nan

    @property
    def verdict(self):
        if np.any(self.inconclusive):
            return "fail"
        return "pass" if self.max_residual < self.tolerance else "fail"

    @property
    def label(self):
        """``pass``/``fail``, or ``expected-fail`` for a negative control that fails."""
        if self.expected == "fail":
            return "expected-fail" if self.verdict == "fail" else "unexpected-pass"
        return self.verdict

    @property
    def ok(self):
        return self.label in ("pass", "expected-fail")

    def summary(self):
        return {"name": self.name, "max_residual": self.max_residual, "verdict": self.verdict,
                "label": self.label, "tolerance": self.tolerance, "nodes": self.nodes,
                "points": int(len(self.test_points)), "inconclusive": int(np.sum(self.inconclusive))}


def _support_radius(mu):
    x0, x1, y0, y1 = mu.bbox()
    return max(0.5 * math.hypot(x1 - x0, y1 - y0), 1e-12)


def default_test_points(mu: ComplexMeasure, count=64, interior=16):
    """Points on two circles (1.5x and 3x the support radius) plus interior points of curves."""
    c, r = mu.center, _support_radius(mu)
    half = count // 2
    th = 2 * np.pi * (np.arange(half) + 0.5) / half
    pts = [c + 1.5 * r * np.exp(1j * th), c + 3.0 * r * np.exp(1j * (th + np.pi / half))]
    for _, comp in mu.components:
        if comp.kind == "curve" and interior:
            cc = complex(np.mean(comp.curve(np.linspace(0, 2 * np.pi, 256, endpoint=False))))
            rad = 0.4 * comp.distance(cc)
            ti = 2 * np.pi * np.arange(interior) / interior
            cand = cc + rad * np.exp(1j * ti)
            cand = [z for z in cand if mu.distance(z) > 0.05 * r]
            if cand:
                pts.append(np.array(cand))
    return np.concatenate(pts)


def _outer_nodes(mu, n):
    """Nodes for integrals against ``mu`` of functions with endpoint singularities."""
    zs, ws = [], []
    for k, comp in mu.components:
        if comp.kind == "atom":
            z, w = comp.nodes()
        elif comp.kind == "interval":
            z, w = comp.nodes(n, graded=True)
        elif comp.kind == "curve":
            z, w = comp.nodes(max(4 * n, 256))
        else:
            z, w = comp.nodes(n)
        zs.append(np.asarray(z, complex))
        ws.append(k * w)
    return np.concatenate(zs), np.concatenate(ws)


def verify_quadratic(mu: ComplexMeasure, test_points=None, tol=1e-6, n=32, expected="pass") -> IdentityReport:
    """Compare ``2 * C[C dmu](z)`` with ``C(z)**2`` at off-support points."""
    pts = default_test_points(mu) if test_points is None else np.asarray(test_points, complex).ravel()
    for z in pts:
        if any(a.location == z for a in mu.atoms):
            raise MeasureError("test points must avoid atoms")
    t, w = _outer_nodes(mu, n)
    inner = np.empty(len(t), dtype=complex)
    for i, ti in enumerate(t):
        try:
            inner[i] = cauchy_pv(mu, ti, ladder=False).value
        except PrincipalValueError:
            inner[i] = np.nan
    lhs = np.array([2.0 * np.sum(w * inner / (z - t)) for z in pts])
    rhs = np.array([cauchy(mu, z) ** 2 for z in pts])
    return IdentityReport("quadratic", pts, lhs, rhs, tol, len(t), expected)


def verify_reflectionless(mu: ComplexMeasure, sample_count=64, tol=1e-6, expected="pass",
                          points=None) -> IdentityReport:
    """``|pv C(t)|`` at support points.

    By default the points are the ``mu``-quadrature nodes for ``n`` and ``2n``
    nodes, so a pass needs both resolutions; ``points`` overrides them.
    """
    if not mu.is_continuous:
        raise MeasureError("reflectionless requires continuous measure")
    if points is not None:
        pts = np.asarray(points, complex).ravel()
    else:
        pts = []
        for m in (sample_count, 2 * sample_count):
            for _, comp in mu.components:
                z, _ = quadrature_nodes(comp, m)
                pts.append(np.asarray(z, complex))
        pts = np.concatenate(pts)
    lhs = np.array([cauchy_pv(mu, z, ladder=False).value for z in pts])
    return IdentityReport("reflectionless", pts, lhs, np.zeros_like(lhs), tol, sample_count, expected)


def antisymmetry_check(mu, nu, K: KernelSpec, eps, n=32):
    """``|int K^mu_eps dnu + int K^nu_eps dmu|`` by direct double sums over quadrature nodes."""
    _require_odd(K)
    if eps <= 0:
        raise ValueError("eps must be positive")
    zm, wm = mu.nodes(n)
    zn, wn = nu.nodes(n)

    def pair_sum(src, ws, tgt, wt):
        d = src[None, :] - tgt[:, None]
        keep = np.abs(d) > eps
        k = np.where(keep, K(np.where(keep, d, 1.0)), 0.0)
        return np.sum(wt * (k @ ws))

    return float(abs(pair_sum(zm, wm, zn, wn) + pair_sum(zn, wn, zm, wm)))


@dataclass
class HalfspaceTrace:
    epsilons: np.ndarray
    values: np.ndarray
    tol: float = 1e-12

    @property
    def positive(self):
        return bool(np.all(self.values > 0))

    @property
    def nondecreasing(self):
        return bool(np.all(np.diff(self.values) >= -self.tol * np.max(np.abs(self.values))))


def halfspace_diagnostic(mu, K: KernelSpec, c, eps_ladder=None, n=32) -> HalfspaceTrace:
    """``int K^nu_eps d eta`` with ``nu``/``eta`` the parts of ``mu`` right/left of ``Re z = c``."""
    _require_odd(K)
    if not mu.is_positive:
        raise MeasureError("half-space diagnostic needs a positive measure")
    right = mu.restrict_halfplane(c, +1)
    left = mu.restrict_halfplane(c, -1)
    if len(right) == 0 or len(left) == 0:
        raise MeasureError("degenerate split: one side of the line is empty")
    if eps_ladder is None:
        eps_ladder = mu.scale * 2.0 ** -np.arange(1, 21)
    eps_ladder = np.asarray(eps_ladder, float)
    zl, wl = left.nodes(n)
    vals = []
    for e in eps_ladder:
        vals.append(sum((wl[j] * odd_kernel_eps(K, right, zl[j], e, n)).real for j in range(len(zl))))
    return HalfspaceTrace(eps_ladder, np.array(vals))


@dataclass
class MaximalStats:
    nodes: np.ndarray
    weights: np.ndarray
    maximal_values: np.ndarray
    cutoffs: np.ndarray
    l1_truncated: np.ndarray
    weak_quasinorm: np.ndarray
    epsilons: np.ndarray
    eps_l1_norms: np.ndarray
    log_slope: float = 0.0
    log_r2: float = 0.0
    classification: str = "divergent"


def _weak(cstar, w, lam_max):
    """``max_{lambda <= lam_max} lambda * |mu|({C* > lambda})`` (the max sits at sample values)."""
    order = np.argsort(-cstar)
    cs, ws = cstar[order], w[order]
    tail = np.cumsum(ws)  # |mu|({C* >= cs[i]})
    lam = np.minimum(cs, lam_max)
    # |mu|({C* > lam}) just below cs[i] is the cumulative mass through i
    return float(np.max(lam * tail)) if len(cs) else 0.0


def maximal_summability(mu, n=8, cutoffs=(10.0, 1e2, 1e3, 1e4), eps_ladder=None, refine=0) -> MaximalStats:
    """Summability diagnostics of the grid maximal function at graded ``|mu|`` nodes."""
    if not mu.is_continuous:
        raise MeasureError("maximal summability needs a continuous measure")
    z, w = _outer_nodes(mu, n)
    w = np.abs(w)
    scale = mu.scale
    grid = eps_grid(1e-12 * scale, 2 * scale, refine) if eps_ladder is None else np.asarray(eps_ladder, float)
    table = np.array([[cauchy_eps(mu, zi, e) for e in grid] for zi in z])
    cstar = np.max(np.abs(table), axis=1)
    cutoffs = np.asarray(cutoffs, float)
    l1 = np.array([np.sum(w * np.minimum(cstar, L)) for L in cutoffs])
    weak = np.array([_weak(cstar, w, L) for L in cutoffs])
    eps_norms = np.sum(w[:, None] * np.abs(table), axis=0)
    x = np.log(cutoffs)
    slope, icpt = np.polyfit(x, l1, 1)
    pred = slope * x + icpt
    ss = np.sum((l1 - l1.mean()) ** 2)
    r2 = 1.0 - np.sum((l1 - pred) ** 2) / ss if ss > 0 else 0.0
    if l1[-1] <= 1.01 * l1[-2]:
        cls = "summable"
    elif r2 > 0.99 and slope > 0 and (weak.max() - weak.min()) < 0.2 * weak.max():
        cls = "weak-only"
    else:
        cls = "divergent"
    return MaximalStats(z, w, cstar, cutoffs, l1, weak, grid, eps_norms, float(slope), float(r2), cls)


@dataclass
class RatioTrace:
    radii: np.ndarray
    mass_ratio: np.ndarray
    riesz_value: np.ndarray

    @property
    def quotient(self):
        rv = self.riesz_value
        safe = np.where(rv != 0, rv, 1.0)
        return np.where(rv != 0, self.mass_ratio / safe, 0.0)


def density_point_trace(mu, w, radii, n=64) -> RatioTrace:
    radii = np.asarray(radii, float)
    if np.any(radii <= 0) or np.any(np.diff(radii) >= 0):
        raise ValueError("radii must be positive and decreasing")
    w = complex(w)
    mass = np.array([abs(mass_in_ball(mu, w, r, n)) for r in radii])
    ratio = mass / (np.pi * radii ** 2)
    ratio = np.where(ratio < 1e-13, 0.0, ratio)
    riesz = np.array([riesz_r1(mu, w.real, w.imag, r, n, variation=True) for r in radii])
    return RatioTrace(radii, ratio, riesz)


def small_transform_fraction(mu, threshold=1e-3, grid=101):
    """Area fraction of the support bounding box (inside an area component) where ``|C| < threshold``."""
    x0, x1, y0, y1 = mu.bbox()
    xs = np.linspace(x0, x1, grid + 2)[1:-1]
    ys = np.linspace(y0, y1, grid + 2)[1:-1]
    inside, small = 0, 0
    for x in xs:
        for y in ys:
            z = complex(x, y)
            if not any(comp.kind == "area" and bool(comp.region.contains(z)) for _, comp in mu.components):
                continue
            inside += 1
            small += abs(cauchy(mu, z)) < threshold
    return small / inside if inside else 0.0


# ---------------------------------------------------------------------------
# serialization


CSV_COLUMNS = ["point_re", "point_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"]


def write_report_csv(report: IdentityReport, path):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(CSV_COLUMNS)
        for z, a, b, r in zip(report.test_points, report.lhs, report.rhs, report.residuals):
            wr.writerow([repr(float(v)) for v in (z.real, z.imag, a.real, a.imag, b.real, b.imag, r)])


def write_report_json(report: IdentityReport, path):
    with open(path, "w") as fh:
        json.dump(report.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")
