"""Boundary geometry of the conformal map attached to a positive measure on the line.

For a positive measure ``mu`` on the real line the map is
``F(z) = int log(z - y) dmu(y) - (same at the base point)``, so
``F'(z) = int dmu(y) / (z - y) = C(z)``.  ``F`` sends the upper half-plane
onto a domain inside the strip ``0 < Im w < pi * |mu|`` that is closed under
rightward horizontal rays; on the line ``Im F(x) = pi * mu((x, inf))``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import _quad
from .constructions import HarmonicMeasureSpec, greens_function
from .transforms import cauchy, cauchy_pv, log_potential


def _require_line_positive(mu):
    if not mu.on_real_line or not mu.is_positive:
        raise ValueError("needs a positive measure on the real line")


def _support_intervals(mu):
    out = []
    for _, comp in mu.components:
        if comp.kind == "interval":
            out.append((comp.a, comp.b))
        else:
            x = comp.location.real
            out.append((x, x))
    return sorted(out)


def base_point(mu):
    """Rightmost point of the support; ``F`` vanishes there."""
    return max(b for _, b in _support_intervals(mu))


def _reference(mu, b, n):
    """Potential at the base point; an atom there moves it one hull length right."""
    ref = log_potential(mu, b, n)
    if not np.isfinite(ref):
        sup = _support_intervals(mu)
        ref = log_potential(mu, b + max(sup[-1][1] - sup[0][0], 1.0), n)
    return ref


def conformal_F(mu, z, base=None, path=None, n=64, panel_order=16):
    """``F(z)`` in the closed upper half-plane.

    Without ``path`` the value is the difference of logarithmic potentials.
    With ``path`` (waypoints starting at a point of the open upper half-plane)
    ``F'`` is integrated along the polyline from ``F(path[0])``.
    """
    _require_line_positive(mu)
    b = base_point(mu) if base is None else base
    z = complex(z)
    if z.imag < 0:
        raise ValueError("z must lie in the closed upper half-plane")
    if path is None:
        return log_potential(mu, z, n) - _reference(mu, b, n)
    pts = [complex(p) for p in path] + [z]
    if pts[0].imag <= 0:
        raise ValueError("path must start in the open upper half-plane")
    # only the final point may sit on the line, so no segment can cross the support
    if any(p.imag <= 0 for p in pts[:-1]):
        raise ValueError("path crosses the support or leaves the upper half-plane")
    val = log_potential(mu, pts[0], n) - _reference(mu, b, n)
    for p, q in zip(pts, pts[1:]):
        val += _segment_integral(mu, p, q, n, panel_order)
    return val


def _segment_integral(mu, p, q, n, order):
    """``int_p^q F'(w) dw`` with panels graded toward the end nearest the support."""
    L = abs(q - p)
    if L == 0:
        return 0j
    dq, dp = mu.distance(q), mu.distance(p)
    foci = []
    if dq < 0.5 * L:
        foci.append((1.0, dq / L))
    if dp < 0.5 * L:
        foci.append((0.0, dp / L))
    if foci:
        s, w = _quad.segment_rule(0.0, 1.0, 0.0, 0.0, foci, order, order)
    else:
        s, w = _quad.gauss_legendre(max(order, 24), 0.0, 1.0)
    total = 0j
    for si, wi in zip(s, w):
        total += wi * cauchy(mu, p + si * (q - p), n)
    return total * (q - p)


def default_grid(mu, n=2001, pad=0.5):
    """Grid on ``[min - pad*L, max + pad*L]`` clustered at every support endpoint."""
    sup = _support_intervals(mu)
    lo, hi = sup[0][0], sup[-1][1]
    L = max(hi - lo, 1e-12)
    ends = sorted({e for ab in sup for e in ab})
    # Chebyshev-like clustering inside each piece between consecutive breakpoints
    br = [lo - pad * L] + ends + [hi + pad * L]
    pieces = [(a, b) for a, b in zip(br, br[1:]) if b > a]
    m = max(4, n // len(pieces))
    xs = []
    for a, b in pieces:
        th = np.linspace(0, np.pi, m)
        xs.append(0.5 * (a + b) - 0.5 * (b - a) * np.cos(th))
    x = np.unique(np.concatenate(xs))
    # piece ends come out of the cosine formula with rounding; keep one copy
    keep = np.concatenate([[True], np.diff(x) > 1e-12 * L])
    return x[keep]


def boundary_trace(mu, x_grid=None, n=64):
    """``F(x)`` on a real grid; returns ``(x, F, flagged)``.

    Points where ``F`` is not finite (atoms) are flagged and filled by
    linear interpolation.
    """
    _require_line_positive(mu)
    x = default_grid(mu) if x_grid is None else np.asarray(x_grid, float)
    b = base_point(mu)
    ref = _reference(mu, b, n)
    F = np.array([log_potential(mu, xi, n) - ref for xi in x])
    bad = ~np.isfinite(F)
    if np.any(bad):
        good = ~bad
        F[bad] = (np.interp(x[bad], x[good], F[good].real) + 1j * np.interp(x[bad], x[good], F[good].imag))
    return x, F, bad


def boundary_derivative(mu, x, n=64):
    """Boundary values ``F'(x + i0) = pv C(x) - i pi g(x)``, ``g`` the density of ``mu``."""
    out = np.empty(len(x), dtype=complex)
    for i, xi in enumerate(x):
        g = 0.0
        for k, comp in mu.components:
            if comp.kind == "interval":
                g += (k * comp.density(np.array([xi]))[0]).real
        try:
            pv = cauchy_pv(mu, xi, ladder=False, n=n).value
        except ValueError:
            out[i] = np.nan
            continue
        out[i] = pv - 1j * math.pi * g
    return out


def classify(dF, tol_angle=1e-3):
    """``'V'``, ``'H'`` or ``'N'`` per derivative value."""
    mag = np.abs(dF)
    cls = np.full(len(dF), "N")
    cls[np.abs(dF.real) < tol_angle * mag] = "V"
    cls[np.abs(dF.imag) < tol_angle * mag] = "H"
    cls[~np.isfinite(mag)] = "N"
    return cls


def _midpoints(x):
    return 0.5 * (x[1:] + x[:-1])


def vh_classify(mu, x_grid=None, tol_angle=1e-3, n=64):
    """Arc-length weighted fractions of vertical / horizontal / neither boundary pieces."""
    x = default_grid(mu) if x_grid is None else np.asarray(x_grid, float)
    xm = _midpoints(x)
    dF = boundary_derivative(mu, xm, n)
    cls = classify(dF, tol_angle)
    ds = np.abs(dF) * np.diff(x)
    ds = np.where(np.isfinite(ds), ds, 0.0)
    total = ds.sum()
    fr = {c: float(ds[cls == c].sum() / total) if total > 0 else 0.0 for c in "VHN"}
    return {"vertical": fr["V"], "horizontal": fr["H"], "neither": fr["N"]}, xm, dF, cls


@dataclass
class CombCheck:
    comb_like: bool
    violations: list = field(default_factory=list)


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def _crossings(w, eps, max_report):
    """Proper crossings between non-adjacent segments of a polyline.

    Orientations within ``eps`` times the segment lengths count as
    collinear, so a slot traced out and back is not a crossing.
    """
    p, q = w[:-1], w[1:]
    d = q - p
    ln = np.abs(d)
    out = []

    def sign(x, scale):
        return np.where(np.abs(x) <= eps * scale, 0, np.sign(x))

    for i in range(len(d) - 2):
        j = np.arange(i + 2, len(d))
        scale = ln[i] + ln[j]
        s1 = sign(_cross(d[i], p[j] - p[i]), scale) * sign(_cross(d[i], q[j] - p[i]), scale)
        s2 = sign(_cross(d[j], p[i] - p[j]), scale) * sign(_cross(d[j], q[i] - p[j]), scale)
        for k in j[(s1 < 0) & (s2 < 0)]:
            out.append(("crossing", i, int(k)))
            if len(out) >= max_report:
                return out
    return out


def comb_check(trace, tol=1e-9, max_report=50) -> CombCheck:
    """Rightward ray test from every vertex of a polyline trace.

    A ray violation ``("ray", i, j)`` is segment ``j`` crossing strictly to
    the right of vertex ``i`` at that vertex's height (``j`` may also be a
    vertex the trace passes through).  Horizontal pieces at the ray's own
    height are collinear with it and do not count.  A self-intersecting
    trace is reported as ``("crossing", i, j)`` for segments ``i`` and ``j``.
    """
    w = np.asarray(trace, dtype=complex)
    w = w[np.isfinite(w)]
    m = len(w)
    scale = max(float(np.max(np.abs(w))), 1.0) if m else 1.0
    eps = tol * scale
    p, q = w[:-1], w[1:]
    ylo, yhi = np.minimum(p.imag, q.imag), np.maximum(p.imag, q.imag)
    viol = []
    for i in range(m):
        h, x0 = w[i].imag, w[i].real
        cross = (ylo < h - eps) & (yhi > h + eps)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (h - p.imag) / (q.imag - p.imag)
            xc = p.real + s * (q.real - p.real)
        hit = cross & (xc > x0 + eps)
        seg_idx = np.arange(m - 1)
        hit &= (seg_idx != i) & (seg_idx != i - 1)
        # the trace passing through a vertex lying on the ray
        on = (np.abs(w.imag - h) <= eps) & (w.real > x0 + eps)
        on[i] = False
        for k in np.nonzero(on)[0]:
            if 0 < k < m - 1:
                a, c = w[k - 1].imag - h, w[k + 1].imag - h
                if (a < -eps and c > eps) or (a > eps and c < -eps):
                    viol.append(("ray", i, int(k)))
        for j in np.nonzero(hit)[0]:
            viol.append(("ray", i, int(j)))
        if len(viol) >= max_report:
            break
    if len(viol) < max_report:
        viol += _crossings(w, tol, max_report - len(viol))
    return CombCheck(not viol, viol[:max_report])


@dataclass
class CombReport:
    x: np.ndarray
    trace: np.ndarray
    derivative: np.ndarray
    classes: np.ndarray
    comb_like: bool
    violations: list
    vh_fractions: dict
    rect_length: float
    rect_length_refined: float
    strip_height: float
    flagged: int = 0

    @property
    def refinement_ratio(self):
        return self.rect_length_refined / self.rect_length if self.rect_length else math.nan

    @property
    def rectifiability(self):
        return "rectifiable at resolution" if abs(self.refinement_ratio - 1) < 0.05 else "non-rectifiable trend"

    def summary(self):
        return {"comb_like": self.comb_like, "violations": len(self.violations),
                "vh_fractions": self.vh_fractions, "rect_length": self.rect_length,
                "refinement_ratio": self.refinement_ratio, "rectifiability": self.rectifiability,
                "strip_height": self.strip_height, "flagged": self.flagged}


def trace_length(F):
    F = F[np.isfinite(F)]
    return float(np.sum(np.abs(np.diff(F))))


def comb_report(mu, n_grid=2001, pad=0.5, tol_angle=1e-3, n=64) -> CombReport:
    x = default_grid(mu, n_grid, pad)
    x, F, bad = boundary_trace(mu, x, n)
    fr, xm, dF, cls = vh_classify(mu, x, tol_angle, n)
    x2 = default_grid(mu, 2 * n_grid, pad)
    _, F2, _ = boundary_trace(mu, x2, n)
    chk = comb_check(F)
    height = float(np.nanmax(F.imag) - np.nanmin(F.imag))
    return CombReport(x, F, dF, cls, chk.comb_like, chk.violations, fr, trace_length(F), trace_length(F2),
                      height, int(bad.sum()))


def write_trace_csv(report: CombReport, path):
    """Columns ``x, ReF, ImF, ReF', ImF', class``; derivatives at interval midpoints are
    attached to the left grid point."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "ReF", "ImF", "ReF'", "ImF'", "class"])
        for i, (xi, Fi) in enumerate(zip(report.x, report.trace)):
            if i < len(report.derivative):
                d, c = report.derivative[i], report.classes[i]
            else:
                d, c = complex(math.nan, math.nan), ""
            wr.writerow([repr(float(xi)), repr(float(Fi.real)), repr(float(Fi.imag)),
                         repr(float(d.real)), repr(float(d.imag)), c])


# ---------------------------------------------------------------------------
# Widom sums


@dataclass
class WidomReport:
    critical_points: list
    green_values: list

    @property
    def partial_sum(self):
        return float(sum(self.green_values))

    @property
    def partial_sums(self):
        return np.cumsum(self.green_values)


def _gap_critical_point(mu, lo, hi, n):
    """Zero of ``x -> C(x)`` (real on gaps) inside ``(lo, hi)``."""
    f = lambda x: cauchy(mu, x, n).real  # noqa: E731
    w = hi - lo
    for k in range(1, 40):
        d = w * 2.0 ** (-k)
        a, b = lo + d, hi - d
        fa, fb = f(a), f(b)
        if fa * fb < 0:
            return optimize.brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if fa == 0:
            return a
        if fb == 0:
            return b
    raise RuntimeError(f"no sign change of the Cauchy transform on gap ({lo}, {hi})")


def widom_sum(spec: HarmonicMeasureSpec, n=64) -> WidomReport:
    crit, vals = [], []
    for (a1, b1), (a2, b2) in zip(spec.intervals, spec.intervals[1:]):
        c = _gap_critical_point(spec.measure, b1, a2, n)
        crit.append(float(c))
        vals.append(greens_function(spec, c, n).value)
    return WidomReport(crit, vals)


def cantor_intervals(depth, ratio=1.0 / 3.0, a=0.0, b=1.0):
    """Intervals of the ``depth``-th stage of a middle-``ratio`` Cantor construction."""
    iv = [(a, b)]
    for _ in range(depth):
        nxt = []
        for lo, hi in iv:
            keep = 0.5 * (1 - ratio) * (hi - lo)
            nxt += [(lo, lo + keep), (hi - keep, hi)]
        iv = nxt
    return iv
