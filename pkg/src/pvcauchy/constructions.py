"""Named measures, harmonic measure of interval unions and Green's functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate

from . import _quad
from .measure_model import (
    ComplexMeasure,
    Curve,
    CurveDensity,
    IntervalDensity,
    MeasureError,
    make_measure,
)
from .transforms import cauchy, log_potential


def _const(c):
    return lambda t: np.full(np.shape(t), c, dtype=float)


# ---------------------------------------------------------------------------
# densities on intervals


def arcsine(a=-1.0, b=1.0) -> ComplexMeasure:
    """Equilibrium (arcsine) distribution ``1 / (pi sqrt((x-a)(b-x)))`` on ``[a, b]``."""
    if not a < b:
        raise MeasureError("arcsine needs a < b")
    comp = IntervalDensity(a, b, _const(1 / math.pi), -0.5, -0.5, "arcsine", {"a": float(a), "b": float(b)})
    return make_measure([comp])


def semicircle() -> ComplexMeasure:
    """``(1/pi) sqrt(1 - x^2) dx`` on ``[-1, 1]`` (total mass 1/2)."""
    return make_measure([IntervalDensity(-1.0, 1.0, _const(1 / math.pi), 0.5, 0.5, "semicircle")])


def uniform(a=-1.0, b=1.0, mass=1.0) -> ComplexMeasure:
    if not a < b:
        raise MeasureError("uniform needs a < b")
    return make_measure([IntervalDensity(a, b, _const(mass / (b - a)), 0.0, 0.0, "uniform",
                                         {"mass": float(mass)})])


def jacobi(a, b, alpha, beta, coeffs=(1.0,)) -> ComplexMeasure:
    """``P(x) (x-a)^alpha (b-x)^beta`` with ``P`` given by power-series coefficients."""
    coeffs = np.asarray(coeffs, dtype=complex)
    f = lambda t: np.polynomial.polynomial.polyval(np.asarray(t, float), coeffs)  # noqa: E731
    return make_measure([IntervalDensity(a, b, f, alpha, beta, "jacobi",
                                         {"alpha": alpha, "beta": beta, "coeffs": coeffs.tolist()})])


def tabulated(a, b, xs, values, alpha=0.0, beta=0.0) -> ComplexMeasure:
    """Cubic-spline interpolant of samples, times the endpoint factors."""
    xs = np.asarray(xs, float)
    values = np.asarray(values, complex)
    if xs[0] < a or xs[-1] > b:
        raise MeasureError("tabulated samples must lie in [a, b]")
    sr = interpolate.CubicSpline(xs, values.real)
    si = interpolate.CubicSpline(xs, values.imag)
    f = lambda t: sr(t) + 1j * si(t)  # noqa: E731
    return make_measure([IntervalDensity(a, b, f, alpha, beta, "tabulated", {"n_samples": len(xs)})])


# ---------------------------------------------------------------------------
# curve measures


def circle_unit_current(normalization=1j / math.pi) -> ComplexMeasure:
    """``normalization * dz`` on the unit circle (counter-clockwise).

    The default makes the transform 2 inside, 0 outside and 1 on the circle.
    """
    normalization = complex(normalization)
    if normalization == 0:
        raise MeasureError("normalization must be nonzero")
    comp = CurveDensity(Curve.circle(0.0, 1.0), lambda z: np.ones(np.shape(z), complex), 1, "one")
    return make_measure([(normalization, comp)])


def sqrt_branch(z):
    """``sqrt(z^2 - 1)`` with its cut on ``[-1, 1]`` and ``~ z`` at infinity."""
    z = np.asarray(z, dtype=complex)
    return np.sqrt(z - 1) * np.sqrt(z + 1)


def r_density(z):
    """``2 sqrt(z^2 - 1)``, analytic off ``[-1, 1]``."""
    return 2.0 * sqrt_branch(z)


def _ccw_orientation(curve):
    t = np.arange(1024) * (2 * np.pi / 1024)
    area = 0.5 * np.sum((np.conj(curve(t)) * curve.deriv(t)).imag)
    return 1 if area > 0 else -1


def winding_number(curve, z, m=2048):
    t = np.arange(m + 1) * (2 * np.pi / m)
    ang = np.unwrap(np.angle(curve(t) - z))
    return int(round((ang[-1] - ang[0]) / (2 * np.pi)))


@dataclass
class CurveExample:
    """Curve-supported example with its calibrated coefficients and region checks."""

    measure: ComplexMeasure
    curve_coef: complex
    mu0_coef: complex
    probes: dict
    residuals: dict = field(default_factory=dict)

    @property
    def max_residual(self):
        return max(self.residuals.values()) if self.residuals else 0.0


def _region(outer, disks, z):
    if any(abs(z - c) < r for c, r in disks):
        return "disk"
    return "between" if winding_number(outer, z) != 0 else "outside"


def degiorgi_example(outer=None, inner_disks=None, n=64, verify_points=4) -> CurveExample:
    """``c * (R dz|outer - sum R dz|circles) + d * mu0`` with ``R = 2 sqrt(z^2 - 1)``.

    ``c`` and ``d`` are calibrated so that the Cauchy transform equals
    ``z - sqrt(z^2 - 1)`` outside the outer curve and ``z + sqrt(z^2 - 1)``
    between the outer curve and the disks, then the remaining regions are
    checked (including the inside of every disk, where the target is again
    ``z - sqrt(z^2 - 1)``).
    """
    outer = outer if outer is not None else Curve.circle(0.0, 3.0)
    if inner_disks is None:
        inner_disks = [(2.0j, 0.4), (-2.0j, 0.4), (2.0, 0.3)]
    disks = [(complex(c), float(r)) for c, r in inner_disks]
    # geometry checks
    for x in np.linspace(-1, 1, 9):
        if winding_number(outer, x) == 0:
            raise MeasureError("[-1, 1] must lie inside the outer curve")
    for i, (c, r) in enumerate(disks):
        if abs(c.imag) <= r and -1 - r <= c.real <= 1 + r and min(abs(c - x) for x in np.linspace(-1, 1, 2001)) <= r:
            raise MeasureError("inner disks must avoid [-1, 1]")
        if any(winding_number(outer, c + r * np.exp(1j * th)) == 0 for th in np.linspace(0, 2 * np.pi, 16)):
            raise MeasureError("inner disks must lie inside the outer curve")
        for c2, r2 in disks[i + 1:]:
            if abs(c - c2) <= r + r2:
                raise MeasureError("inner disks must be disjoint")
    orient = _ccw_orientation(outer)
    comps = [(1.0, CurveDensity(outer, r_density, orient, "R"))]
    comps += [(-1.0, CurveDensity(Curve.circle(c, r), r_density, 1, "R")) for c, r in disks]
    curves = make_measure(comps)
    mu0 = semicircle()

    # probe points: one outside, the rest chosen by region from a grid
    x0, x1, y0, y1 = curves.bbox()
    span = max(x1 - x0, y1 - y0)
    probes = {"outside": [complex(x1 + 0.5 * span, 0.3 * span)]}
    cand = [complex(x, y) for x in np.linspace(x0, x1, 41) for y in np.linspace(y0, y1, 41)]
    margin = lambda z: min(curves.distance(z), mu0.distance(z))  # noqa: E731
    by_region = {"between": [], "disk": []}
    for z in cand:
        reg = _region(outer, disks, z)
        if reg in by_region:
            by_region[reg].append((margin(z), z))
    for reg, items in by_region.items():
        items.sort(key=lambda v: -v[0])
        probes[reg] = [z for _, z in items[:verify_points]]
    for c, r in disks:
        probes.setdefault("disk", []).append(c)

    def targets(reg, z):
        s = complex(sqrt_branch(z))
        return z + s if reg == "between" else z - s

    p_out, p_in = probes["outside"][0], probes["between"][0]
    mat = np.array([[cauchy(curves, p, n), cauchy(mu0, p, n)] for p in (p_out, p_in)])
    rhs = np.array([targets("outside", p_out), targets("between", p_in)])
    c_coef, d_coef = np.linalg.solve(mat, rhs)
    mu = c_coef * curves + d_coef * mu0
    residuals = {}
    for reg, pts in probes.items():
        residuals[reg] = float(max(abs(cauchy(mu, z, n) - targets(reg, z)) for z in pts))
    return CurveExample(mu, complex(c_coef), complex(d_coef), probes, residuals)


# ---------------------------------------------------------------------------
# harmonic measure of a finite union of intervals


class GapRootError(RuntimeError):
    pass


@dataclass
class HarmonicMeasureSpec:
    intervals: list
    gap_roots: list
    robin_constant: float
    measure: ComplexMeasure = field(repr=False)
    raw_mass: float = 1.0

    @property
    def density(self):
        return [comp for _, comp in self.measure.components]

    def density_at(self, x):
        x = np.asarray(x, float)
        out = np.zeros(x.shape)
        for comp in self.density:
            out = out + comp.density(x).real
        return out

    def sidecar(self):
        return {"intervals": [list(map(float, iv)) for iv in self.intervals],
                "gap_roots": [float(c) for c in self.gap_roots],
                "robin_constant": float(self.robin_constant)}

    def to_spec_dict(self):
        """Measure spec file content (one interval record per component)."""
        comps = []
        for j, (k, comp) in enumerate(self.measure.components):
            rec = {"coef": [k.real, k.imag], "kind": "interval", "a": comp.a, "b": comp.b, "family": comp.family}
            if comp.family == "harmonic":
                rec["params"] = {"intervals": [list(map(float, iv)) for iv in self.intervals], "index": j}
            else:
                rec["params"] = {}
            comps.append(rec)
        return {"components": comps}


def _check_intervals(intervals):
    iv = [(float(a), float(b)) for a, b in intervals]
    if not iv:
        raise MeasureError("need at least one interval")
    for a, b in iv:
        if not b > a:
            raise MeasureError(f"interval [{a}, {b}] has nonpositive length")
    for (a1, b1), (a2, b2) in zip(iv, iv[1:]):
        if not a2 > b1:
            raise MeasureError("intervals must be disjoint and ordered")
    return iv


def _gap_rule(ends, k, n=64):
    """Nodes and weights for ``int_gap F(t) / sqrt(|Q(t)|) dt`` on gap ``k``."""
    lo, hi = ends[2 * k + 1], ends[2 * k + 2]
    others = [e for i, e in enumerate(ends) if i not in (2 * k + 1, 2 * k + 2)]
    order = n
    for e in others:
        order = max(order, _quad.order_for(e, lo, hi, n, tol=1e-17))
    t, w = _quad.gauss_jacobi(order, -0.5, -0.5, lo, hi)
    rest = np.ones_like(t)
    for e in others:
        rest = rest * np.abs(t - e)
    return t, w / np.sqrt(rest)


def _interval_factor(ends, j):
    others = [e for i, e in enumerate(ends) if i not in (2 * j, 2 * j + 1)]
    others = np.asarray(others)

    def rest(t):
        t = np.asarray(t, float)
        return np.prod(np.abs(t[..., None] - others), axis=-1) if len(others) else np.ones_like(t)

    return rest


def solve_gap_roots(intervals, n=64):
    """Roots ``c_k`` (one per gap) of the monic ``p`` with vanishing gap integrals.

    The gap conditions are linear in the coefficients of ``p``; they are
    solved in a Chebyshev basis on the hull rescaled to ``[-1, 1]``.
    """
    iv = _check_intervals(intervals)
    m = len(iv)
    if m == 1:
        return []
    ends = [e for ab in iv for e in ab]
    lo, hi = ends[0], ends[-1]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    cheb = np.polynomial.chebyshev
    # p(s) = T_{m-1}(s) + sum_{j < m-1} q_j T_j(s), s the rescaled variable
    A = np.zeros((m - 1, m - 1))
    rhs = np.zeros(m - 1)
    for k in range(m - 1):
        t, w = _gap_rule(ends, k, n)
        s = (t - mid) / half
        for j in range(m - 1):
            A[k, j] = np.sum(w * cheb.chebval(s, np.eye(m)[j]))
        rhs[k] = -np.sum(w * cheb.chebval(s, np.eye(m)[m - 1]))
    q = np.linalg.solve(A, rhs)
    coeffs = np.append(q, 1.0)
    roots = cheb.chebroots(coeffs)
    if np.any(np.abs(np.imag(roots)) > 1e-9):
        raise GapRootError(f"complex gap roots {roots}")
    roots = np.sort(np.real(roots)) * half + mid
    for k, c in enumerate(roots):
        if not ends[2 * k + 1] < c < ends[2 * k + 2]:
            raise GapRootError(f"root {c} not inside gap ({ends[2 * k + 1]}, {ends[2 * k + 2]})")
    return [float(c) for c in roots]


def harmonic_measure(intervals, n=64) -> HarmonicMeasureSpec:
    """Harmonic measure at infinity of a finite union of disjoint closed intervals."""
    iv = _check_intervals(intervals)
    if len(iv) == 1:
        mu = arcsine(*iv[0])
        spec = HarmonicMeasureSpec(iv, [], 0.0, mu)
        spec.robin_constant = _robin_direct(spec)
        return spec
    roots = solve_gap_roots(iv, n)
    ends = [e for ab in iv for e in ab]
    params = {"intervals": [list(ab) for ab in iv], "gap_roots": roots}
    comps = []
    raw = 0.0
    for j, (a, b) in enumerate(iv):
        rest = _interval_factor(ends, j)
        f = (lambda rest: lambda t: np.abs(np.prod(np.asarray(t, float)[..., None] - np.asarray(roots), axis=-1))
             / (math.pi * np.sqrt(rest(t))))(rest)
        sing = tuple(e for i, e in enumerate(ends) if i not in (2 * j, 2 * j + 1))
        comp = IntervalDensity(a, b, f, -0.5, -0.5, "harmonic", dict(params, index=j), sing)
        raw += comp.mass(n).real
        comps.append(comp)
    norm = 1.0 / raw
    mu = make_measure([(norm, c) for c in comps])
    spec = HarmonicMeasureSpec(iv, roots, 0.0, mu, raw)
    spec.robin_constant = _robin_direct(spec)
    return spec


def _anchor(spec):
    a, b = spec.intervals[-1]
    return a + (b - a) / 3.0


def _robin_direct(spec, n=64):
    return -log_potential(spec.measure, _anchor(spec), n).real


@dataclass
class GreenEval:
    point: complex
    value: float
    gradient: np.ndarray


def greens_function(spec: HarmonicMeasureSpec, z, n=64) -> GreenEval:
    """Green's function with pole at infinity, ``int log|z-y| dw(y) + Robin constant``."""
    z = complex(z)
    val = log_potential(spec.measure, z, n).real + spec.robin_constant
    d = cauchy(spec.measure, z, n)  # derivative of the complex potential
    return GreenEval(z, float(val), np.array([d.real, -d.imag]))


def robin_constant_fit(spec, radii=(1e3, 1e4, 1e5, 1e6), n=64):
    """Robin constant from ``G(R) - log R`` at large ``R``, extrapolated in ``1/R``."""
    c = complex(spec.measure.center)
    radii = np.asarray(radii, float)
    vals = np.array([greens_function(spec, c + r, n).value - math.log(r) for r in radii])
    # G(R) - log R = C + a1/R + a2/R^2 + ...
    A = np.vstack([np.ones_like(radii), 1 / radii, 1 / radii ** 2]).T
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    return float(coef[0])


# ---------------------------------------------------------------------------
# homogeneity


def _measure_in(iv, lo, hi):
    return sum(max(0.0, min(b, hi) - max(a, lo)) for a, b in iv)


def homogeneity_margin(intervals, delta, r):
    """``min |E ∩ (x-h, x+h)| / h`` over ``x`` in ``E`` and ``0 < h < r``.

    Both the covered length and ``delta * h`` are piecewise linear in
    ``(x, h)``, so the minimum is attained at a vertex of the arrangement;
    every vertex is enumerated.
    """
    iv = _check_intervals(intervals)
    ends = sorted(e for ab in iv for e in ab)
    inE = lambda x: any(a - 1e-15 <= x <= b + 1e-15 for a, b in iv)  # noqa: E731
    cands = []
    for e in ends:
        cands += [(e, r)] + [(e, abs(f - e)) for f in ends if f != e]
        cands += [(e - r, r), (e + r, r)]
    for i, e in enumerate(ends):
        for f in ends[i + 1:]:
            cands.append((0.5 * (e + f), 0.5 * (f - e)))
    ratios = []
    for x, h in cands:
        if 0 < h <= r and inE(x):
            ratios.append(_measure_in(iv, x - h, x + h) / h)
    # h -> 0 at an endpoint gives ratio 1
    ratios.append(1.0)
    return float(min(ratios))


def homogeneity_check(intervals, delta, r, tol=1e-12):
    if not 0 < delta <= 2 or r <= 0:
        raise ValueError("need 0 < delta <= 2 and r > 0")
    return homogeneity_margin(intervals, delta, r) >= delta - tol
