"""Finite complex measures in the plane.

A :class:`ComplexMeasure` is a finite list of ``(coefficient, component)``
pairs.  Components are point masses, weighted densities on real intervals,
densities along closed curves and densities on planar regions.  Every
component knows how to produce quadrature rules, optionally adapted to a
near-singular focus point and with a disk of radius ``eps`` around the focus
removed.  All the integral operators in :mod:`pvcauchy.transforms` are built
on those rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import interpolate, optimize

from . import _quad

TWO_PI = 2.0 * math.pi


class MeasureError(ValueError):
    """Invalid measure data."""


def _as_complex(p):
    if isinstance(p, (list, tuple, np.ndarray)):
        if len(p) != 2:
            raise MeasureError(f"expected a 2-vector, got {p!r}")
        return complex(float(p[0]), float(p[1]))
    return complex(p)


# ---------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class Atom:
    location: complex
    weight: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "location", complex(self.location))
        object.__setattr__(self, "weight", complex(self.weight))
        if not np.isfinite(self.weight) or not np.isfinite(self.location):
            raise MeasureError("atom weight and location must be finite")

    kind = "atom"

    def mass(self):
        return self.weight

    def variation(self):
        return abs(self.weight)

    def bbox(self):
        z = self.location
        return z.real, z.real, z.imag, z.imag

    def distance(self, z):
        return abs(complex(z) - self.location)

    def nodes(self, n=None, graded=False):
        return np.array([self.location]), np.array([self.weight])

    def rule(self, focus, eps=0.0, n=64, delta=None):
        if abs(self.location - complex(focus)) > eps:
            return np.array([self.location]), np.array([self.weight])
        return np.empty(0, complex), np.empty(0, complex)


@dataclass(frozen=True, eq=False)
class IntervalDensity:
    """Density ``f(t) * (t-a)**alpha * (b-t)**beta`` on ``[a, b]``.

    ``f`` must be smooth on the closed interval; the algebraic endpoint
    factors are handled exactly by Gauss-Jacobi rules.  ``singularities``
    optionally lists points off ``[a, b]`` where ``f`` stops being analytic;
    rules raise their order and grade toward them.
    """

    a: float
    b: float
    f: Callable = field(repr=False)
    alpha: float = 0.0
    beta: float = 0.0
    family: str = "custom"
    params: dict = field(default_factory=dict)
    singularities: tuple = ()

    kind = "interval"

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not b > a:
            raise MeasureError(f"interval needs a < b, got [{a}, {b}]")
        if self.alpha <= -1 or self.beta <= -1:
            raise MeasureError("endpoint exponents must be > -1 for integrability")

    # -- pointwise data
    def weight(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.clip(t - self.a, 0, None) ** self.alpha * np.clip(self.b - t, 0, None) ** self.beta

    def density(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > self.a) & (t < self.b)
        out = np.zeros(t.shape, dtype=complex)
        if np.any(inside):
            out[inside] = self.f(t[inside]) * self.weight(t[inside])
        return out

    def order(self, n, c=None, d=None):
        """Gauss order on ``[c, d]`` that resolves ``f`` given its singularities."""
        c = self.a if c is None else c
        d = self.b if d is None else d
        for s in self.singularities:
            n = max(n, _quad.order_for(complex(s), c, d, n, tol=1e-17))
        return n

    def _sing_foci(self, c, d):
        out = []
        for s in self.singularities:
            s = complex(s)
            p = min(max(s.real, c), d)
            out.append((p, abs(s - p)))
        return out

    def mass(self, n=64):
        t, w = self.nodes(n)
        return complex(np.sum(w))

    def variation(self, n=64):
        t, w = _quad.gauss_jacobi(self.order(n), self.alpha, self.beta, self.a, self.b)
        return float(np.sum(w * np.abs(self.f(t))))

    def bbox(self):
        return self.a, self.b, 0.0, 0.0

    def distance(self, z):
        z = complex(z)
        x = min(max(z.real, self.a), self.b)
        return abs(z - x)

    def contains(self, z, tol=0.0):
        z = complex(z)
        return abs(z.imag) <= tol and self.a <= z.real <= self.b

    def restrict(self, lo, hi):
        """The same density restricted to ``[lo, hi]`` (clipped to the support)."""
        lo, hi = max(lo, self.a), min(hi, self.b)
        if not hi > lo:
            return None
        a, b, f, al, be = self.a, self.b, self.f, self.alpha, self.beta
        left = al if lo == a else 0.0
        right = be if hi == b else 0.0

        def g(t):
            v = np.asarray(f(t), dtype=complex)
            if lo != a:
                v = v * (t - a) ** al
            if hi != b:
                v = v * (b - t) ** be
            return v

        return IntervalDensity(lo, hi, g, left, right, family="restricted", singularities=self.singularities)

    # -- quadrature
    def nodes(self, n=64, graded=False):
        if not graded:
            t, w = _quad.gauss_jacobi(self.order(n), self.alpha, self.beta, self.a, self.b)
            return t.astype(complex), w * self.f(t)
        tiny = 1e-12 * (self.b - self.a)
        br = _quad.graded_breakpoints(self.a, self.b, [(self.a, tiny), (self.b, tiny)] + self._sing_foci(self.a, self.b))
        ts, ws = [], []
        for i in range(len(br) - 1):
            piece = IntervalDensity.restrict(self, br[i], br[i + 1])
            t, w = _quad.gauss_jacobi(self.order(n, piece.a, piece.b), piece.alpha, piece.beta, piece.a, piece.b)
            ts.append(t)
            ws.append(w * piece.f(t))
        return np.concatenate(ts).astype(complex), np.concatenate(ws)

    def rule_diff(self, focus, eps=0.0, n=64, delta=None):
        """Differences ``t - focus`` and weights, excising ``|t - focus| <= eps``.

        Each piece is integrated in a coordinate centred at the point of the
        piece closest to the focus, so graded panels can shrink far below the
        ulp of the absolute coordinate.
        """
        z = complex(focus)
        # pieces carry the offset of their nearest point from Re(focus) when it
        # is an excision edge, which is known exactly as -r or +r
        pieces = [(self.a, self.b, None)]
        if eps > 0 and eps > abs(z.imag):
            r = math.sqrt(eps * eps - z.imag * z.imag)
            lo, hi = z.real - r, z.real + r
            pieces = []
            if lo > self.a:
                pieces.append((self.a, min(lo, self.b), -r if lo <= self.b else None))
            if hi < self.b:
                pieces.append((max(hi, self.a), self.b, r if hi >= self.a else None))
        ds, ws = [], []
        for c, d, edge in pieces:
            if not d > c:
                continue
            p = min(max(z.real, c), d)
            off = edge if edge is not None else p - z.real
            dist = abs(complex(off, -z.imag))
            if delta is not None:
                dist = math.hypot(dist, delta)
            left = self.alpha if c == self.a else 0.0
            right = self.beta if d == self.b else 0.0
            foci = [(0.0, dist)] + [(q - p, e) for q, e in self._sing_foci(c, d)]
            u, w = _quad.segment_rule(c - p, d - p, left, right, foci, n)
            if c != self.a and self.alpha != 0.0:
                w = w * (u + (p - self.a)) ** self.alpha
            if d != self.b and self.beta != 0.0:
                w = w * ((self.b - p) - u) ** self.beta
            ds.append((u + off) - 1j * z.imag)
            ws.append(w * self.f(p + u))
        if not ds:
            return np.empty(0, complex), np.empty(0, complex)
        return np.concatenate(ds), np.concatenate(ws)

    def rule(self, focus, eps=0.0, n=64, delta=None):
        d, w = self.rule_diff(focus, eps, n, delta)
        return d + complex(focus), w


# -- curves


@dataclass(frozen=True, eq=False)
class Curve:
    """Closed curve ``zeta(t) = sum_k c_k exp(i k t)``, ``t`` in ``[0, 2 pi)``."""

    coeffs: dict
    name: str = "trig"
    params: dict = field(default_factory=dict)

    @classmethod
    def circle(cls, center=0.0, radius=1.0):
        center = complex(center)
        if radius <= 0:
            raise MeasureError("circle radius must be positive")
        return cls({0: center, 1: complex(radius)}, "circle", {"center": center, "radius": float(radius)})

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for k, c in self.coeffs.items():
            out = out + c * np.exp(1j * k * t)
        return out

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for k, c in self.coeffs.items():
            if k:
                out = out + 1j * k * c * np.exp(1j * k * t)
        return out


def _segments_intersect(p):
    """Any proper intersection among the closed polyline ``p``."""
    a = p
    b = np.roll(p, -1)
    m = len(p)
    ax, ay, bx, by = a.real, a.imag, b.real, b.imag
    d1x, d1y = bx - ax, by - ay
    for i in range(m):
        j = np.arange(i + 2, m)
        if i == 0:
            j = j[j != m - 1]
        if len(j) == 0:
            continue
        ex, ey = ax[j] - ax[i], ay[j] - ay[i]
        den = d1x[i] * d1y[j] - d1y[i] * d1x[j]
        ok = np.abs(den) > 1e-300
        s = np.where(ok, (ex * d1y[j] - ey * d1x[j]) / np.where(ok, den, 1), -1)
        u = np.where(ok, (ex * d1y[i] - ey * d1x[i]) / np.where(ok, den, 1), -1)
        if np.any((s > 0) & (s < 1) & (u > 0) & (u < 1)):
            return True
    return False


@dataclass(frozen=True, eq=False)
class CurveDensity:
    """Measure ``orientation * density(zeta(t)) * zeta'(t) dt`` on a closed curve."""

    curve: Curve
    density: Callable = field(repr=False)
    orientation: int = 1
    family: str = "one"
    resolution: int = 256

    kind = "curve"

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise MeasureError("orientation must be +1 or -1")
        # arc-length table at 4x parameter resolution
        m = 4 * self.resolution
        t = np.linspace(0.0, TWO_PI, m, endpoint=False)
        pts = self.curve(t)
        speed = np.abs(self.curve.deriv(t))
        if np.min(speed) <= 1e-12 * np.max(speed):
            raise MeasureError("curve tangent vanishes")
        if _segments_intersect(pts[:: max(1, m // 256)]):
            raise MeasureError("curve is not simple at sample resolution")
        seg = np.abs(np.diff(np.append(pts, pts[0])))
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_pts", pts)
        object.__setattr__(self, "_arclen", np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def length(self):
        return float(self._arclen[-1])

    def bbox(self):
        p = self._pts
        return p.real.min(), p.real.max(), p.imag.min(), p.imag.max()

    def _phi(self, t):
        return np.asarray(self.density(self.curve(t)), dtype=complex) * np.ones(np.shape(t))

    def _nearest(self, z):
        d = np.abs(self._pts - z)
        m = len(d)
        h = TWO_PI / m
        i0 = int(np.argmin(d))
        res = optimize.minimize_scalar(lambda t: abs(complex(self.curve(t)) - z),
                                       bounds=(self._t[i0] - h, self._t[i0] + h), method="bounded",
                                       options={"xatol": 1e-14})
        return float(res.x), float(min(res.fun, d[i0]))

    def _local_minima(self, dist):
        """Local minima ``(u, dist(u))`` of a distance function on the shifted parameter."""
        u = self._t - math.pi
        d = dist(u)
        h = TWO_PI / len(u)
        i0 = int(np.argmin(d))
        res = optimize.minimize_scalar(lambda v: float(dist(np.array([v]))[0]),
                                       bounds=(u[i0] - h, u[i0] + h), method="bounded",
                                       options={"xatol": 1e-14})
        u_star, d_star = float(res.x), float(min(res.fun, d[i0]))
        out = [(u_star, d_star)]
        idx = np.nonzero((d <= np.roll(d, 1)) & (d <= np.roll(d, -1)))[0]
        for i in idx:
            if d[i] < 0.25 * self.length and abs((u[i] - u_star + math.pi) % TWO_PI - math.pi) > 4 * h:
                out.append((float(u[i]), float(d[i])))
        return out

    def distance(self, z):
        return self._nearest(complex(z))[1]

    def contains(self, z, tol=1e-12):
        return self.distance(z) <= tol * max(1.0, self.length)

    def mass(self, n=512):
        t, w = self.nodes(n)
        return complex(np.sum(w))

    def variation(self, n=512):
        t = np.arange(n) * TWO_PI / n
        return float(np.sum(np.abs(self._phi(t) * self.curve.deriv(t))) * TWO_PI / n)

    def nodes(self, n=256, graded=False):
        t = np.arange(n) * TWO_PI / n
        w = self.orientation * self._phi(t) * self.curve.deriv(t) * (TWO_PI / n)
        return self.curve(t), w

    def _offset(self, s, t0):
        """``zeta(t0 + s) - zeta(t0)`` without cancellation for small ``s``."""
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape, dtype=complex)
        for k, c in self.curve.coeffs.items():
            if k:
                out = out + c * np.exp(1j * k * t0) * np.expm1(1j * k * s)
        return out

    def _cut_points(self, dist, eps):
        """Parameters ``u`` in ``[-pi, pi)`` where ``dist(u) = eps``."""
        u = self._t - math.pi
        g = dist(u) - eps
        us = []
        for i in np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]:
            lo, hi = u[i], u[i + 1]
            fun = lambda v: float(dist(np.array([v]))[0]) - eps  # noqa: E731
            if fun(lo) == 0.0:
                us.append(lo)
                continue
            us.append(optimize.brentq(fun, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps))
        if np.sign(g[-1]) != np.sign(g[0]):
            # crossing between the last sample and -pi + 2 pi
            lo, hi = u[-1], math.pi
            fun = lambda v: float(dist(np.array([v]))[0]) - eps  # noqa: E731
            if np.sign(fun(lo)) != np.sign(fun(hi)):
                r = optimize.brentq(fun, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
                us.append(r if r < math.pi else -math.pi)
        return sorted(us)

    def _param_rule(self, t0, eps, n, delta, dist):
        """Rule in the shifted parameter ``u = t - t0``; ``dist(u)`` is the distance to the focus."""
        extra = 0.0 if delta is None else delta
        cuts = self._cut_points(dist, eps) if eps > 0 else []
        speed = lambda u: float(np.abs(self.curve.deriv(t0 + u)))  # noqa: E731
        empty = np.empty(0), np.empty(0, complex)
        if not cuts:
            if eps > 0 and np.all(dist(self._t) <= eps):
                return empty
            mins = self._local_minima(dist)
            u0 = mins[0][0]
            c, d = u0 - math.pi, u0 + math.pi
            foci = [(c + (um - c) % TWO_PI, math.hypot(dm, extra) / speed(um)) for um, dm in mins]
            return self._arc_rule(t0, c, d, foci, n)
        k = len(cuts)
        arcs = [(cuts[i], cuts[i + 1], True, True) for i in range(k - 1)]
        # the wrap-around arc is split at +-pi so both cut ends keep full precision
        if cuts[-1] < math.pi:
            arcs.append((cuts[-1], math.pi, True, False))
        if cuts[0] > -math.pi:
            arcs.append((-math.pi, cuts[0], False, True))
        h = 0.5 * math.hypot(eps, extra)
        us, weights = [], []
        for c, d, fc, fd in arcs:
            if not d > c:
                continue
            mid = 0.5 * (c + d)
            if float(dist(np.array([mid]))[0]) <= eps:
                continue
            foci = ([(c, h / speed(c))] if fc else []) + ([(d, h / speed(d))] if fd else [])
            u, w = self._arc_rule(t0, c, d, foci, n)
            us.append(u)
            weights.append(w)
        if not us:
            return empty
        return np.concatenate(us), np.concatenate(weights)

    def _arc_rule(self, t0, c, d, foci, n):
        u, w = _quad.segment_rule(c, d, 0.0, 0.0, foci, n)
        t = t0 + u
        return u, self.orientation * w * self._phi(t) * self.curve.deriv(t)

    def rule(self, focus, eps=0.0, n=64, delta=None):
        z = complex(focus)
        u, w = self._param_rule(0.0, eps, n, delta, lambda u: np.abs(self.curve(u) - z))
        return self.curve(u), w

    def rule_diff(self, focus, eps=0.0, n=64, delta=None):
        """Like :meth:`rule` but returns ``zeta - focus`` instead of ``zeta``.

        For a focus on the curve the differences are formed relative to the
        nearest parameter, which keeps them accurate for tiny ``eps``.
        """
        z = complex(focus)
        t0, d0 = self._nearest(z)
        if d0 > 1e-13 * self.length:
            u, w = self._param_rule(0.0, eps, n, delta, lambda u: np.abs(self.curve(u) - z))
            return self.curve(u) - z, w
        u, w = self._param_rule(t0, eps, n, delta, lambda u: np.abs(self._offset(u, t0)))
        return self._offset(u, t0), w

    def param_of(self, z):
        return self._nearest(complex(z))[0]


# -- areas


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def bbox(self):
        c, r = complex(self.center), self.radius
        return c.real - r, c.real + r, c.imag - r, c.imag + r

    def contains(self, z):
        return np.abs(np.asarray(z) - self.center) <= self.radius

    def distance(self, z):
        return max(0.0, abs(complex(z) - self.center) - self.radius)


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def bbox(self):
        return self.x0, self.x1, self.y0, self.y1

    def contains(self, z):
        z = np.asarray(z)
        return (z.real >= self.x0) & (z.real <= self.x1) & (z.imag >= self.y0) & (z.imag <= self.y1)

    def distance(self, z):
        z = complex(z)
        dx = max(self.x0 - z.real, 0.0, z.real - self.x1)
        dy = max(self.y0 - z.imag, 0.0, z.imag - self.y1)
        return math.hypot(dx, dy)


def _ray_rect(q, th, rect):
    """Entry and exit distances of rays from ``q`` with angles ``th``."""
    cx, sy = np.cos(th), np.sin(th)
    lo = np.zeros_like(th)
    hi = np.full_like(th, np.inf)
    for p0, dirc, a0, a1 in ((q.real, cx, rect.x0, rect.x1), (q.imag, sy, rect.y0, rect.y1)):
        with np.errstate(divide="ignore", invalid="ignore"):
            t0 = (a0 - p0) / dirc
            t1 = (a1 - p0) / dirc
        tmin = np.minimum(t0, t1)
        tmax = np.maximum(t0, t1)
        par = np.abs(dirc) < 1e-300
        inside = (p0 >= a0) & (p0 <= a1)
        tmin = np.where(par, np.where(inside, -np.inf, np.inf), tmin)
        tmax = np.where(par, np.where(inside, np.inf, -np.inf), tmax)
        lo = np.maximum(lo, tmin)
        hi = np.minimum(hi, tmax)
    hi = np.where(hi < lo, lo, hi)
    return lo, hi


@dataclass(frozen=True, eq=False)
class AreaDensity:
    """Density with respect to planar Lebesgue measure on a disk or rectangle."""

    region: object
    density: Callable = field(repr=False)
    grid_shape: tuple = ()
    family: str = "custom"
    params: dict = field(default_factory=dict)
    theta_panels: int = 32

    kind = "area"

    @classmethod
    def tabulated(cls, region, xs, ys, values, **kw):
        """Bicubic interpolation of samples ``values[i, j]`` at ``(xs[i], ys[j])``."""
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        values = np.asarray(values, complex)
        k = min(3, len(xs) - 1, len(ys) - 1)
        sr = interpolate.RectBivariateSpline(xs, ys, values.real, kx=k, ky=k)
        si = interpolate.RectBivariateSpline(xs, ys, values.imag, kx=k, ky=k)

        def dens(z):
            z = np.asarray(z)
            return sr.ev(z.real, z.imag) + 1j * si.ev(z.real, z.imag)

        return cls(region, dens, grid_shape=values.shape, family="tabulated", **kw)

    def bbox(self):
        return self.region.bbox()

    def distance(self, z):
        return self.region.distance(z)

    def _rho(self, z):
        return np.asarray(self.density(z), dtype=complex) * np.ones(np.shape(z))

    def _theta_rule(self, q):
        """Angles and weights covering every ray from ``q`` that meets the region."""
        reg = self.region
        npan = self.theta_panels
        if isinstance(reg, Disk):
            u = complex(reg.center) - q
            d = abs(u)
            if d < reg.radius * (1 - 1e-14):
                return _quad_periodic(npan)
            half = math.asin(min(1.0, reg.radius / d))
            s, ws = _quad.gauss_legendre(npan * _quad.PANEL_ORDER // 2, -math.pi / 2, math.pi / 2)
            th = math.atan2(u.imag, u.real) + half * np.sin(s)
            return th, ws * half * np.cos(s)
        corners = np.array([reg.x0 + 1j * reg.y0, reg.x1 + 1j * reg.y0, reg.x1 + 1j * reg.y1, reg.x0 + 1j * reg.y1])
        ang = np.angle(corners - q)
        if bool(reg.contains(q)):
            br = np.sort(np.mod(ang, TWO_PI))
            br = np.append(br, br[0] + TWO_PI)
        else:
            ref = math.atan2((corners.mean() - q).imag, (corners.mean() - q).real)
            rel = np.mod(ang - ref + math.pi, TWO_PI) - math.pi
            br = ref + np.sort(rel)
        ths, wts = [], []
        per = max(2, npan // 4)
        for i in range(len(br) - 1):
            if br[i + 1] - br[i] < 1e-15:
                continue
            sub = np.linspace(br[i], br[i + 1], per + 1)
            for j in range(per):
                t, w = _quad.gauss_legendre(_quad.PANEL_ORDER, sub[j], sub[j + 1])
                ths.append(t)
                wts.append(w)
        return np.concatenate(ths), np.concatenate(wts)

    def _ray_limits(self, q, th):
        reg = self.region
        if isinstance(reg, Disk):
            u = q - complex(reg.center)
            proj = u.real * np.cos(th) + u.imag * np.sin(th)
            disc = proj ** 2 - abs(u) ** 2 + reg.radius ** 2
            root = np.sqrt(np.clip(disc, 0, None))
            return np.clip(-proj - root, 0, None), np.clip(-proj + root, 0, None)
        return _ray_rect(q, th, reg)

    def rule(self, focus, eps=0.0, n=16, delta=None, r_max=None):
        q = complex(focus)
        th, wth = self._theta_rule(q)
        lo, hi = self._ray_limits(q, th)
        lo = np.maximum(lo, eps)
        if r_max is not None:
            hi = np.minimum(hi, r_max)
        hi = np.maximum(hi, lo)
        xr, wr = _quad.gauss_legendre(max(n, 16))
        span = hi - lo
        if delta is None or delta <= 0:
            r = lo[:, None] + 0.5 * span[:, None] * (xr[None, :] + 1.0)
            w = 0.5 * span[:, None] * wr[None, :]
        else:
            # r-panels doubling in length from the lower limit, first one of size delta
            rs, wsr = [], []
            s0 = np.zeros_like(lo)
            step = delta
            while np.any(s0 < span):
                s1 = np.minimum(s0 + step, span)
                h = s1 - s0
                rs.append(lo[:, None] + s0[:, None] + 0.5 * h[:, None] * (xr[None, :] + 1.0))
                wsr.append(0.5 * h[:, None] * wr[None, :])
                s0 = s1
                step *= 2.0
            r = np.concatenate(rs, axis=1)
            w = np.concatenate(wsr, axis=1)
        z = q + r * np.exp(1j * th)[:, None]
        weights = w * r * wth[:, None]
        keep = weights.ravel() != 0
        zs = z.ravel()[keep]
        return zs, weights.ravel()[keep] * self._rho(zs)

    def nodes(self, n=32, graded=False):
        reg = self.region
        if isinstance(reg, Disk):
            return self.rule(reg.center, 0.0, n)
        x, wx = _quad.gauss_legendre(n, reg.x0, reg.x1)
        y, wy = _quad.gauss_legendre(n, reg.y0, reg.y1)
        z = (x[:, None] + 1j * y[None, :]).ravel()
        w = (wx[:, None] * wy[None, :]).ravel()
        return z, w * self._rho(z)

    def mass(self, n=32):
        return complex(np.sum(self.nodes(n)[1]))

    def variation(self, n=32):
        return float(np.sum(np.abs(self.nodes(n)[1])))


def _quad_periodic(npan):
    ths, wts = [], []
    br = np.linspace(0.0, TWO_PI, npan + 1)
    for i in range(npan):
        t, w = _quad.gauss_legendre(_quad.PANEL_ORDER, br[i], br[i + 1])
        ths.append(t)
        wts.append(w)
    return np.concatenate(ths), np.concatenate(wts)


# ---------------------------------------------------------------------------
# the measure


@dataclass(frozen=True, eq=False)
class ComplexMeasure:
    """Immutable finite complex measure: sum of ``coef * component``."""

    components: tuple

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __add__(self, other):
        return make_measure(list(self.components) + list(other.components))

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, c):
        return make_measure([(complex(c) * k, comp) for k, comp in self.components])

    def __neg__(self):
        return (-1) * self

    @property
    def atoms(self):
        return [comp for _, comp in self.components if comp.kind == "atom"]

    @property
    def is_continuous(self):
        return not any(a.weight != 0 for a in self.atoms)

    @property
    def is_positive(self):
        for k, comp in self.components:
            if comp.kind == "atom":
                w = k * comp.weight
                if w.imag != 0 or w.real < 0:
                    return False
            elif comp.kind == "interval":
                t, w = comp.nodes(32)
                v = k * w
                if np.any(np.abs(v.imag) > 1e-14 * np.abs(v).max()) or np.any(v.real < 0):
                    return False
            else:
                return False
        return True

    @property
    def on_real_line(self):
        for _, comp in self.components:
            if comp.kind == "atom" and comp.location.imag != 0:
                return False
            if comp.kind in ("curve", "area"):
                return False
        return True

    def total_mass(self, n=64):
        return complex(sum(k * comp.mass(n) if comp.kind != "atom" else k * comp.weight
                           for k, comp in self.components))

    def bbox(self):
        boxes = np.array([comp.bbox() for _, comp in self.components], dtype=float)
        return boxes[:, 0].min(), boxes[:, 1].max(), boxes[:, 2].min(), boxes[:, 3].max()

    @property
    def scale(self):
        x0, x1, y0, y1 = self.bbox()
        return max(math.hypot(x1 - x0, y1 - y0), 1e-300)

    @property
    def center(self):
        x0, x1, y0, y1 = self.bbox()
        return complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))

    def distance(self, z):
        return min(comp.distance(z) for _, comp in self.components)

    def nodes(self, n=64, graded=False, variation=False):
        zs, ws = [], []
        for k, comp in self.components:
            z, w = comp.nodes(n, graded=graded) if comp.kind != "atom" else comp.nodes()
            w = k * w
            zs.append(np.asarray(z, dtype=complex))
            ws.append(np.abs(w) if variation else w)
        return np.concatenate(zs), np.concatenate(ws)

    def rule(self, focus, eps=0.0, n=64, delta=None, variation=False):
        zs, ws = [], []
        for k, comp in self.components:
            z, w = comp.rule(focus, eps, n, delta)
            w = k * w
            zs.append(np.asarray(z, dtype=complex))
            ws.append(np.abs(w) if variation else w)
        return np.concatenate(zs), np.concatenate(ws)

    def rule_diff(self, focus, eps=0.0, n=64):
        """Differences ``zeta - focus`` and weights of :meth:`rule` (unit coefficients folded in)."""
        q = complex(focus)
        ds, ws = [], []
        for k, comp in self.components:
            if comp.kind in ("curve", "interval"):
                d, w = comp.rule_diff(q, eps, n)
            else:
                z, w = comp.rule(q, eps, n)
                d = np.asarray(z, dtype=complex) - q
            ds.append(d)
            ws.append(k * w)
        return np.concatenate(ds), np.concatenate(ws)

    def restrict_halfplane(self, c, side):
        """Restriction to ``{Re z > c}`` (side=+1) or ``{Re z < c}`` (side=-1)."""
        out = []
        for k, comp in self.components:
            if comp.kind == "atom":
                if side * (comp.location.real - c) > 0:
                    out.append((k, comp))
            elif comp.kind == "interval":
                piece = comp.restrict(c, np.inf) if side > 0 else comp.restrict(-np.inf, c)
                if piece is not None:
                    out.append((k, piece))
            else:
                raise MeasureError("half-plane restriction supports atoms and intervals only")
        return make_measure(out)


def make_measure(components: Sequence) -> ComplexMeasure:
    """Normalize ``(coef, component)`` pairs (or bare components) into a measure.

    Coincident atoms are merged by adding weights; atoms whose merged weight
    vanishes are dropped.
    """
    atoms: dict = {}
    rest = []
    for item in components:
        if isinstance(item, tuple):
            coef, comp = item
        else:
            coef, comp = 1.0, item
        coef = complex(coef)
        if not np.isfinite(coef):
            raise MeasureError("coefficients must be finite")
        if isinstance(comp, Atom):
            atoms[comp.location] = atoms.get(comp.location, 0j) + coef * comp.weight
        elif isinstance(comp, (IntervalDensity, CurveDensity, AreaDensity)):
            rest.append((coef, comp))
        else:
            raise MeasureError(f"unknown component {comp!r}")
    merged = [(1.0 + 0j, Atom(z, w)) for z, w in atoms.items() if w != 0]
    return ComplexMeasure(tuple(merged + rest))


def quadrature_nodes(component, n, graded=False):
    """Nodes and weights of ``component``; exact for its polynomial moments up to degree 2n-1."""
    if n < 2 and component.kind != "atom":
        raise MeasureError("need at least two nodes")
    if component.kind == "atom":
        return component.nodes()
    return component.nodes(n, graded=graded)


def total_variation(mu: ComplexMeasure, n=64) -> float:
    resolution = {"atom": None, "interval": max(n, 64), "curve": 512, "area": 48}
    tv = 0.0
    for k, comp in mu.components:
        m = resolution[comp.kind]
        tv += abs(k) * (comp.variation() if m is None else comp.variation(m))
    return tv
