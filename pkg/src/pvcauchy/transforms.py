"""Singular integrals of planar measures.

The Cauchy kernel here is ``1 / (z - zeta)``: for a compactly supported
measure ``C(z) ~ mu(C) / z`` at infinity.  Truncated transforms integrate
over ``{|zeta - z| > eps}``; principal values at points of an interval or a
curve are assembled by singularity subtraction, and an eps-ladder is kept
as an independent cross-check.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import interpolate, special

from . import _quad
from .measure_model import ComplexMeasure, make_measure

ON_SUPPORT_TOL = 1e-13


class PrincipalValueError(ValueError):
    pass


@dataclass
class EvalResult:
    value: complex
    epsilons: np.ndarray = field(default_factory=lambda: np.empty(0))
    ladder: np.ndarray = field(default_factory=lambda: np.empty(0, complex))
    tail_estimate: float = 0.0
    status: str = "converged"
    # "direct" when the value comes from a convergent formula, "ladder" when
    # it is the smallest-eps truncation
    method: str = "direct"

    @property
    def reliable(self):
        """Value trustworthy: a converged ladder, or a direct value with a ladder that is still closing in."""
        return self.status == "converged" or (self.method == "direct" and self.status == "converging")

    def __complex__(self):
        return complex(self.value)


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class KernelSpec:
    """Kernel ``K`` applied to planar differences ``zeta - x`` (complex numbers)."""

    name: str
    func: Callable = field(repr=False, compare=False)
    dimension: int = 2
    odd: bool = True

    def __call__(self, d):
        return self.func(np.asarray(d, dtype=complex))

    @classmethod
    def cauchy(cls):
        return cls("cauchy", lambda d: -1.0 / d)

    @classmethod
    def riesz(cls, n=2, index=1):
        if n != 2 or index not in (1, 2):
            raise ValueError("only planar Riesz kernels riesz(2, 1) and riesz(2, 2) are provided")
        if index == 1:
            return cls("riesz(2,1)", lambda d: d.real / np.abs(d) ** 2)
        return cls("riesz(2,2)", lambda d: d.imag / np.abs(d) ** 2)

    @classmethod
    def custom(cls, func, name="custom", check=True, seed=0):
        odd = True
        if check:
            rng = np.random.default_rng(seed)
            d = rng.normal(size=64) + 1j * rng.normal(size=64)
            kp, km = np.asarray(func(d)), np.asarray(func(-d))
            odd = bool(np.all(np.abs(kp + km) <= 1e-12 * (np.abs(kp) + np.abs(km) + 1e-300)))
        return cls(name, func, odd=odd)


def _require_odd(K):
    if not K.odd:
        raise ValueError(f"kernel {K.name} is not odd")


# ---------------------------------------------------------------------------
# truncated transforms


def cauchy_eps(mu: ComplexMeasure, z, eps, n=64):
    """``int_{|zeta - z| > eps} dmu(zeta) / (z - zeta)``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    d, w = mu.rule_diff(complex(z), eps, n)
    return complex(-np.sum(w / d))


def odd_kernel_eps(K: KernelSpec, mu: ComplexMeasure, x, eps, n=64):
    _require_odd(K)
    if eps <= 0:
        raise ValueError("eps must be positive")
    d, w = mu.rule_diff(complex(x), eps, n)
    return complex(np.sum(w * K(d)))


def kernel_symmetry_residual(K: KernelSpec, x, y, z):
    """``K(x-y)K(y-z) + K(y-z)K(z-x) + K(z-x)K(x-y)``."""
    x, y, z = complex(x), complex(y), complex(z)
    if x == y or y == z or z == x:
        raise ValueError("points must be pairwise distinct")
    a, b, c = K(x - y), K(y - z), K(z - x)
    return complex(a * b + b * c + c * a)


def kernel_diff_coeffs(a, b, c):
    """Coefficients with ``A/(z-a) + B/(z-b) - 1/(z-c) = O(|z|^-3)``."""
    a, b, c = complex(a), complex(b), complex(c)
    if a == b:
        raise ValueError("a and b must differ")
    return (b - c) / (b - a), (a - c) / (a - b)


# ---------------------------------------------------------------------------
# principal values


NEAR_INTEGER = 1e-3


def _near_integer(v):
    return 1e-12 <= abs(v - round(v)) < NEAR_INTEGER


def jacobi_hilbert(alpha, beta, t, dists=None):
    """``p.v. int_{-1}^{1} (1+u)^alpha (1-u)^beta / (u - t) du`` for ``|t| < 1``.

    ``dists = (1 - t, 1 + t)`` may be passed when they are known more
    accurately than ``t`` itself (points a few ulps inside the interval).
    """
    t = np.asarray(t, dtype=float)
    om, op = (1 - t, 1 + t) if dists is None else (np.asarray(dists[0], float), np.asarray(dists[1], float))
    a_int = abs(alpha - round(alpha)) < 1e-12
    b_int = abs(beta - round(beta)) < 1e-12
    if _near_integer(beta) and round(beta) >= 0:
        if not (a_int or _near_integer(alpha)):
            return -jacobi_hilbert(beta, alpha, -t, (op, om))
        # the closed form cancels like 1 / (beta - n): interpolate in beta instead
        nodes = round(beta) + 2 * NEAR_INTEGER * np.array([-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0])
        vals = np.array([jacobi_hilbert(alpha, b, t, (om, op)) for b in nodes])
        return interpolate.BarycentricInterpolator(nodes, vals)(beta)
    if not b_int:
        A, B = beta, alpha
        head = np.pi / np.tan(np.pi * A) * om ** A * op ** B
        scale = special.rgamma(A + B + 1)
        if scale == 0.0:  # A + B + 1 a nonpositive integer: the series term drops out
            return head
        return head - (2.0 ** (A + B) * special.gamma(A) * special.gamma(B + 1) * scale
                       * special.hyp2f1(1.0, -A - B, 1.0 - A, om / 2))
    if not a_int:
        return -jacobi_hilbert(beta, alpha, -t, (op, om))
    # polynomial weight: divide out (u - t) exactly and integrate the quotient
    P = np.polynomial.Polynomial
    wt = P([1, 1]) ** int(round(alpha)) * P([1, -1]) ** int(round(beta))
    tt = np.atleast_1d(t)
    out = []
    for x, dm, dp in zip(tt, np.broadcast_to(om, tt.shape), np.broadcast_to(op, tt.shape)):
        quo, _ = divmod(wt - wt(x), P([-x, 1]))
        anti = quo.integ()
        out.append(anti(1.0) - anti(-1.0) + wt(x) * math.log(dm / dp))
    return np.array(out).reshape(t.shape)


def _fprime(f, x, h):
    return (f(np.array([x + h]))[0] - f(np.array([x - h]))[0]) / (2 * h)


def interval_pv(comp, x, n=64):
    """Principal value of ``int g(t) / (t - x) dt`` for ``a < x < b`` (unit coefficient)."""
    a, b = comp.a, comp.b
    L = 0.5 * (b - a)
    t, w = _quad.gauss_jacobi(comp.order(n), comp.alpha, comp.beta, a, b)
    fx = comp.f(np.array([x]))[0]
    ft = comp.f(t)
    diff = t - x
    close = np.abs(diff) < 1e-9 * L
    q = np.empty(len(t), dtype=complex)
    q[~close] = (ft[~close] - fx) / diff[~close]
    if np.any(close):
        q[close] = _fprime(comp.f, x, 1e-5 * L)
    smooth = np.sum(w * q)
    s = (x - a) / L - 1.0
    sing = L ** (comp.alpha + comp.beta) * float(jacobi_hilbert(comp.alpha, comp.beta, s, ((b - x) / L, (x - a) / L)))
    return complex(smooth + fx * sing)


def curve_pv(comp, z, n=256):
    """Principal value of ``int phi dzeta / (zeta - z)`` at a point of the curve (unit coefficient)."""
    crv = comp.curve
    t0 = comp.param_of(z)
    z0 = complex(crv(t0))
    m = max(n, 64)
    t = t0 + (np.arange(m) + 0.5) * (2 * np.pi / m)
    zeta = crv(t)
    phi = comp._phi(t)
    phi0 = complex(np.asarray(comp.density(np.array([z0])))[0])
    smooth = np.sum((phi - phi0) * crv.deriv(t) / (zeta - z0)) * (2 * np.pi / m)
    # sign of the parametrization: positive for counter-clockwise curves
    tt = np.arange(512) * (2 * np.pi / 512)
    area = 0.5 * np.sum((np.conj(crv(tt)) * crv.deriv(tt)).imag) * (2 * np.pi / 512)
    direction = 1.0 if area > 0 else -1.0
    return complex(comp.orientation * (smooth + phi0 * direction * np.pi * 1j))


def default_ladder(mu, z, rungs=40, ratio=0.5):
    dist = mu.distance(z)
    start = dist if dist > 0 else mu.scale
    return start * ratio ** np.arange(1, rungs + 1)


def _ladder_status(values, tol):
    """Classify the tail of an eps-ladder.

    ``converging`` means the increments still exceed ``tol`` but shrink by a
    steady factor, which is what power-law endpoint behaviour produces.
    """
    if len(values) < 2:
        return 0.0, "converged"
    d = np.abs(np.diff(values))
    tail = float(d[-1])
    if tail <= tol:
        return tail, "converged"
    last = d[-8:]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = last[1:] / last[:-1]
    if len(r) >= 3 and np.all((r > 0) & (r < 0.95)):
        rho = float(np.max(r))
        return tail * rho / (1.0 - rho), "converging"
    v = np.abs(values[-10:])
    if np.all(np.diff(v) > 0) and d[-1] >= 0.5 * d[-min(len(d), 5)]:
        return tail, "diverging"
    return tail, "oscillating"


def cauchy_pv(mu: ComplexMeasure, z, tol=1e-10, n=64, ladder=True, rungs=40):
    """Principal-value Cauchy transform at ``z`` as an :class:`EvalResult`."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    z = complex(z)
    scale = mu.scale
    direct = 0j  # accumulates int dmu / (zeta - z)
    exact = True
    on_support = False
    for k, comp in mu.components:
        if comp.kind == "atom":
            if comp.location == z:
                raise PrincipalValueError("principal value at atom excluded by definition")
            direct += k * comp.weight / (comp.location - z)
        elif comp.kind == "interval" and abs(z.imag) <= ON_SUPPORT_TOL * scale and comp.a <= z.real <= comp.b:
            on_support = True
            if comp.a < z.real < comp.b:
                direct += k * interval_pv(comp, z.real, n)
            elif z.real == comp.b and comp.beta > 0:
                # a vanishing weight cancels the kernel: the integral converges absolutely
                direct -= k * dataclasses.replace(comp, beta=comp.beta - 1.0).mass(n)
            elif z.real == comp.a and comp.alpha > 0:
                direct += k * dataclasses.replace(comp, alpha=comp.alpha - 1.0).mass(n)
            else:
                exact = False
        elif comp.kind == "curve" and comp.contains(z, ON_SUPPORT_TOL):
            on_support = True
            direct += k * curve_pv(comp, z, max(n, 256))
        else:
            nodes, w = comp.rule(z, 0.0, n)
            direct += k * np.sum(w / (nodes - z))
    direct = -direct
    if not on_support or (not ladder and exact):
        return EvalResult(complex(direct))
    eps = default_ladder(mu, z, rungs)
    vals = np.array([cauchy_eps(mu, z, e, n) for e in eps])
    tail, status = _ladder_status(vals, tol)
    value = complex(direct) if exact else complex(vals[-1])
    return EvalResult(value, eps, vals, tail, status, "direct" if exact else "ladder")


def cauchy(mu, z, n=64):
    """Cauchy transform value (principal value where needed), as a complex number."""
    return cauchy_pv(mu, z, n=n, ladder=False).value


# ---------------------------------------------------------------------------
# maximal function


def eps_grid(eps_min, eps_max, refine=0):
    """Geometric grid ``eps_max * 2**(-k / 2**refine)`` down to ``eps_min``; nested under refinement."""
    m = 2 ** int(refine)
    kmax = int(math.ceil(m * math.log2(eps_max / eps_min)))
    return eps_max * np.exp2(-np.arange(kmax + 1) / m)


def cauchy_maximal(mu, z, eps_min=None, eps_max=None, refine=0, n=64):
    """Grid supremum of ``|C_eps(z)|``; a lower bound for the maximal function."""
    z = complex(z)
    x0, x1, y0, y1 = mu.bbox()
    corners = np.array([x0 + 1j * y0, x0 + 1j * y1, x1 + 1j * y0, x1 + 1j * y1])
    if eps_max is None:
        eps_max = max(mu.scale, float(np.max(np.abs(corners - z))))
    if eps_min is None:
        dist = mu.distance(z)
        eps_min = 0.5 * dist if dist > 1e-8 * mu.scale else 1e-8 * mu.scale
    grid = eps_grid(eps_min, eps_max, refine)
    return float(max(abs(cauchy_eps(mu, z, e, n)) for e in grid))


# ---------------------------------------------------------------------------
# Poisson-type transforms


def _require_real_line(mu):
    if not mu.on_real_line:
        raise ValueError("measure must be supported on the real line")


def poisson(mu, x, y, n=64):
    """``(1/pi) int y / ((x-t)^2 + y^2) dmu(t)`` for ``y > 0``."""
    if y <= 0:
        raise ValueError("y must be positive")
    _require_real_line(mu)
    t, w = mu.rule(complex(x, y), 0.0, n)
    return float(np.real(np.sum(w * y / ((x - t.real) ** 2 + y * y))) / math.pi)


def conjugate_poisson(mu, x, h, n=64):
    """``int (x-y) / ((x-y)^2 + h^2) dmu(y)``."""
    if h <= 0:
        raise ValueError("h must be positive")
    t, w = mu.rule(complex(x, h), 0.0, n)
    d = x - t
    return float(np.real(np.sum(w * d / (d * np.conj(d) + h * h))))


def riesz_r1(mu, x, y, z, n=64, variation=False):
    """``int z / |(u, v, 0) - (x, y, z)|^3 dmu(u + iv)`` for ``z > 0``."""
    if z <= 0:
        raise ValueError("z must be positive")
    q = complex(x, y)
    nodes, w = mu.rule(q, 0.0, n, delta=z, variation=variation)
    r2 = np.abs(nodes - q) ** 2
    val = np.sum(w * z / (r2 + z * z) ** 1.5)
    return float(val.real) if variation else complex(val)


def log_potential(mu, z, n=64):
    """``int log(z - zeta) dmu(zeta)`` with the principal logarithm.

    For measures on the real line and ``Im z >= 0`` the imaginary part is
    ``pi * mu({t > Re z})`` on the axis, which makes this the boundary value
    of a function analytic in the upper half-plane.  At a charged atom the
    potential is infinite and ``nan`` is returned.
    """
    z = complex(z)
    if any(k * a.weight != 0 and a.location == z for k, a in mu.components if a.kind == "atom"):
        return complex(math.nan, math.nan)
    diff, w = mu.rule_diff(z, 0.0, n)
    if z.imag == 0:
        lg = np.log(np.abs(diff)) + 1j * np.pi * (diff.real > 0)
    else:
        lg = np.log(-diff)
    return complex(np.sum(w * lg))


def mass_in_ball(mu, w, r, n=64):
    """``mu(B(w, r))`` as total mass minus the mass outside the ball.

    Components at distance ``>= r`` from ``w`` contribute exactly zero.
    """
    w = complex(w)
    hit = [(k, comp) for k, comp in mu.components if comp.distance(w) < r]
    if not hit:
        return 0j
    part = make_measure(hit)
    nodes, wt = part.rule(w, r, n)
    return complex(part.total_mass(n) - np.sum(wt))


def scaled(mu, c):
    return make_measure([(complex(c) * k, comp) for k, comp in mu.components])
