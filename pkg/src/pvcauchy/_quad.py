"""Low-level quadrature rules shared by the measure components.

Everything here works on a real parameter segment ``[c, d]`` and returns
nodes and weights as numpy arrays.  Near-singular integrands are handled by
geometric grading of panels toward a list of focus points.
"""

from functools import lru_cache

import numpy as np
from scipy import special

PANEL_ORDER = 20
# Relative size of the smallest graded panel when the focus lies on the segment.
MIN_GRADE = 1e-16


@lru_cache(maxsize=256)
def _gl(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=512)
def _gj(n, left, right):
    # scipy's weight is (1-t)^alpha (1+t)^beta
    x, w = special.roots_jacobi(n, right, left)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, c=-1.0, d=1.0):
    x, w = _gl(int(n))
    h = 0.5 * (d - c)
    return c + h * (x + 1.0), h * w


def gauss_jacobi(n, left, right, c=-1.0, d=1.0):
    """Gauss rule for the weight ``(t - c)**left * (d - t)**right`` on ``[c, d]``."""
    x, w = _gj(int(n), float(left), float(right))
    h = 0.5 * (d - c)
    return c + h * (x + 1.0), w * h ** (left + right + 1.0)


def bernstein_rho(z, c, d):
    """Bernstein ellipse parameter of ``z`` relative to the segment ``[c, d]``."""
    w = (2.0 * z - (c + d)) / (d - c)
    w = complex(w)
    s = np.sqrt(w * w - 1.0)
    return max(abs(w + s), abs(w - s))


def order_for(z, c, d, n, tol=1e-16, cap=4096):
    """Smallest Gauss order >= n whose error bound rho^(-2n) reaches ``tol``."""
    rho = bernstein_rho(z, c, d)
    if rho <= 1.0 + 1e-12:
        return cap
    need = int(np.ceil(-np.log(tol) / (2.0 * np.log(rho))))
    return int(min(max(n, need), cap))


def graded_breakpoints(c, d, foci):
    """Panel breakpoints in ``[c, d]`` graded geometrically toward each focus.

    ``foci`` is a sequence of ``(p, delta)`` pairs: ``p`` is the point of the
    segment closest to the singularity and ``delta`` its distance.  An optional
    third entry overrides the relative size of the smallest panel.
    """
    length = d - c
    pts = [c, d]
    for focus in foci:
        p, delta = focus[0], focus[1]
        floor = focus[2] if len(focus) > 2 else MIN_GRADE
        p = min(max(p, c), d)
        # panels thinner than a few thousand ulps of p would put nodes on top of it
        delta = max(delta, floor * length, 4096 * np.spacing(abs(p)))
        for sign, room in ((1.0, d - p), (-1.0, p - c)):
            s = delta
            while s < room:
                pts.append(p + sign * s)
                s *= 2.0
        pts.append(p)
    pts = np.unique(np.asarray(pts, dtype=float))
    pts = pts[(pts >= c) & (pts <= d)]
    # drop slivers that would only cost extra evaluations
    keep = [pts[0]]
    for t in pts[1:]:
        if t - keep[-1] > 64 * np.spacing(max(abs(t), abs(keep[-1]))):
            keep.append(t)
        else:
            keep[-1] = t
    keep[0], keep[-1] = c, d
    return np.asarray(keep)


def _split_from_end(br):
    """Split panels so that none is longer than twice its distance to ``br[0]``."""
    out = [br[0], br[1]]
    for t in br[2:]:
        while t - out[-1] > 2.0 * (out[-1] - br[0]):
            out.append(out[-1] + 2.0 * (out[-1] - br[0]))
        out.append(t)
    return np.asarray(out)


def segment_rule(c, d, left=0.0, right=0.0, foci=(), n=PANEL_ORDER, panel_order=PANEL_ORDER):
    """Nodes and weights for ``int_c^d (t-c)^left (d-t)^right F(t) dt``.

    The singular weight is absorbed exactly in the end panels.  Interior
    panels get the weight multiplied into the returned weights.  Returns
    ``(t, w)``.
    """
    near = []
    for p, delta in foci:
        if delta >= 0.5 * (d - c):
            continue
        # at an endpoint with a singular weight the innermost panel must be much
        # thinner for the weight times a log kernel to be negligible there
        ex = left if p == c else right if p == d else 0.0
        floor = max(MIN_GRADE ** (1.0 / (1.0 + ex)), 1e-60) if ex < 0 else MIN_GRADE
        near.append((p, delta, floor))
    if not near:
        order = n
        for p, delta in foci:
            order = max(order, order_for(p + 1j * delta if delta > 0 else p, c, d, n))
        return gauss_jacobi(order, left, right, c, d)
    br = graded_breakpoints(c, d, near)
    # a singular endpoint weight multiplied into an interior panel must stay
    # separated from it by about the panel length
    if left != 0.0:
        br = _split_from_end(br)
    if right != 0.0:
        br = -_split_from_end(-br[::-1])[::-1]
    if len(br) == 2:
        return gauss_jacobi(max(n, panel_order), left, right, c, d)
    ts, ws = [], []
    m = len(br) - 1
    for i in range(m):
        lo, hi = br[i], br[i + 1]
        ll = left if i == 0 else 0.0
        rr = right if i == m - 1 else 0.0
        t, w = gauss_jacobi(panel_order, ll, rr, lo, hi)
        if i != 0 and left != 0.0:
            w = w * (t - c) ** left
        if i != m - 1 and right != 0.0:
            w = w * (d - t) ** right
        ts.append(t)
        ws.append(w)
    return np.concatenate(ts), np.concatenate(ws)
