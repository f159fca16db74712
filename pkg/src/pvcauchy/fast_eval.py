"""Treecode evaluation of truncated Cauchy sums ``sum_j w_j / (z - zeta_j)``.

Sources live in a quadtree whose cells carry the moments
``a_k = sum w_j (zeta_j - c)^k``, so that outside the cell

    sum_j w_j / (z - zeta_j) = sum_k a_k / (z - c)^(k+1).

Targets get their own quadtree and the two are walked together.  A pair of
cells interacts through the expansion when the target cell sits well
outside the source cell, otherwise the pair is split or, for two leaves,
summed directly.  Excision ``|z - zeta| <= eps`` only happens in the direct
sums; the acceptance test keeps every expanded source cell further than
``eps`` from every target it serves.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .measure_model import ComplexMeasure, quadrature_nodes

# ratio of cell radius to centre distance below which a cell is expanded;
# the truncation error then decays like OPENING**(p + 1)
OPENING = 0.2
MAX_DEPTH = 48
# bound on the number of (target, source) pairs materialised at once
CHUNK = 1 << 20


@dataclass(frozen=True)
class SourceSet:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=complex).ravel()
        w = np.ascontiguousarray(self.weights, dtype=complex).ravel()
        if pts.shape != w.shape:
            raise ValueError("points and weights differ in length")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise ValueError("sources must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.points.size

    @property
    def total(self) -> complex:
        return complex(np.sum(self.weights))

    @classmethod
    def from_measure(cls, mu: ComplexMeasure, n=64, graded=False) -> "SourceSet":
        """Quadrature nodes of every component, weighted by the component coefficient."""
        pts, ws = [], []
        for k, comp in mu.components:
            x, w = quadrature_nodes(comp, n, graded=graded)
            pts.append(np.asarray(x, complex))
            ws.append(k * np.asarray(w, complex))
        return cls(np.concatenate(pts), np.concatenate(ws))


@dataclass
class _Quadtree:
    """Flat quadtree over a point set; cell ``i`` owns ``order[start[i]:stop[i]]``."""

    order: np.ndarray
    center: np.ndarray
    radius: np.ndarray
    start: np.ndarray
    stop: np.ndarray
    children: list

    def is_leaf(self, i):
        return not self.children[i]

    @property
    def n_cells(self):
        return self.center.size


def _quadtree(points, leaf_cap):
    pts = np.asarray(points, complex)
    order = np.arange(pts.size)
    centers, radii, starts, stops, children = [], [], [], [], []

    def add(lo, hi, box_c, half):
        idx = len(centers)
        sub = pts[order[lo:hi]]
        centers.append(box_c)
        radii.append(float(np.max(np.abs(sub - box_c))) if hi > lo else 0.0)
        starts.append(lo)
        stops.append(hi)
        children.append([])
        return idx

    lo_x, hi_x = pts.real.min(), pts.real.max()
    lo_y, hi_y = pts.imag.min(), pts.imag.max()
    half = 0.5 * max(hi_x - lo_x, hi_y - lo_y)
    root_c = complex(0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y))
    stack = [(add(0, pts.size, root_c, half), half, 0)]
    while stack:
        cell, half, depth = stack.pop()
        lo, hi = starts[cell], stops[cell]
        # coincident points never separate, so a zero radius ends the split
        if hi - lo <= leaf_cap or radii[cell] == 0.0 or depth >= MAX_DEPTH:
            continue
        c = centers[cell]
        sub = pts[order[lo:hi]]
        quad = (sub.real >= c.real).astype(np.int8) + 2 * (sub.imag >= c.imag).astype(np.int8)
        perm = np.argsort(quad, kind="stable")
        order[lo:hi] = order[lo:hi][perm]
        counts = np.bincount(quad, minlength=4)
        h = 0.5 * half
        offs = (complex(-h, -h), complex(h, -h), complex(-h, h), complex(h, h))
        at = lo
        for q in range(4):
            if counts[q] == 0:
                continue
            child = add(at, at + counts[q], c + offs[q], h)
            children[cell].append(child)
            stack.append((child, h, depth + 1))
            at += counts[q]
    return _Quadtree(order, np.array(centers, complex), np.array(radii), np.array(starts),
                     np.array(stops), children)


@dataclass
class EvalTree:
    """Source quadtree with truncated Laurent moments per cell."""

    sources: SourceSet
    p: int
    leaf_cap: int
    tree: _Quadtree
    moments: np.ndarray  # (n_cells, p + 1)

    @property
    def n_cells(self):
        return self.tree.n_cells

    def far_field(self, cell, z):
        """Expansion of ``cell`` evaluated at ``z``."""
        z = np.asarray(z, complex)
        return _horner(self.moments[cell], 1.0 / (z - self.tree.center[cell]))

    def direct(self, cell, z):
        t = self.tree
        idx = t.order[t.start[cell]:t.stop[cell]]
        z = np.asarray(z, complex)
        d = z.reshape(-1, 1) - self.sources.points[idx][None, :]
        return (self.sources.weights[idx][None, :] / d).sum(axis=1).reshape(z.shape)

    def error_bound(self, ratio):
        """Truncation bound relative to ``sum |w| / dist`` when ``radius / dist <= ratio``."""
        return ratio ** (self.p + 1) / (1.0 - ratio)


def _horner(a, u):
    """``sum_k a_k u^(k+1)``; ``a`` has the order index last."""
    acc = np.zeros(np.broadcast_shapes(np.shape(u), np.shape(a)[:-1]), complex)
    for k in range(np.shape(a)[-1] - 1, -1, -1):
        acc = acc * u + a[..., k]
    return acc * u


def build_tree(sources: SourceSet, p=12, leaf_cap=32) -> EvalTree:
    """Quadtree over ``sources`` with order-``p`` moments in every cell."""
    if p < 4:
        raise ValueError("expansion order must be at least 4")
    if leaf_cap < 8:
        raise ValueError("leaf_cap must be at least 8")
    if len(sources) == 0:
        raise ValueError("empty source set")
    tree = _quadtree(sources.points, leaf_cap)
    moments = np.zeros((tree.n_cells, p + 1), complex)
    pts = sources.points[tree.order]
    w = sources.weights[tree.order]
    for i in range(tree.n_cells):
        d = pts[tree.start[i]:tree.stop[i]] - tree.center[i]
        term = w[tree.start[i]:tree.stop[i]].copy()
        for k in range(p + 1):
            moments[i, k] = term.sum()
            term *= d
    return EvalTree(sources, int(p), int(leaf_cap), tree, moments)


def _interaction_lists(src: _Quadtree, tgt: _Quadtree, eps, opening):
    far, near = [], []
    stack = [(0, 0)]
    while stack:
        ti, si = stack.pop()
        dist = abs(tgt.center[ti] - src.center[si])
        rt, rs = tgt.radius[ti], src.radius[si]
        gap = dist - rt
        if gap > 0 and rs <= opening * gap and gap - rs > eps:
            far.append((ti, si))
            continue
        t_leaf, s_leaf = tgt.is_leaf(ti), src.is_leaf(si)
        if t_leaf and s_leaf:
            near.append((ti, si))
        elif s_leaf or (not t_leaf and rt >= rs):
            stack.extend((c, si) for c in reversed(tgt.children[ti]))
        else:
            stack.extend((ti, c) for c in reversed(src.children[si]))
    return far, near


def _ranges(tree, cells):
    """Concatenated index ranges of ``cells`` and the cell label of each entry."""
    cells = np.asarray(cells, int)
    lens = tree.stop[cells] - tree.start[cells]
    label = np.repeat(np.arange(cells.size), lens)
    offset = np.arange(label.size) - np.repeat(np.cumsum(lens) - lens, lens)
    return tree.start[cells][label] + offset, label


def _accumulate(out, t_idx, vals):
    out += np.bincount(t_idx, weights=vals.real, minlength=out.size)
    out += 1j * np.bincount(t_idx, weights=vals.imag, minlength=out.size)


def _eval_far(tree: EvalTree, tgt_pts, tgt: _Quadtree, far, out):
    if not far:
        return
    pairs = np.asarray(far, int)
    # targets of each pair; pairs are processed in list order so the sum is reproducible
    pos, lab = _ranges(tgt, pairs[:, 0])
    cells = pairs[lab, 1]
    for lo in range(0, pos.size, CHUNK // max(tree.p, 1)):
        sl = slice(lo, lo + CHUNK // max(tree.p, 1))
        t = tgt.order[pos[sl]]
        u = 1.0 / (tgt_pts[t] - tree.tree.center[cells[sl]])
        _accumulate(out, t, _horner(tree.moments[cells[sl]], u))


def _eval_near(tree: EvalTree, tgt_pts, tgt: _Quadtree, near, eps, out):
    src = tree.tree
    spts = tree.sources.points[src.order]
    sw = tree.sources.weights[src.order]
    batch = []
    size = 0

    def flush():
        if not batch:
            return
        t_idx = np.concatenate([b[0] for b in batch])
        s_idx = np.concatenate([b[1] for b in batch])
        d = tgt_pts[t_idx] - spts[s_idx]
        keep = np.abs(d) > eps
        _accumulate(out, t_idx[keep], sw[s_idx[keep]] / d[keep])
        batch.clear()

    for ti, si in near:
        t = tgt.order[tgt.start[ti]:tgt.stop[ti]]
        s = np.arange(src.start[si], src.stop[si])
        batch.append((np.repeat(t, s.size), np.tile(s, t.size)))
        size += t.size * s.size
        if size >= CHUNK:
            flush()
            size = 0
    flush()


def _workers():
    try:
        return max(1, int(os.environ.get("PVC_THREADS", "1")))
    except ValueError:
        return 1


def batch_cauchy(tree: EvalTree, targets, eps=0.0, opening=OPENING, leaf_cap=None, workers=None):
    """Truncated Cauchy sums of the tree's sources at every target.

    Sources with ``|zeta - z| <= eps`` are left out; with ``eps = 0`` only a
    source sitting exactly on the target is dropped.  ``workers`` (default
    from ``PVC_THREADS``) spreads the target tree's top cells over threads
    without changing the result.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if not 0 < opening < 1:
        raise ValueError("opening must lie in (0, 1)")
    z = np.ascontiguousarray(targets, dtype=complex).ravel()
    out = np.zeros(z.size, complex)
    if z.size == 0:
        return out
    tgt = _quadtree(z, leaf_cap or tree.leaf_cap)
    far, near = _interaction_lists(tree.tree, tgt, eps, opening)
    # pairs are grouped by the top-level target cell that owns them; each
    # group is summed on its own so the result does not depend on ``workers``
    owner = np.zeros(tgt.n_cells, int)
    roots = tgt.children[0] or [0]
    for r in roots:
        stack = [r]
        while stack:
            c = stack.pop()
            owner[c] = r
            stack.extend(tgt.children[c])
    owner[0] = roots[0]

    def job(r):
        part = np.zeros(z.size, complex)
        _eval_far(tree, z, tgt, [f for f in far if owner[f[0]] == r], part)
        _eval_near(tree, z, tgt, [q for q in near if owner[q[0]] == r], eps, part)
        return part

    workers = workers or _workers()
    if workers == 1:
        parts = [job(r) for r in roots]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, roots))
    for part in parts:
        out += part
    return out


def naive_cauchy(sources: SourceSet, targets, eps=0.0):
    """Direct double sum with the same excision rule as :func:`batch_cauchy`."""
    z = np.ascontiguousarray(targets, dtype=complex).ravel()
    out = np.zeros(z.size, complex)
    step = max(1, CHUNK // max(len(sources), 1))
    for lo in range(0, z.size, step):
        d = z[lo:lo + step, None] - sources.points[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(np.abs(d) > eps, sources.weights[None, :] / d, 0.0)
        out[lo:lo + step] = terms.sum(axis=1)
    return out


@dataclass
class AuditResult:
    max_rel_error: float
    audited: int
    naive_seconds: float


def audit(tree: EvalTree, targets, values, eps=0.0, sample=200, seed=0) -> AuditResult:
    """Compare treecode ``values`` with the naive sum on a random subset of targets."""
    z = np.asarray(targets, complex).ravel()
    rng = np.random.default_rng(seed)
    idx = np.arange(z.size) if z.size <= sample else np.sort(rng.choice(z.size, sample, replace=False))
    t0 = time.perf_counter()
    ref = naive_cauchy(tree.sources, z[idx], eps)
    dt = time.perf_counter() - t0
    scale = np.maximum(np.abs(ref), np.finfo(float).tiny)
    err = float(np.max(np.abs(np.asarray(values)[idx] - ref) / scale))
    return AuditResult(err, int(idx.size), dt)


def timing_growth(sizes=(1 << 13, 1 << 14, 1 << 15), p=12, seed=0, repeats=1):
    """Treecode wall time at ``M = N`` for each size and consecutive ratios."""
    rng = np.random.default_rng(seed)
    times = []
    for n in sizes:
        src = SourceSet(rng.random(n) + 1j * rng.random(n), np.full(n, 1.0 / n))
        tgt = rng.random(n) + 1j * rng.random(n)
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            batch_cauchy(build_tree(src, p), tgt)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    times = np.array(times)
    return times, times[1:] / times[:-1]
