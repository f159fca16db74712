"""Fast truncated Cauchy sums with a quadtree and Laurent moments.

A cloud of point masses is summed at as many targets as sources.  The
treecode result is audited against the direct double sum on a sample of
targets, and the wall time is compared across doublings of the problem.
"""

import time

import numpy as np

from pvcauchy.constructions import arcsine
from pvcauchy.fast_eval import SourceSet, audit, batch_cauchy, build_tree, timing_growth
from pvcauchy.transforms import cauchy_eps

rng = np.random.default_rng(0)
n = 50_000
src = SourceSet(rng.random(n) + 1j * rng.random(n), np.full(n, 1.0 / n))
z = rng.random(n) + 1j * rng.random(n)

t0 = time.perf_counter()
tree = build_tree(src, p=12)
vals = batch_cauchy(tree, z, eps=1e-3)
elapsed = time.perf_counter() - t0
res = audit(tree, z, vals, eps=1e-3)
print(f"N = M = {n}: {elapsed:.2f} s, max relative error {res.max_rel_error:.1e} on {res.audited} targets")

times, ratios = timing_growth((1 << 12, 1 << 13, 1 << 14))
print("doubling ratios:", ", ".join(f"{r:.2f}" for r in ratios))

# a measure enters through its quadrature nodes
mu = arcsine()
pts = np.array([0.3 + 0.2j, 2j])
fast = batch_cauchy(build_tree(SourceSet.from_measure(mu, 4000)), pts)
for p, f in zip(pts, fast):
    print(f"C_eps({p}) treecode {f:.6f}   quadrature {cauchy_eps(mu, p, 1e-3):.6f}")
