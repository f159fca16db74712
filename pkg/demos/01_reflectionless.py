"""Which measures on the line have vanishing principal-value transform?

The arcsine law on [-1, 1] does: its transform is 1/sqrt(z^2 - 1), and the
boundary values from above are purely imaginary on the interval.  The
uniform law does not.  Harmonic measure of a union of intervals, seen from
infinity, behaves like the arcsine law on every component.
"""

import numpy as np

from pvcauchy.constructions import arcsine, harmonic_measure, semicircle, uniform
from pvcauchy.identities import verify_reflectionless
from pvcauchy.transforms import cauchy, cauchy_pv

x = np.linspace(-0.95, 0.95, 7)
print("x        arcsine pv      uniform pv      semicircle pv")
for xi in x:
    vals = [cauchy_pv(mu, xi, ladder=False).value.real for mu in (arcsine(), uniform(), semicircle())]
    print(f"{xi:+.3f}  " + "  ".join(f"{v:+.3e}" for v in vals))

# off the support the semicircle transform is z - sqrt(z^2 - 1)
z = 2.0
print(f"\nsemicircle C(2) = {cauchy(semicircle(), z).real:.15f}  (2 - sqrt 3 = {2 - 3**0.5:.15f})")

for iv in ([(-1, -0.3), (0.3, 1)], [(-2, -1.5), (-0.4, 0.1), (0.9, 1.7)]):
    spec = harmonic_measure(iv)
    rep = verify_reflectionless(spec.measure)
    roots = ", ".join(f"{c:+.6f}" for c in spec.gap_roots)
    print(f"\nharmonic measure of {iv}")
    print(f"  gap roots {roots}; Robin constant {spec.robin_constant:.6f}")
    print(f"  max |pv C| on {len(rep.test_points)} nodes: {rep.max_residual:.2e} -> {rep.verdict}")

# the eps-ladder shows the endpoint blow-up of the arcsine transform
res = cauchy_pv(arcsine(), 1.0)
print(f"\narcsine at the endpoint: ladder status '{res.status}', last |C_eps| = {abs(res.ladder[-1]):.1f}")
