"""The square of the transform is twice the transform of ``C dmu``.

For the unit-circle current ``(i/pi) dz`` the transform is 2 inside, 0
outside and 1 on the circle, so the identity reduces to ``4 = 2 * 2``.
Absolutely continuous densities with bounded transforms satisfy it too.
The arcsine law has an unbounded transform at the endpoints, and the
identity breaks: at z = 2 the two sides differ by exactly 1/3.
"""

from pvcauchy.constructions import arcsine, circle_unit_current, uniform
from pvcauchy.identities import verify_quadratic

for name, mu, pts, expected in [
    ("circle current", circle_unit_current(), None, "pass"),
    ("uniform", uniform(), None, "pass"),
    ("arcsine at z = 2", arcsine(), [2.0], "fail"),
]:
    rep = verify_quadratic(mu, pts, expected=expected)
    print(f"{name:18s} points {len(rep.test_points):3d}  max residual {rep.max_residual:.3e}  -> {rep.label}")

rep = verify_quadratic(arcsine(), [2.0], expected="fail")
print(f"\narcsine: 2 C[C dmu](2) = {rep.lhs[0].real:+.12f}, C(2)^2 = {rep.rhs[0].real:+.12f}")
