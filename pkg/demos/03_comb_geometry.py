"""The boundary of F(z) = int log(z - y) dmu(y) for positive measures on the line.

The arcsine law maps the upper half-plane onto a half-strip of height pi.
Splitting the support into two intervals opens a horizontal slot whose tip
is the critical point of the Green function in the gap; the slot length is
the Green function there.  Widom's sum adds those values over all gaps,
which grows along the Cantor construction.
"""

import math

from pvcauchy.comb_geometry import cantor_intervals, comb_report, widom_sum, write_trace_csv
from pvcauchy.constructions import arcsine, harmonic_measure, uniform

for name, mu in [("arcsine", arcsine()), ("uniform", uniform()),
                 ("two intervals", harmonic_measure([(-1, -0.3), (0.3, 1)]).measure)]:
    rep = comb_report(mu, n_grid=801)
    fr = rep.vh_fractions
    print(f"{name:14s} height/pi {rep.strip_height / math.pi:.8f}  vertical {fr['vertical']:.2f}  "
          f"horizontal {fr['horizontal']:.2f}  neither {fr['neither']:.2f}  comb-like {rep.comb_like}")

write_trace_csv(comb_report(arcsine(), n_grid=401), "arcsine_trace.csv")
print("\nwrote arcsine_trace.csv (x, ReF, ImF, ReF', ImF', class)")

print("\nCantor depth  gaps  Widom partial sum")
for depth in range(1, 5):
    rep = widom_sum(harmonic_measure(cantor_intervals(depth)))
    print(f"{depth:11d}  {len(rep.critical_points):4d}  {rep.partial_sum:.6f}")
