"""Reference values produced by ``oracles.py`` (recomputed in ``test_oracles.py``)."""

# pv of (t+1)^-0.4 (1-t)^0.3 on [-1, 1] at x = 0.2
JACOBI_PV_02 = 2.2121401117576354
# Cauchy transform of the same weight at 0.5 + 0.25i
JACOBI_OFF = complex(2.004145107011624, -1.9538603417525666)
# harmonic measure of [-1, -0.5] U [0.2, 1]: gap zero and density at 0.6
GAP_ROOT_ASYM = -0.16061043609904313
HARMONIC_DENSITY_06 = 0.45624286105737416
# 2 * C[C dmu](2i) for the uniform probability on [-1, 1]
QUADRATIC_LHS_UNIFORM_2I = -0.2149691053321644
# int log(z - t) dt / 2 over [-1, 1] at z = 0.3 + 0.4i
LOGPOT_UNIFORM = complex(-0.4106621560604354, 1.21647744981943)
# Riesz R1 of the unit-disk area measure on the axis at heights 1e-3 and 0.5
RIESZ_DISK_1EM3 = 6.276902125013997
RIESZ_DISK_05 = 3.473259414763296
# Green function of [-1, -0.3] U [0.3, 1] at 0 and 0.15
GREEN_PAIR_0 = 0.3095196042031117
GREEN_PAIR_015 = 0.26909305856564514
