import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import frozen as F
import oracles as O
from pvcauchy.constructions import arcsine, circle_unit_current, jacobi, semicircle, sqrt_branch, uniform
from pvcauchy.measure_model import AreaDensity, Atom, Disk, make_measure
from pvcauchy.transforms import (
    KernelSpec,
    PrincipalValueError,
    cauchy,
    cauchy_eps,
    cauchy_maximal,
    cauchy_pv,
    conjugate_poisson,
    eps_grid,
    jacobi_hilbert,
    kernel_diff_coeffs,
    kernel_symmetry_residual,
    log_potential,
    mass_in_ball,
    odd_kernel_eps,
    poisson,
    riesz_r1,
    scaled,
)


def unit_disk():
    return make_measure([AreaDensity(Disk(0.0, 1.0), lambda z: np.ones(np.shape(z)))])


# -- closed forms -----------------------------------------------------------


def test_uniform_truncated_transform_is_flat_in_eps():
    # both sides of the ball contribute logs whose eps-dependence cancels
    for eps in (1e-9, 1e-3, 0.3):
        assert abs(cauchy_eps(uniform(), 0.5, eps) - 0.5 * math.log(3)) < 1e-13
    assert abs(cauchy_eps(uniform(), 0.5, 0.7) + 0.5 * math.log(0.7 / 1.5)) < 1e-13


def test_uniform_principal_value():
    assert abs(cauchy(uniform(), 0.5) - 0.5 * math.log(3)) < 1e-13


@pytest.mark.parametrize("x", [-0.999, -0.5, 0.0, 0.3, 0.9999])
def test_arcsine_principal_value_vanishes(x):
    assert abs(cauchy(arcsine(), x)) < 1e-12


def test_arcsine_off_support():
    assert abs(cauchy(arcsine(), 2.0) - 1 / math.sqrt(3)) < 1e-14
    z = 0.3 + 0.7j
    assert abs(cauchy(arcsine(), z) - 1 / sqrt_branch(z)) < 1e-13


def test_semicircle_closed_form_and_pv():
    for z in (2.0, -3 + 0.1j, 0.4 + 1e-6j, 1.000001, 5j):
        assert abs(cauchy(semicircle(), z) - (z - sqrt_branch(z))) < 1e-10
    for x in (-0.9, 0.0, 0.5):
        assert abs(cauchy(semicircle(), x) - x) < 1e-13


def test_semicircle_value_at_two_is_2_minus_sqrt3():
    assert abs(cauchy(semicircle(), 2.0) - (2 - math.sqrt(3))) < 1e-14


def test_semicircle_endpoint_is_direct():
    res = cauchy_pv(semicircle(), 1.0)
    assert res.method == "direct" and res.reliable
    assert abs(res.value - 1) < 1e-14


def test_semicircle_decay():
    y = 1e6
    assert abs(cauchy(semicircle(), 1j * y) * 1j * y - 0.5) < 1e-9


def test_circle_current():
    mu = circle_unit_current()
    assert abs(cauchy(mu, 0) - 2) < 1e-13
    assert abs(cauchy(mu, 0.3 - 0.5j) - 2) < 1e-13
    assert abs(cauchy(mu, 3)) < 1e-12
    res = cauchy_pv(mu, 1.0)
    assert abs(res.value - 1) < 1e-12
    assert res.status == "converged"
    assert abs(res.ladder[-1] - 1) < 1e-9


def test_disk_area_measure():
    mu = unit_disk()
    for z in (0.3 + 0.2j, -0.5j, 0.9):
        assert abs(cauchy(mu, z) - math.pi * np.conj(z)) < 1e-12
    for z in (1.5, 2 - 3j):
        assert abs(cauchy(mu, z) - math.pi / z) < 1e-12


# -- frozen oracle values ------------------------------------------------------


def test_jacobi_weight_transform():
    mu = jacobi(-1, 1, -0.4, 0.3)
    assert abs(cauchy(mu, 0.2) - F.JACOBI_PV_02) < 1e-13
    assert abs(cauchy(mu, 0.5 + 0.25j) - F.JACOBI_OFF) < 1e-13


def test_log_potential():
    assert abs(log_potential(uniform(), 0.3 + 0.4j) - F.LOGPOT_UNIFORM) < 1e-13
    # on the axis the imaginary part counts the mass to the right
    assert abs(log_potential(arcsine(), 0.5) - complex(-math.log(2), math.pi / 3)) < 1e-13
    assert abs(log_potential(arcsine(), 1.0) - complex(-math.log(2), 0.0)) < 1e-14


def test_riesz_r1_disk():
    assert abs(riesz_r1(unit_disk(), 0, 0, 1e-3) - F.RIESZ_DISK_1EM3) < 1e-10
    assert abs(riesz_r1(unit_disk(), 0, 0, 0.5) - F.RIESZ_DISK_05) < 1e-12
    exact = lambda z: 2 * math.pi * (1 - z / math.sqrt(1 + z * z))  # noqa: E731
    assert abs(riesz_r1(unit_disk(), 0, 0, 1e-5, variation=True) - exact(1e-5)) < 1e-9


@settings(max_examples=12, deadline=None)
@given(st.floats(-0.9, 2.0), st.floats(-0.9, 2.0), st.floats(-0.95, 0.95))
def test_jacobi_hilbert_against_mpmath(alpha, beta, t):
    # jacobi_hilbert uses the weight (1+u)^alpha (1-u)^beta and the kernel 1/(u - t)
    ref = -O.pv_interval(O.Jacobi(-1, 1, alpha, beta), t)
    got = float(jacobi_hilbert(alpha, beta, t))
    assert abs(got - ref.real) < 1e-10 * max(1.0, abs(ref))


@pytest.mark.parametrize("alpha, beta", [(0, 0), (1, 0), (2, 3), (0.5, -0.5), (-0.5, 1)])
def test_jacobi_hilbert_integer_and_reflection_cases(alpha, beta):
    for t in (-0.6, 0.1, 0.7):
        ref = -O.pv_interval(O.Jacobi(-1, 1, alpha, beta), t)
        assert abs(float(jacobi_hilbert(alpha, beta, t)) - ref.real) < 1e-12


# -- ladders and errors ----------------------------------------------------------


def test_atom_point_is_excluded():
    mu = uniform() + make_measure([Atom(0.5, 1.0)])
    with pytest.raises(PrincipalValueError):
        cauchy_pv(mu, 0.5)
    assert abs(cauchy(mu, 2.0) - (0.5 * math.log(3) + 1 / (2.0 - 0.5))) < 1e-13


def test_divergent_endpoint_is_reported():
    res = cauchy_pv(arcsine(), 1.0)
    assert res.method == "ladder" and not res.reliable
    assert res.status == "diverging"


def test_eps_must_be_positive():
    with pytest.raises(ValueError):
        cauchy_eps(uniform(), 0.0, 0.0)


def test_eps_grid_nests_under_refinement():
    g0, g1 = eps_grid(1e-3, 1.0), eps_grid(1e-3, 1.0, refine=1)
    assert set(g0).issubset(set(g1))
    assert g0[-1] <= 1e-3


def test_maximal_bounds_the_truncations():
    mu = uniform()
    cstar = cauchy_maximal(mu, 0.5)
    assert cstar >= abs(cauchy_eps(mu, 0.5, 0.25)) - 1e-15
    assert cstar >= 0.5 * math.log(3) - 1e-13


# -- kernels --------------------------------------------------------------------


points = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(points, points, points)
def test_cauchy_kernel_symmetry_identity(x, y, z):
    d = [abs(x - y), abs(y - z), abs(z - x)]
    if min(d) < 1e-3:
        return
    K = KernelSpec.cauchy()
    terms = [abs(K(x - y) * K(y - z)), abs(K(y - z) * K(z - x)), abs(K(z - x) * K(x - y))]
    assert abs(kernel_symmetry_residual(K, x, y, z)) <= 1e-13 * max(terms)


@settings(max_examples=100, deadline=None)
@given(points, points, points)
def test_interpolation_coefficients(a, b, c):
    if abs(a - b) < 1e-3:
        return
    A, B = kernel_diff_coeffs(a, b, c)
    scale = max(1.0, abs(A), abs(B))
    assert abs(A + B - 1) < 1e-14 * scale
    assert abs(A * a + B * b - c) < 1e-14 * scale * max(1.0, abs(a), abs(b))


def test_interpolation_error_decays_cubically():
    a, b, c = -0.4, 0.5, 0.1 + 0.2j
    A, B = kernel_diff_coeffs(a, b, c)
    err = lambda z: abs(A / (z - a) + B / (z - b) - 1 / (z - c))  # noqa: E731
    ratios = [err(R) * R ** 3 for R in (10.0, 100.0, 1000.0)]
    assert max(ratios) < 2 * min(ratios)


def test_custom_kernel_oddness():
    assert KernelSpec.custom(lambda d: d / np.abs(d) ** 3).odd
    even = KernelSpec.custom(lambda d: 1 / np.abs(d))
    assert not even.odd
    with pytest.raises(ValueError):
        odd_kernel_eps(even, uniform(), 0.0, 0.1)


def test_riesz_kernel_is_real_part_of_conjugate_cauchy():
    K1, K2 = KernelSpec.riesz(2, 1), KernelSpec.riesz(2, 2)
    d = np.array([0.3 + 0.4j, -2 + 1j])
    assert np.allclose(K1(d) + 1j * K2(d), 1 / np.conj(d))
    with pytest.raises(ValueError):
        KernelSpec.riesz(3, 1)


# -- Poisson-type transforms and helpers -------------------------------------------


def test_poisson_and_conjugate_of_uniform():
    x, y = 0.2, 0.3
    P = (math.atan((1 - x) / y) + math.atan((1 + x) / y)) / (2 * math.pi)
    assert abs(poisson(uniform(), x, y) - P) < 1e-13
    Q = 0.25 * math.log(((x + 1) ** 2 + y * y) / ((x - 1) ** 2 + y * y))
    assert abs(conjugate_poisson(uniform(), x, y) - Q) < 1e-13
    with pytest.raises(ValueError):
        poisson(circle_unit_current(), 0, 1)


def test_mass_in_ball_and_scaling():
    assert abs(mass_in_ball(uniform(), 0.0, 0.5) - 0.5) < 1e-13
    assert abs(mass_in_ball(unit_disk(), 0.0, 0.5) - math.pi / 4) < 1e-12
    assert abs(cauchy(scaled(uniform(), 2j), 3.0) - 2j * cauchy(uniform(), 3.0)) < 1e-14
