import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import frozen as F
from pvcauchy.constructions import arcsine, circle_unit_current, harmonic_measure, tabulated, uniform
from pvcauchy.identities import (
    antisymmetry_check,
    default_test_points,
    density_point_trace,
    halfspace_diagnostic,
    maximal_summability,
    small_transform_fraction,
    verify_quadratic,
    verify_reflectionless,
    write_report_csv,
    write_report_json,
)
from pvcauchy.measure_model import AreaDensity, Atom, Disk, MeasureError, make_measure
from pvcauchy.transforms import KernelSpec


def unit_disk():
    return make_measure([AreaDensity(Disk(0.0, 1.0), lambda z: np.ones(np.shape(z)))])


def discrete(rng, k):
    pts = rng.normal(size=k) + 1j * rng.normal(size=k)
    wts = rng.normal(size=k) + 1j * rng.normal(size=k)
    return make_measure([(w, Atom(p)) for p, w in zip(pts, wts)])


@pytest.fixture(scope="module")
def arcsine_stats():
    return maximal_summability(arcsine())


@pytest.fixture(scope="module")
def uniform_stats():
    return maximal_summability(uniform())


# -- quadratic identity ---------------------------------------------------------


def test_quadratic_circle_reduces_to_algebra():
    rep = verify_quadratic(circle_unit_current(), [0.4])
    assert abs(rep.lhs[0] - 4) < 1e-12 and abs(rep.rhs[0] - 4) < 1e-12


def test_quadratic_circle_random_points():
    rng = np.random.default_rng(3)
    z = 3 * (rng.uniform(-1, 1, 80) + 1j * rng.uniform(-1, 1, 80))
    z = z[np.abs(np.abs(z) - 1) > 0.05][:50]
    rep = verify_quadratic(circle_unit_current(), z)
    assert rep.max_residual < 1e-8


def test_quadratic_uniform_against_oracle():
    rep = verify_quadratic(uniform(), [2j])
    assert abs(rep.lhs[0] - F.QUADRATIC_LHS_UNIFORM_2I) < 1e-12
    rep = verify_quadratic(uniform())
    assert len(rep.test_points) == 64 and rep.verdict == "pass"


def test_quadratic_arcsine_negative_control():
    rep = verify_quadratic(arcsine(), [2.0], expected="fail")
    assert abs(rep.max_residual - 1 / 3) < 1e-6
    assert rep.verdict == "fail" and rep.label == "expected-fail" and rep.ok


def test_quadratic_rejects_points_on_atoms():
    with pytest.raises(MeasureError):
        verify_quadratic(make_measure([Atom(0.5)]), [0.5])


def test_default_points_on_two_circles():
    pts = default_test_points(uniform())
    assert len(pts) == 64
    assert np.allclose(sorted(set(np.round(np.abs(pts), 12))), [1.5, 3.0])
    # curve measures add points inside the curve
    inner = default_test_points(circle_unit_current())
    assert len(inner) == 80 and np.sum(np.abs(inner) < 1) == 16


# -- reflectionless ---------------------------------------------------------------


def test_arcsine_is_reflectionless_and_converges():
    coarse = verify_reflectionless(arcsine(), 16)
    fine = verify_reflectionless(arcsine(), 64)
    assert fine.verdict == "pass" and fine.max_residual < 1e-6
    assert len(fine.test_points) == 64 + 128
    assert fine.max_residual <= coarse.max_residual * 10


def test_uniform_is_not_reflectionless():
    rep = verify_reflectionless(uniform(), points=[0.5])
    assert abs(rep.lhs[0] - 0.5 * math.log(3)) < 1e-12
    assert rep.verdict == "fail"
    assert verify_reflectionless(uniform()).verdict == "fail"


def test_harmonic_pair_is_reflectionless():
    rep = verify_reflectionless(harmonic_measure([(-1, -0.3), (0.3, 1)]).measure)
    assert rep.verdict == "pass"


def test_reflectionless_rejects_atoms():
    with pytest.raises(MeasureError, match="continuous"):
        verify_reflectionless(make_measure([arcsine().components[0], Atom(3.0)]))


def test_report_invariants_and_files(tmp_path):
    rep = verify_reflectionless(uniform(), 8)
    assert np.all(rep.residuals >= 0)
    assert (rep.verdict == "pass") == (rep.max_residual < rep.tolerance)
    write_report_csv(rep, tmp_path / "r.csv")
    write_report_json(rep, tmp_path / "r.json")
    rows = list(csv.reader(open(tmp_path / "r.csv")))
    assert rows[0] == ["point_re", "point_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"]
    assert len(rows) == 1 + len(rep.test_points)
    summary = json.load(open(tmp_path / "r.json"))
    assert {"max_residual", "verdict", "tolerance", "nodes"} <= set(summary)


# -- antisymmetry ----------------------------------------------------------------


def test_antisymmetry_single_pair():
    mu, nu = make_measure([Atom(0)]), make_measure([Atom(1)])
    assert antisymmetry_check(mu, nu, KernelSpec.cauchy(), 0.1) == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 2.0))
def test_antisymmetry_random_discrete(seed, eps):
    rng = np.random.default_rng(seed)
    mu, nu = discrete(rng, 7), discrete(rng, 5)
    for K in (KernelSpec.cauchy(), KernelSpec.riesz(2, 1)):
        assert antisymmetry_check(mu, nu, K, eps) < 1e-12
        assert antisymmetry_check(mu, mu, K, eps) < 1e-12


def test_antisymmetry_errors():
    mu = make_measure([Atom(0)])
    even = KernelSpec.custom(lambda d: 1 / np.abs(d))
    with pytest.raises(ValueError):
        antisymmetry_check(mu, mu, even, 0.1)
    with pytest.raises(ValueError):
        antisymmetry_check(mu, mu, KernelSpec.cauchy(), 0.0)


# -- half-space diagnostic ----------------------------------------------------------


def test_halfspace_two_atoms():
    mu = make_measure([Atom(-1), Atom(1)])
    tr = halfspace_diagnostic(mu, KernelSpec.riesz(2, 1), 0.0, [1.5, 1.0, 0.1])
    assert np.allclose(tr.values, 0.5, rtol=0, atol=1e-15)


@pytest.mark.parametrize("mu", [uniform(), arcsine()], ids=["uniform", "arcsine"])
def test_halfspace_ladders_are_positive_and_nondecreasing(mu):
    tr = halfspace_diagnostic(mu, KernelSpec.riesz(2, 1), 0.0)
    assert tr.positive and tr.nondecreasing


def test_halfspace_errors():
    K = KernelSpec.riesz(2, 1)
    with pytest.raises(MeasureError, match="degenerate"):
        halfspace_diagnostic(uniform(), K, 2.0)
    with pytest.raises(MeasureError):
        halfspace_diagnostic(1j * uniform(), K, 0.0)


# -- maximal function -----------------------------------------------------------------


def test_arcsine_maximal_is_weak_only(arcsine_stats):
    s = arcsine_stats
    assert s.classification == "weak-only"
    assert s.log_r2 > 0.99 and s.log_slope > 0
    assert np.all(np.diff(s.l1_truncated) >= 0)
    assert np.all(s.weak_quasinorm >= 0)
    assert np.ptp(s.weak_quasinorm) < 0.2 * s.weak_quasinorm.max()


def test_uniform_maximal_is_summable(uniform_stats):
    s = uniform_stats
    assert s.classification == "summable"
    assert abs(s.l1_truncated[-1] / s.l1_truncated[-2] - 1) < 0.01


def test_smooth_bump_pair_is_summable():
    x = np.linspace(-1, 1, 41)
    bumps = tabulated(-1, 1, x, np.exp(-(((x - 0.4) / 0.1) ** 2)) + np.exp(-(((x + 0.4) / 0.1) ** 2)))
    assert maximal_summability(bumps, cutoffs=(10.0, 1e2, 1e3)).classification == "summable"


def test_maximal_rejects_atoms():
    with pytest.raises(MeasureError):
        maximal_summability(make_measure([Atom(0)]))


# -- density points ----------------------------------------------------------------------


def test_density_trace_far_from_support():
    tr = density_point_trace(unit_disk(), 2.0, [0.5, 0.25, 0.1])
    assert np.all(tr.mass_ratio == 0) and np.all(tr.quotient == 0)
    assert np.all(np.diff(tr.riesz_value) < 0)


def test_density_trace_inside_disk():
    tr = density_point_trace(unit_disk(), 0.0, [0.5, 0.25, 0.1])
    assert np.allclose(tr.mass_ratio, 1.0, atol=1e-12)
    assert np.all(np.diff(tr.riesz_value) > 0)


def test_density_trace_needs_decreasing_radii():
    with pytest.raises(ValueError):
        density_point_trace(unit_disk(), 0.0, [0.1, 0.2])


def test_small_transform_set_is_small():
    assert small_transform_fraction(unit_disk(), grid=31) < 0.01
