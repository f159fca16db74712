import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvcauchy.constructions import arcsine, circle_unit_current
from pvcauchy.fast_eval import SourceSet, audit, batch_cauchy, build_tree, naive_cauchy, timing_growth
from pvcauchy.measure_model import make_measure
from pvcauchy.transforms import cauchy_eps


def random_sources(n, seed=0, complex_weights=False):
    rng = np.random.default_rng(seed)
    w = rng.random(n) + (1j * rng.random(n) if complex_weights else 0)
    return SourceSet(rng.random(n) + 1j * rng.random(n), w)


@pytest.fixture(scope="module")
def medium():
    src = random_sources(10_000, seed=1)
    return src, build_tree(src, 12)


# -- tree ---------------------------------------------------------------------------


def test_single_source_is_one_leaf():
    tree = build_tree(SourceSet(np.array([0.3 + 0.1j]), np.array([2.0])))
    assert tree.n_cells == 1 and tree.tree.is_leaf(0)
    z = np.array([3 + 1j, -2j])
    assert np.allclose(tree.far_field(0, z), tree.direct(0, z), rtol=1e-15, atol=0)


def test_coincident_sources_use_direct_sums():
    src = SourceSet(np.full(100, 0.5 + 0.5j), np.ones(100))
    tree = build_tree(src)
    assert tree.n_cells == 1
    vals = batch_cauchy(tree, [0.5 + 0.5j, 3.0])
    assert vals[0] == 0  # coincident sources are excised even for eps = 0
    assert abs(vals[1] - 100 / (3.0 - 0.5 - 0.5j)) < 1e-12


def test_every_source_in_exactly_one_leaf(medium):
    _, tree = medium
    t = tree.tree
    leaves = [i for i in range(t.n_cells) if t.is_leaf(i)]
    covered = np.concatenate([t.order[t.start[i]:t.stop[i]] for i in leaves])
    assert np.array_equal(np.sort(covered), np.arange(10_000))
    assert max(t.stop[i] - t.start[i] for i in leaves) <= tree.leaf_cap


def test_moments_reproduce_far_field_at_one_and_a_half_radii(medium):
    _, tree = medium
    rng = np.random.default_rng(5)
    for cell in (0, 1, 7):
        c, r = tree.tree.center[cell], tree.tree.radius[cell]
        z = c + 1.5 * r * np.exp(2j * np.pi * rng.random(50))
        d = tree.direct(cell, z)
        assert np.max(np.abs(tree.far_field(cell, z) - d) / np.abs(d)) <= 0.75**tree.p


def test_far_field_beyond_opening_radius(medium):
    _, tree = medium
    c, r = tree.tree.center[0], tree.tree.radius[0]
    z = c + (r / 0.2) * (1 + np.random.default_rng(2).random(100)) * np.exp(2j * np.pi * np.arange(100) / 100)
    d = tree.direct(0, z)
    assert np.max(np.abs(tree.far_field(0, z) - d) / np.abs(d)) < 1e-9


def test_from_measure_keeps_the_mass():
    src = SourceSet.from_measure(arcsine(), 64)
    assert abs(src.total - 1) < 1e-14
    src = SourceSet.from_measure(make_measure([(2.0, arcsine().components[0][1])]) + circle_unit_current(), 64)
    assert abs(src.total - 2) < 1e-12


# -- batch evaluation -------------------------------------------------------------------


def test_single_far_target(medium):
    src, tree = medium
    z = np.array([40 - 30j])
    assert abs(batch_cauchy(tree, z)[0] - naive_cauchy(src, z)[0]) < 1e-12


@pytest.mark.parametrize("eps", [0.0, 1e-3, 0.05])
def test_batch_matches_naive(medium, eps):
    src, tree = medium
    z = np.random.default_rng(3).random(3000) * 1.2 - 0.1 + 1j * np.random.default_rng(4).random(3000)
    vals = batch_cauchy(tree, z, eps)
    res = audit(tree, z, vals, eps)
    assert res.audited == 200
    assert res.max_rel_error < min(10 * 0.75**tree.p, 1e-9)


def test_complex_weights_and_all_targets_audited():
    src = random_sources(3000, seed=9, complex_weights=True)
    tree = build_tree(src, 8, leaf_cap=16)
    z = np.random.default_rng(1).random(150) + 1j * np.random.default_rng(2).random(150)
    res = audit(tree, z, batch_cauchy(tree, z))
    assert res.audited == 150 and res.max_rel_error < 10 * 0.75**8


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-4, 0.2))
def test_excision_is_exact(seed, eps):
    rng = np.random.default_rng(seed)
    src = SourceSet(rng.random(500) + 1j * rng.random(500), rng.random(500))
    k = int(rng.integers(500))
    # a target strictly inside the eps ball of source k and outside every other ball
    others = np.delete(src.points, k)
    z = src.points[k] + 0.5 * eps * np.exp(2j * np.pi * rng.random())
    if np.min(np.abs(others - z)) <= eps * 1.01:
        return
    tree = build_tree(src, 12)
    got = batch_cauchy(tree, [z], eps)[0]
    ref = np.sum(np.delete(src.weights, k) / (z - others))
    assert abs(got - ref) <= 1e-9 * np.sum(np.abs(src.weights) / np.abs(src.points - z))


def test_matches_truncated_transform_of_a_measure():
    mu = arcsine()
    src = SourceSet.from_measure(mu, 4000)
    z = np.array([0.3 + 0.2j, -1.5, 2j])
    vals = batch_cauchy(build_tree(src), z)
    for zi, v in zip(z, vals):
        assert abs(v - cauchy_eps(mu, zi, 1e-3)) < 1e-6


def test_deterministic_and_worker_independent(medium):
    _, tree = medium
    z = np.random.default_rng(6).random(5000) + 1j * np.random.default_rng(7).random(5000)
    a = batch_cauchy(tree, z, 1e-3, workers=1)
    b = batch_cauchy(tree, z, 1e-3, workers=1)
    c = batch_cauchy(tree, z, 1e-3, workers=4)
    assert np.array_equal(a, b) and np.array_equal(a, c)


def test_timing_growth_runs():
    times, ratios = timing_growth((1 << 10, 1 << 11))
    assert len(times) == 2 and len(ratios) == 1 and np.all(times > 0)


# -- errors ---------------------------------------------------------------------------


def test_errors():
    src = random_sources(50)
    with pytest.raises(ValueError):
        build_tree(src, p=3)
    with pytest.raises(ValueError):
        build_tree(src, leaf_cap=4)
    with pytest.raises(ValueError):
        build_tree(SourceSet(np.array([], complex), np.array([], complex)))
    with pytest.raises(ValueError):
        SourceSet(np.zeros(3, complex), np.ones(2))
    with pytest.raises(ValueError):
        SourceSet(np.array([np.nan + 0j]), np.ones(1))
    tree = build_tree(src)
    with pytest.raises(ValueError):
        batch_cauchy(tree, [0j], eps=-1)
    with pytest.raises(ValueError):
        batch_cauchy(tree, [0j], opening=1.5)
