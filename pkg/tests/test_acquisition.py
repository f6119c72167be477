import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from practical_ego.acquisition import (
    Incumbent,
    ei_batch,
    ei_from_moments,
    expected_improvement,
    maximize_acquisition,
    pattern_search,
)
from practical_ego.gp import fit
from practical_ego.kernels import KernelParams
from practical_ego.special_math import ei_tradeoff, std_normal_pdf, tau

UNIT2 = np.array([[0.0, 1.0], [0.0, 1.0]])


def toy_model(eps=1e-6):
    X = np.array([[0.1], [0.45], [0.8]])
    y = np.array([0.5, -0.3, 0.2])
    return fit(X, y, KernelParams("se", 0.15), eps), Incumbent.from_data(X, y)


def test_incumbent_from_data():
    inc = Incumbent.from_data([[0.0], [1.0], [2.0]], [3.0, -1.0, 2.0])
    assert inc.f_plus == -1.0
    assert inc.x_plus.tolist() == [1.0]


def test_ei_at_mean_equal_to_incumbent():
    m = fit(np.zeros((0, 1)), [], KernelParams(), 1e-6)
    inc = Incumbent(0.0, np.zeros(1))
    assert expected_improvement(m, inc, np.array([0.3])) == pytest.approx(std_normal_pdf(0.0), rel=1e-15)


@settings(max_examples=200)
@given(st.floats(0, 1))
def test_ei_is_sigma_tau_and_dominates_improvement(x):
    m, inc = toy_model()
    post = m.posterior(np.array([x]))
    ei = expected_improvement(m, inc, np.array([x]))
    z = (inc.f_plus - post.mean) / post.std
    if abs(z) <= 40:
        assert ei == pytest.approx(post.std * tau(z), abs=1e-12)
    assert ei >= 0.0
    assert ei >= inc.f_plus - post.mean - 1e-12


def test_vectorized_ei_matches_scalar_path():
    rng = np.random.default_rng(0)
    for _ in range(20):
        f_plus = rng.normal()
        mean = rng.normal(size=500) * 3
        std = 10.0 ** rng.uniform(-6, 0, size=500)
        vec = ei_from_moments(f_plus, mean, std)
        scal = [ei_tradeoff(f_plus - m, s) for m, s in zip(mean, std)]
        np.testing.assert_allclose(vec, scal, rtol=1e-12, atol=1e-12)


def test_vectorized_ei_zero_std():
    assert ei_from_moments(1.0, [0.5, 2.0], [0.0, 0.0]).tolist() == [0.5, 0.0]


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
def test_ei_positive_at_sampled_points_with_nugget(eps):
    m, inc = toy_model(eps)
    for x in m.X:
        post = m.posterior(x)
        assert post.std > 0
        # beyond |z| ~ 37 the exact value is below the smallest double
        if abs(inc.f_plus - post.mean) / post.std <= 37:
            assert expected_improvement(m, inc, x) > 0.0
    assert expected_improvement(m, inc, inc.x_plus) > 0.0


def test_prior_model_any_point_is_a_maximizer():
    m = fit(np.zeros((0, 2)), [], KernelParams(), 1e-6)
    inc = Incumbent(0.7, np.zeros(2))
    x, v = maximize_acquisition(m, inc, UNIT2, budget=50, rng=np.random.default_rng(1))
    assert v == pytest.approx(ei_tradeoff(0.7, 1.0), rel=1e-12)
    assert np.all((x >= 0) & (x <= 1))


def test_beats_dense_grid_in_one_dimension():
    m, inc = toy_model()
    grid = np.linspace(0, 1, 10_001)[:, None]
    best = ei_batch(m, inc.f_plus, grid).max()
    x, v = maximize_acquisition(m, inc, np.array([[0.0, 1.0]]), rng=np.random.default_rng(2))
    assert v >= best - 1e-6
    assert v == pytest.approx(expected_improvement(m, inc, x), rel=1e-12)


def test_budget_one_returns_the_probe():
    m, inc = toy_model()
    rng = np.random.default_rng(3)
    x, v = maximize_acquisition(m, inc, np.array([[0.0, 1.0]]), budget=1, rng=rng)
    probe = np.random.default_rng(3).random((1, 1))[0]
    assert x.tolist() == probe.tolist()
    assert v == pytest.approx(expected_improvement(m, inc, probe), rel=1e-12)


def test_deterministic_per_seed():
    rng_a, rng_b = np.random.default_rng(4), np.random.default_rng(4)
    m, inc = toy_model()
    box = np.array([[0.0, 1.0]])
    assert maximize_acquisition(m, inc, box, rng=rng_a)[0].tolist() == \
        maximize_acquisition(m, inc, box, rng=rng_b)[0].tolist()


def test_max_ei_grows_with_budget_on_nested_candidates():
    rng = np.random.default_rng(5)
    X = rng.random((8, 2))
    y = rng.standard_normal(8)
    m = fit(X, y, KernelParams("matern", 0.2), 1e-6)
    inc = Incumbent.from_data(X, y)
    prev = -np.inf
    for budget in (10, 100, 1000, 4000):
        _, v = maximize_acquisition(m, inc, UNIT2, budget=budget, rng=np.random.default_rng(6))
        assert v >= prev - 1e-12
        prev = v


def test_returned_value_dominates_every_probe():
    rng = np.random.default_rng(7)
    X = rng.random((6, 2))
    y = rng.standard_normal(6)
    m = fit(X, y, KernelParams("se", 0.3), 1e-6)
    inc = Incumbent.from_data(X, y)
    probes = np.random.default_rng(8).random((820, 2))
    _, v = maximize_acquisition(m, inc, UNIT2, budget=1024, rng=np.random.default_rng(8))
    assert v >= ei_batch(m, inc.f_plus, probes).max()


def test_pattern_search_finds_quadratic_peak():
    fun = lambda P: -np.sum((P - 0.3) ** 2, axis=1)
    starts = np.array([[0.9, 0.9], [0.1, 0.8]])
    X, V, used = pattern_search(fun, starts, fun(starts), np.zeros(2), np.ones(2), [500, 500])
    assert np.allclose(X, 0.3, atol=1e-5)
    assert used <= 1000


def test_pattern_search_respects_box():
    fun = lambda P: P[:, 0]
    X, _, _ = pattern_search(fun, np.array([[0.5]]), np.array([0.5]), np.zeros(1), np.ones(1), [100])
    assert X[0, 0] == 1.0


@given(st.floats(-2, 2), st.floats(0.01, 1), st.floats(0.1, 3), st.floats(0.01, 1))
def test_improvement_bounded_by_ratio_times_ei(mu, sigma, B, frac):
    # build f inside the envelope |f - mu| <= B sigma with f < f_plus
    f = mu - B * sigma * (2 * frac - 1)
    f_plus = f + frac
    improvement = max(f_plus - f, 0.0)
    ei = ei_tradeoff(f_plus - mu, sigma)
    assert improvement <= tau(B) / tau(-B) * ei + 1e-9
