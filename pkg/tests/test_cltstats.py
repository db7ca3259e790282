import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from shotvar import cltstats, sim
from shotvar.cltstats import DeltaC, classify_delta_c, classify_tmap, sigma_ratio
from shotvar.errors import CapacityError, DegenerateError, InsufficientDataError


def test_window_means_are_disjoint_prefix_windows():
    x = np.arange(20, dtype=float)
    assert cltstats.window_means(x, 4, 3).tolist() == [1.5, 5.5, 9.5]
    with pytest.raises(CapacityError, match="need 24"):
        cltstats.window_means(x, 4, 6)


@given(st.integers(1, 64), st.integers(1, 64), st.integers(0, 100))
def test_window_means_length_invariant(w, n, extra):
    x = np.ones(w * n + extra)
    m = cltstats.window_means(x, w, n)
    assert len(m) == n and len(m) * w <= len(x)


def test_rsd_curve_against_hand_computation():
    rng = np.random.default_rng(1)
    x = rng.random(64 * 16) + 0.5
    curve = cltstats.rsd_curve(x, (2, 4, 8), 16)
    for (lw, lr), w in zip(curve.points, (2, 4, 8)):
        m = x[: 16 * w].reshape(16, w).mean(axis=1)
        sd = math.sqrt(sum((v - m.mean()) ** 2 for v in m) / 15)
        assert lw == math.log2(w)
        assert lr == pytest.approx(math.log2(sd / m.mean()), abs=1e-12)


def test_rsd_curve_argument_checks():
    x = np.ones(1000)
    with pytest.raises(ValueError):
        cltstats.rsd_curve(x, (4, 4), 2)
    with pytest.raises(ValueError):
        cltstats.rsd_curve(x, (3, 6), 2)
    with pytest.raises(CapacityError, match="need 32768"):
        cltstats.rsd_curve(x)
    assert cltstats.required_shots() == 2**15


def test_degenerate_points_are_excluded_with_diagnostics():
    flat = np.ones(2**15)
    curve = cltstats.rsd_curve(flat)
    assert curve.degenerate and len(curve.diagnostics) == 6
    with pytest.raises(DegenerateError):
        cltstats.measure_c(flat)
    with pytest.raises(InsufficientDataError):
        cltstats.fit_c(curve)
    # alternating +-1: every window of even size has mean 0
    alt = np.tile([1.0, -1.0], 2**14)
    assert cltstats.rsd_curve(alt).points == []


def test_negative_mean_uses_magnitude():
    rng = np.random.default_rng(2)
    x = rng.normal(-3, 1, 2**15)
    c = cltstats.measure_c(x).c
    assert c == pytest.approx(math.log2(1 / 3), abs=0.15)


def test_fit_exact_lines():
    pts = [(float(k), -0.5 * k + 0.3) for k in range(2, 8)]
    curve = cltstats.RsdCurve(pts, (4, 8, 16, 32, 64, 128), 256)
    fit = cltstats.fit_c(curve)
    assert fit.c == pytest.approx(0.3) and fit.slope == -0.5 and fit.residual_rms < 1e-12
    tilted = cltstats.RsdCurve([(x, -0.4 * x + 1.0) for x, _ in pts], curve.window_sizes, 256)
    free = cltstats.fit_c(tilted, fix_slope=False)
    assert free.slope == pytest.approx(-0.4) and free.c == pytest.approx(1.0)
    assert not free.fixed_slope and free.n_points == 6


def test_bernoulli_quarter_intercept():
    # [DERIVED] 0.5 * log2(3) = 0.79248...; many windows keep the estimate tight
    target = oracles.bernoulli_c(0.25)
    assert target == pytest.approx(0.7924812503605781, abs=1e-15)
    s = sim.sample_coin(0.25, 2**19, seed=5)
    assert cltstats.measure_c(s, n_windows=4096).c == pytest.approx(target, abs=0.05)
    assert cltstats.measure_c(sim.sample_coin(0.25, 2**15, seed=5)).c == pytest.approx(target, abs=0.15)


def test_curve_csv():
    curve = cltstats.RsdCurve([(2.0, -1.0), (3.0, -1.5)], (4, 8), 2)
    assert curve.to_csv() == "log2_w,log2_rsd\n2.0,-1.0\n3.0,-1.5\n"


@pytest.mark.parametrize("d,color", [(0.0, "green"), (0.4999, "green"), (0.5, "yellow"), (1.0, "yellow"),
                                     (1.0001, "black"), (-0.7, "yellow"), (5, "black")])
def test_classify_delta_c(d, color):
    assert classify_delta_c(d) == color


def test_classify_delta_c_object_and_sigma_ratio():
    assert classify_delta_c(DeltaC(-0.851, -2.820)) == "black"
    assert DeltaC(-3.030, -2.871).delta == pytest.approx(0.159)
    assert sigma_ratio(0.5) == pytest.approx(math.sqrt(2))
    assert sigma_ratio(-1.0) == 2.0


def test_classify_tmap():
    values = [-1.0, 0.0, 1.0]  # mean 0, sample sd exactly 1
    assert classify_tmap(values, -1.6) == "red"
    assert classify_tmap(values, -1.5) == "orange"
    assert classify_tmap(values, -0.1) == "orange"
    assert classify_tmap(values, 0.0) == "yellow"
    assert classify_tmap(values, 1.49) == "yellow"
    assert classify_tmap(values, 1.5) == "green"
    assert classify_tmap([100, 120, 140, 160, 180], 200) == "green"
    with pytest.raises(DegenerateError):
        classify_tmap([5, 5, 5], 5)
    with pytest.raises(DegenerateError):
        classify_tmap([5], 5)


@given(st.floats(-10, 10), st.floats(0.1, 10))
def test_variance_of_variance_affine(shift, scale):
    x = np.random.default_rng(0).normal(size=500)
    base = cltstats.variance_of_variance(x)
    assert cltstats.variance_of_variance(scale * x + shift) == pytest.approx(scale**4 * base, rel=1e-6)


def test_variance_of_variance_small_input():
    with pytest.raises(InsufficientDataError):
        cltstats.variance_of_variance([1.0, 2.0, 3.0])
