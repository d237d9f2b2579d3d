import math
import numpy as np
import pytest

from hypothesis import given, settings, strategies as st
from typing import List

from perceptual_patches.attack import DECREASE, INCREASE
from perceptual_patches.evaluation import Metrics, SceneCounts, \
    default_gamma_grid, mae_mse, overestimation_curve

from conftest import scene_counts


def test_mae_mse_values():
    """Test MAE and the root of the mean squared error."""
    mae, mse = mae_mse([1.0, 3.0], [2.0, 1.0])
    assert mae == pytest.approx(1.5)
    assert mse == pytest.approx(np.sqrt(2.5))


@pytest.mark.parametrize("pred,gt", (([], []), ([1.0], [1.0, 2.0])))
def test_mae_mse_errors(pred, gt):
    """Test that the counts must be non-empty and paired."""
    with pytest.raises(ValueError, match=".*at least one.*"):
        mae_mse(pred, gt)


@given(per_scene=scene_counts())
def test_metrics_from_counts(per_scene: List[SceneCounts]):
    """Test that the squared error bounds the absolute error and every
    scene is kept.
    """
    adv = Metrics.from_counts(per_scene)
    clean = Metrics.from_counts(per_scene, adversarial=False)
    for m in (adv, clean):
        assert m.n == len(per_scene)
        assert m.mae <= m.mse + 1e-9
        assert m.per_scene == tuple(per_scene)
    expected = np.mean([abs(s.count_clean - s.count_gt) for s in per_scene])
    assert clean.mae == pytest.approx(expected)


def test_invalid_metrics_raise():
    """Test the invariants of the metrics record."""
    record = (SceneCounts(0, 1.0, 1.0, 1.0),)
    with pytest.raises(ValueError, match=".*non-negative.*"):
        Metrics(-1.0, 0.0, 1, record)
    with pytest.raises(ValueError, match=".*per-scene records.*"):
        Metrics(0.0, 0.0, 2, record)


def test_default_gamma_grids():
    """Test the threshold grids of both directions."""
    inc = default_gamma_grid(INCREASE)
    dec = default_gamma_grid(DECREASE)
    assert (inc[0], inc[-1], len(inc)) == (0.0, 500.0, 51)
    assert (dec[0], dec[-1], len(dec)) == (0.0, 200.0, 41)
    with pytest.raises(ValueError, match=".*Unknown direction.*"):
        default_gamma_grid("up")


@pytest.mark.parametrize("direction,expected", (
    (INCREASE, [2 / 3, 1 / 3, 0.0]),
    (DECREASE, [1 / 3, 0.0, 0.0]),
))
def test_overestimation_curve(direction: str, expected):
    """Test the fraction of scenes shifted beyond each threshold."""
    per_scene = [
        SceneCounts(0, 0.0, 10.0, 15.0),
        SceneCounts(1, 0.0, 10.0, 25.0),
        SceneCounts(2, 0.0, 10.0, 7.0),
    ]
    curve = overestimation_curve(per_scene, [0, 10, 20], direction)
    assert [g for g, _ in curve] == [0.0, 10.0, 20.0]
    assert [f for _, f in curve] == pytest.approx(expected)


@given(
    per_scene=scene_counts(),
    gammas=st.lists(st.floats(0, 1e4), min_size=1, max_size=10)
)
def test_overestimation_curve_is_monotone(
    per_scene: List[SceneCounts], gammas: List[float]
):
    """Test that a larger threshold never has a larger fraction."""
    curve = overestimation_curve(per_scene, sorted(gammas))
    fractions = [f for _, f in curve]
    assert all(0.0 <= f <= 1.0 for f in fractions)
    assert all(a >= b for a, b in zip(fractions, fractions[1:]))


def test_overestimation_curve_errors():
    """Test that scenes and a known direction are required."""
    with pytest.raises(ValueError, match=".*No scenes.*"):
        overestimation_curve([], [0.0])
    with pytest.raises(ValueError, match=".*Unknown direction.*"):
        overestimation_curve([SceneCounts(0, 0, 0, 0)], [0.0], "up")


@settings(max_examples=1000, deadline=None)
@given(pairs=st.lists(
    st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)),
    min_size=1, max_size=20
))
def test_mae_mse_match_loop(pairs):
    """Test both errors against running sums."""
    abs_sum = 0.0
    sq_sum = 0.0
    for p, g in pairs:
        abs_sum += abs(p - g)
        sq_sum += (p - g) ** 2
    mae, mse = mae_mse([p for p, _ in pairs], [g for _, g in pairs])
    assert mae == pytest.approx(abs_sum / len(pairs), rel=1e-9, abs=1e-9)
    assert mse == pytest.approx(
        math.sqrt(sq_sum / len(pairs)), rel=1e-9, abs=1e-9
    )


@settings(max_examples=1000, deadline=None)
@given(
    per_scene=scene_counts(),
    gammas=st.lists(st.floats(-10.0, 1e4), min_size=1, max_size=10),
    direction=st.sampled_from((INCREASE, DECREASE))
)
def test_overestimation_curve_matches_loop(
    per_scene: List[SceneCounts], gammas: List[float], direction: str
):
    """Test every fraction against counting the shifted scenes."""
    curve = overestimation_curve(per_scene, gammas, direction)
    assert len(curve) == len(gammas)
    for (g, fraction), gamma in zip(curve, gammas):
        hits = 0
        for s in per_scene:
            shift = s.count_adv - s.count_clean
            if direction == DECREASE:
                shift = s.count_clean - s.count_adv
            if shift > gamma:
                hits += 1
        assert g == gamma
        assert fraction == pytest.approx(hits / len(per_scene), abs=1e-6)
