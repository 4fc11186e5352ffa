import numpy as np
import pytest

from rocscale.bon import bon_accuracy, h_integral
from rocscale.rejection import (
    accuracy_at_compute,
    de_emergence,
    limit_accuracy,
    point_cost,
    slope_dA_dC,
)
from rocscale.roc import binormal_curve, eval_T, is_concave, power_curve
from rocscale.scenarios import all_scenarios, get_scenario, summarize

from tests.utils import random_concave_curve, random_curve

GRID = 4096
PI = 0.3


@pytest.mark.parametrize(
    "curve", [power_curve(0.5, grid=GRID), binormal_curve(1.0, grid=GRID)], ids=["power", "binormal"]
)
def test_slope_matches_finite_differences(curve):
    delta = 0.25 / GRID
    mids = [(i + 0.5) / GRID for i in np.linspace(0.05 * GRID, 0.95 * GRID, 20).astype(int)]
    for F in mids:
        c_lo = point_cost(F + delta, eval_T(curve, F + delta), PI)
        c_hi = point_cost(F - delta, eval_T(curve, F - delta), PI)
        fd = (accuracy_at_compute(curve, PI, c_hi) - accuracy_at_compute(curve, PI, c_lo)) / (
            c_hi - c_lo
        )
        assert slope_dA_dC(curve, PI, F) == pytest.approx(fd, rel=1e-4, abs=1e-12)


def test_accuracy_grows_with_compute_on_concave_curves():
    rng = np.random.default_rng(300)
    for _ in range(50):
        c = random_concave_curve(rng)
        pi = float(rng.uniform(0.05, 0.95))
        accs = [accuracy_at_compute(c, pi, C) for C in np.geomspace(1.0, 1e4, 40)]
        assert all(b >= a - 1e-12 for a, b in zip(accs, accs[1:]))
        accs = [bon_accuracy(c, pi, N).acc_exact for N in (1, 2, 3, 5, 8, 13, 21, 34, 55, 89)]
        assert all(b >= a - 1e-12 for a, b in zip(accs, accs[1:]))


def test_more_positives_never_hurt():
    rng = np.random.default_rng(301)
    for _ in range(20):
        c = random_curve(rng)
        for n in range(1, 21):
            hs = [h_integral(c, n - p, p) for p in range(n + 1)]
            assert all(b >= a - 1e-12 for a, b in zip(hs, hs[1:]))


def test_de_emergence_on_random_curves():
    rng = np.random.default_rng(302)
    for _ in range(30):
        c = random_concave_curve(rng)
        pi = float(rng.uniform(0.05, 0.95))
        z = float(rng.uniform(1.5, 5.0))
        res = de_emergence(c, pi, z)
        for C in np.linspace(1.0, z, 20):
            a = accuracy_at_compute(c, pi, C)
            assert accuracy_at_compute(res.extension_stagnant, pi, C) == pytest.approx(a, abs=1e-9)
            assert accuracy_at_compute(res.extension_perfect, pi, C) == pytest.approx(a, abs=1e-9)
        assert res.sup_A_stagnant == pytest.approx(accuracy_at_compute(c, pi, z), abs=1e-9)
        assert res.sup_A_perfect == 1.0
        assert limit_accuracy(res.extension_stagnant, pi) == pytest.approx(res.sup_A_stagnant)


def test_scenarios_are_concave():
    for sc in all_scenarios():
        for _, curve in sc.curves:
            assert is_concave(curve)


def test_same_limit_scenario():
    s = summarize(get_scenario("same_limit"))
    assert s["steep_top"].limit == pytest.approx(0.72)
    assert s["flat_top"].limit == pytest.approx(0.72)
    assert s["flat_top"].early_slope > s["steep_top"].early_slope


def test_reversal_scenario():
    s = summarize(get_scenario("reversal"))
    assert s["fast_start"].early_slope > s["strong_finish"].early_slope
    assert s["fast_start"].limit == pytest.approx(0.5625)
    assert s["strong_finish"].limit == pytest.approx(4.5 / 5.2)
    sc = get_scenario("reversal")
    curves = dict(sc.curves)
    # the order of the two curves flips somewhere between small and large budgets
    small = [accuracy_at_compute(curves[k], sc.pi, 1.2) for k in ("fast_start", "strong_finish")]
    large = [accuracy_at_compute(curves[k], sc.pi, 1e3) for k in ("fast_start", "strong_finish")]
    assert small[0] > small[1]
    assert large[0] < large[1]


def test_unknown_scenario():
    with pytest.raises(KeyError):
        get_scenario("nope")
