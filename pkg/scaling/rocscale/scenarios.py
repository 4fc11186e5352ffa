"""
Synthetic verifier pairs showing that early scaling does not predict
large-compute accuracy.

"same_limit": the two curves share the segment at the origin and differ in
the top-right corner. They scale differently at small budgets and reach the
same limit.

"reversal": the curve that is flatter in the top-right corner scales faster
at first, the one that is steeper at the origin ends higher.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

from rocscale.models import RocCurve
from rocscale.rejection import early_slope, limit_accuracy
from rocscale.roc import points_curve

SCENARIO_PI = 0.3


@dataclass(frozen=True)
class Scenario:
    name: str
    title: str
    pi: float
    curves: Tuple[Tuple[str, RocCurve], ...]


@dataclass(frozen=True)
class CurveSummary:
    label: str
    early_slope: float
    limit: float


def all_scenarios() -> Tuple[Scenario, ...]:
    same_limit = Scenario(
        "same_limit",
        "Different early scaling, same large-scale performance",
        SCENARIO_PI,
        (
            ("steep_top", points_curve([(0.0, 0.0), (0.1, 0.6), (1.0, 1.0)])),
            ("flat_top", points_curve([(0.0, 0.0), (0.1, 0.6), (0.4, 0.95), (1.0, 1.0)])),
        ),
    )
    reversal = Scenario(
        "reversal",
        "Early scaling reverses at large scale",
        SCENARIO_PI,
        (
            ("fast_start", points_curve([(0.0, 0.0), (0.3, 0.9), (1.0, 1.0)])),
            ("strong_finish", points_curve([(0.0, 0.0), (0.02, 0.3), (1.0, 1.0)])),
        ),
    )
    return same_limit, reversal


def get_scenario(name: str) -> Scenario:
    for sc in all_scenarios():
        if sc.name == name:
            return sc
    raise KeyError(name)


def summarize(scenario: Scenario) -> Dict[str, CurveSummary]:
    pi = scenario.pi
    return {
        label: CurveSummary(label, early_slope(curve, pi), limit_accuracy(curve, pi))
        for label, curve in scenario.curves
    }
