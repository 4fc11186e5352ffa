"""
Rejection sampling: resample until the verifier accepts.

For the classifier with false positive rate F the expected number of
generator samples is C(F) = 1 / (T(F) pi + F (1 - pi)) and the accuracy of
the accepted sample is the precision T(F) pi / (T(F) pi + F (1 - pi)).
C is strictly decreasing along the curve, so accuracy is also a function
A(C) of the expected compute.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np  # debdeps: python3-numpy

from rocscale.config import metrics
from rocscale.models import CurveKind, DomainError, Point, RocCurve
from rocscale.roc import slope_between, derivative_T, eval_T, slope_at_origin
from rocscale.utils import RocScaleError

log = logging.getLogger("rocscale.rejection")

# relative distance under which a budget snaps onto a curve breakpoint
SNAP_RTOL = 1e-14


class ZeroAcceptance(RocScaleError, ValueError):
    pass


class BudgetOutOfRange(RocScaleError, ValueError):
    pass


class BudgetTooLarge(BudgetOutOfRange):
    pass


class ZeroAccuracyPrefix(RocScaleError, ValueError):
    pass


class KinkPoint(RocScaleError, ValueError):
    """dA/dC requested where T'(F) does not exist"""

    def __init__(self, msg: str, left: Optional[float], right: Optional[float]):
        super().__init__(msg)
        self.left = left
        self.right = right


def _check_pi(pi: float, low_open=False, high_open=False) -> None:
    ok = (pi > 0 if low_open else pi >= 0) and (pi < 1 if high_open else pi <= 1)
    if not ok:
        lb = "(" if low_open else "["
        rb = ")" if high_open else "]"
        raise DomainError(f"pi={pi} outside {lb}0, 1{rb}")


def _check_f(F: float) -> None:
    if not 0.0 <= F <= 1.0:
        raise DomainError(f"F={F} outside [0, 1]")


def _precision(F: float, T: float, pi: float) -> float:
    if pi == 0.0:
        return 0.0
    if pi == 1.0:
        return 1.0
    acc = T * pi + F * (1.0 - pi)
    if acc <= 0.0:
        raise ZeroAcceptance(f"acceptance probability is zero at F={F}")
    return T * pi / acc


def _dA_dC(F: float, T: float, tprime: Optional[float], pi: float) -> Optional[float]:
    if tprime is None:
        return None
    if pi in (0.0, 1.0):
        return 0.0
    if math.isinf(tprime):
        # limit of the expression for T' -> inf
        return -(1.0 - pi) * F
    return pi * (1.0 - pi) * (T - F * tprime) / (1.0 + pi * tprime - pi)


def acceptance(curve: RocCurve, pi: float, F: float) -> float:
    """Probability that a generator sample is accepted at F"""
    _check_pi(pi)
    _check_f(F)
    return eval_T(curve, F) * pi + F * (1.0 - pi)


def compute_cost(curve: RocCurve, pi: float, F: float) -> Optional[float]:
    """Expected generator samples per accepted output.

    None stands for an infinite cost (zero acceptance probability).
    """
    acc = acceptance(curve, pi, F)
    if acc <= 0.0:
        return None
    return 1.0 / acc


def precision(curve: RocCurve, pi: float, F: float) -> float:
    """Accuracy of the accepted sample at false positive rate F"""
    _check_pi(pi)
    _check_f(F)
    return _precision(F, eval_T(curve, F), pi)


def point_precision(F: float, T: float, pi: float) -> float:
    """Precision of a given operating point, e.g. the lower end of a
    vertical jump, which eval_T does not return
    """
    _check_pi(pi)
    _check_f(F)
    return _precision(F, T, pi)


def point_cost(F: float, T: float, pi: float) -> Optional[float]:
    _check_pi(pi)
    _check_f(F)
    acc = T * pi + F * (1.0 - pi)
    return 1.0 / acc if acc > 0.0 else None


def _path_acceptance(curve: RocCurve, pi: float) -> np.ndarray:
    return curve.t_array * pi + curve.f_array * (1.0 - pi)


def max_finite_cost(curve: RocCurve, pi: float) -> Optional[float]:
    """Largest attainable expected cost, None when unbounded (T(0) = 0)"""
    _check_pi(pi, low_open=True)
    acc0 = curve.t0 * pi
    if acc0 <= 0.0:
        return None
    return 1.0 / acc0


def operating_point_for_budget(curve: RocCurve, pi: float, C: float) -> Point:
    """Inverse of C(F): the point (F, T) on the curve with expected cost C.

    Bisection over the breakpoints locates the segment, the acceptance
    probability being linear along each segment gives the exact point.
    Vertical segments are followed too (randomized thresholds), so every C
    between 1 and the maximal finite cost is attained.
    """
    _check_pi(pi, low_open=True)
    if not C >= 1.0:
        raise BudgetOutOfRange(f"budget C={C} below 1")
    target = 1.0 / C
    acc = _path_acceptance(curve, pi)
    if target < acc[0] and not math.isclose(target, acc[0], rel_tol=SNAP_RTOL):
        raise BudgetOutOfRange(f"budget C={C} above the largest finite cost {1.0 / acc[0]}")

    pts = curve.points
    i = int(np.searchsorted(acc, target, side="left"))
    if i >= len(pts):
        return pts[-1]
    if math.isclose(acc[i], target, rel_tol=SNAP_RTOL):
        return pts[i]
    if i > 0 and math.isclose(acc[i - 1], target, rel_tol=SNAP_RTOL):
        return pts[i - 1]
    if i == 0:
        return pts[0]

    (f0, t0), (f1, t1) = pts[i - 1], pts[i]
    w = (target - acc[i - 1]) / (acc[i] - acc[i - 1])
    return f0 + w * (f1 - f0), t0 + w * (t1 - t0)


def accuracy_at_compute(curve: RocCurve, pi: float, C: float) -> float:
    """A(C): accuracy of rejection sampling with expected cost C"""
    F, T = operating_point_for_budget(curve, pi, C)
    return _precision(F, T, pi)


def slope_dA_dC_sides(
    curve: RocCurve, pi: float, F: float
) -> Tuple[Optional[float], Optional[float]]:
    """One-sided dA/dC at F, from the one-sided ROC slopes"""
    _check_pi(pi)
    left, right = derivative_T(curve, F)
    T = eval_T(curve, F)
    return _dA_dC(F, T, left, pi), _dA_dC(F, T, right, pi)


def slope_dA_dC(curve: RocCurve, pi: float, F: float) -> float:
    """Derivative of the accuracy-compute curve at C(F).

    Raises KinkPoint, carrying the one-sided values, where T'(F) does not exist.
    """
    _check_pi(pi)
    left, right = derivative_T(curve, F)
    if left is None or right is None or left != right:
        lv, rv = slope_dA_dC_sides(curve, pi, F)
        raise KinkPoint(f"T'(F) does not exist at F={F}", lv, rv)
    return _dA_dC(F, eval_T(curve, F), left, pi)


def early_slope(curve: RocCurve, pi: float) -> float:
    """dA/dC at C = 1, from the left slope of the curve at F = 1"""
    _check_pi(pi, low_open=True, high_open=True)
    t1, _ = derivative_T(curve, 1.0)
    if math.isinf(t1):
        return pi - 1.0
    return pi * (pi - 1.0) * (1.0 - t1) / (pi - 1.0 - pi * t1)


def limit_accuracy(curve: RocCurve, pi: float) -> float:
    """lim A(C) for C -> max cost: set by the slope of the curve at the origin"""
    _check_pi(pi, low_open=True)
    origin = slope_at_origin(curve)
    if origin.separating:
        return 1.0
    if origin.unbounded:
        log.debug("Unbounded slope at the origin for %s: limit is 1", curve.kind.describe())
        return 1.0
    if pi == 1.0:
        return 1.0
    alpha = origin.slope
    return alpha * pi / (alpha * pi + 1.0 - pi)


# # Tabulation


@dataclass(frozen=True)
class AccuracyComputePoint:
    F: float
    T: float
    C: Optional[float]  # None: infinite cost
    A: float
    dA_dC: Optional[float]  # None at kinks
    dA_dC_left: Optional[float]
    dA_dC_right: Optional[float]

    @property
    def infinite_cost(self) -> bool:
        return self.C is None


@dataclass(frozen=True)
class AccuracyComputeCurve:
    points: Tuple[AccuracyComputePoint, ...]
    pi: float
    curve_id: str

    def finite(self) -> List[AccuracyComputePoint]:
        return [p for p in self.points if not p.infinite_cost]

    def infinite(self) -> List[AccuracyComputePoint]:
        return [p for p in self.points if p.infinite_cost]


def _profile_point(F, T, left, right, pi, curve) -> AccuracyComputePoint:
    acc = T * pi + F * (1.0 - pi)
    if acc > 0.0:
        C = 1.0 / acc
        A = _precision(F, T, pi)
    else:
        C = None
        A = 0.0 if pi == 0.0 else limit_accuracy(curve, pi)
    lv, rv = _dA_dC(F, T, left, pi), _dA_dC(F, T, right, pi)
    d = lv if (left is not None and left == right) else None
    return AccuracyComputePoint(F, T, C, A, d, lv, rv)


@metrics.timer("rejection_profile")
def profile(curve: RocCurve, pi: float, f_grid: Sequence[float]) -> AccuracyComputeCurve:
    """Tabulate cost, accuracy and dA/dC over a grid of F values.

    Every curve breakpoint is included, both ends of vertical jumps too,
    so the piecewise structure of A(C) is exact. Rows are ordered by
    decreasing F, i.e. increasing cost.
    """
    _check_pi(pi)
    for F in f_grid:
        if not 0.0 < F <= 1.0:
            raise DomainError(f"grid value {F} outside (0, 1]")

    pts = curve.points
    n = len(pts)
    rows = []
    for i, (F, T) in enumerate(pts):
        left = slope_between(pts[i - 1], pts[i]) if i > 0 else None
        right = slope_between(pts[i], pts[i + 1]) if i < n - 1 else None
        rows.append((F, T, left, right))

    breaks = set(curve.f_array.tolist())
    for F in sorted(set(f_grid)):
        if F in breaks:
            continue
        left, right = derivative_T(curve, F)
        rows.append((F, eval_T(curve, F), left, right))

    rows.sort(key=lambda r: (r[0], r[1]), reverse=True)
    out = tuple(_profile_point(F, T, left, right, pi, curve) for F, T, left, right in rows)
    log.debug("Rejection profile of %s: %d rows", curve.kind.describe(), len(out))
    return AccuracyComputeCurve(out, pi, curve.kind.describe())


def default_grid(size: int) -> List[float]:
    """Uniform F grid on (0, 1]"""
    return [(i + 1) / size for i in range(size)]


# # De-emergence


@dataclass(frozen=True)
class DeEmergenceResult:
    budget_z: float
    F_z: float
    T_z: float
    # the observed part of the curve, F >= F(z), not a full curve on [0, 1]
    observed_prefix: Tuple[Point, ...]
    extension_stagnant: RocCurve
    extension_perfect: RocCurve
    sup_A_stagnant: float
    sup_A_perfect: float


def de_emergence(prefix: RocCurve, pi: float, budget_z: float) -> DeEmergenceResult:
    """Two curves that agree with `prefix` on every budget up to z.

    The stagnant one extends the observed part by the line from the origin
    to (F(z), T(F(z))), so accuracy never exceeds what was observed. The
    perfect one extends it horizontally to (0, T(F(z))), so T(0) > 0 and
    accuracy tends to 1.
    """
    _check_pi(pi, low_open=True, high_open=True)
    cmax = max_finite_cost(prefix, pi)
    if cmax is not None and budget_z >= cmax:
        raise BudgetTooLarge(f"budget z={budget_z} is not below the maximal cost {cmax}")
    Fz, Tz = operating_point_for_budget(prefix, pi, budget_z)

    rest = [(f, t) for f, t in prefix.points if f > Fz or (f == Fz and t > Tz)]
    observed = tuple([(Fz, Tz)] + rest)
    kind = CurveKind("piecewise", (("budget_z", float(budget_z)),))

    stagnant = RocCurve.build([(0.0, 0.0)] + list(observed), kind)
    observed_max = max(_precision(f, t, pi) for f, t in observed)
    sup_stagnant = max(observed_max, limit_accuracy(stagnant, pi))

    if Tz <= 0.0:
        raise ZeroAccuracyPrefix(
            f"accuracy at budget z={budget_z} is zero: no extension reaches accuracy 1"
        )
    perfect = RocCurve.build([(0.0, Tz)] + list(observed), kind)
    sup_perfect = limit_accuracy(perfect, pi)

    log.info(
        "De-emergence at z=%g: F(z)=%g T(F(z))=%g sup A stagnant=%g perfect=%g",
        budget_z, Fz, Tz, sup_stagnant, sup_perfect,
    )
    return DeEmergenceResult(
        budget_z, Fz, Tz, observed, stagnant, perfect, sup_stagnant, sup_perfect
    )
