"""
ROC curves induced by a verifier score.

A classifier accepts a sample when score >= threshold. The curve of a
discrete score is the linear interpolation of its step endpoints, which is
also the ROC curve of the score smoothed with a small uniform jitter.
"""

from collections import namedtuple
from typing import Optional, Sequence, Tuple
import logging
import math

import numpy as np  # debdeps: python3-numpy
from scipy.stats import norm  # debdeps: python3-scipy

from rocscale.models import (
    AllNegative,
    AllPositive,
    CurveKind,
    DomainError,
    RocCurve,
    ScorePool,
)
from rocscale.utils import SLOPE_TOL

log = logging.getLogger("rocscale.roc")

OriginSlope = namedtuple("OriginSlope", ["slope", "separating", "unbounded"])
OriginSlope.__doc__ = """Slope of the ROC curve at F = 0.

separating: T(0) > 0, some positives outscore every negative
unbounded: parametric curve whose exact slope at the origin is infinite
"""


def _check_mixed(pool: ScorePool) -> None:
    if pool.n_pos == 0:
        raise AllNegative("the pool has no positive samples: TPR is undefined")
    if pool.n_neg == 0:
        raise AllPositive("the pool has no negative samples: FPR is undefined")


def _check_unit(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:  # also rejects NaN
        raise DomainError(f"{name}={x} outside [0, 1]")


def empirical_roc(pool: ScorePool) -> RocCurve:
    """Step endpoints of the ROC curve of a discrete score, one per
    distinct threshold, from the highest score down
    """
    _check_mixed(pool)
    order = np.argsort(-pool.scores, kind="stable")
    s = pool.scores[order]
    y = pool.labels[order]
    # last index of each group of tied scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.cumsum(y)[ends]
    fp = np.cumsum(1 - y)[ends]
    n_pos, n_neg = pool.n_pos, pool.n_neg

    pts = [(fpi / n_neg, tpi / n_pos) for fpi, tpi in zip(fp.tolist(), tp.tolist())]
    if fp[0] > 0:
        pts.insert(0, (0.0, 0.0))
    curve = RocCurve.build(pts, CurveKind("empirical"))
    log.debug("Empirical ROC: %d samples, %d points", pool.size, len(curve))
    return curve


def operating_point(pool: ScorePool, threshold: float) -> Tuple[float, float]:
    """(F, T) of the classifier score >= threshold on the pool"""
    _check_mixed(pool)
    accepted = pool.scores >= threshold
    pos = pool.labels == 1
    tp = int(np.count_nonzero(accepted & pos))
    fp = int(np.count_nonzero(accepted & ~pos))
    return fp / pool.n_neg, tp / pool.n_pos


def eval_T(curve: RocCurve, F: float) -> float:
    """T(F) by linear interpolation; the upper value at a vertical jump"""
    _check_unit("F", F)
    fs, ts = curve.f_array, curve.t_array
    j = int(np.searchsorted(fs, F, side="right")) - 1
    if fs[j] == F:
        return float(ts[j])
    f0, f1 = fs[j], fs[j + 1]
    w = (F - f0) / (f1 - f0)
    return float(ts[j] + w * (ts[j + 1] - ts[j]))


def slope_between(p0: Sequence[float], p1: Sequence[float]) -> float:
    if p1[0] == p0[0]:
        return math.inf
    return (p1[1] - p0[1]) / (p1[0] - p0[0])


def derivative_T(curve: RocCurve, F: float) -> Tuple[Optional[float], Optional[float]]:
    """One-sided slopes (left, right) of the interpolated curve at F.

    None where a side is outside [0, 1], math.inf for a vertical side.
    """
    _check_unit("F", F)
    pts = curve.points
    fs = curve.f_array
    lo = int(np.searchsorted(fs, F, side="left"))
    hi = int(np.searchsorted(fs, F, side="right")) - 1
    if lo > hi:
        # strictly inside a segment
        s = slope_between(pts[lo - 1], pts[lo])
        return s, s

    vertical = hi > lo
    if F == 0.0:
        left = None
    elif vertical:
        left = math.inf
    else:
        left = slope_between(pts[lo - 1], pts[lo])
    right = None if F == 1.0 else slope_between(pts[hi], pts[hi + 1])
    return left, right


def slope_at_origin(curve: RocCurve) -> OriginSlope:
    if curve.t0 > 0:
        return OriginSlope(math.inf, True, False)
    s = slope_between(curve.points[0], curve.points[1])
    return OriginSlope(s, False, curve.unbounded_origin_slope)


def auroc(curve: RocCurve) -> float:
    """Exact trapezoid area under the piecewise-linear curve"""
    fs, ts = curve.f_array, curve.t_array
    area = float(np.sum(np.diff(fs) * (ts[:-1] + ts[1:]) / 2.0))
    return min(max(area, 0.0), 1.0)


def rank_auroc(pool: ScorePool) -> float:
    """P(S+ > S-) + P(S+ = S-)/2 by enumerating all positive/negative pairs"""
    _check_mixed(pool)
    pos = pool.scores[pool.labels == 1]
    neg = pool.scores[pool.labels == 0]
    gt = np.count_nonzero(pos[:, None] > neg[None, :])
    eq = np.count_nonzero(pos[:, None] == neg[None, :])
    return (gt + 0.5 * eq) / (pos.size * neg.size)


def segment_slopes(curve: RocCurve) -> np.ndarray:
    """Slope of each segment, inf for vertical ones"""
    fs, ts = curve.f_array, curve.t_array
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.diff(ts) / np.diff(fs)


def is_concave(curve: RocCurve) -> bool:
    s = segment_slopes(curve)
    return bool(np.all(s[1:] <= s[:-1] + SLOPE_TOL))


# # Parametric curves


def points_curve(points) -> RocCurve:
    return RocCurve.build(points, CurveKind("piecewise"))


def linear_slope_curve(alpha: float) -> RocCurve:
    """T(F) = min(alpha * F, 1), closed with a vertical step at F=1 if alpha < 1"""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if alpha > 1:
        pts = [(0.0, 0.0), (1.0 / alpha, 1.0), (1.0, 1.0)]
    elif alpha == 1:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    else:
        pts = [(0.0, 0.0), (1.0, alpha), (1.0, 1.0)]
    return RocCurve.build(pts, CurveKind("linear_slope", (("alpha", float(alpha)),)))


def _grid(grid: int) -> np.ndarray:
    if grid < 1:
        raise DomainError(f"grid must be >= 1, got {grid}")
    return np.arange(grid + 1, dtype=np.float64) / grid


def power_curve(gamma: float, grid: int = 1024) -> RocCurve:
    """T(F) = F ** gamma sampled on a uniform grid of `grid` segments"""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    fs = _grid(grid)
    ts = fs ** gamma
    kind = CurveKind("power", (("gamma", float(gamma)), ("grid", float(grid))))
    return RocCurve.build(zip(fs.tolist(), ts.tolist()), kind)


def binormal_curve(mu: float, grid: int = 1024) -> RocCurve:
    """Equal-variance binormal curve T(F) = Phi(Phi^-1(F) + mu)"""
    fs = _grid(grid)
    ts = norm.cdf(norm.ppf(fs) + mu)
    ts[0], ts[-1] = 0.0, 1.0
    ts = np.maximum.accumulate(ts)
    kind = CurveKind("binormal", (("mu", float(mu)), ("grid", float(grid))))
    return RocCurve.build(zip(fs.tolist(), ts.tolist()), kind)


def two_segment_curve(knee_f: float, knee_t: float, t0: float = 0.0) -> RocCurve:
    """Two segments joined at the knee: (0, t0) -> knee -> (1, 1)"""
    _check_unit("knee F", knee_f)
    _check_unit("knee T", knee_t)
    _check_unit("t0", t0)
    kind = CurveKind(
        "two_segment", (("knee_f", float(knee_f)), ("knee_t", float(knee_t)), ("t0", float(t0)))
    )
    return RocCurve.build([(0.0, t0), (knee_f, knee_t), (1.0, 1.0)], kind)
