"""
Best-of-N: draw N samples and return the one with the highest score.

With p positive samples among the N draws, BoN is correct when the best
positive outscores the best negative, which happens with probability
H(N - p, p). Averaging over p ~ Binomial(N, pi) gives the accuracy. The
same quantity is also a single integral along the ROC curve:

    ACC = 1 - (1 - pi) N int_0^1 g(F)^(N-1) dF
    g(F) = (1 - F)(1 - pi) + pi (1 - T(F))

g is affine on every segment of a piecewise-linear curve, so both forms are
integrated exactly.
"""

from dataclasses import dataclass
from functools import lru_cache
from numbers import Integral
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np  # debdeps: python3-numpy
from scipy.stats import binom  # debdeps: python3-scipy

from rocscale.config import metrics
from rocscale.models import DomainError, RocCurve
from rocscale.rejection import accuracy_at_compute, max_finite_cost
from rocscale.roc import auroc, slope_at_origin
from rocscale.utils import RocScaleError

log = logging.getLogger("rocscale.bon")

METHODS = ("single_integral", "binomial_sum")

# the binomial expansion is only used up to this many positive draws
MAX_P = 64
# N up to which the binomial sum is computed as a cross-check
CROSSCHECK_MAX_N = 30
AGREEMENT_TOL = 1e-8
FLAT_SLOPE = 1e-14


class InvalidOrder(RocScaleError, ValueError):
    pass


@dataclass(frozen=True)
class BonPoint:
    N: int
    acc_exact: float
    method: str
    acc_binomial: Optional[float] = None


@dataclass(frozen=True)
class BonProfile:
    pi: float
    curve_id: str
    points: Tuple[BonPoint, ...]
    limit: float


def _check_pi(pi: float, low_open=False) -> None:
    if not ((pi > 0 if low_open else pi >= 0) and pi <= 1):
        raise DomainError(f"pi={pi} outside {'(' if low_open else '['}0, 1]")


def _check_order(name: str, v, minimum: int) -> int:
    if isinstance(v, bool) or not isinstance(v, (Integral, np.integer)):
        raise InvalidOrder(f"{name} must be an integer, got {v!r}")
    v = int(v)
    if v < minimum:
        raise InvalidOrder(f"{name} must be >= {minimum}, got {v}")
    return v


@lru_cache(maxsize=256)
def _leggauss(m: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def _sloped_segments(curve: RocCurve):
    """Start points and widths of the non-vertical segments"""
    fs, ts = curve.f_array, curve.t_array
    df = np.diff(fs)
    keep = df > 0
    return fs[:-1][keep], ts[:-1][keep], df[keep], np.diff(ts)[keep]


def h_integral(curve: RocCurve, k: int, p: int) -> float:
    """H(k, p) = k int_0^1 (1 - (1 - T)^p) (1 - F)^(k-1) dF, H(0, p) = 1.

    The probability that the best of p positives outscores the best of k
    negatives. The integrand is a polynomial of degree k + p - 1 on every
    segment, so Gauss-Legendre with enough nodes is exact.
    """
    k = _check_order("k", k, 0)
    p = _check_order("p", p, 0)
    if p > MAX_P:
        raise InvalidOrder(f"p={p} above {MAX_P}: use the single integral form")
    if k == 0:
        return 1.0
    if p == 0:
        return 0.0

    f0, t0, df, dt = _sloped_segments(curve)
    x, w = _leggauss((k + p) // 2 + 1)
    u = (x + 1.0) / 2.0
    F = f0[:, None] + df[:, None] * u[None, :]
    T = t0[:, None] + dt[:, None] * u[None, :]
    vals = (1.0 - (1.0 - T) ** p) * (1.0 - F) ** (k - 1)
    total = k * float(np.sum((df / 2.0) * (vals @ w)))
    return min(max(total, 0.0), 1.0)


def _single_integral(curve: RocCurve, pi: float, N: int) -> float:
    if pi == 1.0:
        return 1.0
    f0, t0, df, dt = _sloped_segments(curve)
    ga = (1.0 - f0) * (1.0 - pi) + pi * (1.0 - t0)
    # drop of g along the segment, computed without cancellation
    drop = (1.0 - pi) * df + pi * dt
    slope = drop / df

    live = ga > 0.0
    ga, drop, slope, df = ga[live], drop[live], slope[live], df[live]
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        head = np.exp(N * np.log(ga))
        ratio = np.minimum(drop / ga, 1.0)
        # 1 - (g_end / g_start) ** N
        tail = -np.expm1(N * np.log1p(-ratio))
        flat = slope < FLAT_SLOPE
        part = np.where(
            flat,
            N * np.exp((N - 1) * np.log(ga)) * df,
            head * tail / np.where(flat, 1.0, slope),
        )
    acc = 1.0 - (1.0 - pi) * float(np.sum(part))
    return min(max(acc, 0.0), 1.0)


def _binomial_sum(curve: RocCurve, pi: float, N: int) -> float:
    if N > MAX_P:
        raise InvalidOrder(f"N={N} above {MAX_P}: the binomial sum is not available")
    ps = np.arange(N + 1)
    with np.errstate(divide="ignore"):
        weights = np.exp(binom.logpmf(ps, N, pi))
    acc = 0.0
    for p, wgt in zip(ps.tolist(), weights.tolist()):
        if wgt > 0.0:
            acc += wgt * h_integral(curve, N - p, p)
    return min(max(acc, 0.0), 1.0)


def bon_accuracy(curve: RocCurve, pi: float, N: int, method: str = "single_integral") -> BonPoint:
    """Exact accuracy of Best-of-N on the curve.

    The single integral is the primary path. For N <= 30 the binomial sum
    is computed as well and the two are expected to agree within 1e-8.
    """
    _check_pi(pi)
    N = _check_order("N", N, 1)
    if method not in METHODS:
        raise ValueError(f"Unknown method {method!r}")

    if method == "binomial_sum":
        acc = _binomial_sum(curve, pi, N)
        return BonPoint(N, acc, method, acc)

    acc = _single_integral(curve, pi, N)
    acc_binomial = None
    if N <= CROSSCHECK_MAX_N:
        acc_binomial = _binomial_sum(curve, pi, N)
        if abs(acc - acc_binomial) > AGREEMENT_TOL:
            log.warning(
                "BoN forms disagree on %s at N=%d: %.17g vs %.17g",
                curve.kind.describe(), N, acc, acc_binomial,
            )
    return BonPoint(N, acc, method, acc_binomial)


def bo2_gain(curve: RocCurve, pi: float) -> float:
    """ACC(Bo2) - ACC(Bo1) = pi (pi + 2 (1 - pi) AUROC - 1)"""
    _check_pi(pi)
    return pi * (pi + 2.0 * (1.0 - pi) * auroc(curve) - 1.0)


def bon_limit(curve: RocCurve, pi: float) -> float:
    """lim ACC(N) for N -> inf.

    1 when T(0) > 0, otherwise fixed by the slope at the origin alone. Equal
    to the large-compute limit of rejection sampling.
    """
    _check_pi(pi, low_open=True)
    origin = slope_at_origin(curve)
    if origin.separating or origin.unbounded or pi == 1.0:
        return 1.0
    alpha = origin.slope
    return alpha * pi / (alpha * pi + 1.0 - pi)


def _check_sorted(Ns: Sequence[int]) -> List[int]:
    Ns = [_check_order("N", n, 1) for n in Ns]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise InvalidOrder(f"N values must be strictly ascending, got {Ns}")
    return Ns


@metrics.timer("bon_profile")
def bon_profile(curve: RocCurve, pi: float, Ns: Sequence[int]) -> BonProfile:
    Ns = _check_sorted(Ns)
    points = tuple(bon_accuracy(curve, pi, n) for n in Ns)
    limit = 0.0 if pi == 0.0 else bon_limit(curve, pi)
    log.debug("BoN profile of %s: %d points, limit %g", curve.kind.describe(), len(points), limit)
    return BonProfile(pi, curve.kind.describe(), points, limit)


@dataclass(frozen=True)
class ComparisonRow:
    N: int
    C: float
    acc_rs: Optional[float]  # None: budget not attainable by rejection sampling
    acc_bon: float

    @property
    def rs_ahead(self) -> Optional[bool]:
        if self.acc_rs is None:
            return None
        return self.acc_rs > self.acc_bon


def compare_at_budget(curve: RocCurve, pi: float, Ns: Sequence[int]) -> List[ComparisonRow]:
    """Rejection sampling with expected cost C = N next to Best-of-N.

    Both rows spend the same expected number of generator samples; verifier
    calls are not counted.
    """
    _check_pi(pi, low_open=True)
    Ns = _check_sorted(Ns)
    cmax = max_finite_cost(curve, pi)
    rows = []
    for n in Ns:
        C = float(n)
        acc_rs = None
        if cmax is None or C <= cmax:
            acc_rs = accuracy_at_compute(curve, pi, C)
        elif math.isclose(C, cmax):
            acc_rs = accuracy_at_compute(curve, pi, cmax)
        rows.append(ComparisonRow(n, C, acc_rs, bon_accuracy(curve, pi, n).acc_exact))
    return rows
