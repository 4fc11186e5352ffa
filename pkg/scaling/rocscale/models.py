"""
Domain types shared by the analytic and simulation modules.

All values are immutable and safe to share between threads.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Tuple

import numpy as np  # debdeps: python3-numpy

from rocscale.utils import RocScaleError

Point = Tuple[float, float]

CURVE_KINDS = (
    "empirical",
    "piecewise",
    "linear_slope",
    "power",
    "two_segment",
    "binormal",
)


class DomainError(RocScaleError, ValueError):
    pass


class InvalidCurve(RocScaleError, ValueError):
    pass


class DegeneratePool(RocScaleError, ValueError):
    pass


class AllPositive(DegeneratePool):
    pass


class AllNegative(DegeneratePool):
    pass


@dataclass(frozen=True)
class LabeledSample:
    """One generator output reduced to its verifier score and correctness"""

    score: float
    label: int

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise DomainError(f"score {self.score} outside [0, 1]")
        if self.label not in (0, 1) or isinstance(self.label, float):
            raise DomainError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class ScorePool:
    """Finite sample collection standing in for the base generator.

    pi is always derived from the samples.
    """

    samples: Tuple[LabeledSample, ...]

    def __post_init__(self):
        if len(self.samples) == 0:
            raise DomainError("a score pool cannot be empty")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, int]]) -> "ScorePool":
        return cls(tuple(LabeledSample(float(s), int(y)) for s, y in pairs))

    @cached_property
    def scores(self) -> np.ndarray:
        a = np.array([s.score for s in self.samples], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def labels(self) -> np.ndarray:
        a = np.array([s.label for s in self.samples], dtype=np.int64)
        a.flags.writeable = False
        return a

    @property
    def size(self) -> int:
        return len(self.samples)

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return self.size - self.n_pos

    @property
    def pi(self) -> float:
        return self.n_pos / self.size


@dataclass(frozen=True)
class CurveKind:
    """Provenance of a curve: its constructor name and parameters"""

    name: str
    params: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.name not in CURVE_KINDS:
            raise InvalidCurve(f"unknown curve kind {self.name!r}")

    def get(self, key: str, default=None):
        return dict(self.params).get(key, default)

    def describe(self) -> str:
        if not self.params:
            return self.name
        args = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.name}({args})"


@dataclass(frozen=True)
class RocCurve:
    """Piecewise-linear monotone ROC curve T(F) on [0, 1].

    Points are ordered by F. A vertical jump is stored as two consecutive
    points sharing F; evaluation at that F returns the upper one.
    """

    points: Tuple[Point, ...]
    kind: CurveKind = field(default_factory=lambda: CurveKind("piecewise"))

    def __post_init__(self):
        pts = self.points
        if len(pts) < 2:
            raise InvalidCurve("a curve needs at least two points")
        for f, t in pts:
            if not (0.0 <= f <= 1.0 and 0.0 <= t <= 1.0):
                raise InvalidCurve(f"point ({f}, {t}) outside the unit square")
        if pts[0][0] != 0.0:
            raise InvalidCurve("the first point must have F = 0")
        if pts[-1] != (1.0, 1.0):
            raise InvalidCurve("the last point must be (1, 1)")
        if pts[1][0] == 0.0:
            raise InvalidCurve("only one point may sit at F = 0")
        for (f0, t0), (f1, t1) in zip(pts, pts[1:]):
            if f1 < f0:
                raise InvalidCurve("F must be non-decreasing")
            if t1 < t0:
                raise InvalidCurve("T must be non-decreasing")
            if (f0, t0) == (f1, t1):
                raise InvalidCurve(f"duplicate point ({f0}, {t0})")
        for a, b, c in zip(pts, pts[1:], pts[2:]):
            if a[0] == b[0] == c[0]:
                raise InvalidCurve(f"more than two points at F = {a[0]}")

    @classmethod
    def build(cls, points: Iterable[Sequence[float]], kind: CurveKind = None) -> "RocCurve":
        """Normalize raw points: drop duplicates, keep the lowest and highest
        T of each vertical run, keep only the highest T at F = 0
        """
        pts = [(float(f), float(t)) for f, t in points]
        out = []
        for p in pts:
            if out and out[-1] == p:
                continue
            if len(out) >= 2 and out[-1][0] == out[-2][0] == p[0]:
                out[-1] = p
                continue
            out.append(p)
        while len(out) >= 2 and out[1][0] == 0.0:
            out.pop(0)
        return cls(tuple(out), kind or CurveKind("piecewise"))

    @cached_property
    def f_array(self) -> np.ndarray:
        a = np.array([p[0] for p in self.points])
        a.flags.writeable = False
        return a

    @cached_property
    def t_array(self) -> np.ndarray:
        a = np.array([p[1] for p in self.points])
        a.flags.writeable = False
        return a

    @property
    def t0(self) -> float:
        return self.points[0][1]

    @property
    def unbounded_origin_slope(self) -> bool:
        """True for parametric curves whose exact slope at F=0 is infinite
        while the sampled piecewise version is finite
        """
        name = self.kind.name
        if self.t0 > 0:
            return False
        if name == "power":
            return self.kind.get("gamma") < 1.0
        return name == "binormal" and self.kind.get("mu") > 0.0

    def __len__(self) -> int:
        return len(self.points)
