import csv

import numpy as np

from rocscale.models import ScorePool
from rocscale.roc import points_curve


def random_concave_curve(rng, max_segments=6, t0=0.0):
    """Concave curve through (0, t0) whose first segment ends at F in [0.05, 0.3]"""
    k = int(rng.integers(2, max_segments + 1))
    f1 = rng.uniform(0.05, 0.3)
    fs = np.concatenate([[0.0, f1], np.sort(rng.uniform(f1, 1.0, size=k - 2)), [1.0]])
    df = np.diff(fs)
    slopes = np.sort(rng.uniform(0.01, 10.0, size=k))[::-1]
    slopes *= (1.0 - t0) / np.sum(slopes * df)
    ts = t0 + np.concatenate([[0.0], np.cumsum(slopes * df)])
    pts = [(float(f), float(min(t, 1.0))) for f, t in zip(fs[:-1], ts[:-1])]
    return points_curve(pts + [(1.0, 1.0)])


def random_curve(rng, max_points=6):
    """Monotone curve, not necessarily concave, possibly with T(0) > 0"""
    k = int(rng.integers(1, max_points + 1))
    fs = np.sort(rng.uniform(0.0, 1.0, size=k))
    ts = np.sort(rng.uniform(0.0, 1.0, size=k + 1))
    t0 = ts[0] if rng.uniform() < 0.3 else 0.0
    pts = [(0.0, float(t0))] + [(float(f), float(t)) for f, t in zip(fs, ts[1:])]
    return points_curve(pts + [(1.0, 1.0)])


def random_pool(rng, size, levels=5):
    """Pool with both labels and scores on a coarse grid, so that ties happen"""
    labels = rng.integers(0, 2, size=size)
    labels[0], labels[1] = 0, 1
    scores = rng.integers(0, levels, size=size) / (levels - 1)
    return ScorePool.from_pairs(zip(scores.tolist(), labels.tolist()))


def read_table(path):
    """Return the header comment and the rows of a CSV output as dicts"""
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# rocscale ")
    return lines[0], list(csv.DictReader(lines[1:]))


def read_summary(path):
    header, rows = read_table(path)
    return {r["key"]: r["value"] for r in rows}
