"""
Monte-Carlo runs of rejection sampling and Best-of-N over a score pool,
with percentile bootstrap intervals and exhaustive oracles.

Every trial owns a Philox stream keyed by the seed with the trial index in
the counter, so results do not depend on how trials are split among workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union
import logging
import math
import warnings

import numpy as np  # debdeps: python3-numpy

from rocscale.config import metrics
from rocscale.models import DomainError, ScorePool
from rocscale.utils import RocScaleError

log = logging.getLogger("rocscale.simulate")

BRUTE_FORCE_LIMIT = 10 ** 6
# first batch of draws for one rejection-sampling trial, doubled on every miss
FIRST_BATCH = 16
# bootstrap resamples drawn at once
RESAMPLE_CHUNK = 64

Seed = Union[int, Sequence[int]]


class NoAcceptingSample(RocScaleError, ValueError):
    pass


class EmptyInput(RocScaleError, ValueError):
    pass


class TooLarge(RocScaleError, ValueError):
    pass


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SimulationConfig:
    trials: int
    seed: int
    max_draws: int
    n_resamples: int = 1000
    level: float = 0.95
    workers: int = 1

    def __post_init__(self):
        for name in ("trials", "max_draws", "n_resamples", "workers"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must be in (0, 1), got {self.level}")


@dataclass(frozen=True)
class BootstrapSummary:
    mean: float
    ci_low: float
    ci_high: float
    n_resamples: int
    level: float = 0.95

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.ci_low - tol <= x <= self.ci_high + tol


@dataclass(frozen=True)
class SimResult:
    accuracy: BootstrapSummary
    mean_draws: Optional[BootstrapSummary]  # rejection sampling only
    trials_used: int
    truncated: int = 0


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, identical however trials are scheduled"""
    counter = np.array([0, 0, 0, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


def bootstrap(
    values: Sequence[float], n_resamples: int = 1000, level: float = 0.95, seed: Seed = 42
) -> BootstrapSummary:
    """Percentile bootstrap interval for the mean of `values`"""
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise EmptyInput("cannot bootstrap an empty sample")
    if n_resamples < 1:
        raise DomainError(f"n_resamples must be >= 1, got {n_resamples}")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level}")

    rng = np.random.default_rng(seed)
    n = vals.size
    means = np.empty(n_resamples)
    for start in range(0, n_resamples, RESAMPLE_CHUNK):
        stop = min(start + RESAMPLE_CHUNK, n_resamples)
        idx = rng.integers(0, n, size=(stop - start, n))
        means[start:stop] = vals[idx].mean(axis=1)

    mean = float(vals.mean())
    lo, hi = np.percentile(means, [(1.0 - level) / 2.0 * 100.0, (1.0 + level) / 2.0 * 100.0])
    return BootstrapSummary(mean, min(float(lo), mean), max(float(hi), mean), n_resamples, level)


def _chunks(trials: int, workers: int) -> List[range]:
    size = math.ceil(trials / workers)
    return [range(i, min(i + size, trials)) for i in range(0, trials, size)]


def _run(fn, cfg: SimulationConfig) -> Tuple[np.ndarray, ...]:
    """Run fn over trial chunks and concatenate in trial order"""
    chunks = _chunks(cfg.trials, cfg.workers)
    if cfg.workers == 1:
        parts = [fn(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            parts = list(executor.map(fn, chunks))
    return tuple(np.concatenate(cols) for cols in zip(*parts))


def _rejection_trial(rng, accept, labels, max_draws) -> Tuple[int, int, bool]:
    """(correct, draws, truncated) for one rejection-sampling trial"""
    n = accept.size
    drawn = 0
    batch = FIRST_BATCH
    while drawn < max_draws:
        size = min(batch, max_draws - drawn)
        idx = rng.integers(0, n, size=size)
        hits = np.flatnonzero(accept[idx])
        if hits.size:
            first = int(hits[0])
            return int(labels[idx[first]]), drawn + first + 1, False
        drawn += size
        batch *= 2
    # the last sample drawn stands in for the output
    return int(labels[idx[-1]]), max_draws, True


@metrics.timer("simulate_rejection")
def simulate_rejection(pool: ScorePool, threshold: float, cfg: SimulationConfig) -> SimResult:
    """Resample from the pool until the score reaches the threshold"""
    accept = pool.scores >= threshold
    if not accept.any():
        raise NoAcceptingSample(f"no pool sample has score >= {threshold}")
    labels = pool.labels

    def run(chunk: range):
        out = np.empty((3, len(chunk)), dtype=np.int64)
        for j, t in enumerate(chunk):
            out[:, j] = _rejection_trial(trial_rng(cfg.seed, t), accept, labels, cfg.max_draws)
        return out[0], out[1], out[2]

    correct, draws, truncated = _run(run, cfg)
    n_trunc = int(truncated.sum())
    if n_trunc:
        msg = f"{n_trunc} of {cfg.trials} trials reached max_draws={cfg.max_draws}"
        log.warning(msg)
        warnings.warn(msg, TruncationWarning)
        metrics.incr("rejection_truncated", n_trunc)

    acc = bootstrap(correct, cfg.n_resamples, cfg.level, (cfg.seed, 1))
    mean_draws = bootstrap(draws, cfg.n_resamples, cfg.level, (cfg.seed, 2))
    log.debug("Rejection at %g: accuracy %g, draws %g", threshold, acc.mean, mean_draws.mean)
    return SimResult(acc, mean_draws, cfg.trials, n_trunc)


def _bon_trial(rng, scores, labels, N) -> int:
    idx = rng.integers(0, scores.size, size=N)
    s = scores[idx]
    best = np.flatnonzero(s == s.max())
    pick = best[rng.integers(0, best.size)] if best.size > 1 else best[0]
    return int(labels[idx[pick]])


@metrics.timer("simulate_bon")
def simulate_bon(pool: ScorePool, N: int, cfg: SimulationConfig) -> SimResult:
    """Draw N samples and keep the highest score, ties broken uniformly"""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    scores, labels = pool.scores, pool.labels

    def run(chunk: range):
        out = np.fromiter(
            (_bon_trial(trial_rng(cfg.seed, t), scores, labels, N) for t in chunk),
            dtype=np.int64,
            count=len(chunk),
        )
        return (out,)

    (correct,) = _run(run, cfg)
    acc = bootstrap(correct, cfg.n_resamples, cfg.level, (cfg.seed, 1))
    log.debug("BoN N=%d: accuracy %g", N, acc.mean)
    return SimResult(acc, None, cfg.trials)


# # Oracles


def brute_force_bon(pool: ScorePool, N: int) -> float:
    """Exact BoN accuracy by enumerating every ordered N-tuple of pool indices"""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    n = pool.size
    if n ** N > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{n}^{N} tuples is above the limit of {BRUTE_FORCE_LIMIT}")
    idx = np.indices((n,) * N).reshape(N, -1).T
    s = pool.scores[idx]
    ties = s == s.max(axis=1, keepdims=True)
    hits = (ties & (pool.labels[idx] == 1)).sum(axis=1)
    return float(np.mean(hits / ties.sum(axis=1)))


def brute_force_rejection(pool: ScorePool, threshold: float) -> Tuple[float, float]:
    """(accuracy, expected draws) of rejection sampling by counting"""
    accept = pool.scores >= threshold
    n_acc = int(accept.sum())
    if n_acc == 0:
        raise NoAcceptingSample(f"no pool sample has score >= {threshold}")
    n_pos = int(np.count_nonzero(accept & (pool.labels == 1)))
    return n_pos / n_acc, pool.size / n_acc
