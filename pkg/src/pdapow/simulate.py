"""Seeded Monte Carlo mining simulator.

Each block is won either by a categorical draw from the winning
probabilities (default) or, in race mode, by sampling one exponential waiting
time per player with rate proportional to ``C_i / D_i`` and taking the
earliest.  Both give the same winner law; race mode exercises the
waiting-time model directly.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``, drawn in
fixed-size chunks, so a report is a pure function of (config, blocks, seed,
tracked player, mode).

A run first mines ``k`` blocks with uniform difficulty to fill the history,
then ``10 k`` burn-in blocks, and only then starts counting.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

import numba
import numpy as np

from .errors import DomainError
from .model import SystemConfig, check_history, difficulty_vector, win_probabilities

__all__ = [
    "SimulationReport",
    "make_rng",
    "mine_block",
    "sample_winners",
    "run_simulation",
    "empirical_consecutive_rate",
    "standard_error",
    "z_score",
]

CHUNK = 1 << 16
BURN_IN_FACTOR = 10


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _rates(history, config: SystemConfig) -> np.ndarray:
    d = difficulty_vector(history, config)
    return win_probabilities(config.powers, d)


def mine_block(history: Sequence[int], config: SystemConfig, rng: np.random.Generator,
               race_mode: bool = False) -> int:
    """Winner of the next block given the last ``k`` winners."""
    h = check_history(history, config.n, config.k)
    p = _rates(h, config)
    if race_mode:
        times = rng.standard_exponential(config.n) / p
        return int(np.argmin(times))
    return int(min(np.searchsorted(np.cumsum(p), rng.random() * p.sum(), side="right"), config.n - 1))


def sample_winners(history: Sequence[int], config: SystemConfig, draws: int,
                   rng: np.random.Generator, race_mode: bool = False) -> np.ndarray:
    """``draws`` independent next-block winners from one fixed history."""
    h = check_history(history, config.n, config.k)
    p = _rates(h, config)
    if race_mode:
        times = rng.standard_exponential((draws, config.n)) / p
        return np.argmin(times, axis=1)
    idx = np.searchsorted(np.cumsum(p), rng.random(draws) * p.sum(), side="right")
    return np.minimum(idx, config.n - 1)


@numba.njit(cache=True)
def _advance(rand, race, powers, decay, hist, counts, runs, st,
             k, fill, burn, tracked, win_counts, run_counts, pair_counts):
    # st = [t, ring position, run length, measured blocks]
    n = powers.shape[0]
    lags = runs.shape[0]
    weights = np.empty(n)
    for c in range(rand.shape[0]):
        t = st[0]
        if t < fill:
            for j in range(n):
                weights[j] = powers[j]
        else:
            wmin = counts[0]
            for j in range(1, n):
                if counts[j] < wmin:
                    wmin = counts[j]
            for j in range(n):
                weights[j] = powers[j] * decay[counts[j] - wmin]
        winner = n - 1
        if race:
            best = np.inf
            for j in range(n):
                tj = rand[c, j] / weights[j]
                if tj < best:
                    best = tj
                    winner = j
        else:
            total = 0.0
            for j in range(n):
                total += weights[j]
            u = rand[c, 0] * total
            acc = 0.0
            for j in range(n):
                acc += weights[j]
                if u < acc:
                    winner = j
                    break
        pos = st[1]
        if t >= fill:
            counts[hist[pos]] -= 1
        hist[pos] = winner
        counts[winner] += 1
        st[1] = (pos + 1) % k
        st[0] = t + 1
        if t >= fill + burn:
            b = st[3]
            win_counts[winner] += 1
            r = st[2] + 1 if winner == tracked else 0
            st[2] = r
            for m in range(1, min(r, k) + 1):
                run_counts[m - 1] += 1
                # overlap with indicator I^m at earlier lags
                for lag in range(1, min(lags, b) + 1):
                    if runs[(b - lag) % lags] >= m:
                        pair_counts[m - 1, lag - 1] += 1
            runs[b % lags] = r
            st[3] = b + 1


@dataclass
class SimulationReport:
    """Outcome of a seeded run.

    ``run_counts[m - 1]`` counts windows of ``m`` consecutive blocks all won
    by the tracked player.  ``pair_counts[m - 1][l - 1]`` counts positions
    where such windows end both at ``t`` and ``t - l``; it feeds the
    autocorrelation-corrected standard error.
    """

    config: dict
    blocks: int
    seed: int
    tracked_player: int
    race_mode: bool
    burn_in: int
    win_counts: List[int]
    run_counts: List[int]
    pair_counts: List[List[int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationReport":
        return cls(**data)

    @property
    def k(self) -> int:
        return len(self.run_counts)


def run_simulation(config: SystemConfig, blocks: int, seed: int, tracked_player: int = 0,
                   race_mode: bool = False) -> SimulationReport:
    if blocks < config.k:
        raise DomainError(f"blocks ({blocks}) must be at least k ({config.k})")
    if not 0 <= tracked_player < config.n:
        raise DomainError(f"tracked player {tracked_player} out of range")
    n, k = config.n, config.k
    rng = make_rng(seed)
    powers = np.asarray(config.powers, dtype=float)
    a = 1.0 if config.difficulty.is_uniform else config.alpha
    decay = a ** -np.arange(k + 1, dtype=float)
    lags = max(4 * k, 8)
    hist = np.zeros(k, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    runs = np.zeros(lags, dtype=np.int64)
    st = np.zeros(4, dtype=np.int64)
    win_counts = np.zeros(n, dtype=np.int64)
    run_counts = np.zeros(k, dtype=np.int64)
    pair_counts = np.zeros((k, lags), dtype=np.int64)
    burn = BURN_IN_FACTOR * k
    remaining = k + burn + blocks
    while remaining:
        size = min(CHUNK, remaining)
        rand = rng.standard_exponential((size, n)) if race_mode else rng.random((size, 1))
        _advance(rand, race_mode, powers, decay, hist, counts, runs, st,
                 k, k, burn, tracked_player, win_counts, run_counts, pair_counts)
        remaining -= size
    return SimulationReport(
        config=config.to_dict(),
        blocks=int(blocks),
        seed=int(seed),
        tracked_player=int(tracked_player),
        race_mode=bool(race_mode),
        burn_in=int(k + burn),
        win_counts=win_counts.tolist(),
        run_counts=run_counts.tolist(),
        pair_counts=pair_counts.tolist(),
    )


def _windows(report: SimulationReport, m: int) -> int:
    if not 1 <= m <= report.k:
        raise DomainError(f"run length m={m} must lie in 1..{report.k}")
    if report.blocks < m:
        raise DomainError("fewer blocks than the run length")
    return report.blocks - m + 1


def empirical_consecutive_rate(report: SimulationReport, m: int) -> float:
    """Fraction of length-``m`` windows won entirely by the tracked player."""
    w = _windows(report, m)
    return report.run_counts[m - 1] / w


def standard_error(report: SimulationReport, m: int, expected: Optional[float] = None) -> float:
    """Standard error of :func:`empirical_consecutive_rate`.

    Overlapping windows are correlated, so the variance sums the empirical
    autocovariances of the window indicator.  The result is never smaller
    than the independent-windows binomial error, evaluated at ``expected``
    when given.
    """
    w = _windows(report, m)
    p = empirical_consecutive_rate(report, m)
    var = p * (1 - p)
    for lag, pairs in enumerate(report.pair_counts[m - 1] if report.pair_counts else [], start=1):
        if lag >= w:
            break
        var += 2 * (pairs / (w - lag) - p * p)
    base = p if expected is None else expected
    return math.sqrt(max(var, base * (1 - base)) / w)


def z_score(report: SimulationReport, m: int, expected: float) -> float:
    se = standard_error(report, m, expected)
    diff = empirical_consecutive_rate(report, m) - expected
    if se == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / se
