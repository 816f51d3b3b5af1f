"""System definition for personalized difficulty adjustment (PDA) proof-of-work.

A PDA system is described by its fixed parameters (:class:`SystemConfig`) and
the winning history.  Per-player difficulties are always derived from the
history, and the winning probability of player ``i`` is proportional to
``C_i / D_i`` (computing power over difficulty).

Player indices are 0-based.  Histories are tuples ordered most-recent-first:
``history[0]`` is the winner of the previous block.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, SingularDifficultyError

__all__ = [
    "DifficultyFn",
    "SystemConfig",
    "RuntimeState",
    "HistoryState",
    "check_history",
    "win_counts",
    "difficulty_vector",
    "win_probabilities",
]

HistoryState = Tuple[int, ...]

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class DifficultyFn:
    """Difficulty function spec.

    ``alpha=None`` is the uniform (no difficulty) function.  Otherwise the
    alpha-exponential non-ordered function ``D_i = alpha**w_i / sum_j alpha**w_j``
    is used, where ``w_i`` is the number of wins of player ``i`` in the window.
    """

    alpha: Optional[float] = None

    def __post_init__(self):
        if self.alpha is not None:
            a = float(self.alpha)
            if not (a > 0 and math.isfinite(a)):
                raise DomainError(f"alpha must be a positive finite number, got {self.alpha!r}")
            object.__setattr__(self, "alpha", a)

    @classmethod
    def uniform(cls) -> "DifficultyFn":
        return cls(None)

    @classmethod
    def alpha_exponential(cls, alpha: float) -> "DifficultyFn":
        return cls(alpha)

    @property
    def is_uniform(self) -> bool:
        return self.alpha is None or self.alpha == 1.0

    @property
    def non_ordered(self) -> bool:
        # both supported variants depend only on win counts
        return True

    def __str__(self):
        return "uniform" if self.alpha is None else f"{self.alpha:g}-exponential"


@dataclass(frozen=True)
class SystemConfig:
    """Fixed parameters of a PDA system: players, powers, window and difficulty function."""

    n: int
    k: int
    powers: Tuple[float, ...] = field(default=())
    difficulty: DifficultyFn = field(default_factory=DifficultyFn)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        powers = tuple(float(c) for c in self.powers) if self.powers else (1.0,) * self.n
        if len(powers) != self.n:
            raise DomainError(f"expected {self.n} computing powers, got {len(powers)}")
        if not all(c > 0 and math.isfinite(c) for c in powers):
            raise DomainError("computing powers must be positive and finite")
        object.__setattr__(self, "powers", powers)
        if not isinstance(self.difficulty, DifficultyFn):
            raise DomainError("difficulty must be a DifficultyFn")

    @classmethod
    def create(cls, n: int, k: int, alpha: Optional[float] = None,
               powers: Optional[Sequence[float]] = None) -> "SystemConfig":
        return cls(n, k, tuple(powers) if powers else (), DifficultyFn(alpha))

    @property
    def alpha(self) -> Optional[float]:
        return self.difficulty.alpha

    @property
    def num_states(self) -> int:
        return self.n ** self.k

    @property
    def equal_powers(self) -> bool:
        return all(c == self.powers[0] for c in self.powers)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "powers": list(self.powers),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        """Build a config from the JSON schema ``{"n", "k", "alpha", "powers"}``.

        ``alpha`` null means uniform difficulty; ``powers`` null means all 1.0.
        """
        unknown = set(data) - {"n", "k", "alpha", "powers"}
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls.create(data["n"], data["k"], data.get("alpha"), data.get("powers"))
        except KeyError as e:
            raise DomainError(f"missing config key {e}") from None

    @classmethod
    def load(cls, path) -> "SystemConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def check_history(history: Sequence[int], n: int, k: Optional[int] = None) -> HistoryState:
    h = tuple(int(x) for x in history)
    if k is not None and len(h) != k:
        raise DomainError(f"history must have length {k}, got {len(h)}")
    if any(x < 0 or x >= n for x in h):
        raise DomainError(f"history entries must lie in 0..{n - 1}: {h}")
    return h


def win_counts(history: Sequence[int], player: int, n: int) -> int:
    """Number of blocks in ``history`` won by ``player``."""
    if not 0 <= player < n:
        raise DomainError(f"player {player} out of range for n={n}")
    return sum(1 for w in check_history(history, n) if w == player)


def _count_vector(history: HistoryState, n: int) -> np.ndarray:
    return np.bincount(np.asarray(history, dtype=np.int64), minlength=n).astype(float)


def difficulty_vector(history: Sequence[int], config: SystemConfig) -> np.ndarray:
    """Per-player difficulty for the next block, normalized to sum to one."""
    h = check_history(history, config.n, config.k)
    n = config.n
    if config.difficulty.is_uniform:
        return np.full(n, 1.0 / n)
    w = _count_vector(h, n)
    # shift exponents so the largest term is 1; keeps alpha**k finite
    log_a = math.log(config.alpha)
    e = np.exp((w - w.max()) * log_a) if log_a > 0 else np.exp((w - w.min()) * log_a)
    return e / e.sum()


def win_probabilities(powers: Sequence[float], difficulties: Sequence[float]) -> np.ndarray:
    """Winning probabilities ``P_i = (C_i/D_i) / sum_j (C_j/D_j)``."""
    c = np.asarray(powers, dtype=float)
    d = np.asarray(difficulties, dtype=float)
    if c.shape != d.shape or c.ndim != 1:
        raise DomainError("powers and difficulties must be 1-d and of equal length")
    if np.any(c <= 0):
        raise DomainError("computing powers must be positive")
    if np.any(d < 0):
        raise DomainError("difficulties must be non-negative")
    if np.any(d == 0):
        raise SingularDifficultyError("zero difficulty: winning weight is unbounded")
    ratio = c / d
    return ratio / ratio.sum()


@dataclass(frozen=True)
class RuntimeState:
    """Dynamic parameters at a block: the history and the difficulties it implies."""

    config: SystemConfig
    history: HistoryState

    def __post_init__(self):
        object.__setattr__(self, "history", check_history(self.history, self.config.n, self.config.k))

    @property
    def difficulties(self) -> np.ndarray:
        return difficulty_vector(self.history, self.config)

    @property
    def win_probabilities(self) -> np.ndarray:
        return win_probabilities(self.config.powers, self.difficulties)

    def advance(self, winner: int) -> "RuntimeState":
        """State after ``winner`` mines the next block."""
        if not 0 <= winner < self.config.n:
            raise DomainError(f"winner {winner} out of range")
        return RuntimeState(self.config, (winner,) + self.history[:-1])
