"""Symmetry reduction of the history chain.

With equal computing powers and a difficulty function that only looks at win
counts, relabeling players maps the chain onto itself.  Histories that differ
only by a relabeling are lumped into one canonical representative:

* labels are sorted by occurrence count, most frequent first;
* ties go to the label that appears first (most recent position first).

A canonical state is determined by which positions share a winner, i.e. by a
set partition of the ``k`` positions, so the reduced chain has at most
``Bell(k)`` states regardless of ``n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .chain import (DEFAULT_MAX_ITERS, DEFAULT_TOL, build_chain, encode_state,
                    stationary_distribution, transition_probabilities)
from .errors import DomainError, LumpabilityError
from .model import HistoryState, SystemConfig, check_history

__all__ = [
    "ReducedChain",
    "canonicalize",
    "is_canonical",
    "enumerate_reduced",
    "orbit_size",
    "brute_force_orbit_size",
    "build_reduced_chain",
    "reduced_stationary_distribution",
    "reduced_consecutive_probability",
    "aggregate_distribution",
    "lumpability_defect",
    "reduction_info",
]


def canonicalize(state: Sequence[int]) -> HistoryState:
    """Canonical representative of ``state`` under player relabeling.

    >>> canonicalize((2, 1, 2))
    (0, 1, 0)
    >>> canonicalize((1, 2, 2))
    (1, 0, 0)
    """
    s = tuple(int(x) for x in state)
    first: Dict[int, int] = {}
    count: Dict[int, int] = {}
    for pos, x in enumerate(s):
        first.setdefault(x, pos)
        count[x] = count.get(x, 0) + 1
    order = sorted(first, key=lambda x: (-count[x], first[x]))
    label = {x: i for i, x in enumerate(order)}
    return tuple(label[x] for x in s)


def is_canonical(state: Sequence[int]) -> bool:
    return tuple(state) == canonicalize(state)


def _restricted_growth_strings(k: int, max_blocks: int) -> Iterator[Tuple[int, ...]]:
    """Set partitions of ``k`` positions into at most ``max_blocks`` blocks."""
    a = [0] * k

    def rec(i: int, m: int):
        if i == k:
            yield tuple(a)
            return
        for v in range(min(m + 1, max_blocks)):
            a[i] = v
            yield from rec(i + 1, max(m, v + 1))

    if k == 0:
        yield ()
        return
    yield from rec(1, 1)


def enumerate_reduced(n: int, k: int) -> List[HistoryState]:
    """All canonical states for ``n`` players and window ``k``, sorted."""
    if n < 1 or k < 1:
        raise DomainError("n and k must be positive")
    return sorted({canonicalize(rgs) for rgs in _restricted_growth_strings(k, n)})


def orbit_size(r: Sequence[int], n: int) -> int:
    """Number of standard states whose canonical form is ``r``.

    Every assignment of distinct players to the ``d`` distinct labels gives a
    different standard state with the same canonical form, so the count is
    the falling factorial ``n (n-1) ... (n-d+1)``.
    """
    r = tuple(r)
    if not is_canonical(r):
        raise DomainError(f"{r} is not canonical")
    d = len(set(r))
    if d > n:
        raise DomainError(f"state {r} uses {d} distinct players but n={n}")
    return math.perm(n, d)


def brute_force_orbit_size(r: Sequence[int], n: int) -> int:
    r = tuple(r)
    return sum(1 for s in itertools.product(range(n), repeat=len(r)) if canonicalize(s) == r)


@dataclass(frozen=True)
class ReducedChain:
    """Lumped chain over canonical histories.

    Row ``i`` lists ``n`` (successor, probability) pairs obtained by letting
    each player win from the representative ``states[i]``; pairs that land on
    the same canonical successor are summed when the chain is stepped.
    """

    states: Tuple[HistoryState, ...]
    successors: np.ndarray
    probs: np.ndarray
    orbit_sizes: np.ndarray
    n: int
    k: int

    @property
    def num_states(self) -> int:
        return len(self.states)

    def index(self, state: Sequence[int]) -> int:
        return self._index[canonicalize(state)]

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    def step(self, p: np.ndarray) -> np.ndarray:
        return np.bincount(self.successors.ravel(),
                           weights=(p[:, None] * self.probs).ravel(),
                           minlength=self.num_states)

    def row(self, state: Sequence[int]) -> Dict[HistoryState, float]:
        """Merged transition row of a reduced state."""
        i = self.index(state)
        out: Dict[HistoryState, float] = {}
        for j, p in zip(self.successors[i], self.probs[i]):
            key = self.states[int(j)]
            out[key] = out.get(key, 0.0) + float(p)
        return out


def _check_lumpable(config: SystemConfig):
    if not config.equal_powers:
        raise LumpabilityError(
            "symmetry reduction requires equal computing powers; use the full chain instead"
        )
    if not config.difficulty.non_ordered:
        raise LumpabilityError("symmetry reduction requires a non-ordered difficulty function")


def _verify_representatives(config: SystemConfig, chain: "ReducedChain", samples: int, seed: int = 0):
    # flows out of a relabeled preimage must match the representative's row
    rng = np.random.default_rng(seed)
    n = config.n
    picks = rng.choice(chain.num_states, size=min(samples, chain.num_states), replace=False)
    for i in picks:
        rep = chain.states[int(i)]
        sigma = rng.permutation(n)
        pre = tuple(int(sigma[x]) for x in rep)
        counts = np.bincount(pre, minlength=n)[None, :]
        p = transition_probabilities(counts, config)[0]
        flow: Dict[HistoryState, float] = {}
        for j in range(n):
            key = canonicalize((j,) + pre[:-1])
            flow[key] = flow.get(key, 0.0) + float(p[j])
        expected = chain.row(rep)
        if flow.keys() != expected.keys() or any(abs(flow[s] - expected[s]) > 1e-12 for s in flow):
            raise LumpabilityError(f"reduced row of {rep} depends on the chosen preimage")


def build_reduced_chain(config: SystemConfig, verify_samples: int = 16) -> ReducedChain:
    """Reduced transition structure for a lumpable configuration.

    ``verify_samples`` reduced rows are recomputed from a randomly relabeled
    preimage and compared against the representative's row.

    Raises
    ------
    LumpabilityError
        If computing powers differ between players.
    """
    _check_lumpable(config)
    n, k = config.n, config.k
    states = tuple(enumerate_reduced(n, k))
    index = {s: i for i, s in enumerate(states)}
    counts = np.array([np.bincount(s, minlength=n) for s in states])
    probs = transition_probabilities(counts, config)
    successors = np.empty((len(states), n), dtype=np.int64)
    for i, s in enumerate(states):
        for j in range(n):
            successors[i, j] = index[canonicalize((j,) + s[:-1])]
    sizes = np.array([orbit_size(s, n) for s in states], dtype=np.int64)
    chain = ReducedChain(states, successors, probs, sizes, n, k)
    if verify_samples:
        _verify_representatives(config, chain, verify_samples)
    return chain


def reduced_stationary_distribution(chain: ReducedChain, tol: float = DEFAULT_TOL,
                                    max_iters: int = DEFAULT_MAX_ITERS) -> np.ndarray:
    return stationary_distribution(chain, tol, max_iters)


def reduced_consecutive_probability(config: SystemConfig, tol: float = DEFAULT_TOL,
                                    max_iters: int = DEFAULT_MAX_ITERS) -> float:
    """Per-player probability of winning the last ``k`` blocks, via the reduced chain.

    The all-same canonical state aggregates the ``n`` single-player runs, so
    its stationary mass is divided by ``n``.
    """
    chain = build_reduced_chain(config)
    pi = reduced_stationary_distribution(chain, tol, max_iters)
    return float(pi[chain.index((0,) * config.k)]) / config.n


def aggregate_distribution(full_pi: np.ndarray, config: SystemConfig,
                           reduced: ReducedChain) -> np.ndarray:
    """Sum a full-chain distribution over the preimages of each reduced state."""
    out = np.zeros(reduced.num_states)
    for idx, s in enumerate(itertools.product(range(config.n), repeat=config.k)):
        out[reduced.index(s)] += full_pi[idx]
    return out


def lumpability_defect(config: SystemConfig) -> float:
    """Largest spread, across preimages of a reduced state, of the flow into any reduced state.

    Zero (up to rounding) means the full chain is strongly lumpable under
    :func:`canonicalize`.  Enumerates the full chain, so keep ``n**k`` small.
    """
    full = build_chain(config)
    reduced_states = enumerate_reduced(config.n, config.k)
    index = {s: i for i, s in enumerate(reduced_states)}
    r = len(reduced_states)
    seen = np.full((r, r), np.nan)
    worst = 0.0
    for idx, s in enumerate(itertools.product(range(config.n), repeat=config.k)):
        flow = np.zeros(r)
        for j, p in zip(full.successors[idx], full.probs[idx]):
            flow[index[canonicalize(full.state(int(j)))]] += p
        src = index[canonicalize(s)]
        if np.isnan(seen[src, 0]):
            seen[src] = flow
        else:
            worst = max(worst, float(np.max(np.abs(seen[src] - flow))))
    return worst


def reduction_info(n: int, k: int) -> dict:
    reduced = len(enumerate_reduced(n, k))
    standard = n ** k
    return {
        "n": n,
        "k": k,
        "standard_states": standard,
        "reduced_states": reduced,
        "reduction_factor": standard / reduced,
    }
