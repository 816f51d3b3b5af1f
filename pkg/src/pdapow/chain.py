"""Full k-th order Markov chain over winner histories.

Every history ``s`` in ``{0..n-1}^k`` is a state.  From ``s`` the chain moves to
``(j,) + s[:-1]`` when player ``j`` wins the next block, so each row has exactly
``n`` non-zero entries.  States are indexed densely in base ``n`` with the most
recent winner as the most significant digit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO, Tuple

import numpy as np

from .errors import ConvergenceError, DomainError, StateBudgetError
from .model import HistoryState, SystemConfig, check_history, difficulty_vector, win_probabilities

__all__ = [
    "DEFAULT_STATE_BUDGET",
    "SparseChain",
    "encode_state",
    "decode_state",
    "transition_row",
    "transition_probabilities",
    "build_chain",
    "stationary_distribution",
    "consecutive_winning_probability",
    "write_chain_csv",
]

DEFAULT_STATE_BUDGET = 2 ** 24
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 10 ** 6


def encode_state(history: Sequence[int], n: int) -> int:
    idx = 0
    for w in check_history(history, n):
        idx = idx * n + w
    return idx


def decode_state(index: int, n: int, k: int) -> HistoryState:
    if not 0 <= index < n ** k:
        raise DomainError(f"state index {index} out of range for n={n}, k={k}")
    digits = []
    for _ in range(k):
        index, d = divmod(index, n)
        digits.append(d)
    return tuple(reversed(digits))


def transition_row(state: Sequence[int], config: SystemConfig) -> List[Tuple[int, float]]:
    """``(winner, probability)`` for every candidate winner of the next block."""
    s = check_history(state, config.n, config.k)
    p = win_probabilities(config.powers, difficulty_vector(s, config))
    return [(j, float(p[j])) for j in range(config.n)]


@dataclass(frozen=True)
class SparseChain:
    """Row-sparse transition structure.

    ``successors[i, j]`` is the state reached from state ``i`` with
    probability ``probs[i, j]``.  Successor indices may repeat within a row
    (the reduced chain relies on this); probabilities are then summed.
    """

    successors: np.ndarray
    probs: np.ndarray
    n: int
    k: int

    @property
    def num_states(self) -> int:
        return self.successors.shape[0]

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.probs))

    def state(self, index: int) -> HistoryState:
        return decode_state(index, self.n, self.k)

    def index(self, state: Sequence[int]) -> int:
        return encode_state(state, self.n)

    def step(self, p: np.ndarray) -> np.ndarray:
        """One application of the transition law: returns ``p @ P``."""
        return np.bincount(self.successors.ravel(),
                           weights=(p[:, None] * self.probs).ravel(),
                           minlength=self.num_states)

    def to_dense(self) -> np.ndarray:
        m = np.zeros((self.num_states, self.num_states))
        rows = np.repeat(np.arange(self.num_states), self.successors.shape[1])
        np.add.at(m, (rows, self.successors.ravel()), self.probs.ravel())
        return m


def _state_counts(n: int, k: int) -> np.ndarray:
    """Win-count matrix ``(n**k, n)`` for every state, in index order."""
    idx = np.arange(n ** k, dtype=np.int64)
    counts = np.zeros((idx.size, n), dtype=np.int64)
    rows = np.arange(idx.size)
    for _ in range(k):
        idx, d = np.divmod(idx, n)
        counts[rows, d] += 1
    return counts


def transition_probabilities(counts: np.ndarray, config: SystemConfig) -> np.ndarray:
    """Winner probabilities for each row of a win-count matrix.

    Same law as :func:`transition_row`, vectorized over states.  The common
    normalization of the difficulty vector cancels, so ``C_j * alpha**-w_j``
    is normalized directly.
    """
    powers = np.asarray(config.powers)
    if config.difficulty.is_uniform:
        return np.broadcast_to(powers / powers.sum(), counts.shape).copy()
    log_a = np.log(config.alpha)
    w = counts.astype(float)
    shift = w.min(axis=1, keepdims=True) if log_a > 0 else w.max(axis=1, keepdims=True)
    weights = powers * np.exp(-(w - shift) * log_a)
    return weights / weights.sum(axis=1, keepdims=True)


def build_chain(config: SystemConfig, max_states: int = DEFAULT_STATE_BUDGET) -> SparseChain:
    n, k = config.n, config.k
    if n ** k > max_states:
        raise StateBudgetError(
            f"n**k = {n ** k} states exceeds the budget of {max_states}; "
            "raise the budget or use the reduced chain (pdapow.reduction)"
        )
    counts = _state_counts(n, k)
    probs = transition_probabilities(counts, config)
    base = np.arange(n ** k, dtype=np.int64) // n
    successors = np.arange(n, dtype=np.int64)[None, :] * n ** (k - 1) + base[:, None]
    return SparseChain(successors, probs, n, k)


def stationary_distribution(chain, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS,
                            initial: Optional[np.ndarray] = None) -> np.ndarray:
    """Stationary distribution ``pi = pi P`` by power iteration.

    Works on any object exposing ``step`` and ``num_states`` (full or reduced
    chains).  Iteration starts from the uniform vector unless ``initial`` is
    given and stops once ``max|pi P - pi| <= tol``.

    Raises
    ------
    ConvergenceError
        If the residual is still above ``tol`` after ``max_iters`` steps.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    size = chain.num_states
    p = np.full(size, 1.0 / size) if initial is None else np.asarray(initial, dtype=float).copy()
    residual = np.inf
    for _ in range(max_iters):
        q = chain.step(p)
        q /= q.sum()
        residual = float(np.max(np.abs(q - p)))
        if residual <= tol:
            # p is the vector whose residual was measured
            return p
        p = q
    raise ConvergenceError(
        f"power iteration did not converge in {max_iters} iterations (residual {residual:.3e})",
        residual, max_iters,
    )


def consecutive_winning_probability(config: SystemConfig, player: int = 0, tol: float = DEFAULT_TOL,
                                    max_iters: int = DEFAULT_MAX_ITERS,
                                    max_states: int = DEFAULT_STATE_BUDGET) -> float:
    """Stationary probability that ``player`` won each of the last ``k`` blocks."""
    if not 0 <= player < config.n:
        raise DomainError(f"player {player} out of range for n={config.n}")
    chain = build_chain(config, max_states)
    pi = stationary_distribution(chain, tol, max_iters)
    return float(pi[encode_state((player,) * config.k, config.n)])


def write_chain_csv(chain: SparseChain, out: Optional[TextIO] = None) -> str:
    """Dump non-zero transitions as CSV (``state,successor,probability``).

    States are rendered as comma-joined winner tuples.  Returns the text when
    ``out`` is None.
    """
    buf = out if out is not None else io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["state", "successor", "probability"])
    fmt = lambda s: ",".join(map(str, s))  # noqa: E731
    for i in range(chain.num_states):
        src = fmt(chain.state(i))
        for j, p in zip(chain.successors[i], chain.probs[i]):
            if p > 0:
                writer.writerow([src, fmt(chain.state(int(j))), repr(float(p))])
    return buf.getvalue() if out is None else ""
