"""Catch-up probability of a minority attacker under traditional proof-of-work."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["AttackerParams", "attacker_success", "poisson_weights"]


@dataclass(frozen=True)
class AttackerParams:
    """Attacker power fraction ``q`` and confirmation depth ``z``."""

    q: float
    z: int

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise DomainError(f"q must lie in (0, 1), got {self.q}")
        if isinstance(self.z, bool) or int(self.z) != self.z or self.z < 1:
            raise DomainError(f"z must be a positive integer, got {self.z}")
        object.__setattr__(self, "z", int(self.z))


def poisson_weights(lam: float, upto: int) -> list:
    """Poisson pmf at ``0..upto``, built by the recurrence ``t_{j+1} = t_j * lam / (j+1)``."""
    term = math.exp(-lam)
    out = [term]
    for j in range(upto):
        term *= lam / (j + 1)
        out.append(term)
    return out


def attacker_success(params: AttackerParams) -> float:
    """Probability that an attacker ``z`` blocks behind ever catches up.

    The attacker's progress while the honest chain mines ``z`` blocks is
    Poisson with mean ``z q / p``; from a deficit of ``d`` blocks the
    attacker catches up with probability ``(q/p)**d``.

    >>> round(attacker_success(AttackerParams(0.1, 1)), 4)
    0.2046
    """
    q, z = params.q, params.z
    if q >= 0.5:
        return 1.0
    p = 1.0 - q
    lam = z * q / p
    # 1 - sum_j w_j (1 - r**(z-j)) rewritten as positive terms to avoid cancellation
    head = poisson_weights(lam, z)
    total = sum(w * (q / p) ** (z - j) for j, w in enumerate(head))
    term, j = head[-1], z
    while True:
        term *= lam / (j + 1)
        j += 1
        if term == 0.0 or (j > lam and term < 1e-17 * total):
            break
        total += term
    return min(1.0, total)
