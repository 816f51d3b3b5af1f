"""Consecutive-winning analysis of personalized difficulty adjustment proof-of-work."""

from .baseline import AttackerParams, attacker_success
from .chain import (SparseChain, build_chain, consecutive_winning_probability, decode_state,
                    encode_state, stationary_distribution, transition_row)
from .errors import (ConvergenceError, DomainError, LumpabilityError, PDAError,
                     SingularDifficultyError, StateBudgetError)
from .model import (DifficultyFn, RuntimeState, SystemConfig, difficulty_vector, win_counts,
                    win_probabilities)
from .reduction import (ReducedChain, build_reduced_chain, canonicalize, enumerate_reduced,
                        orbit_size, reduced_consecutive_probability)
from .simulate import (SimulationReport, empirical_consecutive_rate, mine_block, run_simulation,
                       sample_winners)
from .tables import build_table, consecutive_probability

__version__ = "0.1.0"
