import json

import numpy as np
import pytest

from pdapow.errors import DomainError, SingularDifficultyError
from pdapow.model import (DifficultyFn, RuntimeState, SystemConfig, difficulty_vector,
                          win_counts, win_probabilities)


def test_win_counts_worked_example():
    assert win_counts((0, 2, 0), 0, n=3) == 2
    assert win_counts((0, 2, 0), 1, n=3) == 0
    assert win_counts((0, 0, 0), 0, n=3) == 3


def test_win_counts_sum_to_window():
    h = (1, 3, 3, 0, 2)
    assert sum(win_counts(h, i, n=4) for i in range(4)) == len(h)


def test_win_counts_player_out_of_range():
    with pytest.raises(DomainError):
        win_counts((0, 1), 2, n=2)


def test_difficulty_worked_example():
    c = SystemConfig.create(3, 3, alpha=2)
    np.testing.assert_allclose(difficulty_vector((0, 2, 0), c), [4 / 7, 1 / 7, 2 / 7], rtol=0, atol=1e-15)


def test_difficulty_alpha_one_is_uniform():
    c = SystemConfig.create(3, 3, alpha=1)
    for h in [(0, 0, 0), (0, 2, 1), (2, 2, 1)]:
        np.testing.assert_allclose(difficulty_vector(h, c), [1 / 3] * 3)
    assert c.difficulty.is_uniform


def test_difficulty_alpha_five():
    c = SystemConfig.create(2, 2, alpha=5)
    np.testing.assert_allclose(difficulty_vector((0, 0), c), [25 / 26, 1 / 26], atol=1e-15)


def test_difficulty_large_alpha_stays_finite():
    c = SystemConfig.create(3, 40, alpha=1e9)
    d = difficulty_vector((0,) * 40, c)
    assert np.isfinite(d).all() and abs(d.sum() - 1) < 1e-12


def test_difficulty_rejects_bad_history():
    c = SystemConfig.create(3, 3, alpha=2)
    with pytest.raises(DomainError):
        difficulty_vector((0, 3, 0), c)
    with pytest.raises(DomainError):
        difficulty_vector((0, 1), c)


@pytest.mark.parametrize("powers, d, expected", [
    ((1, 1, 1), (4 / 7, 1 / 7, 2 / 7), (1 / 7, 4 / 7, 2 / 7)),
    ((1, 2, 3), (1 / 3, 1 / 3, 1 / 3), (1 / 6, 2 / 6, 3 / 6)),
    ((1, 1), (1 / 5, 4 / 5), (4 / 5, 1 / 5)),
])
def test_win_probabilities(powers, d, expected):
    np.testing.assert_allclose(win_probabilities(powers, d), expected, atol=1e-15)


def test_win_probabilities_zero_difficulty():
    with pytest.raises(SingularDifficultyError):
        win_probabilities((1, 1), (0.0, 1.0))


def test_win_probabilities_length_mismatch():
    with pytest.raises(DomainError):
        win_probabilities((1, 1, 1), (0.5, 0.5))


def test_config_defaults_and_validation():
    c = SystemConfig.create(4, 2)
    assert c.powers == (1.0,) * 4
    assert c.alpha is None and c.equal_powers
    for bad in [dict(n=0, k=1), dict(n=2, k=0), dict(n=2, k=1, powers=[1.0]),
                dict(n=2, k=1, powers=[1.0, -1.0]), dict(n=2, k=1, alpha=0)]:
        with pytest.raises(DomainError):
            SystemConfig.create(**bad)


def test_config_json_round_trip(tmp_path):
    c = SystemConfig.create(3, 2, alpha=2.5, powers=[1, 2, 3])
    path = tmp_path / "c.json"
    path.write_text(json.dumps(c.to_dict()))
    assert SystemConfig.load(path) == c
    d = SystemConfig.from_dict({"n": 2, "k": 3, "alpha": None, "powers": None})
    assert d.powers == (1.0, 1.0) and d.difficulty == DifficultyFn.uniform()
    with pytest.raises(DomainError):
        SystemConfig.from_dict({"n": 2})
    with pytest.raises(DomainError):
        SystemConfig.from_dict({"n": 2, "k": 1, "beta": 3})


def test_runtime_state_derives_difficulties():
    c = SystemConfig.create(3, 3, alpha=2)
    st = RuntimeState(c, (0, 2, 0))
    np.testing.assert_allclose(st.difficulties, [4 / 7, 1 / 7, 2 / 7])
    np.testing.assert_allclose(st.win_probabilities, [1 / 7, 4 / 7, 2 / 7])
    nxt = st.advance(1)
    assert nxt.history == (1, 0, 2)
    np.testing.assert_allclose(nxt.difficulties, [1 / 3] * 3)
