from __future__ import annotations

import random

import numpy as np

from noisystab import engine
from noisystab.engine import MeasureY
from noisystab.verify import check_case, engine_matrix, oracle_matrix, random_case, run_suite


def test_random_cases_are_well_formed():
    rng = random.Random(0)
    for _ in range(50):
        case = random_case(rng)
        assert 1 <= len(case.targets) <= 3
        assert case.graph.connected_components() == [set(case.graph.vertices)]
        assert abs(np.trace(engine_matrix(case)) - 1) < 1e-12


def test_small_suite_passes():
    result = run_suite(40, seed=3, n_max=6)
    assert result.passed and result.max_deviation <= 1e-10


def test_zero_cases_is_vacuous():
    result = run_suite(0, seed=3)
    assert result.passed and result.cases == 0


def _broken_steps(op, g):
    steps = _ORIGINAL(op, g)
    if isinstance(op, MeasureY):
        # forget the neighbourhood: Z_a simply disappears
        return [{op.a: frozenset()}]
    return steps


_ORIGINAL = engine.generator_steps


def test_injected_wrong_rule_is_caught(monkeypatch):
    monkeypatch.setattr(engine, "generator_steps", _broken_steps)
    result = run_suite(40, seed=5, n_max=6)
    assert not result.passed


def test_both_branches_are_compared():
    rng = random.Random(12)
    case = random_case(rng, n_min=4, n_max=6)
    expected = engine_matrix(case)
    for sign in (1, -1):
        assert np.max(np.abs(oracle_matrix(case, lambda i, s=sign: s) - expected)) < 1e-10
    assert check_case(case, rng) < 1e-10
