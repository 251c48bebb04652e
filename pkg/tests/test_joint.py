import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pslconj.conjunction import frechet_bounds
from pslconj.errors import InfeasibleTargetError, InvalidArityError
from pslconj.joint import (
    JointDistribution,
    construct_joint,
    joint_conjunction_prob,
    joint_marginal,
)

from conftest import prob_vectors

INDEPENDENT = JointDistribution(2, {(1, 1): 0.25, (1, 0): 0.25, (0, 1): 0.25, (0, 0): 0.25})
COMONOTONE = JointDistribution(2, {(1, 1): 0.5, (0, 0): 0.5})
ANTI = JointDistribution(2, {(1, 0): 0.5, (0, 1): 0.5})


def table_marginals(j):
    """Marginals straight from a dense 2^n table."""
    dense = np.zeros((2,) * j.arity)
    for pattern, mass in j.atoms.items():
        dense[pattern] += mass
    return [dense.sum(axis=tuple(k for k in range(j.arity) if k != i))[1] for i in range(j.arity)]


@pytest.mark.parametrize(
    "target, expected",
    [
        (0.25, INDEPENDENT.atoms),
        (0.5, COMONOTONE.atoms),
        (0.0, ANTI.atoms),
    ],
)
def test_three_dependence_cases(target, expected):
    j = construct_joint((0.5, 0.5), target)
    assert j.atoms == pytest.approx(expected, abs=1e-12)


def test_marginal_and_conjunction_readers():
    assert joint_marginal(INDEPENDENT, 0) == 0.5
    assert joint_marginal(JointDistribution(3, {(1, 1, 1): 1.0}), 2) == 1.0
    assert joint_marginal(ANTI, 1) == 0.5
    assert joint_conjunction_prob(INDEPENDENT) == 0.25
    assert joint_conjunction_prob(COMONOTONE) == 0.5
    assert joint_conjunction_prob(ANTI) == 0.0


def test_marginal_index_checked():
    with pytest.raises(IndexError):
        joint_marginal(INDEPENDENT, 2)


def test_invalid_joint_rejected():
    with pytest.raises(ValueError):
        JointDistribution(2, {(1, 1): 0.5})


@pytest.mark.parametrize("target", [0.6, -0.01])
def test_infeasible_target(target):
    with pytest.raises(InfeasibleTargetError):
        construct_joint((0.5, 0.5), target)


def test_too_many_events():
    with pytest.raises(InvalidArityError):
        construct_joint([0.9] * 17, 0.5)


@settings(max_examples=300)
@given(prob_vectors(min_size=1, max_size=8), st.floats(0.0, 1.0))
def test_round_trip(m, frac):
    iv = frechet_bounds(m)
    target = iv.lower + frac * (iv.upper - iv.lower)
    j = construct_joint(m, target)
    assert joint_conjunction_prob(j) == pytest.approx(target, abs=1e-12)
    np.testing.assert_allclose(table_marginals(j), m, rtol=0, atol=1e-12)
    assert len(j.atoms) <= 4 * len(m) + 2


@given(prob_vectors(min_size=2, max_size=6), st.floats(1e-9 * 1.01, 0.5))
def test_outside_interval_raises(m, delta):
    iv = frechet_bounds(m)
    if iv.upper + delta <= 1.0:
        with pytest.raises(InfeasibleTargetError):
            construct_joint(m, iv.upper + delta)
    if iv.lower - delta >= 0.0:
        with pytest.raises(InfeasibleTargetError):
            construct_joint(m, iv.lower - delta)


def test_sixteen_events_still_small():
    rng = np.random.default_rng(0)
    m = 1 - 0.05 * rng.random(16)
    iv = frechet_bounds(m)
    j = construct_joint(m, iv.lower)
    assert joint_conjunction_prob(j) == pytest.approx(iv.lower, abs=1e-12)
    assert len(j.atoms) <= 4 * 16 + 2


def test_csv_round_trip():
    j = construct_joint((0.3, 0.8, 0.6), 0.2)
    text = j.to_csv()
    lines = text.splitlines()
    assert lines[0] == "pattern,mass"
    assert all(len(line.split(",")[0]) == 3 for line in lines[1:])
    back = JointDistribution.from_csv(text)
    assert back.atoms == j.atoms


def test_csv_pattern_is_event_one_first():
    j = JointDistribution(2, {(1, 0): 0.5, (0, 1): 0.5})
    rows = dict(line.split(",") for line in j.to_csv().splitlines()[1:])
    assert float(rows["10"]) == 0.5  # event 1 on, event 2 off
