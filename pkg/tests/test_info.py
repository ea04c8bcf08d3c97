from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexity.checks import PASS
from complexity.errors import DomainError
from complexity.info import (
    FiniteDistribution,
    check_information_facts,
    conditional_entropy,
    entropy,
    joint_entropy,
    kl_divergence,
    marginal,
    random_distribution,
)


def test_distribution_is_exact():
    p = FiniteDistribution.from_weights({'a': 1, 'b': 2, 'c': 0})
    assert p['b'] == Fraction(2, 3)
    assert p['c'] == 0
    assert len(p) == 2
    with pytest.raises(DomainError):
        FiniteDistribution({'a': Fraction(1, 2)})
    with pytest.raises(DomainError):
        FiniteDistribution({'a': Fraction(3, 2), 'b': Fraction(-1, 2)})
    with pytest.raises(DomainError):
        FiniteDistribution.from_weights({'a': 0})


@pytest.mark.parametrize("p, expected", [
    (FiniteDistribution.uniform(range(4)), 2.0),
    (FiniteDistribution({'x': 1}), 0.0),
    (FiniteDistribution({0: Fraction(1, 2), 1: Fraction(1, 4), 2: Fraction(1, 4)}), 1.5),
])
def test_entropy_examples(p, expected):
    assert entropy(p) == pytest.approx(expected)


def test_conditional_entropy_examples():
    independent = FiniteDistribution.uniform([(a, b) for a in range(2) for b in range(2)])
    assert conditional_entropy(independent) == pytest.approx(1.0)
    copy = FiniteDistribution.uniform([(0, 0), (1, 1)])
    assert conditional_entropy(copy) == pytest.approx(0.0)
    table = FiniteDistribution.from_weights({(0, 0): 1, (0, 1): 2, (1, 1): 3})
    assert conditional_entropy(table) == pytest.approx(joint_entropy(table) - entropy(marginal(table, 0)))


def test_marginal():
    p = FiniteDistribution.from_weights({(0, 0): 1, (0, 1): 1, (1, 1): 2})
    assert marginal(p, 0) == FiniteDistribution({0: Fraction(1, 2), 1: Fraction(1, 2)})
    assert marginal(p, [1, 0])[(1, 0)] == Fraction(1, 4)


def test_kl_divergence_examples():
    q = FiniteDistribution.uniform('ab')
    assert kl_divergence(q, q) == pytest.approx(0.0)
    assert kl_divergence(FiniteDistribution({'a': 1}), q) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        kl_divergence(q, FiniteDistribution({'a': 1}))
    p = random_distribution(11, 6)
    assert kl_divergence(p, FiniteDistribution.uniform(range(6))) >= -1e-9


def test_random_distribution_is_seeded():
    assert random_distribution(4, 5) == random_distribution(4, 5)
    full = random_distribution(4, 6, pairs=(2, 3), minimum=1)
    assert len(full) == 6
    assert set(full.support) == {(i, j) for i in range(2) for j in range(3)}


@pytest.mark.property_based
@given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=3),
       st.integers(min_value=1, max_value=3))
@settings(max_examples=100)
def test_information_facts_hold(seed, a, b):
    p = random_distribution(seed, a * b, pairs=(a, b))
    q = random_distribution(seed + 1, a * b, pairs=(a, b), minimum=1)
    checks = check_information_facts(p, q)
    assert [check.name for check in checks] == [
        'chain-rule', 'conditioning', 'subadditivity', 'support-bound', 'kl-nonnegative', 'kl-self']
    assert all(check.status == PASS for check in checks)
