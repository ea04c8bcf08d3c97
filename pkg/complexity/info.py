from fractions import Fraction
from typing import Dict, Hashable, Iterable

import numpy as np

from complexity.checks import verdict
from complexity.errors import DomainError

TOLERANCE = 1e-9


class FiniteDistribution:
    """
    Finite distribution with exact rational probabilities.

    Outcomes are arbitrary hashable labels; joint distributions use tuple
    labels. Zero-probability outcomes are dropped on construction.

    Attributes:
        probabilities (dict): Outcome label -> Fraction, summing to exactly 1
    """
    def __init__(self, probabilities: Dict[Hashable, Fraction]):
        cleaned = {}
        for label, value in probabilities.items():
            value = Fraction(value)
            if value < 0:
                raise DomainError(f"Negative probability {value} for outcome {label!r}")
            if value:
                cleaned[label] = value
        total = sum(cleaned.values(), Fraction(0))
        if total != 1:
            raise DomainError(f"Probabilities sum to {total}, not 1")
        self.probabilities = cleaned

    @classmethod
    def from_weights(cls, weights: Dict[Hashable, int]):
        """Normalize non-negative integer (or rational) weights."""
        total = sum((Fraction(w) for w in weights.values()), Fraction(0))
        if total <= 0:
            raise DomainError("Weights must have a positive total")
        return cls({label: Fraction(w) / total for label, w in weights.items()})

    @classmethod
    def uniform(cls, labels: Iterable[Hashable]):
        labels = list(dict.fromkeys(labels))
        if not labels:
            raise DomainError("Uniform distribution needs at least one outcome")
        return cls({label: Fraction(1, len(labels)) for label in labels})

    @property
    def support(self):
        return list(self.probabilities)

    def __getitem__(self, label):
        return self.probabilities.get(label, Fraction(0))

    def __len__(self):
        return len(self.probabilities)

    def __eq__(self, other):
        return isinstance(other, FiniteDistribution) and self.probabilities == other.probabilities

    def __repr__(self):
        return f"FiniteDistribution({len(self)} outcomes)"

    def masses(self):
        return np.array([float(v) for v in self.probabilities.values()], dtype=np.float64)


def random_distribution(seed, size, pairs=None, minimum=0):
    """
    Seeded random rational distribution with integer weights in [minimum, 10].

    Args:
        seed (int): Generator seed
        size (int): Number of outcomes, labelled 0..size-1
        pairs (tuple): Optional (a, b) shape; labels become (i, j) pairs
        minimum (int): Least weight; 1 gives full support

    Returns:
        FiniteDistribution: At least one outcome has positive weight
    """
    rng = np.random.default_rng(seed)
    if pairs is not None:
        labels = [(i, j) for i in range(pairs[0]) for j in range(pairs[1])]
    else:
        labels = list(range(size))
    weights = [int(w) for w in rng.integers(minimum, 11, size=len(labels))]
    if not any(weights):
        weights[int(rng.integers(len(labels)))] = 1
    return FiniteDistribution.from_weights(dict(zip(labels, weights)))


def marginal(p: FiniteDistribution, positions):
    """
    Marginal of a tuple-labelled distribution on the given label positions.

    An int position yields scalar labels; a sequence yields tuple labels.
    """
    single = isinstance(positions, int)
    indices = (positions,) if single else tuple(positions)
    result: Dict[Hashable, Fraction] = {}
    for label, value in p.probabilities.items():
        key = label[indices[0]] if single else tuple(label[i] for i in indices)
        result[key] = result.get(key, Fraction(0)) + value
    return FiniteDistribution(result)


def entropy(p: FiniteDistribution):
    """Shannon entropy in bits; zero-mass outcomes contribute nothing."""
    masses = p.masses()
    masses = masses[masses > 0]
    return float(-np.sum(masses * np.log2(masses)))


def joint_entropy(p: FiniteDistribution):
    """H(AB) for a pair-labelled distribution; the same sum as ``entropy``."""
    return entropy(p)


def conditional_entropy(p: FiniteDistribution):
    """
    H(B|A) for a distribution over pairs (a, b), as the expectation of
    log 1/p(b|a) under p(a, b).
    """
    first = marginal(p, 0)
    total = 0.0
    for (a, _), value in p.probabilities.items():
        total += float(value) * float(np.log2(float(first[a]) / float(value)))
    return total


def kl_divergence(p: FiniteDistribution, q: FiniteDistribution):
    """
    D(p || q) in bits.

    Raises:
        DomainError: If p puts mass where q has none
    """
    missing = [label for label in p.probabilities if q[label] == 0]
    if missing:
        raise DomainError(f"p is not absolutely continuous w.r.t. q at {missing[0]!r}")
    labels = list(p.probabilities)
    mass_p = np.array([float(p[label]) for label in labels])
    mass_q = np.array([float(q[label]) for label in labels])
    return float(np.sum(mass_p * np.log2(mass_p / mass_q)))


def check_information_facts(p: FiniteDistribution, q: FiniteDistribution, tolerance=TOLERANCE):
    """
    Check the entropy facts used by the dense-rectangle extraction on one
    pair-labelled distribution p and a reference q with p << q.

    Checked: the chain rule H(AB) = H(A) + H(B|A), conditioning does not
    increase entropy H(B|A) <= H(B), subadditivity H(AB) <= H(A) + H(B),
    the support bound H(AB) <= log |supp p|, and D(p || q) >= 0 with
    D(p || p) = 0.

    Returns:
        list: One CheckResult per fact
    """
    h_joint = joint_entropy(p)
    h_a, h_b = entropy(marginal(p, 0)), entropy(marginal(p, 1))
    h_cond = conditional_entropy(p)
    log_support = float(np.log2(len(p)))
    divergence = kl_divergence(p, q)
    return [
        verdict('chain-rule', abs(h_joint - (h_a + h_cond)) <= tolerance,
                {'H_AB': h_joint, 'H_A': h_a, 'H_B_given_A': h_cond}),
        verdict('conditioning', h_cond <= h_b + tolerance, {'H_B_given_A': h_cond, 'H_B': h_b}),
        verdict('subadditivity', h_joint <= h_a + h_b + tolerance, {'H_AB': h_joint, 'H_A': h_a, 'H_B': h_b}),
        verdict('support-bound', h_joint <= log_support + tolerance, {'H_AB': h_joint, 'log_support': log_support}),
        verdict('kl-nonnegative', divergence >= -tolerance, {'D': divergence}),
        verdict('kl-self', abs(kl_divergence(p, p)) <= tolerance, {'support': len(p)}),
    ]
