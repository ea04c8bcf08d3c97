from dataclasses import dataclass
from typing import Callable, List

from complexity.errors import DomainError
from suites import definitions

ALL = 'all'


@dataclass(frozen=True)
class Suite:
    """
    Attributes:
        name (str): Suite name used on the command line
        description (str): One line for ``--help``
        build (callable): config -> list of Instance
        run (callable): (instance, config, stage) -> SuiteOutcome
    """
    name: str
    description: str
    build: Callable
    run: Callable


SUITES = {suite.name: suite for suite in (
    Suite('relations', 's <= bs <= DT, deg <= DT, deg <= s^2, DT <= bs*deg, ... over all small functions',
          definitions.build_relations, definitions.run_relations),
    Suite('rank-lemma', 'rk(f o g) >= (rk(g) - 1)^deg(f) and rank subadditivity',
          definitions.build_rank_lemma, definitions.run_rank_lemma),
    Suite('yang', 'rk(XOR_n o g) >= (rk(g) - 1)^n - 1',
          definitions.build_yang, definitions.run_yang),
    Suite('lemma3', 'dense monochromatic rectangle of g from a cover of f o g',
          definitions.build_dense_rectangle, definitions.run_dense_rectangle),
    Suite('cc', 'exact D(M) against rank, cover and trivial bounds',
          definitions.build_cc, definitions.run_cc),
    Suite('rebalance', 'rebalanced random protocols: same function, logarithmic depth',
          definitions.build_rebalance, definitions.run_rebalance),
    Suite('synthesis', 'protocol for g built from a cover of f o g, over Q and F2',
          definitions.build_synthesis, definitions.run_synthesis),
    Suite('fknn', 'D(g^n) >= log C(g^n) >= n (sqrt(D(g)) - log log(|X||Y|) - 1)',
          definitions.build_fknn, definitions.run_fknn),
    Suite('bs-reduction', 's(f\') = bs(f) and the input translation of the block reduction',
          definitions.build_bs_reduction, definitions.run_bs_reduction),
    Suite('info', 'entropy and divergence facts on random rational distributions',
          definitions.build_info, definitions.run_info),
)}

# alternative command-line names -> registered suite
ALIASES = {'dense-rectangle': 'lemma3'}


def suite_names():
    """Names accepted by ``--suite``: suites, their aliases, then ``all``."""
    return list(SUITES) + list(ALIASES) + [ALL]


def canonical_name(name):
    return ALIASES.get(name, name)


def get_suite(name):
    """
    Look up a suite.

    Raises:
        DomainError: For an unknown suite name
    """
    try:
        return SUITES[canonical_name(name)]
    except KeyError:
        raise DomainError(f"Unknown suite '{name}', expected one of {', '.join(suite_names())}")


def expand(name) -> List[Suite]:
    """Suites run by ``name``; ``all`` runs every suite in registry order."""
    if name == ALL:
        return list(SUITES.values())
    return [get_suite(name)]


def build_instances(name, config, only=None):
    """
    Corpus instances of a suite (or of all suites), in canonical order.

    Args:
        name (str): Suite name or ``all``
        config (LiftLabConfig): Run configuration
        only (str): Keep just the instance with this name

    Raises:
        DomainError: If ``only`` names no instance of the suite
    """
    instances = [instance for suite in expand(name) for instance in suite.build(config)]
    if only is not None:
        instances = [instance for instance in instances if instance.name == only]
        if not instances:
            raise DomainError(f"No instance '{only}' in suite '{name}'")
    return instances


def run_instance(instance, config, stage=lambda check: None):
    """Run one instance with the suite that built it."""
    return get_suite(instance.suite).run(instance, config, stage)
