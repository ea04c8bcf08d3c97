from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from complexity.boolfn import TruthTable, all_functions, random_function
from complexity.errors import DomainError
from complexity.gadget import DEFAULT_BUDGET_CELLS, GadgetMatrix, make_gadget, random_gadget
from complexity.lifting import BALANCED, BIASED, gadget_regime

SEED_SCAN_LIMIT = 10000

BIASED_PROBABILITIES = (0.95, 0.05)


@dataclass
class Instance:
    """
    One unit of suite work.

    Attributes:
        name (str): Unique name inside the suite
        suite (str): Owning suite
        params (dict): Provenance; regenerates the instance exactly
        function (TruthTable): Outer function, if any
        gadget (GadgetMatrix): Gadget, if any
    """
    name: str
    suite: str
    params: Dict[str, Any] = field(default_factory=dict)
    function: Optional[TruthTable] = None
    gadget: Optional[GadgetMatrix] = None


def sanitize_name(name):
    """
    Sanitize a name for use in file names and report keys.

    Args:
        name (str): Name to sanitize

    Returns:
        str: Lower-case name without spaces or path separators
    """
    name = str(name).lower()
    for char in (' ', '/', ':', '^', '='):
        name = name.replace(char, '-')
    return name


def function_name(f: TruthTable):
    """``f<n>_<table bits>``, e.g. f2_0110 for XOR on two bits."""
    return f"f{f.arity}_{''.join(str(int(v)) for v in f.values)}"


def gadget_name(spec):
    """
    Name of a gadget spec.

    Args:
        spec (dict): ``{'name': ...}`` plus seed, rows, cols, bias for random gadgets

    Returns:
        str: Sanitized gadget name
    """
    if spec['name'] == 'random':
        return sanitize_name(f"random-{spec['rows']}x{spec['cols']}-s{spec['seed']}")
    return sanitize_name(spec['name'])


def instance_name(*parts):
    return '.'.join(sanitize_name(p) for p in parts)


def gadget_from_spec(spec, budget_cells=DEFAULT_BUDGET_CELLS):
    """Rebuild a gadget from its provenance spec."""
    return make_gadget(spec['name'], spec.get('seed'), spec.get('rows'), spec.get('cols'),
                       spec.get('bias', 0.5), budget_cells)


def _scan_random_gadgets(count, regime, sizes, seed):
    """
    First ``count`` seeded random gadgets (seeds seed, seed + 1, ...) that are
    non-constant and in the wanted regime; sizes cycle through ``sizes``.
    """
    found = []
    for step in range(SEED_SCAN_LIMIT):
        if len(found) == count:
            break
        side = sizes[len(found) % len(sizes)]
        bias = 0.5 if regime == BALANCED else BIASED_PROBABILITIES[len(found) % len(BIASED_PROBABILITIES)]
        candidate = random_gadget(seed + step, side, side, bias)
        if candidate.is_constant() or gadget_regime(candidate) != regime:
            continue
        found.append({'name': 'random', 'seed': seed + step, 'rows': side, 'cols': side, 'bias': bias,
                      'regime': regime})
    if len(found) < count:
        raise DomainError(f"Only {len(found)} {regime} random gadgets within {SEED_SCAN_LIMIT} seeds")
    return found


def standard_gadget_specs(config):
    """
    Named corpus gadgets followed by the seeded random ones.

    Args:
        config (LiftLabConfig): Run configuration

    Returns:
        list: Gadget specs, in canonical order
    """
    specs = [{'name': name} for name in config.gadget_names]
    random_config = config.corpus['random-gadgets']
    sizes = list(random_config.get('sizes', [3, 4]))
    specs += _scan_random_gadgets(int(random_config.get('balanced', 0)), BALANCED, sizes, config.seed)
    specs += _scan_random_gadgets(int(random_config.get('biased', 0)), BIASED, sizes, config.seed + SEED_SCAN_LIMIT)
    return specs


def functions_up_to(max_arity):
    """All Boolean functions on 1..max_arity bits, by arity then table."""
    functions = []
    for arity in range(1, max_arity + 1):
        functions.extend(all_functions(arity))
    return functions


def seeded_functions(count, arity, seed):
    """
    Random functions with seeds seed, seed + 1, ...

    Returns:
        list: (seed, TruthTable) pairs
    """
    return [(seed + k, random_function(arity, seed + k)) for k in range(count)]
