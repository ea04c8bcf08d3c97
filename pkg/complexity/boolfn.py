import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Tuple

import numpy as np

from complexity.checks import CheckResult, DEGENERATE, verdict
from complexity.errors import DomainError, FormatError

MAX_ARITY = 16
EXACT_SEARCH_ARITY = 12

_TABLE_PATTERN = re.compile(r'^n=(\d+)\s+table=([01]+)$')


class TruthTable:
    """
    Boolean function f: {0,1}^n -> {0,1} stored as its value vector.

    Position z of ``values`` holds f(z), where bit i of the integer z is the
    input x_i (little-endian). Coordinates are numbered from 0.
    """
    def __init__(self, arity, values):
        """
        Args:
            arity (int): Number of input bits, 0 <= arity <= 16
            values (sequence): 2**arity entries, each 0 or 1

        Raises:
            DomainError: On a bad arity, length, or non-Boolean entry
        """
        if not 0 <= arity <= MAX_ARITY:
            raise DomainError(f"Arity {arity} outside supported range 0..{MAX_ARITY}")
        table = np.array(values, dtype=np.uint8).ravel()
        if table.size != 1 << arity:
            raise DomainError(f"Truth table of arity {arity} needs {1 << arity} values, got {table.size}")
        if table.size and table.max() > 1:
            raise DomainError("Truth table entries must be 0 or 1")
        table.setflags(write=False)
        self.arity = arity
        self.values = table

    @property
    def size(self):
        return self.values.size

    def __call__(self, z):
        """Evaluate at z, given as an integer or a sequence of bits."""
        if not isinstance(z, (int, np.integer)):
            z = bits_to_index(z)
        return int(self.values[z])

    def __eq__(self, other):
        return isinstance(other, TruthTable) and self.arity == other.arity and self.key() == other.key()

    def __hash__(self):
        return hash((self.arity, self.key()))

    def __repr__(self):
        return f"TruthTable({self.to_string()})"

    def key(self):
        return self.values.tobytes()

    def is_constant(self):
        return bool(self.values.min() == self.values.max())

    def restrict(self, coordinate, bit):
        """
        Fix input ``coordinate`` to ``bit``.

        Returns:
            TruthTable: Function of the remaining arity-1 inputs, in order
        """
        if not 0 <= coordinate < self.arity:
            raise DomainError(f"Coordinate {coordinate} outside 0..{self.arity - 1}")
        return TruthTable(self.arity - 1, _restrict_values(self.values, coordinate, bit))

    def flip_inputs(self, mask):
        """Return z -> f(z XOR mask)."""
        return TruthTable(self.arity, self.values[np.arange(self.size) ^ mask])

    def to_string(self):
        return f"n={self.arity} table={''.join(str(int(v)) for v in self.values)}"

    @classmethod
    def from_string(cls, text):
        """
        Parse the canonical text form ``n=<arity> table=<bits>``.

        Raises:
            FormatError: If the line does not match the format
        """
        match = _TABLE_PATTERN.match(text.strip())
        if not match:
            raise FormatError(f"Not a truth table line: '{text.strip()}'")
        arity, table = int(match.group(1)), match.group(2)
        try:
            return cls(arity, [int(c) for c in table])
        except DomainError as e:
            raise FormatError(str(e))

    @classmethod
    def from_function(cls, arity, function: Callable[[Tuple[int, ...]], int]):
        """Tabulate ``function`` over all inputs, passed as bit tuples (x_0, ..., x_{n-1})."""
        return cls(arity, [int(function(index_to_bits(z, arity))) & 1 for z in range(1 << arity)])


def index_to_bits(z, arity):
    return tuple((z >> i) & 1 for i in range(arity))


def bits_to_index(bits):
    return sum((int(b) & 1) << i for i, b in enumerate(bits))


def _restrict_values(values, coordinate, bit):
    return values.reshape(-1, 2, 1 << coordinate)[:, bit, :].ravel()


def _indices(size):
    return np.arange(size, dtype=np.int64)


def _popcounts(size):
    index = _indices(size)
    counts = np.zeros(size, dtype=np.int64)
    for i in range(max(size.bit_length() - 1, 0)):
        counts += (index >> i) & 1
    return counts


def popcount(mask):
    return bin(mask).count('1')


# Named functions

def constant(arity, bit):
    return TruthTable(arity, np.full(1 << arity, bit & 1))


def dictator(arity, coordinate=0):
    return TruthTable(arity, (_indices(1 << arity) >> coordinate) & 1)


def parity(arity):
    return TruthTable(arity, _popcounts(1 << arity) & 1)


def and_(arity):
    return TruthTable(arity, _indices(1 << arity) == (1 << arity) - 1)


def or_(arity):
    return TruthTable(arity, _indices(1 << arity) != 0)


def majority(arity):
    return TruthTable(arity, 2 * _popcounts(1 << arity) > arity)


def random_function(arity, seed):
    """Seeded uniformly random function; the same seed always gives the same table."""
    rng = np.random.default_rng(seed)
    return TruthTable(arity, rng.integers(0, 2, size=1 << arity))


def all_functions(arity) -> Iterator[TruthTable]:
    """Yield all 2**(2**arity) functions, ordered by the integer their table encodes."""
    size = 1 << arity
    for code in range(1 << size):
        yield TruthTable(arity, [(code >> z) & 1 for z in range(size)])


# Sensitivity

@dataclass(frozen=True)
class SensitivityWitness:
    """
    A point z and the set S of coordinates whose flip changes f(z).

    Attributes:
        point (int): z as a little-endian integer
        coordinates (frozenset): Sensitive coordinates at z (0-based)
    """
    point: int
    coordinates: FrozenSet[int]

    @property
    def size(self):
        return len(self.coordinates)


def _flip_matrix(f):
    """Row i, column z: does flipping bit i change f(z)."""
    index = _indices(f.size)
    flips = np.zeros((f.arity, f.size), dtype=bool)
    for i in range(f.arity):
        flips[i] = f.values != f.values[index ^ (1 << i)]
    return flips


def sensitivity(f):
    """
    s(f): maximum over points of the number of sensitive coordinates.

    Args:
        f (TruthTable): Function to measure

    Returns:
        int: Sensitivity of f (0 for constants)
    """
    return int(_flip_matrix(f).sum(axis=0).max())


def sensitive_point(f):
    """
    Witness for s(f): the smallest point attaining the maximum, with all
    of its sensitive coordinates.

    Returns:
        SensitivityWitness: |coordinates| equals sensitivity(f)
    """
    flips = _flip_matrix(f)
    z = int(np.argmax(flips.sum(axis=0)))
    return SensitivityWitness(z, frozenset(int(i) for i in np.flatnonzero(flips[:, z])))


# Block sensitivity

@dataclass(frozen=True)
class BlockSensitivityWitness:
    """
    Attributes:
        value (int): bs(f)
        point (int): The point z attaining it
        blocks (tuple): Pairwise disjoint coordinate sets, each flipping f(z)
    """
    value: int
    point: int
    blocks: Tuple[FrozenSet[int], ...]


def _mask_to_set(mask):
    return frozenset(i for i in range(mask.bit_length()) if (mask >> i) & 1)


def minimal_sensitive_blocks(f, z):
    """
    Inclusion-minimal blocks B with f(z XOR B) != f(z), as ascending bitmasks.

    Every maximum packing of sensitive blocks can be shrunk to one made of
    minimal blocks, so the packing search only needs these.
    """
    index = _indices(f.size)
    sensitive = f.values[index ^ z] != f.values[z]
    below = sensitive.copy()
    for i in range(f.arity):
        bit = 1 << i
        has = (index & bit) != 0
        below[has] |= below[index[has] ^ bit]
    proper = np.zeros(f.size, dtype=bool)
    for i in range(f.arity):
        bit = 1 << i
        has = (index & bit) != 0
        proper[has] |= below[index[has] ^ bit]
    return [int(b) for b in np.flatnonzero(sensitive & ~proper)]


def _pack_blocks(blocks, arity, incumbent):
    """
    Branch and bound for the largest family of disjoint blocks.

    Only families strictly larger than ``incumbent`` are reported. Families
    are explored in lexicographic order of their ascending mask lists, so
    the first maximum found is the lexicographically smallest.

    Returns:
        list or None: Masks of the best family, None if nothing beats incumbent
    """
    best: List[Optional[List[int]]] = [None]
    best_size = [incumbent]

    def search(start, used, chosen):
        if len(chosen) > best_size[0]:
            best[0] = list(chosen)
            best_size[0] = len(chosen)
        if len(chosen) + arity - popcount(used) <= best_size[0]:
            return
        for k in range(start, len(blocks)):
            block = blocks[k]
            if block & used:
                continue
            chosen.append(block)
            search(k + 1, used | block, chosen)
            chosen.pop()
            if best_size[0] == arity:
                return

    search(0, 0, [])
    return best[0]


def block_sensitivity(f):
    """
    bs(f) by exhaustive search over points with exact block packing per point.

    Ties go to the smallest point, then to the lexicographically smallest
    list of blocks (ascending bitmasks).

    Args:
        f (TruthTable): Function with arity <= 12

    Returns:
        BlockSensitivityWitness: Value, point and blocks

    Raises:
        DomainError: If the arity is too large for exact search
    """
    if f.arity > EXACT_SEARCH_ARITY:
        raise DomainError(f"Exact block sensitivity supports arity <= {EXACT_SEARCH_ARITY}")
    best_value, best_point, best_blocks = 0, 0, []
    for z in range(f.size):
        if best_value == f.arity:
            break
        blocks = minimal_sensitive_blocks(f, z)
        if len(blocks) <= best_value:
            continue
        packing = _pack_blocks(blocks, f.arity, best_value)
        if packing is not None:
            best_value, best_point, best_blocks = len(packing), z, packing
    return BlockSensitivityWitness(best_value, best_point, tuple(_mask_to_set(b) for b in best_blocks))


# Degree

def mobius_coefficients(f):
    """
    Coefficients c_S of the multilinear polynomial of f, indexed by the mask of S.

    Computed with the integer Mobius (inclusion-exclusion) transform.
    """
    coefficients = f.values.astype(np.int64)
    index = _indices(f.size)
    for i in range(f.arity):
        bit = 1 << i
        has = (index & bit) != 0
        coefficients[has] -= coefficients[index[has] ^ bit]
    return coefficients


def degree(f):
    """
    deg(f): largest |S| with a nonzero coefficient.

    The zero polynomial (constant 0) has degree 0 by convention.
    """
    coefficients = mobius_coefficients(f)
    nonzero = np.flatnonzero(coefficients)
    if nonzero.size == 0:
        return 0
    return int(_popcounts(f.size)[nonzero].max())


# Decision trees

def decision_tree_depth(f):
    """
    DT(f) by memoized recursion over restrictions.

    Restrictions are keyed by their own truth table, so equal subfunctions
    reached by different query orders are solved once. The memo is local to
    the call.

    Args:
        f (TruthTable): Function with arity <= 12

    Returns:
        int: Least depth of a decision tree computing f
    """
    if f.arity > EXACT_SEARCH_ARITY:
        raise DomainError(f"Exact decision tree depth supports arity <= {EXACT_SEARCH_ARITY}")
    memo: Dict[bytes, int] = {}

    def solve(values):
        if values.min() == values.max():
            return 0
        key = values.tobytes()
        if key in memo:
            return memo[key]
        arity = values.size.bit_length() - 1
        best = arity
        for i in range(arity):
            if best == 1:
                break
            halves = values.reshape(-1, 2, 1 << i)
            low, high = halves[:, 0, :].ravel(), halves[:, 1, :].ravel()
            if np.array_equal(low, high):
                continue
            depth_low = solve(low)
            if 1 + depth_low >= best:
                continue
            best = min(best, 1 + max(depth_low, solve(high)))
        memo[key] = best
        return best

    return solve(f.values)


# Relations among the measures

@dataclass
class RelationReport:
    """
    Attributes:
        values (dict): s, bs, deg, DT of the function
        checks (list): One CheckResult per inequality
        degenerate (bool): True for constant functions (nothing checked)
    """
    values: Dict[str, int]
    checks: List[CheckResult] = field(default_factory=list)
    degenerate: bool = False

    @property
    def all_hold(self):
        return self.degenerate or all(c.holds for c in self.checks)


def check_measure_relations(f):
    """
    Evaluate the standard inequalities among s, bs, deg and DT exactly.

    Checked: s <= bs <= DT, deg <= DT, s <= DT, deg <= s^2 (the square-root
    bound without roots), s <= 2 deg^2, DT <= 2 deg^3, DT <= bs * deg.

    Args:
        f (TruthTable): Function to check

    Returns:
        RelationReport: Measure values and per-inequality results
    """
    if f.is_constant():
        return RelationReport(
            {'n': f.arity},
            [CheckResult('relations', DEGENERATE, {'n': f.arity}, note='constant function, skipped')],
            degenerate=True,
        )
    s = sensitivity(f)
    bs = block_sensitivity(f).value
    deg = degree(f)
    dt = decision_tree_depth(f)
    values = {'n': f.arity, 's': s, 'bs': bs, 'deg': deg, 'DT': dt}
    inequalities = [
        ('s<=bs', s <= bs),
        ('bs<=DT', bs <= dt),
        ('deg<=DT', deg <= dt),
        ('s<=DT', s <= dt),
        ('sqrt(deg)<=s', deg <= s * s),
        ('s<=2deg^2', s <= 2 * deg ** 2),
        ('DT<=2deg^3', dt <= 2 * deg ** 3),
        ('DT<=bs*deg', dt <= bs * deg),
    ]
    return RelationReport(values, [verdict(name, holds, values) for name, holds in inequalities])
