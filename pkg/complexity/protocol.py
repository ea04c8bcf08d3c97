import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple, Union

import numpy as np

from complexity.errors import BudgetError, DomainError, FormatError, InvariantError
from complexity.gadget import GadgetMatrix, integer_rank

ALICE = 'A'
BOB = 'B'

DEFAULT_BUDGET_NODES = 200000

_LEAF_PATTERN = re.compile(r'\[sym=(\d+)\]')
_SPLIT_PATTERN = re.compile(r'\(([AB])\s+([\d,]+)\|([\d,]+)\s+')
_DOMAIN_PATTERN = re.compile(r'^domain\s+rows=([\d,]+)\s+cols=([\d,]+)$')


@dataclass(frozen=True)
class Leaf:
    symbol: int


@dataclass(frozen=True)
class Split:
    """
    Internal node: ``owner`` announces whether their input lies in
    ``part0`` (bit 0) or ``part1`` (bit 1). The parts partition the owner's
    current row set (Alice) or column set (Bob).
    """
    owner: str
    part0: FrozenSet[int]
    part1: FrozenSet[int]
    child0: 'Node'
    child1: 'Node'


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class ProtocolTree:
    """
    Deterministic protocol on the rectangle ``rows`` x ``cols``.

    Attributes:
        root (Node): Root of the binary tree
        rows (frozenset): Alice's input set at the root
        cols (frozenset): Bob's input set at the root
    """
    root: Node
    rows: FrozenSet[int]
    cols: FrozenSet[int]

    @classmethod
    def for_matrix(cls, root, matrix):
        return cls(root, frozenset(range(matrix.rows)), frozenset(range(matrix.cols)))

    @property
    def depth(self):
        return depth(self.root)

    @property
    def leaves(self):
        return leaf_count(self.root)


@dataclass
class CCResult:
    """
    Outcome of the exact communication complexity search.

    Attributes:
        value (int): D(M) when exact, otherwise the best known upper bound
        tree (ProtocolTree): Protocol attaining ``value``
        exact (bool): Whether ``value`` is proved optimal
        lower (int): Best proved lower bound
        expansions (int): Search nodes expanded
    """
    value: int
    tree: ProtocolTree
    exact: bool
    lower: int
    expansions: int = 0

    @property
    def upper(self):
        return self.value


def _root(tree):
    return tree.root if isinstance(tree, ProtocolTree) else tree


def leaf_count(tree):
    node = _root(tree)
    if isinstance(node, Leaf):
        return 1
    return leaf_count(node.child0) + leaf_count(node.child1)


def depth(tree):
    node = _root(tree)
    if isinstance(node, Leaf):
        return 0
    return 1 + max(depth(node.child0), depth(node.child1))


def ceil_log2(value):
    """ceil(log2 value) for positive integers, 0 for value <= 1."""
    return max(int(value) - 1, 0).bit_length()


def split(owner, part0, part1, child0, child1):
    """Build a split node, or skip the announcement when one part is empty."""
    part0, part1 = frozenset(part0), frozenset(part1)
    if not part0:
        return child1
    if not part1:
        return child0
    return Split(owner, part0, part1, child0, child1)


def check_structure(tree: ProtocolTree):
    """
    Raise DomainError unless every split partitions its owner's current set
    into two non-empty parts.
    """
    def walk(node, rows, cols):
        if isinstance(node, Leaf):
            return
        if node.owner not in (ALICE, BOB):
            raise DomainError(f"Unknown owner '{node.owner}'")
        side = rows if node.owner == ALICE else cols
        if not node.part0 or not node.part1 or node.part0 & node.part1 or node.part0 | node.part1 != side:
            raise DomainError(f"Split by {node.owner} does not partition its current set")
        if node.owner == ALICE:
            walk(node.child0, node.part0, cols)
            walk(node.child1, node.part1, cols)
        else:
            walk(node.child0, rows, node.part0)
            walk(node.child1, rows, node.part1)

    if not tree.rows or not tree.cols:
        raise DomainError("Protocol domain must be non-empty")
    walk(tree.root, tree.rows, tree.cols)


def leaf_rectangles(tree: ProtocolTree):
    """Yield (leaf, rows, cols) for every leaf with its rectangle."""
    stack = [(tree.root, tree.rows, tree.cols)]
    while stack:
        node, rows, cols = stack.pop()
        if isinstance(node, Leaf):
            yield node, rows, cols
        elif node.owner == ALICE:
            stack.append((node.child1, rows & node.part1, cols))
            stack.append((node.child0, rows & node.part0, cols))
        else:
            stack.append((node.child1, rows, cols & node.part1))
            stack.append((node.child0, rows, cols & node.part0))


def eval_protocol(tree: ProtocolTree, x, y):
    """
    Run the protocol on inputs (x, y) and return the leaf symbol.

    Raises:
        DomainError: If an input is not in the part sets along its path
    """
    node = tree.root
    while isinstance(node, Split):
        value = x if node.owner == ALICE else y
        if value in node.part0:
            node = node.child0
        elif value in node.part1:
            node = node.child1
        else:
            raise DomainError(f"Input {value} missing from a split of {node.owner}")
    return node.symbol


def verify_protocol(tree: ProtocolTree, matrix: GadgetMatrix):
    """
    True iff the tree is well formed on the matrix's full domain and
    outputs M[x, y] on every cell.

    Each cell reaches exactly one leaf of a well-formed tree, so comparing
    every leaf rectangle entrywise with its symbol checks every cell.
    """
    if tree.rows != frozenset(range(matrix.rows)) or tree.cols != frozenset(range(matrix.cols)):
        return False
    try:
        check_structure(tree)
    except DomainError:
        return False
    for leaf, rows, cols in leaf_rectangles(tree):
        block = matrix.entries[np.ix_(sorted(rows), sorted(cols))]
        if not bool((block == leaf.symbol).all()):
            return False
    return True


# Exact search

def _classes(entries, ids, other_ids, axis):
    """Group ``ids`` (rows for axis 0, columns for axis 1) by their pattern on ``other_ids``."""
    groups: Dict[bytes, List[int]] = {}
    for i in ids:
        line = entries[i, other_ids] if axis == 0 else entries[other_ids, i]
        groups.setdefault(line.tobytes(), []).append(i)
    return list(groups.values())


def _mask(ids):
    mask = 0
    for i in ids:
        mask |= 1 << i
    return mask


def _ids(mask):
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


class _SearchExhausted(BudgetError):
    pass


class _ProtocolSearch:
    """
    Depth-limited minimax search over sub-rectangles with memoized bounds.

    For each (row mask, column mask) key the table keeps the best protocol
    found with its depth and the largest depth limit proved infeasible.
    """
    def __init__(self, matrix, budget_nodes, merge_duplicates):
        self.entries = matrix.entries
        self.boolean = matrix.is_boolean
        self.budget_nodes = budget_nodes
        self.merge_duplicates = merge_duplicates
        self.upper: Dict[Tuple[int, int], Tuple[int, Node]] = {}
        self.lower: Dict[Tuple[int, int], int] = {}
        self.expansions = 0

    def lower_bound(self, rows, cols):
        key = (rows, cols)
        if key not in self.lower:
            block = self.entries[np.ix_(_ids(rows), _ids(cols))]
            bound = ceil_log2(len(np.unique(block)))
            if self.boolean:
                bound = max(bound, ceil_log2(integer_rank(block)))
            self.lower[key] = bound
        return self.lower[key]

    def groups(self, rows, cols):
        row_ids, col_ids = _ids(rows), _ids(cols)
        if not self.merge_duplicates:
            return [[r] for r in row_ids], [[c] for c in col_ids]
        return _classes(self.entries, row_ids, col_ids, 0), _classes(self.entries, col_ids, row_ids, 1)

    def search(self, rows, cols, limit):
        """Return (depth, node) of a protocol of depth <= limit, or None if none exists."""
        key = (rows, cols)
        known = self.upper.get(key)
        if known is not None and known[0] <= limit:
            return known
        if self.lower_bound(rows, cols) > limit:
            return None
        block = self.entries[np.ix_(_ids(rows), _ids(cols))]
        if bool((block == block.flat[0]).all()):
            found = (0, Leaf(int(block.flat[0])))
            self.upper[key] = found
            return found
        self.expansions += 1
        if self.expansions > self.budget_nodes:
            raise _SearchExhausted(f"Protocol search passed {self.budget_nodes} expansions")
        row_groups, col_groups = self.groups(rows, cols)
        for owner, groups in ((ALICE, row_groups), (BOB, col_groups)):
            count = len(groups)
            for pattern in range(1, 1 << (count - 1)):
                first = [i for k in range(count) if (pattern >> k) & 1 for i in groups[k]]
                second = [i for k in range(count) if not (pattern >> k) & 1 for i in groups[k]]
                part0, part1 = _mask(first), _mask(second)
                if owner == ALICE:
                    left = self.search(part0, cols, limit - 1)
                    right = left and self.search(part1, cols, limit - 1)
                else:
                    left = self.search(rows, part0, limit - 1)
                    right = left and self.search(rows, part1, limit - 1)
                if left and right:
                    found = (1 + max(left[0], right[0]),
                             Split(owner, frozenset(first), frozenset(second), left[1], right[1]))
                    self.upper[key] = found
                    return found
        self.lower[key] = limit + 1
        return None


def trivial_protocol(matrix: GadgetMatrix):
    """
    Alice halves her distinct row patterns until one is left, then Bob
    halves the symbols of that row. Depth is at most
    ceil(log2 #distinct rows) + ceil(log2 #symbols).
    """
    entries = matrix.entries

    def announce(rows, cols):
        block = entries[np.ix_(rows, cols)]
        if bool((block == block.flat[0]).all()):
            return Leaf(int(block.flat[0]))
        groups = _classes(entries, rows, cols, 0)
        if len(groups) > 1:
            half = (len(groups) + 1) // 2
            first = sorted(i for g in groups[:half] for i in g)
            second = sorted(i for g in groups[half:] for i in g)
            return Split(ALICE, frozenset(first), frozenset(second),
                         announce(first, cols), announce(second, cols))
        symbols = sorted(set(int(v) for v in entries[rows[0], cols]))
        low = set(symbols[:(len(symbols) + 1) // 2])
        first = [c for c in cols if int(entries[rows[0], c]) in low]
        second = [c for c in cols if int(entries[rows[0], c]) not in low]
        return Split(BOB, frozenset(first), frozenset(second),
                     announce(rows, first), announce(rows, second))

    return ProtocolTree.for_matrix(announce(list(range(matrix.rows)), list(range(matrix.cols))), matrix)


def exact_cc(matrix: GadgetMatrix, budget_nodes=DEFAULT_BUDGET_NODES, merge_duplicates=True):
    """
    D(M) by iterative deepening over memoized minimax search.

    A rectangle costs 0 when monochromatic, else 1 plus the best split by
    either player of the maximum cost of the two halves. Rows (columns)
    that are equal on the current rectangle are kept together, which does
    not change the optimum. Limits below ceil(log2 rank) and
    ceil(log2 #symbols) are never tried.

    Args:
        matrix (GadgetMatrix): Matrix to solve
        budget_nodes (int): Expansion cap
        merge_duplicates (bool): Merge equal lines before splitting

    Returns:
        CCResult: Exact value and witness, or bounds flagged non-exact when
        the expansion budget runs out
    """
    search = _ProtocolSearch(matrix, budget_nodes, merge_duplicates)
    rows, cols = (1 << matrix.rows) - 1, (1 << matrix.cols) - 1
    fallback = trivial_protocol(matrix)
    limit = search.lower_bound(rows, cols)
    try:
        while limit < fallback.depth:
            found = search.search(rows, cols, limit)
            if found is not None:
                tree = ProtocolTree.for_matrix(found[1], matrix)
                return CCResult(found[0], tree, True, found[0], search.expansions)
            limit += 1
    except _SearchExhausted:
        return CCResult(fallback.depth, fallback, False, limit, search.expansions)
    return CCResult(fallback.depth, fallback, True, fallback.depth, search.expansions)


# Rebalancing

def rebalance_depth_bound(leaves):
    """ceil(2 log_{3/2} leaves) in exact integers: least d with 3^d >= leaves^2 2^d."""
    if leaves < 1:
        raise DomainError("A protocol has at least one leaf")
    bound = 0
    while 3 ** bound < leaves ** 2 * 2 ** bound:
        bound += 1
    return bound


def restrict_protocol(node, rows, cols):
    """
    The protocol on the sub-rectangle ``rows`` x ``cols``: announcements that
    became constant are dropped and parts are intersected with the domain.
    """
    if isinstance(node, Leaf):
        return node
    side = rows if node.owner == ALICE else cols
    part0, part1 = node.part0 & side, node.part1 & side
    if part0 | part1 != side:
        raise InvariantError("Restriction domain leaves the split's current set")
    if not part0:
        return restrict_protocol(node.child1, rows, cols)
    if not part1:
        return restrict_protocol(node.child0, rows, cols)
    if node.owner == ALICE:
        return Split(ALICE, part0, part1,
                     restrict_protocol(node.child0, part0, cols), restrict_protocol(node.child1, part1, cols))
    return Split(BOB, part0, part1,
                 restrict_protocol(node.child0, rows, part0), restrict_protocol(node.child1, rows, part1))


def _pick_node(root, rows, cols, total):
    """
    Deepest node whose leaf count lies in [total/3, 2 total/3], ties to the
    leftmost; returns (node, rows, cols, path of child bits).
    """
    candidates = []
    order = [0]

    def walk(node, node_rows, node_cols, path):
        position = order[0]
        order[0] += 1
        if isinstance(node, Leaf):
            count = 1
        elif node.owner == ALICE:
            count = (walk(node.child0, node.part0, node_cols, path + (0,))
                     + walk(node.child1, node.part1, node_cols, path + (1,)))
        else:
            count = (walk(node.child0, node_rows, node.part0, path + (0,))
                     + walk(node.child1, node_rows, node.part1, path + (1,)))
        if total <= 3 * count <= 2 * total:
            candidates.append((-len(path), position, node, node_rows, node_cols, path))
        return count

    walk(root, rows, cols, ())
    if not candidates:
        raise InvariantError("No balanced node in a tree with more than one leaf")
    _, _, node, node_rows, node_cols, path = min(candidates, key=lambda c: (c[0], c[1]))
    return node, node_rows, node_cols, path


def _remove(node, path):
    """Replace the parent of the node at ``path`` by that node's sibling."""
    if len(path) == 1:
        return node.child1 if path[0] == 0 else node.child0
    if path[0] == 0:
        return Split(node.owner, node.part0, node.part1, _remove(node.child0, path[1:]), node.child1)
    return Split(node.owner, node.part0, node.part1, node.child0, _remove(node.child1, path[1:]))


def _balance(node, rows, cols):
    total = leaf_count(node)
    if total == 1:
        return node
    chosen, chosen_rows, chosen_cols, path = _pick_node(node, rows, cols, total)
    rest = _remove(node, path)
    other_rows, other_cols = rows - chosen_rows, cols - chosen_cols
    inside = _balance(chosen, chosen_rows, chosen_cols)
    beside = (_balance(restrict_protocol(rest, chosen_rows, other_cols), chosen_rows, other_cols)
              if other_cols else None)
    outside = (_balance(restrict_protocol(rest, other_rows, cols), other_rows, cols)
               if other_rows else None)
    bob = split(BOB, chosen_cols, other_cols, inside, beside)
    return split(ALICE, chosen_rows, other_rows, bob, outside)


def rebalance(tree: ProtocolTree):
    """
    Same function, depth at most ceil(2 log_{3/2} l) for l leaves.

    Pick a node v holding between a third and two thirds of the leaves.
    Alice says whether x is in v's rows, Bob whether y is in v's columns;
    inside v's rectangle play v's subtree, elsewhere play the tree with v
    cut out (v's parent replaced by v's sibling). Both continuations have at
    most 2l/3 leaves and are balanced recursively.

    Raises:
        DomainError: On a malformed input tree
    """
    check_structure(tree)
    root = restrict_protocol(tree.root, tree.rows, tree.cols)
    return ProtocolTree(_balance(root, tree.rows, tree.cols), tree.rows, tree.cols)


# Random trees

def random_protocol(leaves, seed, alphabet=2):
    """
    Seeded random protocol with exactly ``leaves`` leaves on a
    leaves x leaves domain, and the matrix it computes.

    Every node with L leaves keeps at least L rows and L columns, so each
    split can give both children enough inputs.

    Returns:
        tuple: (ProtocolTree, GadgetMatrix)
    """
    if leaves < 1:
        raise DomainError("A protocol has at least one leaf")
    rng = np.random.default_rng(seed)

    def grow(count, rows, cols):
        if count == 1:
            return Leaf(int(rng.integers(alphabet)))
        left = int(rng.integers(1, count))
        owner = ALICE if rng.integers(2) == 0 else BOB
        side = rows if owner == ALICE else cols
        shuffled = [int(v) for v in rng.permutation(side)]
        cut = left + int(rng.integers(0, len(side) - count + 1))
        part0, part1 = sorted(shuffled[:cut]), sorted(shuffled[cut:])
        if owner == ALICE:
            return Split(ALICE, frozenset(part0), frozenset(part1),
                         grow(left, part0, cols), grow(count - left, part1, cols))
        return Split(BOB, frozenset(part0), frozenset(part1),
                     grow(left, rows, part0), grow(count - left, rows, part1))

    domain = list(range(leaves))
    tree = ProtocolTree(grow(leaves, domain, domain), frozenset(domain), frozenset(domain))
    entries = np.zeros((leaves, leaves), dtype=np.int64)
    for leaf, rows, cols in leaf_rectangles(tree):
        entries[np.ix_(sorted(rows), sorted(cols))] = leaf.symbol
    return tree, GadgetMatrix(entries, alphabet, name=f"protocol_l{leaves}_s{seed}")


# Text format

def _ids_text(ids):
    return ','.join(str(i) for i in sorted(ids))


def format_node(node):
    if isinstance(node, Leaf):
        return f"[sym={node.symbol}]"
    return (f"({node.owner} {_ids_text(node.part0)}|{_ids_text(node.part1)} "
            f"{format_node(node.child0)} {format_node(node.child1)})")


def format_protocol(tree: ProtocolTree):
    """Two lines: ``domain rows=.. cols=..`` and the parenthesized tree."""
    return f"domain rows={_ids_text(tree.rows)} cols={_ids_text(tree.cols)}\n{format_node(tree.root)}\n"


def _parse_node(text, position):
    while position < len(text) and text[position].isspace():
        position += 1
    match = _LEAF_PATTERN.match(text, position)
    if match:
        return Leaf(int(match.group(1))), match.end()
    match = _SPLIT_PATTERN.match(text, position)
    if not match:
        raise FormatError(f"Unexpected protocol text at offset {position}: '{text[position:position + 20]}'")
    part0 = frozenset(int(v) for v in match.group(2).split(','))
    part1 = frozenset(int(v) for v in match.group(3).split(','))
    child0, position = _parse_node(text, match.end())
    child1, position = _parse_node(text, position)
    while position < len(text) and text[position].isspace():
        position += 1
    if position >= len(text) or text[position] != ')':
        raise FormatError(f"Missing ')' at offset {position}")
    return Split(match.group(1), part0, part1, child0, child1), position + 1


def parse_protocol(text):
    """
    Inverse of ``format_protocol``.

    Raises:
        FormatError: On malformed text
    """
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if len(lines) != 2:
        raise FormatError("Protocol file needs a domain line and a tree line")
    match = _DOMAIN_PATTERN.match(lines[0])
    if not match:
        raise FormatError(f"Bad domain line: '{lines[0]}'")
    root, position = _parse_node(lines[1], 0)
    if lines[1][position:].strip():
        raise FormatError("Trailing text after protocol tree")
    rows = frozenset(int(v) for v in match.group(1).split(','))
    cols = frozenset(int(v) for v in match.group(2).split(','))
    return ProtocolTree(root, rows, cols)
