import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from complexity.errors import BudgetError, DomainError, FormatError, InvariantError, NotBiasedError
from complexity.gadget import DEFAULT_BUDGET_CELLS, GadgetMatrix, check_budget, rank_q, row_basis

DEFAULT_BUDGET_NODES = 200000

_RECTANGLE_PATTERN = re.compile(r'^color=(\d+)\s+rows=([\d,]+)\s+cols=([\d,]+)$')


def ids_to_mask(ids: Iterable[int]):
    mask = 0
    for i in ids:
        mask |= 1 << int(i)
    return mask


def mask_to_ids(mask):
    ids = []
    while mask:
        low = mask & -mask
        ids.append(low.bit_length() - 1)
        mask ^= low
    return ids


def popcount(mask):
    return bin(mask).count('1')


@dataclass(frozen=True)
class Rectangle:
    """
    Product set A x B given by row and column bitmasks.

    Attributes:
        rows (int): Bitmask of the row subset A (bit x set iff x in A)
        cols (int): Bitmask of the column subset B
        color (int): The constant value on A x B, when monochromatic
    """
    rows: int
    cols: int
    color: Optional[int] = None

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise DomainError("Rectangle needs non-empty row and column sets")

    @classmethod
    def from_ids(cls, rows, cols, color=None):
        return cls(ids_to_mask(rows), ids_to_mask(cols), color)

    def row_ids(self):
        return mask_to_ids(self.rows)

    def col_ids(self):
        return mask_to_ids(self.cols)

    @property
    def height(self):
        return popcount(self.rows)

    @property
    def width(self):
        return popcount(self.cols)

    @property
    def area(self):
        return self.height * self.width

    def sort_key(self):
        """Canonical order: row bitmask, then column bitmask, then color."""
        return (self.rows, self.cols, -1 if self.color is None else self.color)

    def contains(self, x, y):
        return bool((self.rows >> x) & 1 and (self.cols >> y) & 1)

    def density(self, matrix):
        return Fraction(self.area, matrix.size)

    def values(self, matrix):
        return matrix.entries[np.ix_(self.row_ids(), self.col_ids())]

    def monochromatic_color(self, matrix):
        """The single value of ``matrix`` on the rectangle, or None."""
        if self.rows >> matrix.rows or self.cols >> matrix.cols:
            raise DomainError("Rectangle reaches outside the matrix")
        block = self.values(matrix)
        first = int(block.flat[0])
        return first if bool((block == first).all()) else None

    def is_monochromatic(self, matrix):
        """True iff the matrix is constant on A x B and equals ``color`` when set."""
        found = self.monochromatic_color(matrix)
        return found is not None and (self.color is None or found == self.color)

    def cell_mask(self, n_cols):
        """Bitmask over cells, cell (x, y) being bit x * n_cols + y."""
        mask = 0
        for x in self.row_ids():
            mask |= self.cols << (x * n_cols)
        return mask

    def with_color(self, color):
        return Rectangle(self.rows, self.cols, color)

    def to_string(self):
        rows = ','.join(str(i) for i in self.row_ids())
        cols = ','.join(str(i) for i in self.col_ids())
        return f"color={self.color} rows={rows} cols={cols}"

    @classmethod
    def from_string(cls, line):
        match = _RECTANGLE_PATTERN.match(line.strip())
        if not match:
            raise FormatError(f"Not a rectangle line: '{line.strip()}'")
        color = int(match.group(1))
        rows = [int(v) for v in match.group(2).split(',')]
        cols = [int(v) for v in match.group(3).split(',')]
        return cls.from_ids(rows, cols, color)


@dataclass
class RectCover:
    """
    Monochromatic rectangles whose union is X x Y; overlaps are allowed.

    Attributes:
        rectangles (list): The rectangles, each carrying its color
        shape (tuple): (rows, cols) of the covered matrix
    """
    rectangles: List[Rectangle]
    shape: Tuple[int, int]

    def __len__(self):
        return len(self.rectangles)

    def __iter__(self):
        return iter(self.rectangles)

    def uncovered_cells(self):
        n_rows, n_cols = self.shape
        covered = 0
        for rect in self.rectangles:
            covered |= rect.cell_mask(n_cols)
        missing = ((1 << (n_rows * n_cols)) - 1) & ~covered
        return [divmod(cell, n_cols) for cell in mask_to_ids(missing)]

    def is_valid(self, matrix):
        """Every rectangle monochromatic with its color, and every cell covered."""
        if tuple(matrix.shape) != tuple(self.shape):
            return False
        if any(rect.color is None or not rect.is_monochromatic(matrix) for rect in self.rectangles):
            return False
        return not self.uncovered_cells()

    def restrict(self, rows: Sequence[int], cols: Sequence[int]):
        """
        Intersect with the submatrix on ``rows`` x ``cols`` and reindex to its
        positions; rectangles that become empty are dropped.
        """
        rows, cols = list(rows), list(cols)
        restricted = []
        for rect in self.rectangles:
            new_rows = ids_to_mask(p for p, x in enumerate(rows) if (rect.rows >> x) & 1)
            new_cols = ids_to_mask(p for p, y in enumerate(cols) if (rect.cols >> y) & 1)
            if new_rows and new_cols:
                restricted.append(Rectangle(new_rows, new_cols, rect.color))
        return RectCover(restricted, (len(rows), len(cols)))

    def to_string(self):
        return ''.join(rect.to_string() + '\n' for rect in self.rectangles)

    @classmethod
    def from_string(cls, text, shape):
        """Load one rectangle per line; ``shape`` is that of the covered matrix."""
        rects = [Rectangle.from_string(line) for line in text.splitlines() if line.strip()]
        return cls(rects, tuple(shape))


@dataclass
class CoverResult:
    """
    Attributes:
        size (int): Cover size (C(M) when exact)
        cover (RectCover): The witness cover
        exact (bool): False for greedy upper bounds
        nodes (int): Branch-and-bound nodes expanded
    """
    size: int
    cover: RectCover
    exact: bool
    nodes: int = 0

    @property
    def mode(self):
        return 'exact' if self.exact else 'greedy'


# Enumeration

def enumerate_maximal_mono_rectangles(matrix: GadgetMatrix, budget_nodes=DEFAULT_BUDGET_NODES):
    """
    All inclusion-maximal monochromatic rectangles, in canonical order.

    For each color, the column sets of maximal rectangles are exactly the
    non-empty intersections of row neighbourhoods; each comes with the rows
    containing it.

    Args:
        matrix (GadgetMatrix): Matrix to scan
        budget_nodes (int): Cap on the number of closed column sets per color

    Returns:
        list: Rectangles with colors, sorted by ``sort_key``

    Raises:
        BudgetError: If the closure grows past the budget
    """
    rectangles = []
    for color in matrix.symbols():
        neighbours = [ids_to_mask(np.flatnonzero(row == color)) for row in matrix.entries]
        closed = set()
        for mask in neighbours:
            if not mask:
                continue
            grown = {mask} | {c & mask for c in closed}
            grown.discard(0)
            closed |= grown
            if len(closed) > budget_nodes:
                raise BudgetError(
                    f"More than {budget_nodes} maximal rectangles of color {color}; raise --budget-nodes"
                )
        for cols in closed:
            rows = ids_to_mask(x for x, mask in enumerate(neighbours) if mask & cols == cols)
            rectangles.append(Rectangle(rows, cols, color))
    return sorted(rectangles, key=Rectangle.sort_key)


# Cover number

def greedy_cover(matrix: GadgetMatrix, rectangles=None):
    """
    Greedy set cover by maximal rectangles: always take the rectangle
    covering most uncovered cells, ties to the canonically first.

    Returns:
        RectCover: A valid cover, an upper bound on C(M)
    """
    if rectangles is None:
        rectangles = enumerate_maximal_mono_rectangles(matrix)
    masks = [rect.cell_mask(matrix.cols) for rect in rectangles]
    uncovered = (1 << matrix.size) - 1
    chosen = []
    while uncovered:
        best = max(range(len(masks)), key=lambda k: (popcount(masks[k] & uncovered), -k))
        chosen.append(best)
        uncovered &= ~masks[best]
    return RectCover([rectangles[k] for k in chosen], tuple(matrix.shape))


def cover_number(matrix: GadgetMatrix, mode='exact', budget_nodes=DEFAULT_BUDGET_NODES,
                 budget_cells=DEFAULT_BUDGET_CELLS):
    """
    C(M): least number of monochromatic rectangles covering the matrix.

    Exact mode runs branch and bound over maximal rectangles: the greedy
    cover is the incumbent, the next branching cell is the uncovered cell
    with fewest covering rectangles, and a branch is cut when the chosen
    count plus ceil(uncovered / best single coverage) cannot beat the
    incumbent.

    Args:
        matrix (GadgetMatrix): Matrix to cover
        mode (str): 'exact' or 'greedy'
        budget_nodes (int): Node expansions allowed in exact mode
        budget_cells (int): Largest matrix accepted in exact mode

    Returns:
        CoverResult: Size, witness cover and exactness flag

    Raises:
        BudgetError: In exact mode, when either budget is exceeded
    """
    if mode not in ('exact', 'greedy'):
        raise DomainError(f"Unknown cover mode '{mode}'")
    if mode == 'exact':
        check_budget(matrix.size, budget_cells, "exact cover search")
    rectangles = enumerate_maximal_mono_rectangles(matrix, budget_nodes)
    incumbent = greedy_cover(matrix, rectangles)
    if mode == 'greedy':
        return CoverResult(len(incumbent), incumbent, exact=False)

    masks = [rect.cell_mask(matrix.cols) for rect in rectangles]
    index = {rect: k for k, rect in enumerate(rectangles)}
    best = [index[rect] for rect in incumbent.rectangles]
    floor = len(matrix.symbols())
    covering = [[] for _ in range(matrix.size)]
    for k, mask in enumerate(masks):
        for cell in mask_to_ids(mask):
            covering[cell].append(k)
    nodes = 0

    def search(uncovered, chosen):
        nonlocal nodes, best
        if not uncovered:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        if len(best) <= floor:
            return
        nodes += 1
        if nodes > budget_nodes:
            raise BudgetError(
                f"Exact cover search passed {budget_nodes} nodes; use greedy mode or raise --budget-nodes"
            )
        reach = max(popcount(mask & uncovered) for mask in masks)
        if len(chosen) + math.ceil(popcount(uncovered) / reach) >= len(best):
            return
        cell = min(mask_to_ids(uncovered), key=lambda c: len(covering[c]))
        options = sorted(covering[cell], key=lambda k: (-popcount(masks[k] & uncovered), k))
        for k in options:
            chosen.append(k)
            search(uncovered & ~masks[k], chosen)
            chosen.pop()

    search((1 << matrix.size) - 1, [])
    cover = RectCover(sorted((rectangles[k] for k in best), key=Rectangle.sort_key), tuple(matrix.shape))
    return CoverResult(len(cover), cover, exact=True, nodes=nodes)


# Dense rectangles

def max_density_mono_rectangle(matrix: GadgetMatrix, budget_nodes=DEFAULT_BUDGET_NODES):
    """
    A monochromatic rectangle of largest area, ties to the canonically first.

    Returns:
        tuple: (Rectangle, density as a Fraction of the matrix size)
    """
    rectangles = enumerate_maximal_mono_rectangles(matrix, budget_nodes)
    best = max(rectangles, key=lambda r: (r.area, [-v for v in r.sort_key()]))
    return best, best.density(matrix)


def majority_color(matrix):
    ones = int(np.count_nonzero(matrix.entries))
    return 1 if 2 * ones >= matrix.size else 0


def biased_rectangle(matrix: GadgetMatrix):
    """
    Constant-density monochromatic rectangle of an extremely biased gadget.

    With majority color c and Pr[M = c] > 1 - 1/(4 rk), let E be the rows
    whose share of c is at most 1 - 1/(2 rk). A maximal independent set of
    rows outside E agrees with c on a column set G, and (rows outside E) x G
    is monochromatic with density at least 1/4.

    Args:
        matrix (GadgetMatrix): Boolean matrix

    Returns:
        Rectangle: Colored rectangle of density >= 1/4

    Raises:
        NotBiasedError: If the matrix is not in the biased regime
        InvariantError: If the constructed rectangle breaks its guarantee
    """
    if not matrix.is_boolean:
        raise DomainError("biased_rectangle needs a Boolean matrix")
    full_rows, full_cols = (1 << matrix.rows) - 1, (1 << matrix.cols) - 1
    if matrix.is_constant():
        return Rectangle(full_rows, full_cols, int(matrix.entries[0, 0]))
    rk = rank_q(matrix)
    color = majority_color(matrix)
    share = Fraction(int(np.count_nonzero(matrix.entries == color)), matrix.size)
    if not share > 1 - Fraction(1, 4 * rk):
        raise NotBiasedError(f"Majority share {share} does not exceed 1 - 1/(4*{rk})")
    row_share = (matrix.entries == color).sum(axis=1)
    row_limit = 1 - Fraction(1, 2 * rk)
    kept = [x for x in range(matrix.rows) if Fraction(int(row_share[x]), matrix.cols) > row_limit]
    basis = row_basis(matrix, 'Q', kept)
    agree = np.ones(matrix.cols, dtype=bool)
    for x in basis:
        agree &= matrix.entries[x] == color
    if not kept or not agree.any():
        raise InvariantError("Biased construction produced an empty side")
    rect = Rectangle(ids_to_mask(kept), ids_to_mask(np.flatnonzero(agree)), color)
    if not rect.is_monochromatic(matrix) or rect.density(matrix) < Fraction(1, 4):
        raise InvariantError(f"Biased construction returned {rect.to_string()} without its guarantee")
    return rect


def density_bound_holds(density, cover_size, s, rk):
    """
    Exact test of density >= 2^(-2T/s) * (4 rk)^(-2) where 2^T = cover_size.

    Raising both sides to the power s clears the irrational exponent:
    density^s * N^2 * (4 rk)^(2s) >= 1.

    Args:
        density (Fraction): Rectangle density
        cover_size (int): N, the size of the cover
        s (int): Sensitivity, at least 1
        rk (int): Gadget rank, at least 1

    Raises:
        DomainError: On non-positive parameters
    """
    if cover_size < 1 or s < 1 or rk < 1:
        raise DomainError(f"density bound needs N, s, rk >= 1 (got N={cover_size}, s={s}, rk={rk})")
    density = Fraction(density)
    return density ** s * cover_size ** 2 * (4 * rk) ** (2 * s) >= 1


def density_bound_value(cover_size, s, rk):
    """Floating value of the density bound, for reports only."""
    return 2.0 ** (-2.0 * math.log2(cover_size) / s) / (4 * rk) ** 2
