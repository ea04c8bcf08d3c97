import re
from fractions import Fraction
from math import gcd
from typing import Dict, Optional, Sequence

import numpy as np

from complexity.boolfn import TruthTable, degree, parity
from complexity.checks import DEGENERATE, CheckResult, verdict
from complexity.errors import BudgetError, DomainError, FormatError

DEFAULT_BUDGET_CELLS = 1 << 16

FIELDS = ('Q', 'F2')

_HEADER_PATTERN = re.compile(r'^rows=(\d+)\s+cols=(\d+)\s+alphabet=(\d+)$')
_NAME_PATTERN = re.compile(r'^(IP|Ind|IndFlip|EQ)_(\d+)$')


class GadgetMatrix:
    """
    Alphabet-valued matrix over a row set X and a column set Y.

    Boolean gadgets have alphabet 2; the n-fold tuple power has alphabet
    2**n. Rows and columns are identified by their 0-based position; the
    optional labels carry structured inputs such as coordinate tuples of a
    composition.
    """
    def __init__(self, entries, alphabet=2, row_labels=None, col_labels=None, name=None):
        """
        Args:
            entries (array-like): 2-D array of symbols in [0, alphabet)
            alphabet (int): Alphabet size k
            row_labels (list): Optional label per row
            col_labels (list): Optional label per column
            name (str): Optional display name

        Raises:
            DomainError: If entries are not a non-empty 2-D array over the alphabet
        """
        table = np.array(entries, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] == 0 or table.shape[1] == 0:
            raise DomainError(f"Gadget matrix must be a non-empty 2-D array, got shape {table.shape}")
        if alphabet < 1:
            raise DomainError(f"Alphabet size must be positive, got {alphabet}")
        if table.min() < 0 or table.max() >= alphabet:
            raise DomainError(f"Entries must lie in [0, {alphabet})")
        table.setflags(write=False)
        self.entries = table
        self.alphabet = alphabet
        self.row_labels = list(row_labels) if row_labels is not None else None
        self.col_labels = list(col_labels) if col_labels is not None else None
        self.name = name

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    @property
    def size(self):
        return self.entries.size

    @property
    def is_boolean(self):
        return self.alphabet == 2

    def __getitem__(self, cell):
        x, y = cell
        return int(self.entries[x, y])

    def __eq__(self, other):
        return (isinstance(other, GadgetMatrix) and self.alphabet == other.alphabet
                and np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash((self.alphabet, self.shape, self.entries.tobytes()))

    def __repr__(self):
        label = f" {self.name}" if self.name else ''
        return f"<GadgetMatrix{label} {self.rows}x{self.cols} alphabet={self.alphabet}>"

    def symbols(self):
        return sorted(int(s) for s in np.unique(self.entries))

    def is_constant(self):
        return bool(self.entries.min() == self.entries.max())

    def row(self, x):
        return tuple(int(v) for v in self.entries[x])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        """
        Restrict to the given rows and columns, keeping their order.

        Returns:
            GadgetMatrix: Submatrix with the same alphabet and carried labels
        """
        rows, cols = list(rows), list(cols)
        return GadgetMatrix(
            self.entries[np.ix_(rows, cols)],
            self.alphabet,
            [self.row_labels[r] for r in rows] if self.row_labels else None,
            [self.col_labels[c] for c in cols] if self.col_labels else None,
        )

    def to_string(self):
        """Header ``rows=<r> cols=<c> alphabet=<k>`` then one line per row."""
        lines = [f"rows={self.rows} cols={self.cols} alphabet={self.alphabet}"]
        separator = '' if self.alphabet <= 10 else ','
        for row in self.entries:
            lines.append(separator.join(str(int(v)) for v in row))
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_string(cls, text):
        """
        Parse the matrix text format written by ``to_string``.

        Raises:
            FormatError: On a malformed header, wrong row count or bad symbols
        """
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if not lines:
            raise FormatError("Empty matrix file")
        match = _HEADER_PATTERN.match(lines[0])
        if not match:
            raise FormatError(f"Bad matrix header: '{lines[0]}'")
        rows, cols, alphabet = (int(g) for g in match.groups())
        body = lines[1:]
        if len(body) != rows:
            raise FormatError(f"Header declares {rows} rows, found {len(body)}")
        entries = []
        for line in body:
            symbols = line.split(',') if alphabet > 10 else list(line)
            if len(symbols) != cols:
                raise FormatError(f"Row '{line}' does not have {cols} symbols")
            try:
                entries.append([int(s) for s in symbols])
            except ValueError:
                raise FormatError(f"Non-numeric symbol in row '{line}'")
        try:
            return cls(entries, alphabet)
        except DomainError as e:
            raise FormatError(str(e))


def check_budget(cells, budget_cells, what):
    if cells > budget_cells:
        raise BudgetError(
            f"{what} needs {cells} cells, over the budget of {budget_cells}; "
            f"raise --budget-cells or shrink the instance"
        )


def _require_boolean(matrix, operation):
    if not matrix.is_boolean:
        raise DomainError(f"{operation} needs a Boolean matrix, got alphabet {matrix.alphabet}")


# Exact rank

def integer_rank(matrix):
    """
    Rank over the rationals of an integer matrix by fraction-free
    (Bareiss) elimination. Every intermediate value is an exact integer.

    Args:
        matrix (array-like): 2-D integer matrix

    Returns:
        int: Number of pivots, which is the rank
    """
    a = [[int(v) for v in row] for row in np.asarray(matrix, dtype=object).tolist()]
    if not a or not a[0]:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank, previous = 0, 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        head = a[rank][col]
        for r in range(rank + 1, n_rows):
            factor = a[r][col]
            row = a[r]
            for c in range(col + 1, n_cols):
                row[c] = (row[c] * head - factor * a[rank][c]) // previous
            row[col] = 0
        previous = head
        rank += 1
    return rank


def rank_q(matrix):
    """
    rk(M) over the rationals.

    Args:
        matrix (GadgetMatrix): Boolean matrix

    Raises:
        DomainError: For non-Boolean alphabets
    """
    _require_boolean(matrix, 'rank_q')
    return integer_rank(matrix.entries)


class IntegerEchelon:
    """Incremental echelon basis over Q kept in primitive integer vectors."""
    def __init__(self):
        self.rows = []

    def add(self, vector):
        """Insert ``vector`` if it is independent of the basis; return whether it was."""
        v = [int(x) for x in vector]
        for pivot, basis in self.rows:
            if v[pivot]:
                head, factor = basis[pivot], v[pivot]
                v = [head * a - factor * b for a, b in zip(v, basis)]
                common = 0
                for x in v:
                    common = gcd(common, x)
                if common > 1:
                    v = [x // common for x in v]
        pivot = next((i for i, x in enumerate(v) if x), None)
        if pivot is None:
            return False
        self.rows.append((pivot, v))
        return True

    def __len__(self):
        return len(self.rows)


class BitEchelon:
    """Incremental GF(2) basis over integer bitsets, keyed by leading bit."""
    def __init__(self):
        self.pivots: Dict[int, int] = {}

    def add(self, bits):
        while bits:
            lead = bits.bit_length() - 1
            if lead not in self.pivots:
                self.pivots[lead] = bits
                return True
            bits ^= self.pivots[lead]
        return False

    def __len__(self):
        return len(self.pivots)


def _row_bits(row):
    return sum(1 << c for c, v in enumerate(row) if v)


def rank_f2(matrix):
    """rk_2(M): rank over GF(2) by bitset row reduction."""
    _require_boolean(matrix, 'rank_f2')
    echelon = BitEchelon()
    for row in matrix.entries.tolist():
        echelon.add(_row_bits(row))
    return len(echelon)


def rank(matrix, field='Q'):
    if field == 'Q':
        return rank_q(matrix)
    if field == 'F2':
        return rank_f2(matrix)
    raise DomainError(f"Unknown field '{field}', expected one of {FIELDS}")


def row_basis(matrix, field='Q', candidates: Optional[Sequence[int]] = None):
    """
    Greedy maximal independent set of rows, scanning ``candidates`` in order.

    Args:
        matrix (GadgetMatrix): Boolean matrix
        field (str): 'Q' or 'F2'
        candidates (list): Row ids to choose from (all rows by default)

    Returns:
        list: Chosen row ids, spanning every candidate row
    """
    _require_boolean(matrix, 'row_basis')
    candidates = range(matrix.rows) if candidates is None else candidates
    chosen = []
    if field == 'F2':
        echelon = BitEchelon()
        for x in candidates:
            if echelon.add(_row_bits(matrix.entries[x])):
                chosen.append(x)
    elif field == 'Q':
        echelon = IntegerEchelon()
        for x in candidates:
            if echelon.add(matrix.entries[x]):
                chosen.append(x)
    else:
        raise DomainError(f"Unknown field '{field}', expected one of {FIELDS}")
    return chosen


def column_basis(matrix, field='Q'):
    return row_basis(GadgetMatrix(matrix.entries.T, matrix.alphabet), field)


def distinct_rows(matrix):
    return int(np.unique(matrix.entries, axis=0).shape[0])


# Named gadgets

def _bits(value, width):
    return tuple((value >> i) & 1 for i in range(width))


def inner_product(m):
    """IP_m(x, y) = x_1 y_1 XOR ... XOR x_m y_m over x, y in {0,1}^m."""
    side = np.arange(1 << m)
    both = side[:, None] & side[None, :]
    entries = np.zeros_like(both)
    for i in range(m):
        entries ^= (both >> i) & 1
    labels = [_bits(v, m) for v in side]
    return GadgetMatrix(entries, 2, labels, labels, name=f"IP_{m}")


def index_gadget(m):
    """Ind_m(x, y) = y_x with x in [m] and y in {0,1}^m."""
    addresses = np.arange(m)
    columns = np.arange(1 << m)
    entries = (columns[None, :] >> addresses[:, None]) & 1
    return GadgetMatrix(entries, 2, list(addresses), [_bits(v, m) for v in columns], name=f"Ind_{m}")


def index_flip_gadget(m):
    """
    Address-with-flip-bit gadget: Alice holds (a, b), Bob holds y in {0,1}^m,
    value y_a XOR b. Row (a, b) is complemented by row (a, 1 - b).
    """
    rows = [(a, b) for b in range(2) for a in range(m)]
    columns = np.arange(1 << m)
    entries = np.array([((columns >> a) & 1) ^ b for a, b in rows])
    return GadgetMatrix(entries, 2, rows, [_bits(v, m) for v in columns], name=f"IndFlip_{m}")


def equality(k):
    """EQ_k on k-bit strings: the 2**k identity matrix."""
    return GadgetMatrix(np.eye(1 << k, dtype=np.int64), 2, name=f"EQ_{k}")


def xor1():
    return GadgetMatrix([[0, 1], [1, 0]], 2, name='XOR1')


def and1():
    return GadgetMatrix([[0, 0], [0, 1]], 2, name='AND1')


def random_gadget(seed, rows, cols, bias=0.5):
    """
    Seeded random Boolean gadget; each cell is 1 with probability ``bias``.

    The same (seed, rows, cols, bias) always produces the same matrix.
    """
    rng = np.random.default_rng(seed)
    entries = (rng.random((rows, cols)) < float(bias)).astype(np.int64)
    return GadgetMatrix(entries, 2, name=f"random_{rows}x{cols}_s{seed}")


def make_gadget(name, seed=None, rows=None, cols=None, bias=0.5, budget_cells=DEFAULT_BUDGET_CELLS):
    """
    Build a named gadget.

    Args:
        name (str): One of IP_m, Ind_m, IndFlip_m, EQ_k, XOR1, AND1, random
        seed (int): Seed for random gadgets
        rows (int): Row count for random gadgets
        cols (int): Column count for random gadgets
        bias (float): Probability of a 1 for random gadgets
        budget_cells (int): Largest allowed matrix size

    Returns:
        GadgetMatrix: The requested gadget

    Raises:
        DomainError: Unknown name or missing random parameters
        BudgetError: Matrix larger than the budget
    """
    if name == 'XOR1':
        return xor1()
    if name == 'AND1':
        return and1()
    if name == 'random':
        if seed is None or rows is None or cols is None:
            raise DomainError("Random gadgets need seed, rows and cols")
        check_budget(rows * cols, budget_cells, f"random gadget {rows}x{cols}")
        return random_gadget(seed, rows, cols, bias)
    match = _NAME_PATTERN.match(name)
    if not match:
        raise DomainError(f"Unknown gadget '{name}'")
    kind, m = match.group(1), int(match.group(2))
    if m < 1:
        raise DomainError(f"Gadget parameter must be positive in '{name}'")
    if kind == 'IP':
        check_budget(1 << (2 * m), budget_cells, name)
        return inner_product(m)
    if kind == 'Ind':
        check_budget(m << m, budget_cells, name)
        return index_gadget(m)
    if kind == 'IndFlip':
        check_budget((2 * m) << m, budget_cells, name)
        return index_flip_gadget(m)
    check_budget(1 << (2 * m), budget_cells, name)
    return equality(m)


# Compositions

def odometer_labels(side, n):
    """Tuples (t_0, ..., t_{n-1}) over range(side), coordinate 0 fastest."""
    return [tuple((index // side ** i) % side for i in range(n)) for index in range(side ** n)]


def composed_index(digits, side):
    """Position of a coordinate tuple in odometer order."""
    return sum(int(d) * side ** i for i, d in enumerate(digits))


def coordinate_grids(g, n, budget_cells=DEFAULT_BUDGET_CELLS):
    """
    For each coordinate i, the matrix of g(x_i, y_i) over X^n x Y^n.

    Rows and columns of the product space are in odometer order with
    coordinate 0 fastest.

    Returns:
        list: n integer arrays of shape (|X|^n, |Y|^n)
    """
    row_count, col_count = g.rows ** n, g.cols ** n
    check_budget(row_count * col_count, budget_cells, f"{n}-fold product of a {g.rows}x{g.cols} gadget")
    rows, cols = np.arange(row_count), np.arange(col_count)
    grids = []
    for i in range(n):
        xi = (rows // g.rows ** i) % g.rows
        yi = (cols // g.cols ** i) % g.cols
        grids.append(g.entries[np.ix_(xi, yi)])
    return grids


def _tuple_codes(g, n, budget_cells):
    codes = np.zeros((g.rows ** n, g.cols ** n), dtype=np.int64)
    for i, grid in enumerate(coordinate_grids(g, n, budget_cells)):
        codes |= grid << i
    return codes


def compose(f: TruthTable, g: GadgetMatrix, budget_cells=DEFAULT_BUDGET_CELLS):
    """
    M_{f o g}: entry at (x, y) is f(g(x_1, y_1), ..., g(x_n, y_n)).

    Args:
        f (TruthTable): Outer function on n bits
        g (GadgetMatrix): Boolean gadget
        budget_cells (int): Largest allowed composed size

    Returns:
        GadgetMatrix: Boolean matrix over X^n x Y^n with tuple labels

    Raises:
        DomainError: Non-Boolean gadget
        BudgetError: Composed matrix over budget
    """
    _require_boolean(g, 'compose')
    n = f.arity
    codes = _tuple_codes(g, n, budget_cells)
    return GadgetMatrix(
        f.values[codes].astype(np.int64), 2,
        odometer_labels(g.rows, n), odometer_labels(g.cols, n),
        name=f"f{n}o{g.name or 'g'}",
    )


def tuple_power(g: GadgetMatrix, n, budget_cells=DEFAULT_BUDGET_CELLS):
    """
    M_{g^n} over alphabet 2**n; bit i of an entry is g(x_i, y_i).

    n = 1 returns g itself.
    """
    _require_boolean(g, 'tuple_power')
    if n < 1:
        raise DomainError("Tuple power needs n >= 1")
    if n == 1:
        return g
    codes = _tuple_codes(g, n, budget_cells)
    return GadgetMatrix(
        codes, 1 << n,
        odometer_labels(g.rows, n), odometer_labels(g.cols, n),
        name=f"{g.name or 'g'}^{n}",
    )


# Rank inequalities

def verify_rank_lemma(f: TruthTable, g: GadgetMatrix, budget_cells=DEFAULT_BUDGET_CELLS):
    """
    Check rk(f o g) >= (rk(g) - 1)^deg(f) with exact integers.

    Constant-0 f and rank-0 g are reported as degenerate: the polynomial
    has no top coefficient, respectively no independent row to project.

    Returns:
        CheckResult: ``rank-lemma`` with deg, rk_g, bound and rk_fg
    """
    if f.is_constant() and f.values[0] == 0:
        return CheckResult('rank-lemma', DEGENERATE, {'n': f.arity}, note='constant-0 outer function')
    rk_g = rank_q(g)
    if rk_g == 0:
        return CheckResult('rank-lemma', DEGENERATE, {'rk_g': 0}, note='zero gadget')
    deg = degree(f)
    bound = (rk_g - 1) ** deg
    rk_fg = rank_q(compose(f, g, budget_cells))
    return verdict('rank-lemma', rk_fg >= bound, {'deg': deg, 'rk_g': rk_g, 'bound': bound, 'rk_fg': rk_fg})


def verify_yang(g: GadgetMatrix, n, budget_cells=DEFAULT_BUDGET_CELLS):
    """
    Check rk(XOR_n o g) >= (rk(g) - 1)^n - 1 exactly.

    Returns:
        CheckResult: ``yang`` with rk_g, bound and rk_parity
    """
    rk_g = rank_q(g)
    bound = (rk_g - 1) ** n - 1
    rk_parity = rank_q(compose(parity(n), g, budget_cells))
    return verdict('yang', rk_parity >= bound, {'n': n, 'rk_g': rk_g, 'bound': bound, 'rk_parity': rk_parity})


def verify_distinct_rows(g: GadgetMatrix):
    """
    Check that a Boolean matrix of rational rank r has at most 2^r distinct
    rows; the entries on r basis columns determine the row.

    Returns:
        CheckResult: ``distinct-rows`` with rows, rk_q and bound
    """
    if not g.is_boolean:
        raise DomainError("Distinct-row bound is stated for Boolean matrices")
    rk = rank_q(g)
    rows = distinct_rows(g)
    return verdict('distinct-rows', rows <= 2 ** rk, {'rows': rows, 'rk_q': rk, 'bound': 2 ** rk})


def rank_subadditivity_check(a, b):
    """
    Check rk(A + B) <= rk(A) + rk(B) for integer matrices of equal shape.

    Args:
        a (array-like | GadgetMatrix): First matrix
        b (array-like | GadgetMatrix): Second matrix

    Raises:
        DomainError: On a shape mismatch
    """
    a = np.asarray(a.entries if isinstance(a, GadgetMatrix) else a, dtype=object)
    b = np.asarray(b.entries if isinstance(b, GadgetMatrix) else b, dtype=object)
    if a.shape != b.shape:
        raise DomainError(f"Shape mismatch: {a.shape} vs {b.shape}")
    rk_a, rk_b, rk_sum = integer_rank(a), integer_rank(b), integer_rank(a + b)
    return verdict('rank-subadditivity', rk_sum <= rk_a + rk_b, {'rk_a': rk_a, 'rk_b': rk_b, 'rk_sum': rk_sum})


def bias(matrix, color=1):
    """Fraction of cells equal to ``color``, as an exact rational."""
    return Fraction(int(np.count_nonzero(matrix.entries == color)), matrix.size)
