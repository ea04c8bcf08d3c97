from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexity.errors import DomainError, FormatError
from complexity.gadget import GadgetMatrix, equality, integer_rank, xor1
from complexity.protocol import (
    ALICE,
    BOB,
    Leaf,
    ProtocolTree,
    Split,
    ceil_log2,
    check_structure,
    eval_protocol,
    exact_cc,
    format_protocol,
    leaf_count,
    parse_protocol,
    random_protocol,
    rebalance,
    rebalance_depth_bound,
    trivial_protocol,
    verify_protocol,
)


@st.composite
def matrices(draw, max_side=3, alphabet=2):
    rows = draw(st.integers(min_value=1, max_value=max_side))
    cols = draw(st.integers(min_value=1, max_value=max_side))
    cells = draw(st.lists(st.integers(min_value=0, max_value=alphabet - 1),
                          min_size=rows * cols, max_size=rows * cols))
    return GadgetMatrix(np.array(cells).reshape(rows, cols), alphabet)


def brute_force_cc(matrix):
    """Depth of the best protocol, trying every two-part split of rows and columns."""
    entries = matrix.entries

    @lru_cache(maxsize=None)
    def solve(rows, cols):
        if len({int(entries[x, y]) for x in rows for y in cols}) == 1:
            return 0
        best = None
        for alice, lines in ((True, sorted(rows)), (False, sorted(cols))):
            first, rest = lines[0], lines[1:]
            for mask in range(1 << len(rest)):
                part = frozenset([first] + [rest[i] for i in range(len(rest)) if mask >> i & 1])
                other = frozenset(lines) - part
                if not other:
                    continue
                if alice:
                    cost = 1 + max(solve(part, cols), solve(other, cols))
                else:
                    cost = 1 + max(solve(rows, part), solve(rows, other))
                best = cost if best is None else min(best, cost)
        return best

    return solve(frozenset(range(matrix.rows)), frozenset(range(matrix.cols)))


def perfect_depth_two():
    return Split(ALICE, frozenset({0}), frozenset({1}),
                 Split(BOB, frozenset({0}), frozenset({1}), Leaf(0), Leaf(1)),
                 Split(BOB, frozenset({0}), frozenset({1}), Leaf(1), Leaf(0)))


def test_ceil_log2():
    assert [ceil_log2(v) for v in (0, 1, 2, 3, 4, 5, 8, 9)] == [0, 0, 1, 2, 2, 3, 3, 4]


def test_eval_single_leaf_and_alice_split():
    leaf = ProtocolTree(Leaf(1), frozenset({0, 1}), frozenset({0}))
    assert eval_protocol(leaf, 0, 0) == 1 and eval_protocol(leaf, 1, 0) == 1
    tree = ProtocolTree(Split(ALICE, frozenset({0}), frozenset({1}), Leaf(0), Leaf(1)),
                        frozenset({0, 1}), frozenset({0}))
    assert [eval_protocol(tree, x, 0) for x in (0, 1)] == [0, 1]
    with pytest.raises(DomainError):
        eval_protocol(tree, 2, 0)


def test_leaf_count_and_depth():
    tree = ProtocolTree.for_matrix(perfect_depth_two(), xor1())
    assert tree.leaves == 4 and tree.depth == 2
    assert leaf_count(Leaf(0)) == 1


def test_verify_protocol():
    tree = ProtocolTree.for_matrix(perfect_depth_two(), xor1())
    assert verify_protocol(tree, xor1())
    wrong = Split(ALICE, frozenset({0}), frozenset({1}),
                  Split(BOB, frozenset({0}), frozenset({1}), Leaf(1), Leaf(1)),
                  perfect_depth_two().child1)
    assert not verify_protocol(ProtocolTree.for_matrix(wrong, xor1()), xor1())
    assert not verify_protocol(ProtocolTree(tree.root, frozenset({0}), tree.cols), xor1())


def test_check_structure_rejects_overlapping_parts():
    node = Split(ALICE, frozenset({0, 1}), frozenset({1}), Leaf(0), Leaf(1))
    with pytest.raises(DomainError):
        check_structure(ProtocolTree(node, frozenset({0, 1}), frozenset({0})))


def test_exact_cc_examples():
    constant = exact_cc(GadgetMatrix(np.ones((3, 3), dtype=int)))
    assert constant.exact and constant.value == 0
    assert constant.tree.root == Leaf(1)

    result = exact_cc(xor1())
    assert result.exact and result.value == 2
    assert verify_protocol(result.tree, xor1())
    assert all(eval_protocol(result.tree, x, y) == xor1()[x, y] for x in range(2) for y in range(2))

    eq = exact_cc(equality(2))
    assert eq.exact and eq.value == 3
    assert eq.value >= ceil_log2(4)
    assert verify_protocol(eq.tree, equality(2))


def test_exact_cc_budget_gives_bounds():
    result = exact_cc(equality(2), budget_nodes=0)
    assert not result.exact
    assert result.lower == 2
    assert result.upper == trivial_protocol(equality(2)).depth
    assert verify_protocol(result.tree, equality(2))


def test_exact_cc_on_tuple_alphabet():
    matrix = GadgetMatrix([[0, 1], [2, 3]], alphabet=4)
    result = exact_cc(matrix)
    assert result.value == 2
    assert verify_protocol(result.tree, matrix)


def test_rebalance_depth_bound():
    assert rebalance_depth_bound(1) == 0
    assert rebalance_depth_bound(4) == 7
    assert rebalance_depth_bound(16) == 14
    with pytest.raises(DomainError):
        rebalance_depth_bound(0)


def test_rebalance_random_tree():
    tree, matrix = random_protocol(16, 5)
    assert tree.leaves == 16
    assert verify_protocol(tree, matrix)
    balanced = rebalance(tree)
    assert balanced.depth <= rebalance_depth_bound(16)
    assert verify_protocol(balanced, matrix)


def test_rebalance_single_leaf():
    tree = ProtocolTree(Leaf(1), frozenset({0}), frozenset({0}))
    assert rebalance(tree).depth == 0


def test_text_format():
    tree = ProtocolTree.for_matrix(perfect_depth_two(), xor1())
    text = format_protocol(tree)
    assert text.splitlines()[0] == "domain rows=0,1 cols=0,1"
    assert text.splitlines()[1] == "(A 0|1 (B 0|1 [sym=0] [sym=1]) (B 0|1 [sym=1] [sym=0]))"
    assert parse_protocol(text) == tree
    with pytest.raises(FormatError):
        parse_protocol("domain rows=0 cols=0\n(A 0|1 [sym=0]\n")
    with pytest.raises(FormatError):
        parse_protocol("(A 0|1 [sym=0] [sym=1])\n")


@pytest.mark.property_based
@given(matrices())
@settings(max_examples=100, deadline=None)
def test_exact_cc_respects_bounds(matrix):
    result = exact_cc(matrix)
    assert result.exact
    assert verify_protocol(result.tree, matrix)
    assert result.tree.depth == result.value
    assert result.value >= ceil_log2(integer_rank(matrix.entries))
    assert result.value <= trivial_protocol(matrix).depth


@pytest.mark.property_based
@given(matrices(alphabet=3))
@settings(max_examples=100, deadline=None)
def test_merging_equal_lines_keeps_the_optimum(matrix):
    assert exact_cc(matrix).value == exact_cc(matrix, merge_duplicates=False).value


@pytest.mark.property_based
@given(st.integers(min_value=1, max_value=24), st.integers(min_value=0, max_value=1000))
@settings(max_examples=100, deadline=None)
def test_rebalance_keeps_function_and_bounds_depth(leaves, seed):
    tree, matrix = random_protocol(leaves, seed)
    balanced = rebalance(tree)
    assert verify_protocol(balanced, matrix)
    assert balanced.depth <= rebalance_depth_bound(leaves)


@pytest.mark.property_based
@given(st.integers(min_value=2, max_value=3).flatmap(lambda alphabet: matrices(max_side=4, alphabet=alphabet)))
@settings(max_examples=100, deadline=None)
def test_exact_cc_matches_brute_force(matrix):
    result = exact_cc(matrix)
    assert result.exact
    assert result.value == brute_force_cc(matrix)
