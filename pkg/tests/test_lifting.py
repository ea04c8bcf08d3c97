from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexity.boolfn import TruthTable, block_sensitivity, constant, dictator, or_, parity, sensitivity
from complexity.checks import DEGENERATE, FAIL, PASS, VACUOUS
from complexity.errors import DomainError, NotBalancedError, UnrealizableError, UnsupportedGadgetError
from complexity.gadget import (GadgetMatrix, and1, compose, equality, index_flip_gadget, index_gadget, inner_product,
                               make_gadget, rank, xor1)
from complexity.lifting import (
    BALANCED,
    BIASED,
    ExtractionTrace,
    bs_reduction,
    build_lifted_distribution,
    check_negation_symmetry,
    extract_rectangle_from_cover,
    gadget_regime,
    max_ratio_check,
    rank_decrement_split,
    synthesize_protocol,
    verify_bs_reduction,
    verify_fknn,
    verify_main_chain,
)
from complexity.protocol import verify_protocol
from complexity.rectcover import Rectangle, cover_number, density_bound_holds


def almost_ones():
    entries = np.ones((4, 4), dtype=int)
    entries[0, 0] = 0
    return GadgetMatrix(entries)


def exact_cover(f, g):
    return cover_number(compose(f, g)).cover


def test_gadget_regime():
    assert gadget_regime(equality(1)) == BALANCED
    assert gadget_regime(xor1()) == BALANCED
    # 3/4 is not above 1 - 1/4
    assert gadget_regime(and1()) == BALANCED
    assert gadget_regime(GadgetMatrix(np.ones((2, 2), dtype=int))) == BIASED
    assert gadget_regime(almost_ones()) == BIASED


def test_lifted_distribution_fibers():
    p = build_lifted_distribution(equality(1), (1,))
    assert p.weight == 2
    assert p.cell_mass((0,), (0,)) == Fraction(1, 2)
    assert p.cell_mass((0,), (1,)) == 0
    q = build_lifted_distribution(and1(), (1, 0))
    assert q.sizes == [1, 3]
    assert q.coordinate_probability(1) == Fraction(3, 4)
    assert q.mass(Rectangle(15, 15)) == 1
    assert q.product_mass([[1], [0, 1]], [[1], [0]]) == Fraction(2, 3)


def test_lifted_distribution_errors():
    with pytest.raises(UnrealizableError):
        build_lifted_distribution(GadgetMatrix(np.ones((2, 2), dtype=int)), (0,))
    with pytest.raises(DomainError):
        build_lifted_distribution(xor1(), (2,))


def test_max_ratio():
    check = max_ratio_check(build_lifted_distribution(equality(1), (1,)), 1)
    assert check.status == PASS
    assert check.values['ratio'] == 2 and check.values['bound'] == 8
    with pytest.raises(NotBalancedError):
        max_ratio_check(build_lifted_distribution(GadgetMatrix(np.ones((2, 2), dtype=int)), (1,)))


@pytest.mark.parametrize("f", [dictator(1), parity(2)])
def test_extraction_on_equality(f):
    g = equality(1)
    cover = exact_cover(f, g)
    rect, trace = extract_rectangle_from_cover(f, g, cover)
    assert trace.regime == BALANCED
    assert rect.is_monochromatic(g)
    assert density_bound_holds(rect.density(g), len(cover), sensitivity(f), 2)
    assert trace.rectangle() == rect
    assert trace.entropy >= trace.target - 1e-9


def test_extraction_on_biased_gadget():
    g = almost_ones()
    rect, trace = extract_rectangle_from_cover(dictator(1), g, exact_cover(dictator(1), g))
    assert trace.regime == BIASED
    assert rect.is_monochromatic(g)
    assert rect.density(g) >= Fraction(1, 4)


def test_extraction_errors():
    with pytest.raises(DomainError):
        extract_rectangle_from_cover(constant(1, 0), xor1(), exact_cover(constant(1, 0), xor1()))
    with pytest.raises(DomainError):
        extract_rectangle_from_cover(parity(2), xor1(), exact_cover(dictator(1), xor1()))


def test_trace_text_reloads():
    f, g = parity(2), equality(1)
    _, trace = extract_rectangle_from_cover(f, g, exact_cover(f, g))
    assert ExtractionTrace.from_text(trace.to_text()) == trace


def test_rank_decrement_split_examples():
    ones = GadgetMatrix(np.ones((2, 2), dtype=int))
    result = rank_decrement_split(ones, Rectangle(3, 3))
    assert result.side == 'rows'
    assert (result.row_block_rank, result.col_block_rank) == (1, 1)
    assert result.outside == []

    result = rank_decrement_split(equality(2), Rectangle.from_ids([0], [0]))
    assert result.check().status == PASS
    assert 2 * result.smaller <= 4 + 3

    result = rank_decrement_split(xor1(), Rectangle.from_ids([0], [0]), 'F2')
    assert result.check().status == PASS
    with pytest.raises(DomainError):
        rank_decrement_split(xor1(), Rectangle.from_ids([0], [0, 1]))


def test_synthesis_on_constant_gadget():
    g = GadgetMatrix(np.zeros((2, 2), dtype=int))
    result = synthesize_protocol(dictator(1), g, exact_cover(dictator(1), g))
    assert result.tree.depth == 0
    assert verify_protocol(result.tree, g)


@pytest.mark.parametrize("field", ['Q', 'F2'])
def test_synthesis_on_equality(field):
    g = equality(1)
    result = synthesize_protocol(dictator(1), g, exact_cover(dictator(1), g), field)
    assert verify_protocol(result.tree, g)
    assert verify_protocol(result.rebalanced, g)
    assert all(check.status != FAIL for check in result.checks)
    assert result.stats['field'] == field


def test_synthesis_with_splits():
    g = equality(2)
    result = synthesize_protocol(dictator(1), g, exact_cover(dictator(1), g), finish_rank=1)
    assert verify_protocol(result.tree, g)
    assert all(check.status != FAIL for check in result.checks)
    assert result.stats['leaves'] == result.tree.leaves
    assert result.stats['splits'] == len(result.steps)
    assert 'leaves:' in result.to_text()


@pytest.mark.parametrize("g", [equality(1), xor1(), equality(2), inner_product(2)],
                         ids=['EQ_1', 'XOR1', 'EQ_2', 'IP_2'])
@pytest.mark.parametrize("field", ['Q', 'F2'])
def test_synthesis_splits_shrink_rank(g, field):
    f = dictator(1)
    result = synthesize_protocol(f, g, exact_cover(f, g), field, finish_rank=1)
    assert rank(g, field) >= 2
    assert result.stats['splits'] >= 1
    assert verify_protocol(result.tree, g)
    decrements = [check for check in result.checks if check.name == 'rank-decrement']
    assert len(decrements) == len(result.steps)
    assert all(check.status == PASS and check.values['field'] == field for check in decrements)
    for step in result.steps:
        assert 2 * min(step['row_block'], step['col_block']) <= step['rank'] + 3
    assert all(check.status != FAIL for check in result.checks)


def test_synthesis_rejects_finish_rank_zero():
    with pytest.raises(DomainError):
        synthesize_protocol(dictator(1), xor1(), exact_cover(dictator(1), xor1()), finish_rank=0)


def test_negation_symmetry():
    assert check_negation_symmetry(xor1()) == {0: 1, 1: 0}
    assert check_negation_symmetry(and1()) is None
    assert check_negation_symmetry(index_gadget(2)) is None
    assert check_negation_symmetry(index_flip_gadget(2)) == {0: 2, 1: 3, 2: 0, 3: 1}


@pytest.mark.parametrize("f", [or_(2), parity(3), TruthTable(3, [0, 1, 1, 0, 1, 0, 0, 0])])
def test_bs_reduction_with_xor(f):
    reduction = bs_reduction(f, xor1())
    assert reduction.b == block_sensitivity(f).value
    assert sensitivity(reduction.reduced) == reduction.b
    assert all(check.status == PASS for check in verify_bs_reduction(f, xor1(), reduction))


def test_bs_reduction_constant_function():
    reduction = bs_reduction(constant(2, 1), xor1())
    assert reduction.b == 0
    assert reduction.reduced.arity == 0
    assert all(check.status == PASS for check in verify_bs_reduction(constant(2, 1), xor1(), reduction))


def test_bs_reduction_needs_symmetry():
    with pytest.raises(UnsupportedGadgetError):
        bs_reduction(or_(2), and1())


def test_bs_reduction_with_index_flip():
    f = or_(2)
    assert all(check.status == PASS for check in verify_bs_reduction(f, index_flip_gadget(1)))


def test_fknn():
    checks = verify_fknn(xor1(), 2)
    assert checks[0].name == 'fknn' and checks[0].status == VACUOUS
    assert checks[1].name == 'fknn-cc' and checks[1].status == PASS
    assert verify_fknn(GadgetMatrix([[1]]), 2)[0].status == DEGENERATE
    assert all(check.status != FAIL for check in verify_fknn(equality(1), 1))


def test_main_chain_examples():
    for f in (dictator(1), parity(2)):
        report = verify_main_chain(f, equality(1))
        assert not report.degenerate
        assert report.all_hold
        names = {check.name for check in report.checks}
        assert {'dense-rectangle', 'cc-rank', 'rank-lemma', 'rebalance-depth'} <= names
        assert report.reported['note'] == 'not asserted: hidden constants'
    assert verify_main_chain(constant(2, 0), equality(1)).degenerate


def test_main_chain_runs_splits_at_low_finish_rank():
    report = verify_main_chain(dictator(1), equality(2), finish_rank=1)
    assert report.all_hold
    assert 'rank-decrement' in {check.name for check in report.checks}


@pytest.mark.property_based
@given(st.integers(min_value=0, max_value=5000))
@settings(max_examples=100, deadline=None)
def test_max_ratio_on_balanced_gadgets(seed):
    g = make_gadget('random', seed=seed, rows=4, cols=4)
    if gadget_regime(g) != BALANCED:
        return
    z = (int(g.entries[0, 0]), 1 - int(g.entries[0, 0]))
    assert max_ratio_check(build_lifted_distribution(g, z)).status == PASS
