import pytest

from complexity.boolfn import parity
from complexity.gadget import xor1
from complexity.lifting import BALANCED, BIASED, gadget_regime
from utils.budget import can_run_instance, composed_cells
from utils.corpus import (
    Instance,
    function_name,
    functions_up_to,
    gadget_from_spec,
    gadget_name,
    instance_name,
    seeded_functions,
    sanitize_name,
    standard_gadget_specs,
)


def test_names():
    assert sanitize_name('EQ_1') == 'eq_1'
    assert sanitize_name('a b/c:d^e=f') == 'a-b-c-d-e-f'
    assert function_name(parity(2)) == 'f2_0110'
    assert gadget_name({'name': 'XOR1'}) == 'xor1'
    assert gadget_name({'name': 'random', 'seed': 7, 'rows': 3, 'cols': 3}) == 'random-3x3-s7'
    assert instance_name('cc', 'XOR1') == 'cc.xor1'


def test_standard_gadget_specs(small_config):
    specs = standard_gadget_specs(small_config)
    assert [spec['name'] for spec in specs] == ['XOR1', 'EQ_1', 'random', 'random']
    balanced, biased = specs[2], specs[3]
    assert balanced['regime'] == BALANCED and biased['regime'] == BIASED
    for spec in (balanced, biased):
        g = gadget_from_spec(spec)
        assert g.shape == (3, 3)
        assert not g.is_constant()
        assert gadget_regime(g) == spec['regime']
    assert standard_gadget_specs(small_config) == specs


def test_gadget_from_named_spec():
    g = gadget_from_spec({'name': 'XOR1'})
    assert g.shape == (2, 2)
    assert g[0, 1] == 1 and g[1, 1] == 0


def test_functions_up_to():
    functions = functions_up_to(2)
    assert len(functions) == 4 + 16
    assert functions[0].arity == 1 and functions[-1].arity == 2


def test_seeded_functions_are_reproducible():
    first = seeded_functions(3, 3, 11)
    assert [seed for seed, _ in first] == [11, 12, 13]
    assert [f.values.tolist() for _, f in first] == [f.values.tolist() for _, f in seeded_functions(3, 3, 11)]


def test_budget_gate():
    assert composed_cells(2, xor1()) == 16
    assert can_run_instance(Instance('info.seed0.1x2', 'info', {'seed': 0}), 1) == (True, '')
    instance = Instance('rank-lemma.f2_0110.xor1', 'rank-lemma', {}, parity(2), xor1())
    assert can_run_instance(instance, 16) == (True, '')
    allowed, reason = can_run_instance(instance, 8)
    assert not allowed
    assert 'over the budget of 8' in reason


@pytest.mark.parametrize("power, cells", [(1, 4), (3, 64)])
def test_budget_gate_uses_power(power, cells):
    instance = Instance('yang.xor1', 'yang', {'power': power}, gadget=xor1())
    assert can_run_instance(instance, cells)[0]
    assert not can_run_instance(instance, cells - 1)[0]
