import pytest

from complexity.checks import FAIL, SKIPPED
from complexity.errors import DomainError
from suites.registry import (SUITES, build_instances, canonical_name, expand, get_suite, run_instance,
                             suite_names)
from utils.budget import can_run_instance


def test_registry():
    assert suite_names()[-1] == 'all'
    assert [suite.name for suite in expand('all')] == list(SUITES)
    with pytest.raises(DomainError):
        get_suite('lemma')


def test_dense_rectangle_alias(small_config):
    assert 'lemma3' in SUITES
    assert 'dense-rectangle' in suite_names()
    assert canonical_name('dense-rectangle') == 'lemma3'
    assert get_suite('dense-rectangle') is SUITES['lemma3']
    names = [instance.name for instance in build_instances('dense-rectangle', small_config)]
    assert names == [instance.name for instance in build_instances('lemma3', small_config)]
    assert all(name.startswith('lemma3.') for name in names)


def test_synthesis_suite_reaches_splits(small_config):
    instances = build_instances('synthesis', small_config)
    assert {instance.params['finish-rank'] for instance in instances} == {1, 5}
    [instance] = build_instances('synthesis', small_config, only='synthesis.f1_01.eq_1.f2.r1')
    outcome = run_instance(instance, small_config)
    assert outcome.values['splits'] >= 1
    assert any(check.name == 'rank-decrement' for check in outcome.checks)
    assert not any(check.status == FAIL for check in outcome.checks)


def test_cc_suite_checks_distinct_rows(small_config):
    [instance] = build_instances('cc', small_config, only='cc.eq_1')
    [row_check] = [check for check in run_instance(instance, small_config).checks if check.name == 'distinct-rows']
    assert row_check.status != FAIL
    assert row_check.values == {'rows': 2, 'rk_q': 2, 'bound': 4}


def test_instance_names_are_unique(small_config):
    names = [instance.name for instance in build_instances('all', small_config)]
    assert len(names) == len(set(names))
    assert 'cc.constant-2x2' in names
    assert 'bs-reduction.symmetry.eq_1' in names
    assert 'yang.xor1.n2' in names


def test_only_keeps_one_instance(small_config):
    [instance] = build_instances('cc', small_config, only='cc.xor1')
    assert instance.gadget.shape == (2, 2)
    with pytest.raises(DomainError):
        build_instances('cc', small_config, only='cc.absent')


@pytest.mark.slow
@pytest.mark.parametrize("suite", list(SUITES))
def test_suite_has_no_failures(small_config, suite):
    ran = 0
    for instance in build_instances(suite, small_config):
        if not can_run_instance(instance, small_config.budget_cells)[0]:
            continue
        outcome = run_instance(instance, small_config)
        failed = [check.name for check in outcome.checks if check.status == FAIL]
        assert not failed, f"{instance.name}: {failed}"
        ran += any(check.status != SKIPPED for check in outcome.checks)
    assert ran > 0
