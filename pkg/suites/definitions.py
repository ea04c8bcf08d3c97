"""
Acceptance suites: each suite has a ``build_<suite>(config)`` that lists its
corpus instances in canonical order and a ``run_<suite>(instance, config,
stage)`` that runs the checks of one instance. ``stage(name)`` reports the
check in progress.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from complexity.boolfn import TruthTable, check_measure_relations
from complexity.checks import PASS, SKIPPED, CheckResult, verdict
from complexity.errors import BudgetError
from complexity.gadget import (
    GadgetMatrix, compose, rank_q, rank_subadditivity_check, verify_distinct_rows, verify_rank_lemma, verify_yang,
)
from complexity.info import check_information_facts, random_distribution
from complexity.lifting import (
    BALANCED, bs_reduction, build_lifted_distribution, check_negation_symmetry,
    extract_rectangle_from_cover, max_ratio_check, synthesize_protocol, verify_bs_reduction,
    verify_fknn, verify_main_chain,
)
from complexity.protocol import (
    ceil_log2, eval_protocol, exact_cc, format_protocol, leaf_count, random_protocol, rebalance,
    rebalance_depth_bound, trivial_protocol, verify_protocol,
)
from complexity.rectcover import (
    cover_number, density_bound_holds, density_bound_value, max_density_mono_rectangle,
)
from utils.corpus import (
    Instance, function_name, functions_up_to, gadget_from_spec, gadget_name, instance_name,
    seeded_functions, standard_gadget_specs,
)

FIELDS = ('Q', 'F2')

# q for the information suite uses seeds shifted by this offset
REFERENCE_SEED_OFFSET = 1 << 20

# exact_cc is re-run without line merging on matrices up to this size
MERGE_CROSSCHECK_CELLS = 16

MAIN_CHAIN_CHECKS = ('dense-rectangle', 'cc-rank', 'rank-lemma')


@dataclass
class SuiteOutcome:
    """
    Attributes:
        checks (list): CheckResults of the instance
        values (dict): Measures reported for the instance
        witnesses (dict): Witness kind -> text in the owning module's format
    """
    checks: List[CheckResult]
    values: Dict[str, Any] = field(default_factory=dict)
    witnesses: Dict[str, str] = field(default_factory=dict)


def _gadgets(config, include_constant=True):
    """Standard corpus gadgets as (spec, GadgetMatrix) pairs."""
    pairs = [(spec, gadget_from_spec(spec)) for spec in standard_gadget_specs(config)]
    return [(spec, g) for spec, g in pairs if include_constant or not g.is_constant()]


def _function_instance(suite, f, spec=None, g=None, *extra, **params):
    parts = [function_name(f)] + ([gadget_name(spec)] if spec else []) + list(extra)
    params = dict(params, f=f.to_string())
    if spec:
        params['g'] = spec
    return Instance(instance_name(suite, *parts), suite, params, f, g)


def _cover(matrix, config):
    """Exact cover, or the greedy one when the exact search runs out of budget."""
    try:
        return cover_number(matrix, 'exact', config.budget_nodes, config.budget_cells)
    except BudgetError:
        return cover_number(matrix, 'greedy', config.budget_nodes, config.budget_cells)


def _values(checks):
    return dict(checks[0].values) if checks else {}


# relations

def build_relations(config):
    instances = [_function_instance('relations', f) for f in functions_up_to(config.max_arity('relations'))]
    sample = config.corpus['random-functions']
    for seed, f in seeded_functions(int(sample['count']), int(sample['arity']), config.seed):
        instances.append(_function_instance('relations', f, None, None, f"seed{seed}", seed=seed))
    return instances


def run_relations(instance, config, stage):
    stage('relations')
    report = check_measure_relations(instance.function)
    return SuiteOutcome(report.checks, report.values)


# rank-lemma

def build_rank_lemma(config):
    return [_function_instance('rank-lemma', f, spec, g)
            for spec, g in _gadgets(config)
            for f in functions_up_to(config.max_arity('rank-lemma'))]


def run_rank_lemma(instance, config, stage):
    f, g = instance.function, instance.gadget
    stage('rank-lemma')
    checks = [verify_rank_lemma(f, g, config.budget_cells)]
    if not f.is_constant():
        # M_{f o g} + M_{(not f) o g} is the all-ones matrix
        stage('rank-subadditivity')
        negated = TruthTable(f.arity, 1 - f.values)
        checks.append(rank_subadditivity_check(compose(f, g, config.budget_cells),
                                               compose(negated, g, config.budget_cells)))
    return SuiteOutcome(checks, _values(checks))


# yang

def build_yang(config):
    instances = []
    for spec, g in _gadgets(config):
        for power in config.corpus['yang-powers']:
            if power >= 3 and g.shape != (2, 2):
                continue
            instances.append(Instance(instance_name('yang', gadget_name(spec), f"n{power}"), 'yang',
                                      {'g': spec, 'power': power}, gadget=g))
    return instances


def run_yang(instance, config, stage):
    stage('yang')
    checks = [verify_yang(instance.gadget, instance.params['power'], config.budget_cells)]
    return SuiteOutcome(checks, _values(checks))


# lemma3: dense monochromatic rectangle

def build_dense_rectangle(config):
    return [_function_instance('lemma3', f, spec, g)
            for spec, g in _gadgets(config, include_constant=False)
            for f in functions_up_to(config.max_arity('lemma3')) if not f.is_constant()]


def run_dense_rectangle(instance, config, stage):
    f, g = instance.function, instance.gadget
    stage('cover')
    covered = _cover(compose(f, g, config.budget_cells), config)
    stage('extract')
    rect, trace = extract_rectangle_from_cover(f, g, covered.cover, budget_cells=config.budget_cells)
    s, rk, size = trace.s, trace.rk, covered.size
    density = rect.density(g)
    values = {'s': s, 'rk': rk, 'N': size, 'cover_mode': covered.mode, 'regime': trace.regime,
              'density': density, 'bound': density_bound_value(size, s, rk)}
    checks = [verdict('dense-rectangle', rect.is_monochromatic(g) and density_bound_holds(density, size, s, rk),
                      dict(values), note=f"cover_mode={covered.mode}")]
    if trace.regime == BALANCED:
        stage('max-ratio')
        checks.append(max_ratio_check(build_lifted_distribution(g, trace.z, config.budget_cells), s))
    stage('max-density')
    best, best_density = max_density_mono_rectangle(g, config.budget_nodes)
    values['max_density'] = best_density
    checks.append(verdict('max-density', density_bound_holds(best_density, size, s, rk),
                          {'rectangle': best.to_string(), 'density': best_density, 'N': size}))
    witnesses = {'cover': covered.cover.to_string(), 'trace': trace.to_text()}
    return SuiteOutcome(checks, values, witnesses)


# cc

def build_cc(config):
    instances = [Instance(instance_name('cc', gadget_name(spec)), 'cc', {'g': spec}, gadget=g)
                 for spec, g in _gadgets(config)]
    constant = GadgetMatrix(np.zeros((2, 2), dtype=np.int64), name='constant')
    instances.append(Instance(instance_name('cc', 'constant-2x2'), 'cc', {'matrix': constant.to_string()},
                              gadget=constant))
    return instances


def run_cc(instance, config, stage):
    g = instance.gadget
    stage('distinct-rows')
    row_check = verify_distinct_rows(g)
    stage('exact-cc')
    solved = exact_cc(g, config.budget_nodes)
    values = {'D': solved.value, 'lower': solved.lower, 'expansions': solved.expansions}
    witnesses = {'tree': format_protocol(solved.tree)}
    if not solved.exact:
        skipped = CheckResult('cc-exact', SKIPPED, values, note='protocol search over budget')
        return SuiteOutcome([row_check, skipped], values, witnesses)
    d = solved.value
    checks = [row_check]
    checks.append(verdict('cc-verify', verify_protocol(solved.tree, g), {'D': d, 'depth': solved.tree.depth}))
    rk = rank_q(g)
    values['rk_q'] = rk
    checks.append(verdict('cc-rank', d >= ceil_log2(rk), {'D': d, 'rk_q': rk}))
    stage('cover')
    try:
        covered = cover_number(g, 'exact', config.budget_nodes, config.budget_cells)
        values['C'] = covered.size
        witnesses['cover'] = covered.cover.to_string()
        checks.append(verdict('cc-cover', d >= ceil_log2(covered.size), {'D': d, 'C': covered.size}))
        checks.append(verdict('cover-valid', covered.cover.is_valid(g), {'C': covered.size}))
    except BudgetError as e:
        checks.append(CheckResult('cc-cover', SKIPPED, {'D': d}, note=str(e)))
    checks.append(verdict('cc-trivial', d <= trivial_protocol(g).depth, {'D': d}))
    if g.size <= MERGE_CROSSCHECK_CELLS:
        stage('cc-merge')
        plain = exact_cc(g, config.budget_nodes, merge_duplicates=False)
        if plain.exact:
            checks.append(verdict('cc-merge', plain.value == d, {'D': d, 'D_unmerged': plain.value}))
    known = 0 if g.is_constant() else 2 if instance.params.get('g', {}).get('name') == 'XOR1' else None
    if known is not None:
        checks.append(verdict('cc-known', d == known, {'D': d, 'expected': known}))
    return SuiteOutcome(checks, values, witnesses)


# rebalance

def build_rebalance(config):
    trees = config.corpus['random-trees']
    rng = np.random.default_rng(config.seed)
    leaves = rng.integers(1, int(trees['max-leaves']) + 1, size=int(trees['count']))
    instances = []
    for k, count in enumerate(leaves.tolist()):
        seed = config.seed + k
        instances.append(Instance(instance_name('rebalance', f"l{count}", f"seed{seed}"), 'rebalance',
                                  {'leaves': count, 'seed': seed}))
    return instances


def run_rebalance(instance, config, stage):
    count, seed = instance.params['leaves'], instance.params['seed']
    tree, matrix = random_protocol(count, seed)
    checks = [
        verdict('leaf-count', leaf_count(tree) == count, {'leaves': leaf_count(tree), 'expected': count}),
        verdict('protocol-correct', verify_protocol(tree, matrix), {'leaves': count}),
    ]
    stage('rebalance')
    balanced = rebalance(tree)
    mismatches = sum(1 for x in range(matrix.rows) for y in range(matrix.cols)
                     if eval_protocol(balanced, x, y) != eval_protocol(tree, x, y))
    bound = rebalance_depth_bound(count)
    checks.append(verdict('rebalance-correct', mismatches == 0 and verify_protocol(balanced, matrix),
                          {'pairs': matrix.size, 'mismatches': mismatches}))
    checks.append(verdict('rebalance-depth', balanced.depth <= bound,
                          {'leaves': count, 'depth': balanced.depth, 'bound': bound}))
    values = {'leaves': count, 'depth': tree.depth, 'rebalanced_depth': balanced.depth, 'bound': bound}
    return SuiteOutcome(checks, values, {'tree': format_protocol(balanced)})


# synthesis

def build_synthesis(config):
    return [_function_instance('synthesis', f, spec, g, field_name, f"r{finish_rank}", field=field_name,
                               **{'finish-rank': finish_rank})
            for spec, g in _gadgets(config, include_constant=False)
            for f in functions_up_to(config.max_arity('synthesis')) if not f.is_constant()
            for field_name in FIELDS
            for finish_rank in config.synthesis_finish_ranks]


def run_synthesis(instance, config, stage):
    f, g, field_name = instance.function, instance.gadget, instance.params['field']
    stage('cover')
    covered = _cover(compose(f, g, config.budget_cells), config)
    stage(f"synthesize-{field_name}")
    finish_rank = instance.params['finish-rank']
    result = synthesize_protocol(f, g, covered.cover, field_name, covered.size, finish_rank, config.budget_cells)
    checks = list(result.checks)
    values = dict(result.stats, N=covered.size, cover_mode=covered.mode, finish_rank=finish_rank)
    if field_name == 'Q' and finish_rank == config.synthesis_finish_ranks[0]:
        stage('main-chain')
        chain = verify_main_chain(f, g, config.budget_cells, config.budget_nodes, finish_rank)
        checks.extend(c for c in chain.checks if c.name in MAIN_CHAIN_CHECKS)
        values['reported'] = chain.reported
    witnesses = {
        'tree': format_protocol(result.tree),
        'trace': result.to_text(),
        'cover': covered.cover.to_string(),
    }
    return SuiteOutcome(checks, values, witnesses)


# fknn

def build_fknn(config):
    return [Instance(instance_name('fknn', gadget_name(spec), f"n{power}"), 'fknn',
                     {'g': spec, 'power': power}, gadget=g)
            for spec, g in _gadgets(config, include_constant=False)
            for power in config.corpus['fknn-powers']]


def run_fknn(instance, config, stage):
    stage('fknn')
    checks = verify_fknn(instance.gadget, instance.params['power'], config.budget_cells, config.budget_nodes)
    return SuiteOutcome(checks, _values(checks))


# bs-reduction

def build_bs_reduction(config):
    instances = []
    for name in config.reduction_gadgets:
        spec = {'name': name}
        g = gadget_from_spec(spec)
        instances.extend(_function_instance('bs-reduction', f, spec, g)
                         for f in functions_up_to(config.max_arity('bs-reduction')))
    for name in config.gadget_names:
        if name in config.reduction_gadgets:
            continue
        spec = {'name': name}
        instances.append(Instance(instance_name('bs-reduction', 'symmetry', gadget_name(spec)), 'bs-reduction',
                                  {'g': spec, 'symmetry-only': True}, gadget=gadget_from_spec(spec)))
    return instances


def run_bs_reduction(instance, config, stage):
    g = instance.gadget
    if instance.params.get('symmetry-only'):
        stage('negation-symmetry')
        mapping = check_negation_symmetry(g)
        if mapping is None:
            check = CheckResult('negation-symmetry', SKIPPED, {'rows': g.rows},
                                note='no negation symmetry: reduction unsupported')
        else:
            check = CheckResult('negation-symmetry', PASS, {'complement': mapping})
        return SuiteOutcome([check], {'supported': mapping is not None})
    stage('bs-reduction')
    reduction = bs_reduction(instance.function, g)
    checks = verify_bs_reduction(instance.function, g, reduction, config.budget_cells)
    values = {'b': reduction.b, 'point': reduction.point, 'blocks': list(reduction.blocks)}
    return SuiteOutcome(checks, values)


# info

def build_info(config):
    sample = config.corpus['random-distributions']
    max_size = int(sample['max-size'])
    rng = np.random.default_rng(config.seed)
    instances = []
    for k in range(int(sample['count'])):
        seed = config.seed + k
        a = int(rng.integers(1, min(3, max_size) + 1))
        b = int(rng.integers(1, max(1, max_size // a) + 1))
        instances.append(Instance(instance_name('info', f"seed{seed}", f"{a}x{b}"), 'info',
                                  {'seed': seed, 'shape': [a, b], 'reference-seed': seed + REFERENCE_SEED_OFFSET}))
    return instances


def run_info(instance, config, stage):
    a, b = instance.params['shape']
    p = random_distribution(instance.params['seed'], a * b, (a, b))
    q = random_distribution(instance.params['reference-seed'], a * b, (a, b), minimum=1)
    stage('information')
    checks = check_information_facts(p, q)
    return SuiteOutcome(checks, {'support': len(p), 'shape': [a, b]})
