import glob
import json
import os
import shlex

import pandas as pd
import pytest

from liftlab import main
from managers.log_manager import replay_command


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run_dirs(tmp_path, suite):
    return glob.glob(os.path.join(str(tmp_path / 'reports'), f"{suite}_*"))


def test_function_measures(config_file, tmp_path, capsys):
    source = write(tmp_path, 'xor2.txt', 'n=2 table=0110\n')
    assert main(['-c', config_file, 'measures', source]) == 0
    out = capsys.readouterr().out
    assert 's: 2' in out
    assert 'DT: 2' in out
    assert 'n: 2' in out


@pytest.mark.parametrize("text, expected", [
    ("rows=2 cols=2 alphabet=2\n00\n00\n", ['shape: 2x2', 'rk_q: 0', 'C: 1 (exact)', 'D: 0 (exact)']),
    ("rows=2 cols=2 alphabet=2\n10\n01\n", ['rk_q: 2', 'rk_2: 2', 'D: 2 (exact)']),
])
def test_matrix_measures(config_file, tmp_path, capsys, text, expected):
    source = write(tmp_path, 'matrix.txt', text)
    assert main(['-c', config_file, 'measures', source]) == 0
    lines = capsys.readouterr().out.splitlines()
    for line in expected:
        assert line in lines


def test_measures_rejects_bad_input(config_file, tmp_path):
    assert main(['-c', config_file, 'measures', write(tmp_path, 'bad.txt', 'hello\n')]) == 2
    assert main(['-c', config_file, 'measures', write(tmp_path, 'rows.txt', 'rows=2 cols=2 alphabet=2\n01\n')]) == 2
    assert main(['-c', config_file, 'measures', str(tmp_path / 'absent.txt')]) == 2


def test_usage_errors(config_file, tmp_path):
    assert main(['-c', config_file, 'suite', '--suite', 'no-such-suite']) == 2
    assert main(['-c', str(tmp_path / 'absent.yaml'), 'suite', '--suite', 'cc']) == 2
    assert main(['-c', config_file, 'suite', '--suite', 'cc', '--only', 'cc.nothing', '--no-progress']) == 2


def test_relations_suite_writes_report(config_file, tmp_path):
    assert main(['-c', config_file, 'suite', '--suite', 'relations', '--no-progress']) == 0
    [run_dir] = run_dirs(tmp_path, 'relations')
    with open(os.path.join(run_dir, 'report.json')) as f:
        report = json.load(f)
    assert report['suite'] == 'relations'
    assert report['exit_code'] == 0
    assert report['seed'] == 3
    assert report['corpus']['instances'] == 4 + 16 + 2
    assert report['totals']['fail'] == 0
    assert [entry['instance'] for entry in report['instances']][:2] == ['relations.f1_00', 'relations.f1_10']
    assert not os.path.exists(os.path.join(run_dir, 'failed_checks.txt'))
    with open(str(tmp_path / 'reports' / 'latest.json')) as f:
        assert json.load(f)['report'] == os.path.join(run_dir, 'report.json')


def test_replay_and_export(config_file, tmp_path):
    assert main(['-c', config_file, 'suite', '--suite', 'cc', '--only', 'cc.xor1', '--no-progress']) == 0
    [run_dir] = run_dirs(tmp_path, 'cc')
    with open(os.path.join(run_dir, 'report.json')) as f:
        report = json.load(f)
    [entry] = report['instances']
    assert entry['values']['D'] == 2
    assert set(entry['witnesses']) == {'tree', 'cover'}

    target = str(tmp_path / 'xor1.tree')
    assert main(['-c', config_file, 'export', 'cc.xor1.tree', '-o', target]) == 0
    with open(target) as f:
        assert f.readline().strip() == 'domain rows=0,1 cols=0,1'
    assert main(['-c', config_file, 'export', 'cc.xor1.nothing', '-o', target]) == 2


def test_export_without_a_run(config_file, tmp_path):
    assert main(['-c', config_file, 'export', 'cc.xor1.tree', '-o', str(tmp_path / 'out.tree')]) == 2


def test_csv_report(config_file, tmp_path):
    args = ['-c', config_file, 'suite', '--suite', 'info', '--format', 'csv', '--workers', '1', '--no-progress']
    assert main(args) == 0
    [run_dir] = run_dirs(tmp_path, 'info')
    frame = pd.read_csv(os.path.join(run_dir, 'report.csv'))
    assert list(frame.columns) == ['instance', 'suite', 'check', 'status', 'note', 'values', 'witness']
    assert len(frame) == 5 * 6
    assert set(frame['status']) == {'pass'}


def test_budget_flag_skips_instances(config_file, tmp_path):
    args = ['-c', config_file, '--budget-cells', '3', 'suite', '--suite', 'yang', '--no-progress']
    assert main(args) == 0
    [run_dir] = run_dirs(tmp_path, 'yang')
    with open(os.path.join(run_dir, 'report.json')) as f:
        report = json.load(f)
    assert report['budget']['cells'] == 3
    assert {entry['status'] for entry in report['instances']} == {'skipped'}


def latest_report(tmp_path):
    with open(str(tmp_path / 'reports' / 'latest.json')) as f:
        path = json.load(f)['report']
    with open(path) as f:
        return json.load(f)


def test_replay_command_runs(config_file, tmp_path):
    assert main(['-c', config_file, 'suite', '--suite', 'cc', '--only', 'cc.xor1', '--no-progress']) == 0
    report = latest_report(tmp_path)
    command = replay_command(report['instances'][0], report)
    assert command.startswith('python liftlab.py suite ')
    assert main(['-c', config_file] + shlex.split(command)[2:] + ['--no-progress']) == 0
    replayed = latest_report(tmp_path)
    assert [entry['instance'] for entry in replayed['instances']] == ['cc.xor1']
    assert replayed['budget'] == report['budget']


def test_budget_flag_after_subcommand(config_file, tmp_path):
    args = ['-c', config_file, 'suite', '--suite', 'yang', '--budget-cells', '3', '--no-progress']
    assert main(args) == 0
    report = latest_report(tmp_path)
    assert report['budget']['cells'] == 3
    assert {entry['status'] for entry in report['instances']} == {'skipped'}


def test_out_flag_after_subcommand(config_file, tmp_path):
    out = tmp_path / 'elsewhere'
    args = ['-c', config_file, 'suite', '--suite', 'cc', '--only', 'cc.xor1', '--out', str(out), '--no-progress']
    assert main(args) == 0
    assert glob.glob(os.path.join(str(out), 'cc_*'))


@pytest.mark.parametrize("name", ['lemma3', 'dense-rectangle'])
def test_dense_rectangle_suite_names(config_file, tmp_path, name):
    args = ['-c', config_file, 'suite', '--suite', name, '--only', 'lemma3.f1_01.xor1', '--no-progress']
    assert main(args) == 0
    [run_dir] = run_dirs(tmp_path, 'lemma3')
    with open(os.path.join(run_dir, 'report.json')) as f:
        report = json.load(f)
    assert report['suite'] == 'lemma3'
    [entry] = report['instances']
    assert entry['instance'] == 'lemma3.f1_01.xor1'
    assert entry['status'] != 'fail'
