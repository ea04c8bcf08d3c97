import pytest
import yaml

from utils.config import BUDGET_ENV, DEFAULTS, LiftLabConfig


def test_defaults_without_file(monkeypatch):
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    config = LiftLabConfig()
    assert config.budget_cells == DEFAULTS['budget']['cells']
    assert config.budget_nodes == 200000
    assert config.seed == 0
    assert config.output_format == 'json'
    assert config.finish_rank == 5
    assert config.synthesis_finish_ranks == [1, 5]
    assert config.max_arity('relations') == 3
    assert config.max_arity('unknown-suite') == 2


def test_file_overlays_defaults(small_config, tmp_path):
    assert small_config.budget_cells == 4096
    assert small_config.gadget_names == ['XOR1', 'EQ_1']
    assert small_config.seed == 3
    assert small_config.out_dir == str(tmp_path / 'reports')
    assert small_config.corpus['random-gadgets']['sizes'] == [3]
    assert small_config.budget() == {'cells': 4096, 'nodes': 50000}


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        LiftLabConfig(str(tmp_path / 'absent.yaml'))


def test_missing_sections(tmp_path):
    path = tmp_path / 'partial.yaml'
    path.write_text(yaml.safe_dump({'budget': {'cells': 10}}))
    with pytest.raises(ValueError, match='corpus'):
        LiftLabConfig(str(path))


def test_invalid_yaml(tmp_path):
    path = tmp_path / 'broken.yaml'
    path.write_text("budget: [1, 2\ncorpus: {")
    with pytest.raises(yaml.YAMLError):
        LiftLabConfig(str(path))


def test_environment_budget(monkeypatch, config_file):
    monkeypatch.setenv(BUDGET_ENV, '512')
    assert LiftLabConfig(config_file).budget_cells == 512
    monkeypatch.setenv(BUDGET_ENV, 'lots')
    with pytest.raises(ValueError):
        LiftLabConfig(config_file)


def test_command_line_overrides_win(monkeypatch, small_config):
    monkeypatch.setenv(BUDGET_ENV, '512')
    small_config.apply_overrides(budget_cells=100, seed=9, workers=0, output_format='csv')
    assert small_config.budget_cells == 100
    assert small_config.seed == 9
    assert small_config.workers == 1
    assert small_config.output_format == 'csv'
    assert small_config.budget_nodes == 50000


def test_partial_sections_merge_with_defaults(tmp_path):
    path = tmp_path / 'partial.yaml'
    path.write_text(yaml.safe_dump({'budget': {'cells': 10}, 'corpus': {'gadgets': ['XOR1']}}))
    config = LiftLabConfig(str(path))
    assert config.budget_cells == 10
    assert config.budget_nodes == 200000
    assert config.gadget_names == ['XOR1']
    assert config.reduction_gadgets == ['XOR1', 'IndFlip_2']
    assert config.finish_rank == 5
