import pytest
import yaml

from utils.config import LiftLabConfig

SMALL_CORPUS = {
    'budget': {'cells': 4096, 'nodes': 50000},
    'run': {'seed': 3, 'workers': 2, 'format': 'json'},
    'corpus': {
        'gadgets': ['XOR1', 'EQ_1'],
        'reduction-gadgets': ['XOR1'],
        'random-gadgets': {'balanced': 1, 'biased': 1, 'sizes': [3]},
        'random-functions': {'count': 2, 'arity': 3},
        'random-trees': {'count': 3, 'max-leaves': 8},
        'random-distributions': {'count': 5, 'max-size': 4},
        'max-arity': {
            'relations': 2,
            'rank-lemma': 2,
            'lemma3': 1,
            'synthesis': 1,
            'bs-reduction': 2,
        },
        'yang-powers': [1, 2],
        'fknn-powers': [1],
        'finish-rank': 5,
        'split-finish-rank': 1,
    },
}


@pytest.fixture
def config_file(tmp_path):
    """Small corpus written to a YAML file, reports under tmp_path/reports."""
    data = dict(SMALL_CORPUS, run=dict(SMALL_CORPUS['run'], **{'out-dir': str(tmp_path / 'reports')}))
    path = tmp_path / 'liftlab.yaml'
    path.write_text(yaml.safe_dump(data))
    return str(path)


@pytest.fixture
def small_config(config_file):
    return LiftLabConfig(config_file)
