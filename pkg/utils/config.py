import copy
import os

import yaml

BUDGET_ENV = 'LIFTLAB_BUDGET_CELLS'

DEFAULTS = {
    'budget': {
        'cells': 1 << 16,
        'nodes': 200000,
    },
    'run': {
        'seed': 0,
        'workers': 4,
        'out-dir': 'reports',
        'format': 'json',
    },
    'corpus': {
        'gadgets': ['EQ_1', 'XOR1', 'AND1', 'IP_2', 'Ind_2', 'EQ_2'],
        'reduction-gadgets': ['XOR1', 'IndFlip_2'],
        'random-gadgets': {'balanced': 10, 'biased': 10, 'sizes': [3, 4]},
        'random-functions': {'count': 200, 'arity': 4},
        'random-trees': {'count': 100, 'max-leaves': 64},
        'random-distributions': {'count': 1000, 'max-size': 6},
        'max-arity': {
            'relations': 3,
            'rank-lemma': 2,
            'lemma3': 2,
            'synthesis': 2,
            'bs-reduction': 3,
        },
        'yang-powers': [1, 2, 3],
        'fknn-powers': [1, 2],
        'finish-rank': 5,
        'split-finish-rank': 1,
    },
}


def _merge(base, override):
    """Recursively overlay ``override`` on ``base``; dicts merge, everything else replaces."""
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class LiftLabConfig:
    """
    Manages configuration for liftlab runs.

    Values come from the built-in defaults, overlaid by the YAML file, then
    by the LIFTLAB_BUDGET_CELLS environment variable, then by command-line
    flags passed to ``apply_overrides``.
    """
    def __init__(self, config_file=None):
        """
        Initialize configuration from an optional YAML file.

        Args:
            config_file (str): Path to YAML configuration file

        Raises:
            FileNotFoundError: If config file doesn't exist
            yaml.YAMLError: If config file is invalid YAML
            ValueError: If required sections are missing
        """
        self.config_file = config_file
        self.config = _merge(DEFAULTS, self._load_config() if config_file else {})
        self._apply_environment()

    def _load_config(self):
        """Load and validate configuration file."""
        try:
            with open(self.config_file, 'r') as f:
                config = yaml.safe_load(f) or {}

            required_sections = ['budget', 'corpus']
            missing = [s for s in required_sections if s not in config]
            if missing:
                raise ValueError(f"Missing required sections in config: {', '.join(missing)}")

            return config

        except FileNotFoundError:
            raise FileNotFoundError(f"Configuration file '{self.config_file}' not found")
        except yaml.YAMLError as e:
            raise yaml.YAMLError(f"Error parsing YAML file: {e}")

    def _apply_environment(self):
        """Overlay the cell budget from LIFTLAB_BUDGET_CELLS when it is set."""
        value = os.environ.get(BUDGET_ENV)
        if value:
            try:
                self.config['budget']['cells'] = int(value)
            except ValueError:
                raise ValueError(f"{BUDGET_ENV} must be an integer, got '{value}'")

    def apply_overrides(self, budget_cells=None, budget_nodes=None, seed=None, workers=None,
                        out_dir=None, output_format=None):
        """
        Overlay command-line values; None leaves the current value.
        """
        if budget_cells is not None:
            self.config['budget']['cells'] = budget_cells
        if budget_nodes is not None:
            self.config['budget']['nodes'] = budget_nodes
        if seed is not None:
            self.config['run']['seed'] = seed
        if workers is not None:
            self.config['run']['workers'] = workers
        if out_dir is not None:
            self.config['run']['out-dir'] = out_dir
        if output_format is not None:
            self.config['run']['format'] = output_format

    @property
    def budget_cells(self):
        """Largest matrix (cells) any exact computation may materialize."""
        return int(self.config['budget']['cells'])

    @property
    def budget_nodes(self):
        """Node-expansion cap for exact cover and protocol search."""
        return int(self.config['budget']['nodes'])

    @property
    def seed(self):
        """Seed of every random corpus generator."""
        return int(self.config['run']['seed'])

    @property
    def workers(self):
        """Worker threads, at least 1."""
        return max(1, int(self.config['run']['workers']))

    @property
    def out_dir(self):
        """Reports directory."""
        return self.config['run']['out-dir']

    @property
    def output_format(self):
        """Report format, json or csv."""
        return self.config['run']['format']

    @property
    def corpus(self):
        """Get corpus configuration."""
        return self.config['corpus']

    @property
    def gadget_names(self):
        """Named gadgets of the standard corpus."""
        return list(self.corpus['gadgets'])

    @property
    def reduction_gadgets(self):
        """Gadgets with a negation symmetry, used by the bs reduction."""
        return list(self.corpus['reduction-gadgets'])

    @property
    def finish_rank(self):
        """Largest rank the synthesis hands to the low-rank finisher."""
        return int(self.corpus['finish-rank'])

    @property
    def synthesis_finish_ranks(self):
        """
        Finish ranks the synthesis suite runs with: ``split-finish-rank``
        forces rank-decrement splits on small gadgets, ``finish-rank`` is
        the default.
        """
        return sorted({int(self.corpus['split-finish-rank']), self.finish_rank})

    def max_arity(self, suite):
        """
        Largest outer-function arity used by a suite.

        Args:
            suite (str): Suite name

        Returns:
            int: Configured arity, 2 when the suite has no entry
        """
        return int(self.corpus['max-arity'].get(suite, 2))

    def budget(self):
        """Budget flags as recorded in reports."""
        return {'cells': self.budget_cells, 'nodes': self.budget_nodes}
