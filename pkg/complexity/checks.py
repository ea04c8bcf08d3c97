from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

PASS = 'pass'
FAIL = 'fail'
VACUOUS = 'vacuous'
DEGENERATE = 'degenerate'
SKIPPED = 'skipped'

STATUSES = (PASS, FAIL, VACUOUS, DEGENERATE, SKIPPED)


def jsonable(value):
    """Convert exact values (fractions, sets, tuples) into JSON-friendly ones."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if hasattr(value, 'item'):
        # numpy scalar
        return value.item()
    return value


@dataclass
class CheckResult:
    """
    Outcome of one verified inequality or property.

    Attributes:
        name (str): Check identifier, e.g. ``rank-lemma``
        status (str): One of pass, fail, vacuous, degenerate, skipped
        values (dict): Both sides of the inequality and the measures used
        witness (str): Witness id stored by the log manager, if any
        note (str): Free-form explanation (why skipped, why vacuous)
    """
    name: str
    status: str
    values: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[str] = None
    note: str = ''

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"Unknown check status '{self.status}'")

    @property
    def holds(self):
        """True when the asserted statement held (pass or vacuous)."""
        return self.status in (PASS, VACUOUS)

    @property
    def failed(self):
        return self.status == FAIL

    def to_dict(self):
        data = {'name': self.name, 'status': self.status, 'values': jsonable(self.values)}
        if self.witness:
            data['witness'] = self.witness
        if self.note:
            data['note'] = self.note
        return data


def verdict(name, holds, values, note=''):
    """Build a pass/fail result from a boolean."""
    return CheckResult(name, PASS if holds else FAIL, values, note=note)
