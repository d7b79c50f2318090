"""Check records and reports produced by the verification routines."""

from dataclasses import dataclass, field

import numpy as np


def _plain(value):
    """Convert numpy scalars and arrays to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


@dataclass
class CheckRecord:
    name: str
    status: bool
    margin: float = None
    witness: object = None

    def to_dict(self):
        return {
            "name": self.name,
            "status": "pass" if self.status else "fail",
            "margin": _plain(self.margin),
            "witness": _plain(self.witness),
        }


@dataclass
class Report:
    """An ordered list of check records.

    Reports merge by concatenation, so partial reports computed on chunks
    of samples can be combined in any grouping.
    """

    records: list = field(default_factory=list)

    def add(self, record):
        self.records.append(record)
        return record

    def merge(self, other):
        return Report(self.records + other.records)

    @property
    def passed(self):
        return all(r.status for r in self.records)

    @property
    def failures(self):
        return [r for r in self.records if not r.status]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def to_dict(self):
        return {"checks": [r.to_dict() for r in self.records], "passed": self.passed}
