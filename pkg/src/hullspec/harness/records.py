"""Result records (JSON) and their CSV tables."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

STATUS_OK = "ok"
STATUS_DEGRADED = "degraded"
STATUS_VIOLATION = "violation"
EXIT_CODES = {STATUS_OK: 0, STATUS_DEGRADED: 2, STATUS_VIOLATION: 1}


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
        return buf.getvalue()


@dataclass
class ResultRecord:
    experiment: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)
    status: str = STATUS_OK
    wall_clock: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def check(self, name: str, passed: bool, detail=None):
        """Record an invariant; a failure marks the record as a violation."""
        self.checks[name] = {"passed": bool(passed), "detail": detail}
        if not passed:
            self.status = STATUS_VIOLATION
            self.messages.append(f"invariant failed: {name}")

    def degrade(self, why: str):
        if self.status == STATUS_OK:
            self.status = STATUS_DEGRADED
        self.messages.append(f"certificate degraded: {why}")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self, wall_clock: bool = True) -> dict:
        d = {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "status": self.status,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "certificates": self.certificates,
            "checks": self.checks,
            "messages": self.messages,
            "tables": {k: {"columns": t.columns, "rows": t.rows} for k, t in self.tables.items()},
        }
        if wall_clock:
            d["wall_clock"] = self.wall_clock
        return d

    def to_json(self, wall_clock: bool = True) -> str:
        # floats are written with repr, so loading gives back the same doubles
        return json.dumps(_plain(self.to_dict(wall_clock)), indent=2, sort_keys=True,
                          allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {d.get('schema_version')!r}")
        tables = {k: Table(t["columns"], [list(r) for r in t["rows"]])
                  for k, t in d.get("tables", {}).items()}
        return cls(d["experiment"], d["inputs"], d["outputs"], d["certificates"], tables,
                   d["checks"], d["messages"], d["status"], d.get("wall_clock", 0.0))

    @classmethod
    def from_json(cls, text: str) -> "ResultRecord":
        return cls.from_dict(json.loads(text))


def _plain(obj):
    """JSON-safe copy: tuples become lists, non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _plain(obj.item())
    return obj


def format_distance(d: float, err: float) -> str:
    """``d`` as a number, or as an interval when its error bound exceeds 10 %."""
    if err > 0.1 * abs(d):
        return f"[{max(0.0, d - err):.3e}, {d + err:.3e}]"
    return f"{d:.12g}"
