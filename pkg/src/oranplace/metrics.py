"""Append-only JSONL metrics streams.

One JSON object per line, written with sorted keys so equal runs produce
byte-equal streams apart from wall-clock fields.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

WALL_CLOCK_KEY = "wall_clock_s"


class MetricsWriter:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")
        self._t0 = time.monotonic()

    def write(self, record: dict) -> None:
        record = dict(record)
        record.setdefault(WALL_CLOCK_KEY, round(time.monotonic() - self._t0, 3))
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "MetricsWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_records(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: bad metrics line: {exc}") from exc
    return records


def strip_wall_clock(records: list[dict]) -> list[dict]:
    """Records without timing fields, for determinism comparisons."""
    return [{k: v for k, v in r.items() if k != WALL_CLOCK_KEY} for r in records]
