"""
Stage timing for convergence studies.

Each matrix build, coefficient computation and rule evaluation of a study
is timed with perf_counter_ns into a StageCollector. The records are
printed by the formatter but never serialized with a report, which keeps
reports byte-identical between runs.
"""

import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional


@dataclass
class StageRecord:
    """Timing of one stage of a computation."""

    stage: str
    start_ns: int
    end_ns: int
    context: dict = field(default_factory=dict)

    @property
    def duration_ns(self) -> int:
        return self.end_ns - self.start_ns

    @property
    def duration_ms(self) -> float:
        return self.duration_ns / 1_000_000

    @property
    def duration_s(self) -> float:
        return self.duration_ns / 1_000_000_000


class StageCollector:
    """In-memory store of StageRecord instances with per-stage aggregation."""

    def __init__(self):
        self._records: list[StageRecord] = []

    def add(self, record: StageRecord) -> None:
        self._records.append(record)

    def all(self) -> list[StageRecord]:
        """Return all records in insertion order."""
        return list(self._records)

    def by_stage(self, stage: str) -> list[StageRecord]:
        return [r for r in self._records if r.stage == stage]

    def grouped(self) -> dict[str, list[StageRecord]]:
        groups: dict[str, list[StageRecord]] = defaultdict(list)
        for record in self._records:
            groups[record.stage].append(record)
        return dict(groups)

    def stats(self, stage: str) -> Optional[dict]:
        """
        Aggregate durations for one stage.

        Returns:
            Dict with count, min, max, avg, total in nanoseconds,
            or None if the stage was never recorded.
        """
        records = self.by_stage(stage)
        if not records:
            return None
        durations = [r.duration_ns for r in records]
        return {
            "count": len(durations),
            "min_ns": min(durations),
            "max_ns": max(durations),
            "avg_ns": sum(durations) // len(durations),
            "total_ns": sum(durations),
        }

    def clear(self) -> None:
        self._records.clear()


@contextmanager
def stage_timer(stage: str, collector: Optional[StageCollector] = None,
                **context) -> Iterator[dict]:
    """
    Time the enclosed block as `stage`.

    The yielded dict is the record's context and may be extended inside
    the block. The record is stored even when the block raises.
    """
    target = collector if collector is not None else default_collector
    start_ns = time.perf_counter_ns()
    try:
        yield context
    finally:
        target.add(StageRecord(stage, start_ns, time.perf_counter_ns(), context))


default_collector = StageCollector()
