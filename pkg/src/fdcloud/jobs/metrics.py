"""Metrics snapshots over job accounting windows."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..errors import UsageError
from .model import STEPS


def nearest_rank(values: list[float], pct: float) -> float:
    """Nearest-rank percentile; values need not be sorted."""
    if not values:
        raise UsageError("percentile of an empty sample")
    if not 0 < pct <= 100:
        raise UsageError(f"percentile must be in (0, 100], got {pct}")
    ordered = sorted(values)
    rank = math.ceil(pct / 100 * len(ordered))
    return ordered[rank - 1]


@dataclass(frozen=True)
class JobRow:
    """One job's accounting entry as the scheduler reports it."""

    submitted_at: float
    terminal_at: float | None
    state: str
    step_timings: Mapping[str, float]


@dataclass(frozen=True)
class MetricsSnapshot:
    window: tuple[float, float]
    jobs_submitted: int
    jobs_completed: int
    jobs_failed: int
    jobs_cancelled: int
    job_rate: float
    step_timing_percentiles: dict[str, dict[str, float]]
    storage_latency_ms: dict[str, float]
    throughput_bytes_per_s: float

    def to_dict(self) -> dict:
        return {
            "window": [self.window[0], self.window[1]],
            "jobs_submitted": self.jobs_submitted,
            "jobs_completed": self.jobs_completed,
            "jobs_failed": self.jobs_failed,
            "jobs_cancelled": self.jobs_cancelled,
            "job_rate": self.job_rate,
            "step_timing_percentiles": {
                step: dict(sorted(p.items()))
                for step, p in sorted(self.step_timing_percentiles.items())
            },
            "storage_latency_ms": dict(sorted(self.storage_latency_ms.items())),
            "throughput_bytes_per_s": self.throughput_bytes_per_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def to_text(self) -> str:
        """Flat "metric value" lines for scraping."""
        lines = [
            f"window_from_ms {self.window[0]:g}",
            f"window_to_ms {self.window[1]:g}",
            f"jobs_submitted {self.jobs_submitted}",
            f"jobs_completed {self.jobs_completed}",
            f"jobs_failed {self.jobs_failed}",
            f"jobs_cancelled {self.jobs_cancelled}",
            f"job_rate_per_s {self.job_rate:g}",
            f"throughput_bytes_per_s {self.throughput_bytes_per_s:g}",
        ]
        for step in sorted(self.step_timing_percentiles):
            for name in ("p50", "p95"):
                value = self.step_timing_percentiles[step][name]
                lines.append(f"step_{step.replace('-', '_')}_{name}_ms {value:g}")
        for name in sorted(self.storage_latency_ms):
            lines.append(f"storage_latency_{name}_ms {self.storage_latency_ms[name]:g}")
        return "\n".join(lines) + "\n"


def build_snapshot(
    window: tuple[float, float],
    rows: Iterable[JobRow],
    storage_latencies_ms: list[float],
    bytes_moved: float,
) -> MetricsSnapshot:
    """Aggregate accounting rows into a snapshot.

    Submission counts cover jobs submitted inside the window; completion,
    failure, and timing percentiles cover jobs whose terminal event falls
    inside it. Rates divide by the window length.
    """
    lo, hi = window
    if lo > hi:
        raise UsageError(f"inverted metrics window [{lo}, {hi}]")
    submitted = completed = failed = cancelled = 0
    step_samples: dict[str, list[float]] = {step: [] for step in STEPS}
    for row in rows:
        if lo <= row.submitted_at <= hi:
            submitted += 1
        if row.terminal_at is None or not lo <= row.terminal_at <= hi:
            continue
        if row.state == "Done":
            completed += 1
        elif row.state == "Failed":
            failed += 1
        elif row.state == "Cancelled":
            cancelled += 1
        for step, duration in row.step_timings.items():
            step_samples[step].append(duration)
    seconds = (hi - lo) / 1000.0
    rate = completed / seconds if seconds > 0 else 0.0
    percentiles = {
        step: {"p50": nearest_rank(vals, 50), "p95": nearest_rank(vals, 95)}
        for step, vals in step_samples.items()
        if vals
    }
    storage = (
        {
            "p50": nearest_rank(storage_latencies_ms, 50),
            "p95": nearest_rank(storage_latencies_ms, 95),
        }
        if storage_latencies_ms
        else {}
    )
    throughput = bytes_moved / seconds if seconds > 0 else 0.0
    return MetricsSnapshot(
        window=(lo, hi),
        jobs_submitted=submitted,
        jobs_completed=completed,
        jobs_failed=failed,
        jobs_cancelled=cancelled,
        job_rate=rate,
        step_timing_percentiles=percentiles,
        storage_latency_ms=storage,
        throughput_bytes_per_s=throughput,
    )
