"""Copy-to-local versus direct-remote data access, compared on one clock.

Both strategies read real bytes through the caller's fetch function; the
cost model is simulated. Every remote open pays a fixed injected latency,
and transfers pay bytes/bandwidth. The local-copy strategy pays the remote
cost once per file up front, then reads from its local copy.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable

from ..errors import ValidationError
from .metrics import nearest_rank

LOCAL_SPEEDUP = 10.0  # local disk transfers this much faster than remote


@dataclass(frozen=True)
class AccessWorkload:
    """File ids plus the order in which the job reads them (repeats allowed)."""

    file_ids: tuple[str, ...]
    reads: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "file_ids", tuple(self.file_ids))
        object.__setattr__(self, "reads", tuple(self.reads))
        if not self.file_ids or not self.reads:
            raise ValidationError("workload needs files and a read pattern")
        stray = set(self.reads) - set(self.file_ids)
        if stray:
            raise ValidationError(f"read pattern names unknown files: {sorted(stray)}")


def each_once(file_ids: tuple[str, ...], repeats: int = 1) -> AccessWorkload:
    reads = tuple(fid for _ in range(repeats) for fid in file_ids)
    return AccessWorkload(file_ids=tuple(file_ids), reads=reads)


def compare_access_strategies(
    fetch: Callable[[str], bytes],
    workload: AccessWorkload,
    *,
    per_open_latency_ms: float = 5.0,
    bandwidth_bytes_per_ms: float = 100_000.0,
) -> dict:
    """Run the workload both ways and report timings plus digest equality.

    fetch() may raise a not-found error; it propagates. The returned report
    carries per-strategy wall time on the simulated clock, injected-latency
    totals, per-operation latency percentiles, throughput, and a digest of
    the bytes delivered in read order.
    """
    report: dict = {
        "files": len(workload.file_ids),
        "reads": len(workload.reads),
        "per_open_latency_ms": per_open_latency_ms,
        "strategies": {},
    }

    for strategy in ("local-copy", "direct-read"):
        clock_ms = 0.0
        injected = 0.0
        op_latencies: list[float] = []
        digest = hashlib.sha256()
        bytes_read = 0
        local: dict[str, bytes] = {}

        def remote_read(file_id: str) -> bytes:
            nonlocal clock_ms, injected
            data = fetch(file_id)
            cost = per_open_latency_ms + len(data) / bandwidth_bytes_per_ms
            clock_ms += cost
            injected += per_open_latency_ms
            op_latencies.append(cost)
            return data

        if strategy == "local-copy":
            for file_id in workload.file_ids:
                local[file_id] = remote_read(file_id)
        for file_id in workload.reads:
            if strategy == "local-copy":
                data = local[file_id]
                cost = len(data) / (bandwidth_bytes_per_ms * LOCAL_SPEEDUP)
                clock_ms += cost
                op_latencies.append(cost)
            else:
                data = remote_read(file_id)
            digest.update(data)
            bytes_read += len(data)

        seconds = clock_ms / 1000.0
        report["strategies"][strategy] = {
            "wall_ms": clock_ms,
            "injected_latency_ms": injected,
            "storage_latency_ms": {
                "p50": nearest_rank(op_latencies, 50),
                "p95": nearest_rank(op_latencies, 95),
            },
            "throughput_bytes_per_s": bytes_read / seconds if seconds else 0.0,
            "bytes_read": bytes_read,
            "digest": digest.hexdigest(),
        }

    pair = report["strategies"]
    report["digests_match"] = (
        pair["local-copy"]["digest"] == pair["direct-read"]["digest"]
    )
    return report
