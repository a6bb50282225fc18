"""Scheduler configuration, loadable from a JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..errors import UsageError, ValidationError
from .testing import DEFAULT_CRITICAL, TEST_TYPE_NAMES


@dataclass
class SchedulerConfig:
    node_count: int = 13
    node_slots: int = 8
    blacklist_threshold: int = 3
    critical_tests: tuple[str, ...] = tuple(sorted(DEFAULT_CRITICAL))
    fault_seed: int = 0
    task_failure_rate: float = 0.0
    # plugin id -> test names forced to fail during functional test runs
    injected_test_failures: dict[str, tuple[str, ...]] = field(default_factory=dict)
    max_tasks: int = 4
    exec_ms_base: int = 20
    exec_ms_jitter: int = 10
    storage_open_ms: float = 2.0
    bytes_per_input: int = 1024

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValidationError("node_count must be >= 1")
        if self.node_slots < 1:
            raise ValidationError("node_slots must be >= 1")
        if self.blacklist_threshold < 1:
            raise ValidationError("blacklist_threshold must be >= 1")
        if self.max_tasks < 1:
            raise ValidationError("max_tasks must be >= 1")
        if not 0.0 <= self.task_failure_rate <= 1.0:
            raise ValidationError("task_failure_rate must be in [0, 1]")
        self.critical_tests = tuple(self.critical_tests)
        unknown = set(self.critical_tests) - set(TEST_TYPE_NAMES)
        if unknown:
            raise ValidationError(f"unknown critical tests: {sorted(unknown)}")
        self.injected_test_failures = {
            plugin: tuple(names)
            for plugin, names in self.injected_test_failures.items()
        }

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "node_slots": self.node_slots,
            "blacklist_threshold": self.blacklist_threshold,
            "critical_tests": list(self.critical_tests),
            "fault_seed": self.fault_seed,
            "task_failure_rate": self.task_failure_rate,
            "injected_test_failures": {
                plugin: list(names)
                for plugin, names in sorted(self.injected_test_failures.items())
            },
            "max_tasks": self.max_tasks,
            "exec_ms_base": self.exec_ms_base,
            "exec_ms_jitter": self.exec_ms_jitter,
            "storage_open_ms": self.storage_open_ms,
            "bytes_per_input": self.bytes_per_input,
        }


def config_from_dict(data: dict) -> SchedulerConfig:
    known = {f.name for f in fields(SchedulerConfig)}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown scheduler config keys: {sorted(unknown)}")
    return SchedulerConfig(**data)


def load_config(path: str | Path) -> SchedulerConfig:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return config_from_dict(data)


def save_config(config: SchedulerConfig, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
