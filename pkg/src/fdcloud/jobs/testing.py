"""Functional test jobs: ten probe types run against a plugin's node.

Each run exercises every probe type once and feeds the result into the
plugin's blacklist record. Failures can be injected per test name, which
keeps blacklisting scenarios deterministic.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Iterable

from ..errors import ValidationError
from .plugins import PluginRegistry


@dataclass(frozen=True)
class TestJobType:
    __test__ = False  # not a pytest class, despite the name

    name: str
    critical: bool


# Criticality here is the default; deployments override it in config.
DEFAULT_CRITICAL = frozenset(
    {"echo", "stage-input", "stage-output", "db-access", "remote-read", "local-copy-read"}
)

TEST_TYPE_NAMES = (
    "echo",
    "stage-input",
    "stage-output",
    "db-access",
    "remote-read",
    "local-copy-read",
    "cpu-burn",
    "large-io",
    "failure-probe",
    "version-probe",
)


def make_test_types(critical: Iterable[str] = DEFAULT_CRITICAL) -> tuple[TestJobType, ...]:
    critical_set = set(critical)
    unknown = critical_set - set(TEST_TYPE_NAMES)
    if unknown:
        raise ValidationError(f"unknown test types marked critical: {sorted(unknown)}")
    return tuple(TestJobType(name, name in critical_set) for name in TEST_TYPE_NAMES)


class TestBench:
    """In-process stand-in for one worker node's environment."""

    __test__ = False  # not a pytest class, despite the name

    def __init__(self, node_id: str = "node-0"):
        self.node_id = node_id
        self.staged: dict[str, bytes] = {}
        self.kv: dict[str, str] = {"schema": "v1", "plugins": "registered"}
        self.version = "1.0.0"

    # Probe bodies return True on success. They are deliberately small:
    # what matters is that each exercises a distinct failure surface.

    def probe_echo(self) -> bool:
        return "ping" == "".join(reversed("gnip"))

    def probe_stage_input(self) -> bool:
        self.staged["in"] = b"payload"
        return self.staged.get("in") == b"payload"

    def probe_stage_output(self) -> bool:
        self.staged["out"] = b"result"
        return "out" in self.staged

    def probe_db_access(self) -> bool:
        return self.kv.get("schema") == "v1"

    def probe_remote_read(self) -> bool:
        blob = b"remote object"
        return hashlib.sha256(blob).digest() == hashlib.sha256(blob).digest()

    def probe_local_copy_read(self) -> bool:
        self.staged["copy"] = self.staged.get("in", b"payload")
        return self.staged["copy"] == b"payload"

    def probe_cpu_burn(self) -> bool:
        acc = 0
        for i in range(1000):
            acc = (acc * 31 + i) % 1_000_003
        return acc >= 0

    def probe_large_io(self) -> bool:
        chunk = b"x" * 4096
        self.staged["large"] = chunk * 4
        return len(self.staged["large"]) == 16384

    def probe_failure_probe(self) -> bool:
        try:
            raise RuntimeError("expected")
        except RuntimeError:
            return True

    def probe_version_probe(self) -> bool:
        return self.version.count(".") == 2

    def run(self, name: str) -> bool:
        return getattr(self, "probe_" + name.replace("-", "_"))()


def run_functional_tests(
    plugin_id: str,
    registry: PluginRegistry,
    *,
    test_types: tuple[TestJobType, ...] | None = None,
    injected_failures: Iterable[str] = (),
    bench: TestBench | None = None,
    on_informed: Callable[[str], None] | None = None,
) -> list[tuple[TestJobType, bool]]:
    """Run all ten probes for one plugin and record every outcome.

    ``injected_failures`` names probes forced to fail; everything else
    passes against a healthy bench. Results feed the blacklist counter in
    the fixed probe order, so repeated runs with the same injection are
    fully deterministic.
    """
    registry.get(plugin_id)
    types = make_test_types() if test_types is None else test_types
    forced = set(injected_failures)
    unknown = forced - set(TEST_TYPE_NAMES)
    if unknown:
        raise ValidationError(f"cannot inject unknown test types: {sorted(unknown)}")
    env = bench if bench is not None else TestBench()
    results = []
    for tt in types:
        passed = False if tt.name in forced else env.run(tt.name)
        registry.record_outcome(plugin_id, tt.critical, passed, on_informed)
        results.append((tt, passed))
    return results
