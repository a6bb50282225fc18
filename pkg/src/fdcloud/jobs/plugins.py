"""Plugin records, the blacklist counter rules, and built-in behaviors.

A plugin that fails K critical functional tests in a row stops receiving
user jobs. Test jobs keep flowing; a later critical pass marks the plugin
eligible for reset and notifies its owner, but bringing it back online is
an explicit operation.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, replace
from typing import Callable

from ..errors import NotFoundError, RejectedError, ValidationError

PLUGIN_STATUSES = ("Online", "Blacklisted", "EligibleForReset")

# behavior: (inputs for one task, params) -> {output name: text}
Behavior = Callable[[tuple[str, ...], dict[str, str]], dict[str, str]]


@dataclass(frozen=True)
class PluginRecord:
    id: str
    status: str = "Online"
    consecutive_critical_failures: int = 0
    threshold: int = 3

    def __post_init__(self) -> None:
        if self.status not in PLUGIN_STATUSES:
            raise ValidationError(f"unknown plugin status {self.status!r}")
        if self.threshold < 1:
            raise ValidationError("blacklist threshold must be >= 1")
        if self.consecutive_critical_failures < 0:
            raise ValidationError("failure counter cannot be negative")

    @property
    def accepts_user_jobs(self) -> bool:
        return self.status == "Online"


def record_outcome(
    record: PluginRecord,
    critical: bool,
    passed: bool,
    on_informed: Callable[[str], None] | None = None,
) -> PluginRecord:
    """Fold one functional-test outcome into the plugin record.

    Non-critical outcomes change nothing. A critical pass zeroes the
    failure counter and, when it is the first pass after a blacklisting,
    flips the plugin to EligibleForReset and fires ``on_informed``. A
    critical failure bumps the counter; hitting the threshold blacklists,
    and any critical failure while EligibleForReset re-blacklists.
    """
    if not critical:
        return record
    if passed:
        status = record.status
        if status == "Blacklisted":
            status = "EligibleForReset"
            if on_informed is not None:
                on_informed(record.id)
        return replace(record, status=status, consecutive_critical_failures=0)
    count = record.consecutive_critical_failures + 1
    status = record.status
    if status == "EligibleForReset":
        status = "Blacklisted"
    elif status == "Online" and count >= record.threshold:
        status = "Blacklisted"
    return replace(record, status=status, consecutive_critical_failures=count)


def reset_plugin(record: PluginRecord, force: bool = False) -> PluginRecord:
    """Bring a plugin back online; only eligible plugins reset without force."""
    if not force and record.status != "EligibleForReset":
        raise RejectedError(
            f"plugin {record.id} is {record.status}, not eligible for reset"
        )
    return replace(record, status="Online", consecutive_critical_failures=0)


class PluginRegistry:
    """Mutable home of plugin records and their executable behaviors."""

    def __init__(self, threshold: int = 3):
        self.threshold = threshold
        self._records: dict[str, PluginRecord] = {}
        self._behaviors: dict[str, Behavior] = {}

    def register(
        self, plugin_id: str, behavior: Behavior, threshold: int | None = None
    ) -> PluginRecord:
        record = PluginRecord(
            id=plugin_id,
            threshold=self.threshold if threshold is None else threshold,
        )
        self._records[plugin_id] = record
        self._behaviors[plugin_id] = behavior
        return record

    def get(self, plugin_id: str) -> PluginRecord:
        record = self._records.get(plugin_id)
        if record is None:
            raise NotFoundError(f"unknown plugin {plugin_id!r}")
        return record

    def behavior(self, plugin_id: str) -> Behavior:
        self.get(plugin_id)
        return self._behaviors[plugin_id]

    def ids(self) -> list[str]:
        return sorted(self._records)

    def all_records(self) -> list[PluginRecord]:
        return [self._records[k] for k in sorted(self._records)]

    def record_outcome(
        self,
        plugin_id: str,
        critical: bool,
        passed: bool,
        on_informed: Callable[[str], None] | None = None,
    ) -> PluginRecord:
        updated = record_outcome(self.get(plugin_id), critical, passed, on_informed)
        self._records[plugin_id] = updated
        return updated

    def reset(self, plugin_id: str, force: bool = False) -> PluginRecord:
        updated = reset_plugin(self.get(plugin_id), force)
        self._records[plugin_id] = updated
        return updated


# -- built-in behaviors ------------------------------------------------------


def word_count_behavior(fetch_text: Callable[[str], str]) -> Behavior:
    """Count alphanumeric tokens across the task's inputs."""
    from ..docstore.index import tokenize

    def run(inputs: tuple[str, ...], params: dict[str, str]) -> dict[str, str]:
        counts: Counter[str] = Counter()
        for ref in inputs:
            counts.update(tokenize(fetch_text(ref)))
        top = int(params.get("top", "10"))
        rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
        return {"counts.json": json.dumps(dict(rows), sort_keys=True)}

    return run


def tag_statistics_behavior(fetch_tags: Callable[[str], list[str]]) -> Behavior:
    def run(inputs: tuple[str, ...], params: dict[str, str]) -> dict[str, str]:
        counts: Counter[str] = Counter()
        for ref in inputs:
            counts.update(fetch_tags(ref))
        return {
            "tag-stats.json": json.dumps(
                {"documents": len(inputs), "tags": dict(sorted(counts.items()))},
                sort_keys=True,
            )
        }

    return run


def forecast_stub_behavior() -> Behavior:
    """Deterministic stand-in for a long-running forecasting application."""

    def run(inputs: tuple[str, ...], params: dict[str, str]) -> dict[str, str]:
        horizon = int(params.get("horizon", "3"))
        rows = []
        for ref in sorted(inputs):
            digest = hashlib.sha256(ref.encode("utf-8")).digest()
            series = [round(50 + digest[i % 32] / 4, 2) for i in range(horizon)]
            rows.append({"input": ref, "forecast": series})
        return {"forecast.json": json.dumps(rows, sort_keys=True)}

    return run


def builtin_plugins(
    fetch_text: Callable[[str], str],
    fetch_tags: Callable[[str], list[str]],
) -> dict[str, Behavior]:
    return {
        "word-count": word_count_behavior(fetch_text),
        "tag-statistics": tag_statistics_behavior(fetch_tags),
        "forecast-stub": forecast_stub_behavior(),
    }
