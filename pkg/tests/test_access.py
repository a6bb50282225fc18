from __future__ import annotations

import hashlib
import random

import pytest

from fdcloud.errors import NotFoundError, ValidationError
from fdcloud.jobs import AccessWorkload, compare_access_strategies, each_once


def make_files(count, rng=None, size=2048):
    rng = rng or random.Random(1)
    return {
        f"f{i:03d}": rng.randbytes(rng.randint(size // 2, size)) for i in range(count)
    }


class TestWorkload:
    def test_needs_files_and_reads(self):
        with pytest.raises(ValidationError):
            AccessWorkload(file_ids=(), reads=("a",))
        with pytest.raises(ValidationError):
            AccessWorkload(file_ids=("a",), reads=())

    def test_reads_must_name_known_files(self):
        with pytest.raises(ValidationError):
            AccessWorkload(file_ids=("a",), reads=("a", "ghost"))

    def test_each_once_expands_repeats(self):
        workload = each_once(("a", "b"), repeats=3)
        assert workload.reads == ("a", "b", "a", "b", "a", "b")


class TestComparison:
    def test_both_strategies_deliver_identical_bytes(self):
        files = make_files(20)
        workload = each_once(tuple(files), repeats=2)
        report = compare_access_strategies(files.__getitem__, workload)
        assert report["digests_match"] is True
        expected = hashlib.sha256()
        for fid in workload.reads:
            expected.update(files[fid])
        for strategy in ("local-copy", "direct-read"):
            assert report["strategies"][strategy]["digest"] == expected.hexdigest()

    def test_injected_latency_arithmetic_is_exact(self):
        files = make_files(10)
        workload = each_once(tuple(files), repeats=3)  # 30 reads over 10 files
        report = compare_access_strategies(
            files.__getitem__, workload, per_open_latency_ms=5.0
        )
        # direct: one open per read; local-copy: one open per file
        assert report["strategies"]["direct-read"]["injected_latency_ms"] == 30 * 5.0
        assert report["strategies"]["local-copy"]["injected_latency_ms"] == 10 * 5.0

    def test_wall_clock_arithmetic_is_exact(self):
        data = b"z" * 10_000
        report = compare_access_strategies(
            lambda fid: data,
            each_once(("only",), repeats=4),
            per_open_latency_ms=5.0,
            bandwidth_bytes_per_ms=100_000.0,
        )
        transfer = 10_000 / 100_000.0
        direct = report["strategies"]["direct-read"]
        local = report["strategies"]["local-copy"]
        assert direct["wall_ms"] == pytest.approx(4 * (5.0 + transfer))
        assert local["wall_ms"] == pytest.approx((5.0 + transfer) + 4 * transfer / 10.0)
        assert direct["bytes_read"] == local["bytes_read"] == 40_000

    def test_repeated_reads_favor_the_local_copy(self):
        files = make_files(15)
        workload = each_once(tuple(files), repeats=5)
        report = compare_access_strategies(files.__getitem__, workload)
        assert (
            report["strategies"]["local-copy"]["wall_ms"]
            < report["strategies"]["direct-read"]["wall_ms"]
        )

    def test_single_pass_favors_direct_read(self):
        # copy-then-read pays the remote cost plus a local pass
        files = make_files(8)
        workload = each_once(tuple(files), repeats=1)
        report = compare_access_strategies(files.__getitem__, workload)
        assert (
            report["strategies"]["direct-read"]["wall_ms"]
            < report["strategies"]["local-copy"]["wall_ms"]
        )

    def test_report_structure(self):
        files = make_files(3)
        report = compare_access_strategies(files.__getitem__, each_once(tuple(files)))
        assert report["files"] == 3
        assert report["reads"] == 3
        for strategy in ("local-copy", "direct-read"):
            entry = report["strategies"][strategy]
            assert set(entry) == {
                "wall_ms",
                "injected_latency_ms",
                "storage_latency_ms",
                "throughput_bytes_per_s",
                "bytes_read",
                "digest",
            }
            assert set(entry["storage_latency_ms"]) == {"p50", "p95"}
            assert entry["throughput_bytes_per_s"] > 0

    def test_fetch_errors_propagate(self):
        def fetch(fid):
            raise NotFoundError(fid)

        with pytest.raises(NotFoundError):
            compare_access_strategies(fetch, each_once(("a",)))

    def test_fetch_call_counts_per_strategy(self):
        calls = []
        files = make_files(4)

        def fetch(fid):
            calls.append(fid)
            return files[fid]

        compare_access_strategies(fetch, each_once(tuple(files), repeats=3))
        # local-copy fetches each file once (4), direct fetches per read (12)
        assert len(calls) == 4 + 12
