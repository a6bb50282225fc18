"""Event-loop scheduler driving jobs through the step pipeline.

Time is a simulated millisecond clock: every action is an event on a heap,
so runs are fully deterministic for a given config and submission order.
A thin wall-clock driver (service layer) advances the same loop when the
scheduler serves live traffic.
"""

from __future__ import annotations

import heapq
import itertools
import random
import threading
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from ..errors import NotFoundError, RejectedError, TransitionError
from .config import SchedulerConfig
from .metrics import JobRow, MetricsSnapshot, build_snapshot
from .model import Job, JobSpec, Task, advance, slice_job
from .plugins import PluginRegistry


class SimClock:
    def __init__(self, start_ms: float = 0.0):
        self._now = start_ms

    @property
    def now_ms(self) -> float:
        return self._now

    def advance_to(self, t_ms: float) -> None:
        if t_ms < self._now:
            raise ValueError(f"clock cannot move backwards to {t_ms}")
        self._now = t_ms


@dataclass(frozen=True)
class JobEvent:
    """One progress record; seq is 1-based and per job."""

    seq: int
    job_id: str
    state: str
    at_ms: float
    detail: dict = field(default_factory=dict)

    def to_wire(self) -> dict:
        wire = {
            "seq": self.seq,
            "job_id": self.job_id,
            "state": self.state,
            "at_ms": self.at_ms,
        }
        wire.update(self.detail)
        return wire


class _Node:
    __slots__ = ("id", "slots", "running", "queue")

    def __init__(self, node_id: str, slots: int):
        self.id = node_id
        self.slots = slots
        self.running: set[tuple[str, int]] = set()
        self.queue: deque[tuple[str, int]] = deque()

    @property
    def load(self) -> int:
        return len(self.running) + len(self.queue)


@dataclass
class _Accounting:
    submitted_at: float
    terminal_at: float | None = None
    state: str = "Queued"
    step_timings: dict[str, float] = field(default_factory=dict)


class Scheduler:
    """Single event loop owning all job state; public methods are thread-safe."""

    def __init__(
        self,
        config: SchedulerConfig | None = None,
        registry: PluginRegistry | None = None,
        store=None,
        on_informed: Callable[[str], None] | None = None,
    ):
        self.config = config or SchedulerConfig()
        self.registry = registry or PluginRegistry(self.config.blacklist_threshold)
        self.store = store
        self.on_informed = on_informed
        self.clock = SimClock()
        self.lock = threading.RLock()
        self.new_event = threading.Condition(self.lock)
        self.jobs: dict[str, Job] = {}
        self.on_terminal: list[Callable[[Job], None]] = []
        self._heap: list[tuple[float, int, Callable[[], None]]] = []
        self._seq = itertools.count()
        self._job_seq = itertools.count(1)
        self._events: dict[str, list[JobEvent]] = {}
        self._rows: dict[str, _Accounting] = {}
        self._outputs: dict[str, dict[str, bytes]] = {}
        self._exec_started: dict[str, float] = {}
        self._storage_latencies: list[float] = []
        self._bytes_moved = 0.0
        self._rng = random.Random(self.config.fault_seed)
        self._nodes = [
            _Node(f"node-{i:02d}", self.config.node_slots)
            for i in range(self.config.node_count)
        ]
        self.counters = {"submitted": 0, "completed": 0, "failed": 0, "cancelled": 0}

    # -- public API ----------------------------------------------------------

    def submit(self, spec: JobSpec) -> str:
        with self.lock:
            record = self.registry.get(spec.plugin_id)
            if not record.accepts_user_jobs:
                raise RejectedError(f"plugin blacklisted: {spec.plugin_id}")
            job_id = f"j{next(self._job_seq):08d}"
            now = self.clock.now_ms
            job = Job(id=job_id, spec=spec, created_at=now, updated_at=now)
            self.jobs[job_id] = job
            self._rows[job_id] = _Accounting(submitted_at=now)
            self.counters["submitted"] += 1
            self._events[job_id] = []
            self._emit(job_id, "Queued", {})
            self._schedule(1, lambda: self._to_slicing(job_id))
            return job_id

    def cancel(self, job_id: str) -> Job:
        with self.lock:
            job = self.get_job(job_id)
            if job.terminal:
                raise TransitionError(f"job {job_id} is already {job.state}")
            job = advance(job, "Cancel", at=self.clock.now_ms)
            self.jobs[job_id] = job
            self._purge_queued(job_id)
            self._finish_terminal(job, {"reason": "cancelled by user"})
            return job

    def get_job(self, job_id: str) -> Job:
        with self.lock:
            job = self.jobs.get(job_id)
            if job is None:
                raise NotFoundError(f"unknown job {job_id!r}")
            return job

    def job_events(self, job_id: str, after_seq: int = 0) -> list[JobEvent]:
        with self.lock:
            self.get_job(job_id)
            return [e for e in self._events[job_id] if e.seq > after_seq]

    def wait_events(
        self, job_id: str, after_seq: int, timeout_s: float
    ) -> list[JobEvent]:
        """Block until the job has events past after_seq (or timeout)."""
        with self.new_event:
            events = self.job_events(job_id, after_seq)
            if events:
                return events
            self.new_event.wait(timeout_s)
            return self.job_events(job_id, after_seq)

    def output_bytes(self, job_id: str, name: str) -> bytes:
        with self.lock:
            outputs = self._outputs.get(job_id)
            if outputs is None or name not in outputs:
                raise NotFoundError(f"no output {name!r} for job {job_id}")
            return outputs[name]

    def run_plugin_tests(self, plugin_id: str, injected_failures=None):
        """Run the functional test battery for one plugin under this config."""
        from .testing import make_test_types, run_functional_tests

        with self.lock:
            if injected_failures is None:
                injected_failures = self.config.injected_test_failures.get(
                    plugin_id, ()
                )
            return run_functional_tests(
                plugin_id,
                self.registry,
                test_types=make_test_types(self.config.critical_tests),
                injected_failures=injected_failures,
                on_informed=self.on_informed,
            )

    def in_flight(self) -> int:
        with self.lock:
            return sum(1 for job in self.jobs.values() if not job.terminal)

    def conservation(self) -> dict:
        """Submitted = terminal + in-flight; exact at any instant."""
        with self.lock:
            c = dict(self.counters)
            c["in_flight"] = self.in_flight()
            c["balanced"] = (
                c["submitted"]
                == c["completed"] + c["failed"] + c["cancelled"] + c["in_flight"]
            )
            c["tracked"] = len(self.jobs) == c["submitted"]
            return c

    def metrics(self, window: tuple[float, float] | None = None) -> MetricsSnapshot:
        with self.lock:
            if window is None:
                window = (0.0, self.clock.now_ms)
            rows = [
                JobRow(a.submitted_at, a.terminal_at, a.state, a.step_timings)
                for a in self._rows.values()
            ]
            return build_snapshot(
                window, rows, list(self._storage_latencies), self._bytes_moved
            )

    # -- event loop ----------------------------------------------------------

    def run_until(self, t_ms: float) -> int:
        """Process every event due at or before t_ms; returns events handled."""
        handled = 0
        with self.lock:
            while self._heap and self._heap[0][0] <= t_ms:
                at, _, fn = heapq.heappop(self._heap)
                self.clock.advance_to(at)
                fn()
                handled += 1
            if t_ms > self.clock.now_ms:
                self.clock.advance_to(t_ms)
        return handled

    def run_until_idle(self, limit_ms: float | None = None) -> int:
        handled = 0
        with self.lock:
            while self._heap:
                at = self._heap[0][0]
                if limit_ms is not None and at > limit_ms:
                    break
                at, _, fn = heapq.heappop(self._heap)
                self.clock.advance_to(at)
                fn()
                handled += 1
        return handled

    def pending_events(self) -> int:
        with self.lock:
            return len(self._heap)

    # -- internals (called with the lock held, from the loop) -----------------

    def _schedule(self, delay_ms: float, fn: Callable[[], None]) -> None:
        heapq.heappush(
            self._heap, (self.clock.now_ms + delay_ms, next(self._seq), fn)
        )

    def _emit(self, job_id: str, state: str, detail: dict) -> None:
        log = self._events[job_id]
        log.append(
            JobEvent(
                seq=len(log) + 1,
                job_id=job_id,
                state=state,
                at_ms=self.clock.now_ms,
                detail=detail,
            )
        )
        self.new_event.notify_all()

    def _apply(self, job: Job, event: str, detail: dict | None = None, **kw) -> Job:
        job = advance(job, event, at=self.clock.now_ms, **kw)
        self.jobs[job.id] = job
        self._emit(job.id, job.state, detail or {})
        return job

    def _to_slicing(self, job_id: str) -> None:
        job = self.jobs[job_id]
        if job.terminal:
            return
        job = self._apply(job, "StartSlicing")
        dur = 1 + len(job.spec.input_refs) // 8
        self._schedule(dur, lambda: self._to_staging(job_id, dur))

    def _to_staging(self, job_id: str, slice_dur: float) -> None:
        job = self.jobs[job_id]
        if job.terminal:
            return
        tasks = slice_job(job.spec, self.config.max_tasks, job_id)
        job = self._apply(
            job,
            "SlicingDone",
            {"tasks": len(tasks)},
            timings={"slice": slice_dur},
            tasks=tasks,
        )
        prep = 2.0 + len(tasks)
        upload = 1.0 + len(job.spec.input_refs) // 4
        for task in tasks:
            self._storage_sample(len(task.input_slice) * self.config.bytes_per_input)
        self._schedule(
            prep + upload, lambda: self._to_running(job_id, prep, upload)
        )

    def _to_running(self, job_id: str, prep: float, upload: float) -> None:
        job = self.jobs[job_id]
        if job.terminal:
            return
        job = self._apply(
            job,
            "StagingDone",
            {},
            timings={"prepare_input": prep, "upload": upload},
        )
        self._exec_started[job_id] = self.clock.now_ms
        for idx in range(len(job.tasks)):
            node = min(self._nodes, key=lambda n: (n.load, n.id))
            node.queue.append((job_id, idx))
            self.jobs[job_id] = self._with_task(
                self.jobs[job_id], idx, node_id=node.id
            )
        for node in self._nodes:
            self._pump(node)

    def _pump(self, node: _Node) -> None:
        while node.queue and len(node.running) < node.slots:
            job_id, idx = node.queue.popleft()
            job = self.jobs[job_id]
            if job.terminal:
                continue
            self.jobs[job_id] = self._with_task(job, idx, state="Running")
            node.running.add((job_id, idx))
            task = self.jobs[job_id].tasks[idx]
            dur = (
                self.config.exec_ms_base
                + self._rng.randint(0, self.config.exec_ms_jitter)
                + len(task.input_slice)
            )
            fails = self._rng.random() < self.config.task_failure_rate
            # bind loop variables now; the lambda outlives this iteration
            self._schedule(
                dur,
                lambda nid=node.id, j=job_id, i=idx, f=fails: self._task_done(
                    nid, j, i, f
                ),
            )

    def _task_done(self, node_id: str, job_id: str, idx: int, failed: bool) -> None:
        node = next(n for n in self._nodes if n.id == node_id)
        node.running.discard((job_id, idx))
        job = self.jobs[job_id]
        if not job.terminal:
            job = self._with_task(job, idx, state="Failed" if failed else "Succeeded")
            self.jobs[job_id] = job
            if failed:
                exec_ms = self.clock.now_ms - self._exec_started.pop(job_id)
                job = self._apply(
                    job,
                    "TaskFailedFatally",
                    {"reason": f"task {job.tasks[idx].id} failed"},
                    timings={"execute": exec_ms},
                )
                self._purge_queued(job_id)
                self._finish_terminal(job, {})
            elif all(t.state == "Succeeded" for t in job.tasks):
                self._all_tasks_done(job)
        self._pump(node)

    def _all_tasks_done(self, job: Job) -> None:
        exec_ms = self.clock.now_ms - self._exec_started.pop(job.id)
        try:
            outputs = self._run_plugin(job)
        except Exception as exc:
            job = self._apply(
                job,
                "TaskFailedFatally",
                {"reason": f"plugin error: {exc}"},
                timings={"execute": exec_ms},
            )
            self._finish_terminal(job, {})
            return
        links = self._store_outputs(job, outputs)
        store_ms = 1.0 + len(job.tasks)
        job = self._apply(
            job,
            "AllTasksSucceeded",
            {},
            timings={"execute": exec_ms, "store_output": store_ms},
        )
        retrieve = 2.0 + len(links)
        self._schedule(
            retrieve, lambda: self._to_done(job.id, retrieve, tuple(links))
        )

    def _to_done(self, job_id: str, retrieve: float, links: tuple[str, ...]) -> None:
        job = self.jobs[job_id]
        if job.terminal:
            return
        job = self._apply(
            job,
            "OutputsRetrieved",
            {"output_links": list(links)},
            timings={"retrieve": retrieve},
            output_links=links,
        )
        self._finish_terminal(job, {})

    def _run_plugin(self, job: Job) -> dict[str, bytes]:
        behavior = self.registry.behavior(job.spec.plugin_id)
        produced: dict[str, bytes] = {}
        multi = len(job.tasks) > 1
        for task in job.tasks:
            out = behavior(task.input_slice, dict(job.spec.params))
            for name, text in out.items():
                key = f"{task.id.rsplit('/', 1)[1]}/{name}" if multi else name
                produced[key] = text.encode("utf-8")
        if job.spec.output_names:
            renamed: dict[str, bytes] = {}
            names = iter(job.spec.output_names)
            for key in sorted(produced):
                renamed[next(names, key)] = produced[key]
            produced = renamed
        return produced

    def _store_outputs(self, job: Job, outputs: dict[str, bytes]) -> list[str]:
        self._outputs[job.id] = outputs
        links = []
        for name in sorted(outputs):
            data = outputs[name]
            self._storage_sample(len(data))
            if self.store is not None:
                doc_id = self.store.ingest(
                    data,
                    {
                        "uri": f"urn:fdc:output:{job.id}:{name}",
                        "title": f"{job.id} {name}",
                        "author": job.spec.user_id,
                        "date": "",
                        "media_type": "text/plain",
                    },
                )
                links.append(f"/documents/{doc_id}")
            else:
                links.append(f"fdc://jobs/{job.id}/outputs/{name}")
        return links

    def _storage_sample(self, size: int) -> None:
        latency = self.config.storage_open_ms + size / 100_000.0
        self._storage_latencies.append(latency)
        self._bytes_moved += size

    def _with_task(self, job: Job, idx: int, **changes) -> Job:
        tasks = list(job.tasks)
        tasks[idx] = replace(tasks[idx], **changes)
        job = replace(job, tasks=tuple(tasks))
        self.jobs[job.id] = job
        return job

    def _purge_queued(self, job_id: str) -> None:
        for node in self._nodes:
            if node.queue:
                node.queue = deque(
                    entry for entry in node.queue if entry[0] != job_id
                )

    def _finish_terminal(self, job: Job, detail: dict) -> None:
        row = self._rows[job.id]
        row.terminal_at = self.clock.now_ms
        row.state = job.state
        row.step_timings = dict(job.step_timings)
        self._exec_started.pop(job.id, None)
        key = {"Done": "completed", "Failed": "failed", "Cancelled": "cancelled"}
        self.counters[key[job.state]] += 1
        for hook in list(self.on_terminal):
            hook(job)


class RealTimeDriver:
    """Advances the simulated loop in step with the wall clock.

    Used when the scheduler serves live traffic; simulation-time tests
    drive run_until directly instead.
    """

    def __init__(self, scheduler: Scheduler, tick_s: float = 0.005, speed: float = 1.0):
        import time

        self.scheduler = scheduler
        self.tick_s = tick_s
        self.speed = speed
        self._time = time
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join()
        self._thread = None

    def _run(self) -> None:
        origin_wall = self._time.monotonic()
        origin_sim = self.scheduler.clock.now_ms
        while not self._stop.wait(self.tick_s):
            elapsed_ms = (self._time.monotonic() - origin_wall) * 1000.0 * self.speed
            self.scheduler.run_until(origin_sim + elapsed_ms)


# -- load generation ---------------------------------------------------------


@dataclass
class LoadgenReport:
    jobs_target: int
    duration_ms: float
    submitted: int
    completed: int
    failed: int
    cancelled: int
    samples: list[dict]
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "jobs_target": self.jobs_target,
            "duration_ms": self.duration_ms,
            "submitted": self.submitted,
            "completed": self.completed,
            "failed": self.failed,
            "cancelled": self.cancelled,
            "samples": len(self.samples),
            "violations": self.violations,
            "ok": self.ok,
        }


def _noop_behavior(inputs: tuple[str, ...], params: dict[str, str]) -> dict[str, str]:
    return {"out.txt": f"processed {len(inputs)} inputs"}


def run_loadgen(
    scheduler: Scheduler,
    *,
    jobs: int = 1000,
    duration_ms: float = 120_000.0,
    sample_every_ms: float = 1000.0,
    plugin_id: str = "noop",
    inputs_per_job: int = 1,
    user_id: str = "loadgen",
) -> LoadgenReport:
    """Hold ``jobs`` jobs in flight for the duration, checking conservation.

    Every terminal event triggers an immediate replacement submission, so
    the in-flight count never drops below the target while the run lasts.
    Conservation (submitted = terminal + in-flight, no lost or duplicated
    ids) is asserted at every sample point.
    """
    if plugin_id not in scheduler.registry.ids():
        scheduler.registry.register(plugin_id, _noop_behavior)

    start = scheduler.clock.now_ms
    end = start + duration_ms
    serial = itertools.count()
    samples: list[dict] = []
    violations: list[str] = []

    def make_spec() -> JobSpec:
        n = next(serial)
        return JobSpec(
            plugin_id=plugin_id,
            input_refs=tuple(f"ref-{n}-{i}" for i in range(inputs_per_job)),
            user_id=user_id,
        )

    def refill(job: Job) -> None:
        if scheduler.clock.now_ms < end:
            scheduler.submit(make_spec())

    def sample() -> None:
        snap = scheduler.conservation()
        snap["at_ms"] = scheduler.clock.now_ms
        samples.append(snap)
        if not snap["balanced"]:
            violations.append(f"conservation broken at {snap['at_ms']}: {snap}")
        if not snap["tracked"]:
            violations.append(f"job ledger mismatch at {snap['at_ms']}")
        if snap["in_flight"] < jobs:
            violations.append(
                f"in-flight fell to {snap['in_flight']} at {snap['at_ms']}"
            )

    with scheduler.lock:
        scheduler.on_terminal.append(refill)
        for _ in range(jobs):
            scheduler.submit(make_spec())
        t = start + sample_every_ms
        while t <= end:
            scheduler._schedule(t - scheduler.clock.now_ms, sample)
            t += sample_every_ms
        scheduler.run_until(end)
        scheduler.on_terminal.remove(refill)
        counters = dict(scheduler.counters)

    return LoadgenReport(
        jobs_target=jobs,
        duration_ms=duration_ms,
        submitted=counters["submitted"],
        completed=counters["completed"],
        failed=counters["failed"],
        cancelled=counters["cancelled"],
        samples=samples,
        violations=violations,
    )
