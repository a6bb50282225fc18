"""Job domain model: specs, tasks, slicing, and the job state machine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..errors import TransitionError, ValidationError

JOB_STATES = (
    "Queued",
    "Slicing",
    "Staging",
    "Running",
    "Retrieving",
    "Done",
    "Failed",
    "Cancelled",
)
TERMINAL_STATES = frozenset({"Done", "Failed", "Cancelled"})
TASK_STATES = ("Pending", "Running", "Succeeded", "Failed")

# Every pipeline step a completed job must have a duration for.
STEPS = ("slice", "prepare_input", "upload", "execute", "store_output", "retrieve")

_PIPELINE = (
    ("Queued", "StartSlicing", "Slicing"),
    ("Slicing", "SlicingDone", "Staging"),
    ("Staging", "StagingDone", "Running"),
    ("Running", "AllTasksSucceeded", "Retrieving"),
    ("Retrieving", "OutputsRetrieved", "Done"),
)

TRANSITIONS: dict[tuple[str, str], str] = {(s, e): t for s, e, t in _PIPELINE}
for _state in JOB_STATES:
    if _state not in TERMINAL_STATES:
        TRANSITIONS[(_state, "TaskFailedFatally")] = "Failed"
        TRANSITIONS[(_state, "Cancel")] = "Cancelled"

EVENTS = tuple(dict.fromkeys(event for _, event in TRANSITIONS))


@dataclass(frozen=True)
class JobSpec:
    """What the user asked for: a plugin run over a set of input references."""

    plugin_id: str
    params: dict[str, str] = field(default_factory=dict)
    input_refs: tuple[str, ...] = ()
    output_names: tuple[str, ...] = ()
    user_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_refs", tuple(self.input_refs))
        object.__setattr__(self, "output_names", tuple(self.output_names))
        if not self.plugin_id:
            raise ValidationError("job spec needs a plugin id")
        if not self.input_refs:
            raise ValidationError("job spec needs at least one input reference")


@dataclass(frozen=True)
class Task:
    id: str
    job_id: str
    input_slice: tuple[str, ...]
    node_id: str = ""
    state: str = "Pending"

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_slice", tuple(self.input_slice))
        if self.state not in TASK_STATES:
            raise ValidationError(f"unknown task state {self.state!r}")


@dataclass(frozen=True)
class Job:
    id: str
    spec: JobSpec
    state: str = "Queued"
    tasks: tuple[Task, ...] = ()
    step_timings: dict[str, float] = field(default_factory=dict)
    output_links: tuple[str, ...] = ()
    created_at: float = 0.0
    updated_at: float = 0.0

    def __post_init__(self) -> None:
        if self.state not in JOB_STATES:
            raise ValidationError(f"unknown job state {self.state!r}")
        bad = set(self.step_timings) - set(STEPS)
        if bad:
            raise ValidationError(f"unknown step timings: {sorted(bad)}")

    @property
    def terminal(self) -> bool:
        return self.state in TERMINAL_STATES


def slice_job(spec: JobSpec, max_tasks: int, job_id: str = "job") -> tuple[Task, ...]:
    """Partition the spec's inputs into contiguous, balanced task slices.

    The task count is ceil(n / ceil(n / max_tasks)): as many tasks as fit
    under max_tasks once the per-task share is fixed. Slice sizes never
    differ by more than one.
    """
    if max_tasks < 1:
        raise ValidationError(f"max_tasks must be >= 1, got {max_tasks}")
    n = len(spec.input_refs)
    per_task = math.ceil(n / max_tasks)
    count = math.ceil(n / per_task)
    base, extra = divmod(n, count)
    tasks = []
    offset = 0
    for i in range(count):
        size = base + (1 if i < extra else 0)
        tasks.append(
            Task(
                id=f"{job_id}/t{i}",
                job_id=job_id,
                input_slice=spec.input_refs[offset : offset + size],
            )
        )
        offset += size
    return tuple(tasks)


def advance(
    job: Job,
    event: str,
    *,
    at: float | None = None,
    timings: dict[str, float] | None = None,
    tasks: tuple[Task, ...] | None = None,
    output_links: tuple[str, ...] | None = None,
) -> Job:
    """Apply one event to the job, returning the successor state.

    Rejects any (state, event) pair outside the transition table, and
    refuses to mark a job Done unless every task succeeded, every pipeline
    step has a recorded duration, and at least one output link exists.
    """
    target = TRANSITIONS.get((job.state, event))
    if target is None:
        raise TransitionError(
            f"state {job.state!r} does not accept event {event!r}"
        )
    merged = dict(job.step_timings)
    if timings:
        bad = set(timings) - set(STEPS)
        if bad:
            raise ValidationError(f"unknown step timings: {sorted(bad)}")
        merged.update(timings)
    new_tasks = job.tasks if tasks is None else tuple(tasks)
    links = job.output_links if output_links is None else tuple(output_links)
    if target == "Done":
        if not new_tasks or any(t.state != "Succeeded" for t in new_tasks):
            raise TransitionError(f"job {job.id} cannot finish with unfinished tasks")
        if not links:
            raise TransitionError(f"job {job.id} cannot finish without output links")
        missing = [s for s in STEPS if s not in merged]
        if missing:
            raise TransitionError(f"job {job.id} is missing step timings: {missing}")
    return replace(
        job,
        state=target,
        tasks=new_tasks,
        step_timings=merged,
        output_links=links,
        updated_at=job.updated_at if at is None else at,
    )
