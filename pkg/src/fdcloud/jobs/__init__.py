"""Job scheduling: specs, slicing, simulated nodes, plugins, and metrics."""

from .access import AccessWorkload, compare_access_strategies, each_once
from .config import SchedulerConfig, config_from_dict, load_config, save_config
from .metrics import JobRow, MetricsSnapshot, build_snapshot, nearest_rank
from .model import (
    EVENTS,
    JOB_STATES,
    STEPS,
    TASK_STATES,
    TERMINAL_STATES,
    TRANSITIONS,
    Job,
    JobSpec,
    Task,
    advance,
    slice_job,
)
from .plugins import (
    PLUGIN_STATUSES,
    PluginRecord,
    PluginRegistry,
    builtin_plugins,
    record_outcome,
    reset_plugin,
)
from .scheduler import (
    JobEvent,
    LoadgenReport,
    RealTimeDriver,
    Scheduler,
    SimClock,
    run_loadgen,
)
from .testing import (
    DEFAULT_CRITICAL,
    TEST_TYPE_NAMES,
    TestBench,
    TestJobType,
    make_test_types,
    run_functional_tests,
)

__all__ = [
    "AccessWorkload",
    "DEFAULT_CRITICAL",
    "EVENTS",
    "JOB_STATES",
    "Job",
    "JobEvent",
    "JobRow",
    "JobSpec",
    "LoadgenReport",
    "MetricsSnapshot",
    "PLUGIN_STATUSES",
    "PluginRecord",
    "PluginRegistry",
    "RealTimeDriver",
    "STEPS",
    "Scheduler",
    "SchedulerConfig",
    "SimClock",
    "TASK_STATES",
    "TERMINAL_STATES",
    "TEST_TYPE_NAMES",
    "TRANSITIONS",
    "Task",
    "TestBench",
    "TestJobType",
    "advance",
    "build_snapshot",
    "builtin_plugins",
    "compare_access_strategies",
    "config_from_dict",
    "each_once",
    "load_config",
    "make_test_types",
    "nearest_rank",
    "record_outcome",
    "reset_plugin",
    "run_functional_tests",
    "run_loadgen",
    "save_config",
    "slice_job",
]
