from .battery import (
    DEFAULT_TESTS,
    TEST_FAMILIES,
    BatteryReport,
    TestOutcome,
    judge,
    proportion_interval,
    run_battery,
)
from .export import export_raw, import_raw
from .scatter import ScatterSet, scatter_points
from .stats import block_frequency_test, cusum_test, monobit_test, runs_test, serial_test

__all__ = [
    "DEFAULT_TESTS",
    "TEST_FAMILIES",
    "BatteryReport",
    "TestOutcome",
    "judge",
    "proportion_interval",
    "run_battery",
    "export_raw",
    "import_raw",
    "ScatterSet",
    "scatter_points",
    "monobit_test",
    "block_frequency_test",
    "runs_test",
    "cusum_test",
    "serial_test",
]
