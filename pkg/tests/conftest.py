import numpy as np
import pytest

_criteria: dict[str, list[tuple[str, str]]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    outcome = "PASS" if call.excinfo is None else "FAIL"
    _criteria.setdefault(str(marker.args[0]), []).append((item.name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda s: (int(s.rstrip("abcdefgh")), s)):
        results = _criteria[key]
        verdict = "PASS" if all(o == "PASS" for _, o in results) else "FAIL"
        names = ", ".join(f"{n}={o}" for n, o in results)
        terminalreporter.write_line(f"criterion {key}: {verdict}  ({names})")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
