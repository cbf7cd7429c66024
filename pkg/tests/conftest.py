import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

# criterion number -> (outcome, detail lines), filled by the acceptance suite
CRITERIA = {}
DETAILS = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        num = int(name.split("_")[2])
        CRITERIA[num] = (report.outcome.upper(), report.duration)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(CRITERIA):
        outcome, secs = CRITERIA[num]
        word = "PASS" if outcome == "PASSED" else "FAIL"
        tr.write_line(f"criterion {num:>2}: {word}  ({secs:.2f} s)")
        for line in DETAILS.get(num, []):
            tr.write_line(f"    {line}")


@pytest.fixture
def detail(request):
    """Append report lines for the running acceptance criterion."""
    num = int(request.node.name.split("_")[2])
    DETAILS.setdefault(num, [])
    return DETAILS[num].append
