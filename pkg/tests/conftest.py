import os

import pytest

from acceptance_log import RESULTS, summary_lines


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run long reproductions")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow") or os.environ.get("LEDGERFORGE_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="slow; enable with --runslow or LEDGERFORGE_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in summary_lines():
        terminalreporter.write_line(line)
