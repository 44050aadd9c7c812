"""Command-line options for the test suite."""

import pytest


def pytest_addoption(parser):
    """Register the --runslow option."""
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="Run tests that need many solves at full resolution.",
    )


def pytest_configure(config):
    """Register the slow marker."""
    config.addinivalue_line("markers", "slow: needs many full-resolution solves")


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless --runslow is given."""
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
