"""Shared pytest configuration."""
import logging

import pytest

QUIET_LOGGERS = ("numexpr", "concurrent.futures", "asyncio")

for name in QUIET_LOGGERS:
    logging.getLogger(name).setLevel(logging.WARNING)


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False,
        help="Run the slow Monte Carlo acceptance tests.")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: long Monte Carlo check, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
