import pytest

from balancedgl.config import Config


def pytest_addoption(parser):
    parser.addoption(
        "--slow", action="store_true", default=False, help="run acceptance-scale tests"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale test, skipped by default")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow") or _slow_from_environment():
        return
    skip = pytest.mark.skip(reason="needs --slow or BGL_SLOW_TESTS=true")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def _slow_from_environment():
    return Config()("SLOW_TESTS", cast=bool, default=False)
