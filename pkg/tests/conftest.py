import warnings

import pytest

from eomdet.config import build_pulse, build_system, parse_config

from helpers import CONFIG_DIR


@pytest.fixture(scope="session")
def ref_config():
    return parse_config((CONFIG_DIR / "reference.ini").read_text())


@pytest.fixture(scope="session")
def ref(ref_config):
    return build_system(ref_config)


@pytest.fixture(scope="session")
def ref_pulse(ref_config, ref):
    pulse, _ = build_pulse(ref_config, ref)
    return pulse


@pytest.fixture(autouse=True)
def _quiet_sideband():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
