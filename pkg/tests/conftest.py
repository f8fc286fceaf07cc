import numpy as np
import pytest
from hypothesis import settings

from opo_sidebands import reference_config
from opo_sidebands.steady_state import mean_fields

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def ref_cfg():
    return reference_config()


@pytest.fixture(scope="session")
def bare_cfg(ref_cfg):
    """Reference operating point without phonons or detection losses."""
    return ref_cfg.replace(phonons_enabled=False, detection_enabled=False)


@pytest.fixture(scope="session")
def ref_fields(ref_cfg):
    return mean_fields(ref_cfg.operating_point(), ref_cfg.losses())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_KEY = pytest.StashKey[list]()
_SESSION_START = pytest.StashKey[float]()


def pytest_configure(config):
    import time

    config.stash[ACCEPTANCE_KEY] = []
    config.stash[_SESSION_START] = time.perf_counter()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """List of ``(number, title, passed, detail)`` filled by the acceptance tests."""
    return request.config.stash[ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import time

    log = config.stash.get(ACCEPTANCE_KEY, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(log):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}")
    elapsed = time.perf_counter() - config.stash[_SESSION_START]
    verdict = "PASS" if elapsed < 120 else "FAIL"
    terminalreporter.write_line(f"[{verdict}] session wall-clock {elapsed:.1f} s (limit 120 s)")
