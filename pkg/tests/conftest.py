import contextlib
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Context manager that records one PASS/FAIL line per acceptance criterion."""
    log = request.config.stash.setdefault(_ACCEPTANCE, [])

    @contextlib.contextmanager
    def criterion(number, title):
        detail = []
        try:
            yield detail
        except BaseException:
            line = f"ACCEPTANCE {number:>2} FAIL  {title}  {'; '.join(detail)}"
            log.append(line)
            print(line)
            raise
        line = f"ACCEPTANCE {number:>2} PASS  {title}  {'; '.join(detail)}"
        log.append(line)
        print(line)

    return criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
