import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
