import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

ACCEPTANCE = {}


def pytest_runtest_makereport(item, call):
    crit = item.get_closest_marker("criterion")
    if crit is not None and call.when == "call":
        n = crit.args[0]
        ok = call.excinfo is None
        ACCEPTANCE[n] = ACCEPTANCE.get(n, True) and ok


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ACCEPTANCE[n] else 'FAIL'}")
