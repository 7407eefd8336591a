import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dqpt.model import BlochDispersion
from dqpt.thermal import Temperature

settings.register_profile(
    "suite",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def ssh_double_quench():
    """The SSH double-quench benchmark: h2 = h0, topology changes at each quench."""
    h0 = BlochDispersion.ssh(1.0, 0.8)
    h1 = BlochDispersion.ssh(0.4, 0.8)
    h2 = BlochDispersion.ssh(1.0, 0.8)
    return h0, h1, h2, Temperature.from_temperature(3.0)


@pytest.fixture
def kitaev_double_quench():
    """The Kitaev double-quench benchmark with two critical momenta."""
    h0 = BlochDispersion.kitaev(1.0, 2.0, 2.0)
    h1 = BlochDispersion.kitaev(1.0, 0.2, 5.0)
    h2 = BlochDispersion.kitaev(1.0, 2.0, 2.0)
    return h0, h1, h2, Temperature.from_temperature(5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::test_criterion" in nodeid:
                name = nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if not lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status in sorted(lines):
        terminalreporter.write_line(f"{status}  {name}")
