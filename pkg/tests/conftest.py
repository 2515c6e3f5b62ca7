import numpy as np
import pytest

import cyclepulse as cp
from cyclepulse import profiles

# (name, value, threshold, ok) tuples collected by the acceptance module
ACCEPTANCE_LINES = []


def record_criterion(name, value, threshold, ok=None):
    ok = bool(value <= threshold) if ok is None else bool(ok)
    ACCEPTANCE_LINES.append((name, value, threshold, ok))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (threshold {threshold:g})")
    return ok


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, value, threshold, ok in ACCEPTANCE_LINES:
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (threshold {threshold:g})")


class Case:
    """One solved configuration with its reconstruction, shared across tests."""

    def __init__(self, amp=0.1, n=128, dt=1e-3, t_end=0.5, snaps=11,
                 augmented=False):
        self.init = cp.initial_data(profiles.sine(amp), n)
        self.s0 = cp.build_initial_lagrangian(self.init, n, augmented=augmented)
        self.cfg = cp.RunConfig(
            n=n, dt=dt, t_end=t_end, augmented=augmented,
            output_times=tuple(np.linspace(0.0, t_end, snaps)))
        self.traj = cp.integrate(self.s0, self.cfg)
        self.etraj = [cp.reconstruct(s) for s in self.traj.states]


@pytest.fixture(scope="session")
def small_case():
    return Case()
