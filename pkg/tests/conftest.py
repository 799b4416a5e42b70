import numpy as np
import pytest

from gnlstab.waves import ProblemParams, SolverConfig, constant_wave, solve_wave
from gnlstab.scan import scan_kappa, verify_hypotheses

TWO_PI = 2.0 * np.pi

# One pass/fail line per acceptance criterion, printed after the run so the
# lines survive pytest's output capture.
ACCEPTANCE_LINES = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number}: {status} — {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record():
    """Callable recording one acceptance-criterion pass/fail line."""
    return record_criterion


@pytest.fixture(scope="session")
def even_wave():
    """Nonconstant even profile, alpha=2, omega=1, L=2*pi, N=128."""
    return solve_wave(
        ProblemParams(alpha=2.0, omega=1.0, period=TWO_PI, tau=12.0, parity="even")
    )


@pytest.fixture(scope="session")
def odd_wave():
    """Sign-changing odd profile, alpha=2, omega=4, L=2*pi, N=128."""
    return solve_wave(
        ProblemParams(alpha=2.0, omega=4.0, period=TWO_PI, tau=40.0, parity="odd")
    )


@pytest.fixture(scope="session")
def const_wave():
    return constant_wave(2.0, 1.0, TWO_PI, 64)


@pytest.fixture(scope="session")
def even_scan(even_wave):
    return scan_kappa(even_wave, 0.05, 1.8, 60)


@pytest.fixture(scope="session")
def odd_scan(odd_wave):
    return scan_kappa(odd_wave, 0.05, 4.0, 60)


@pytest.fixture(scope="session")
def even_hypotheses(even_wave):
    return verify_hypotheses(even_wave)


@pytest.fixture(scope="session")
def odd_hypotheses(odd_wave):
    return verify_hypotheses(odd_wave)


@pytest.fixture(scope="session")
def solver_config():
    return SolverConfig()
