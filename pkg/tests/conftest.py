import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lpbounds.codes import Code, build_pg2q_code

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def fano():
    return build_pg2q_code(1)


@pytest.fixture
def single_check():
    return Code(3, (np.array([0, 1, 2]),))


def brute_nullspace(H):
    """Every x in {0,1}^n with Hx = 0, by direct enumeration."""
    H = np.asarray(H)
    n = H.shape[1]
    out = []
    for v in range(1 << n):
        x = np.array([(v >> i) & 1 for i in range(n)])
        if not ((H @ x) % 2).any():
            out.append(tuple(x))
    return sorted(out)


_CRITERIA: dict[tuple[int, str], str] = {}


def record_criterion(number: int, label: str, passed: bool, seconds: float, detail: str = "") -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {label} ({seconds:.1f} s)"
    _CRITERIA[number, label] = line + (f" -- {detail}" if detail else "")
    print(_CRITERIA[number, label])


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
