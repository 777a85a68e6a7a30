import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def hand_eig2(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a 2x2 Hermitian matrix from the quadratic formula."""
    tr = (a[0, 0] + a[1, 1]).real
    det = (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]).real
    disc = np.sqrt(max(tr * tr / 4 - det, 0.0))
    return np.array([tr / 2 - disc, tr / 2 + disc])


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, passed: bool, detail: str, seconds: float, budget: float) -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {criterion}: {detail} ({seconds:.2f} s, budget {budget:g} s)")
    print(ACCEPTANCE_LINES[-1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
