import numpy as np
import pytest

from gtheory.data import ResponseCube


def make_cube(scores, label="g"):
    scores = np.asarray(scores, dtype=float)
    n_p, n_i, n_o = scores.shape
    return ResponseCube(label, tuple(str(p) for p in range(1, n_p + 1)),
                        tuple(range(1, n_i + 1)), tuple(range(1, n_o + 1)), scores)


@pytest.fixture
def person_only_cube():
    # person means 1, 2, 3, constant across items and occasions
    x = np.broadcast_to(np.array([1.0, 2.0, 3.0])[:, None, None], (3, 4, 5))
    return make_cube(x)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
