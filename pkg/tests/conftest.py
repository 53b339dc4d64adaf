import numpy as np
import pytest

from epsnet3d.geometry import SimplicialCone


def skew_cone():
    rng = np.random.default_rng(7)
    R = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    N = np.array([[1.0, 0.3, 0.2], [0.1, 1.0, -0.4], [0.2, 0.1, 1.0]]) @ R
    return SimplicialCone([0, 0, 0], N)


@pytest.fixture
def orthant_cone():
    return SimplicialCone([0, 0, 0], np.eye(3))


@pytest.fixture(params=["orthant", "skew"])
def cone(request):
    return SimplicialCone([0, 0, 0], np.eye(3)) if request.param == "orthant" else skew_cone()


def lifted(Q, C):
    from epsnet3d.envelope import lift_to_envelope
    data = lift_to_envelope(Q, C)
    return data, data.lifted_points(Q)


# acceptance reporting ---------------------------------------------------------

import contextlib
import time

CRITERIA: dict[int, str] = {}


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record one PASS/FAIL line; ``notes`` collects the figures shown with it."""
    notes: dict = {}
    t0 = time.perf_counter()
    ok = False
    try:
        yield notes
        ok = True
    finally:
        notes["seconds"] = round(time.perf_counter() - t0, 1)
        detail = ", ".join(f"{k}={v}" for k, v in notes.items())
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        CRITERIA[number] = line
        print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
