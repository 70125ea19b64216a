import numpy as np
import pytest
from hypothesis import settings

from adasgd import lower_bound_quad, nonconvex_sine, quadratic

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def all_problems():
    return {
        "identity": quadratic([1.0, 1.0]),
        "rotated": quadratic(np.linspace(0.1, 2.0, 6), rotation_seed=4, center=np.arange(6.0), f_star=-1.5),
        "singular": quadratic([0.0, 0.5, 3.0], rotation_seed=1),
        "lower_bound": lower_bound_quad(2.0),
        "sine1": nonconvex_sine(1),
        "sine5": nonconvex_sine(5),
    }


@pytest.fixture(params=sorted(all_problems()))
def problem(request):
    return all_problems()[request.param]


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
