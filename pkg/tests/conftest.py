import csv
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from relimon import OrderedGoModel, group_by_order, musa_fixture

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile("ci")

DATA = Path(__file__).parent / "data"

# published estimates and limits for the Musa data
PUBLISHED_AB = {4: (2.415117, 0.000099), 5: (1.933309, 0.000114)}
PUBLISHED_LIMITS = (0.04508506100108, 16.6981710073481, 33.3512569382986)


def load_reference(r):
    """Rows of the published order-r table: (row, cumulative, m, diff or None)."""
    path = DATA / f"musa_r{r}_reference.tsv"
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines, delimiter="\t"):
        diff = float(rec["diff"]) if rec["diff"] else None
        rows.append((int(rec["row"]), float(rec["cumulative"]), float(rec["m"]), diff))
    return rows


@pytest.fixture(scope="session")
def musa():
    return musa_fixture()


@pytest.fixture(scope="session")
def musa_r4(musa):
    return group_by_order(musa, 4)


@pytest.fixture(scope="session")
def musa_r5(musa):
    return group_by_order(musa, 5)


@pytest.fixture(scope="session")
def published_model_r4():
    return OrderedGoModel.from_ab(*PUBLISHED_AB[4], 4)


@pytest.fixture(scope="session")
def published_model_r5():
    return OrderedGoModel.from_ab(*PUBLISHED_AB[5], 5)


def central_difference(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


@pytest.fixture
def rel_close():
    def check(actual, expected, rel):
        assert abs(actual - expected) <= rel * abs(expected), (actual, expected, rel)
    return check


np.seterr(all="warn", under="ignore")


ACCEPTANCE_RESULTS: dict[str, list[tuple[str, bool]]] = {}


def record_acceptance(criterion: str, name: str, passed: bool) -> None:
    ACCEPTANCE_RESULTS.setdefault(criterion, []).append((name, passed))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE_RESULTS, key=lambda c: int(c.split()[0])):
        checks = ACCEPTANCE_RESULTS[criterion]
        ok = all(p for _, p in checks)
        failed = [n for n, p in checks if not p]
        line = f"{'PASS' if ok else 'FAIL'}  {criterion}"
        if failed:
            line += f"  (failed: {', '.join(failed)})"
        terminalreporter.write_line(line)
