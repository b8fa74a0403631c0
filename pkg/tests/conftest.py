import itertools
import sys
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from detlam.compiler import compile_machine
from detlam.harness import verify
from detlam.machine import load_spec

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("detlam", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("detlam")

MACHINE_DIR = Path(__file__).resolve().parents[1] / "src" / "detlam" / "machines"

# symbols the corpus inputs are drawn from; y is the palindrome machine's answer
INPUT_SYMBOLS = {
    "eraser": ("1",),
    "increment": ("0", "1"),
    "palindrome": ("a", "b"),
    "identity": ("a", "b"),
}


def machine_path(name):
    return MACHINE_DIR / f"{name}.tm"


def inputs_up_to(symbols, n):
    for length in range(n + 1):
        yield from itertools.product(symbols, repeat=length)


@pytest.fixture(scope="session")
def machines():
    return {p.stem: compile_machine(load_spec(p)) for p in sorted(MACHINE_DIR.glob("*.tm"))}


CORPUS = ("eraser", "increment", "palindrome")


@pytest.fixture(scope="session")
def corpus_reports(machines):
    """verify() over every input of length <= 8 for the corpus machines,
    computed once per session; also returns the wall time it took."""
    start = time.perf_counter()
    reports = {name: [verify(machines[name], s) for s in inputs_up_to(INPUT_SYMBOLS[name], 8)] for name in CORPUS}
    return reports, time.perf_counter() - start


# --- acceptance summary ----------------------------------------------------------

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        _criteria.append((number, title, item.name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    by_number: dict = {}
    for number, title, name, verdict in _criteria:
        entry = by_number.setdefault(number, [title, []])
        if verdict == "FAIL":
            entry[1].append(name)
    for number in sorted(by_number):
        title, failed = by_number[number]
        verdict = "FAIL" if failed else "PASS"
        suffix = f"  (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"{verdict}  {number}. {title}{suffix}")
