import os
from pathlib import Path

import hypothesis
import pytest

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def toy_dir():
    return FIXTURES / "toy"


@pytest.fixture
def medium_dir():
    return FIXTURES / "medium"


_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call ``criterion("1 N_IC table", "detail")`` before asserting."""
    entry = {}

    def record(label, detail=""):
        entry.update(label=label, detail=detail)

    yield record
    if entry:
        rep = getattr(request.node, "rep_call", None)
        ok = rep is not None and rep.passed
        _ACCEPTANCE.append((entry["label"], ok, entry["detail"]))


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}  {detail}")
