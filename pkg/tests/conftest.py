import pytest

from scflab.batchode import QuadratureSpec
from scflab.reference import instance_a, instance_b, instance_washout

# (criterion id, description) -> list of (passed, detail); filled by test_acceptance.py
CRITERIA: dict[tuple[str, str], list[tuple[bool, str]]] = {}


def record_criterion(cid: str, desc: str, passed: bool, detail: str = "") -> bool:
    CRITERIA.setdefault((cid, desc), []).append((bool(passed), detail))
    return bool(passed)


@pytest.fixture
def criterion():
    return record_criterion


@pytest.fixture(scope="session")
def pa():
    return instance_a()


@pytest.fixture(scope="session")
def pb():
    return instance_b()


@pytest.fixture(scope="session")
def pw():
    return instance_washout()


@pytest.fixture(scope="session")
def q():
    return QuadratureSpec()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (cid, desc), results in sorted(CRITERIA.items(), key=lambda kv: _key(kv[0][0])):
        ok = all(p for p, _ in results)
        detail = "; ".join(d for _, d in results if d)
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {cid} {desc}" + (f"  ({detail})" if detail else ""))


def _key(cid):
    head, _, tail = cid.partition(".")
    return (int(head), tail)
