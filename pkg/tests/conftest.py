import time

import pytest

from critcircle.atlas import build_atlas
from critcircle.family import CriticalFamily

_ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}
_BUILD_TIMES: dict[str, float] = {}


def _timed(name, fn):
    t0 = time.perf_counter()
    out = fn()
    _BUILD_TIMES[name] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def fam3():
    return CriticalFamily(3)


@pytest.fixture(scope="session")
def atlas64(fam3):
    return _timed("q_max=64", lambda: build_atlas(fam3, 64))


@pytest.fixture(scope="session")
def atlas128(fam3):
    return _timed("q_max=128", lambda: build_atlas(fam3, 128))


@pytest.fixture(scope="session")
def atlas_d1(fam3):
    return _timed("depth=1 cutoff=24", lambda: build_atlas(fam3, depth=1, cutoff=24))


@pytest.fixture(scope="session")
def atlas_d3(fam3):
    return _timed("depth=3 cutoff=8", lambda: build_atlas(fam3, depth=3, cutoff=8))


@pytest.fixture(scope="session")
def build_seconds():
    return _BUILD_TIMES


@pytest.fixture(scope="session")
def acceptance():
    """record(criterion, check, ok, detail) collects lines for the terminal summary."""

    def record(criterion: int, check: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE.setdefault(criterion, []).append((check, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(_ACCEPTANCE):
        checks = _ACCEPTANCE[c]
        status = "PASS" if all(ok for _, ok, _ in checks) else "FAIL"
        tr.write_line(f"criterion {c}: {status}")
        for check, ok, detail in checks:
            tr.write_line(f"    [{'ok' if ok else 'FAIL'}] {check}: {detail}")
    if _BUILD_TIMES:
        builds = ", ".join(f"{k} {v:.1f}s" for k, v in _BUILD_TIMES.items())
        tr.write_line(f"atlas builds: {builds}")
