import time

import pytest

import families

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def property_sweep():
    """Criteria 6-8 share one pass over both families."""
    t0 = time.perf_counter()
    exhaustive = families.exhaustive_f2()
    built = time.perf_counter() - t0
    ex = families.sweep(exhaustive)
    rnd = families.sweep(families.random_family())
    return {"exhaustive": ex, "random": rnd, "build_seconds": built,
            "seconds": time.perf_counter() - t0, "groups": len(exhaustive)}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
