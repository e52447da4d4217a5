from __future__ import annotations

import re

CRITERIA = {
    1: "bounds on |Phi| over 10^4 random samples",
    2: "power-density asymptotics",
    3: "restriction checker vs ratio chain",
    4: "non-negative moduli, counterexample rejected",
    5: "Hankel vs Bromwich agreement",
    6: "Newton model vs heat kernel",
    7: "support cone",
    8: "material constants",
    9: "sign law of Im Psi",
    10: "weak velocities",
    11: "time derivative of S equals K",
    12: "decay exponent fit",
}

_results: dict[int, list[tuple[str, str]]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_ac(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            outcome = "xfail"
        else:
            outcome = report.outcome
        _results.setdefault(int(m.group(1)), []).append((m.group(2), outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(CRITERIA):
        parts = _results.get(k)
        if not parts:
            continue
        ok = all(o == "passed" for _, o in parts)
        line = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {CRITERIA[k]}"
        bad = [name for name, o in parts if o != "passed"]
        if bad:
            line += "  (failing: " + ", ".join(bad) + ")"
        tr.write_line(line)
