from __future__ import annotations

import re

# One summary line per acceptance criterion, printed after the run so the
# lines survive pytest's output capture.

_CRITERION_TITLES = {
    1: "solver agrees with the exhaustive oracle across the k range",
    2: "kernel preserves answers and meets the size bounds",
    3: "functional kernel bounds before dummy insertion",
    4: "optimality and matched-set invariants of the extremes",
    5: "branching node, subset and certificate-set bounds",
    6: "reduction arithmetic and closed-form optima",
    7: "reduction agrees with clique brute force",
    8: "gap filling: contiguous ranks, t dummies, balance shift",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results: dict[int, str] = {}
    for state in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(state, []):
            name = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in name:
                continue
            match = re.search(r"test_criterion_(\d+)", name)
            if match:
                n = int(match.group(1))
                verdict = "PASS" if state == "passed" else "FAIL"
                if results.get(n) != "FAIL":
                    results[n] = verdict
    if results:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for n in sorted(results):
            title = _CRITERION_TITLES.get(n, "")
            terminalreporter.write_line(f"  criterion {n}: {results[n]}  {title}")
