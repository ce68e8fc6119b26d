"""The thirteen acceptance criteria, one suite each.

Each test prints ``criterion N: PASS`` or ``criterion N: FAIL`` and asserts
the suite verdict.  Run directly (``python tests/test_acceptance.py``) to get
just the summary lines.
"""

import pytest

from gqkit.suites import SuiteConfig, run_suite

CRITERIA = [
    (1, "gq-axioms"),
    (2, "four-gonal"),
    (3, "subgq-census"),
    (4, "cover"),
    (5, "spg"),
    (6, "lower-decomposition"),
    (7, "higher-decomposition"),
    (8, "orthogonal-orders"),
    (9, "kernels"),
    (10, "special-lines"),
    (11, "translation-certs"),
    (12, "counterexample"),
    (13, "properties"),
]

LINES: list[str] = []


def run_criterion(n: int, suite: str):
    rep = run_suite(SuiteConfig(suite, exhaustive=True))
    line = f"criterion {n}: {'PASS' if rep.passed else 'FAIL'} ({suite}, {rep.seconds:.1f}s)"
    bad = [f"{a.name}: expected {a.expected}, measured {a.measured}" for a in rep.assertions if not a.passed]
    return rep, line, bad


@pytest.mark.parametrize("n,suite", CRITERIA, ids=[f"criterion_{n}_{s}" for n, s in CRITERIA])
def test_criterion(n, suite):
    rep, line, bad = run_criterion(n, suite)
    LINES.append(line)
    print(line)
    assert rep.error is None, rep.error
    assert rep.passed, "; ".join(bad)


if __name__ == "__main__":
    for n, suite in CRITERIA:
        print(run_criterion(n, suite)[1], flush=True)
