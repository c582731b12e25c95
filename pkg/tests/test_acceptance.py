"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL line."""
from __future__ import annotations

import pytest

from saddlekit.verification import SUITES, run_suites

CRITERIA = [
    (1, "beta", "beta-like identities over the rational grid", 5.0),
    (2, "dual", "dual formula equivalence on 200 jets", 10.0),
    (3, "exact", "exact duality k! on the rational path", None),
    (4, "relations", "parity, annihilation and recovery", None),
    (5, "g_limit", "singular limits of the sector integrals", 120.0),
    (6, "thm_c", "limits of phi derivatives", None),
    (7, "decompose", "singular decomposition of phi", None),
    (8, "transit", "transit integral by ODE vs quadrature", 60.0),
    (9, "pa", "p_a seminorm, pointwise bound, geometric type", None),
    (10, "keane", "Keane condition", None),
    (11, "converse", "converse witness for sector extension", None),
    (12, "grading", "grading identities", None),
]


def test_every_suite_is_covered():
    assert sorted(name for _, name, _, _ in CRITERIA) == sorted(SUITES)


@pytest.mark.parametrize("number, suite, title, budget", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, suite, title, budget, capsys):
    (res,) = run_suites([suite])
    failed = [c["name"] for c in res["checks"] if not c["pass"]]
    worst = max((c["err"] / c["tolerance"] if c["tolerance"] else c["err"]) for c in res["checks"])
    in_time = budget is None or res["seconds"] < budget
    ok = res["pass"] and in_time
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {title} "
              f"({len(res['checks'])} checks, worst err/tol {worst:.2e}, {res['seconds']:.1f} s)")
    assert not failed, f"failed checks: {failed[:10]}"
    assert in_time, f"{suite} took {res['seconds']:.1f} s, budget {budget} s"
