"""Acceptance criteria, each run at its stated scale, tolerance and runtime limit.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; either way one
PASS/FAIL line per criterion is printed (under pytest in the terminal summary).
"""
import json
import time

import pytest

from s6twistor import verify
from s6twistor.cli import main

# (criterion, suite, runtime limit in seconds, description)
CRITERIA = [
    (1, "algebra", 5, "octonion identities over 1e4 tuples"),
    (2, "cayley", 10, "Cayley operator invariants and G2 invariance"),
    (3, "nk", 60, "nearly Kaehler condition, strictness, convergence order"),
    (4, "lemma1", 5, "lift of 100 twistor points"),
    (5, "theorem1", 30, "family through a twistor point, period 2pi/3"),
    (6, "lemma2", 60, "two intersection points of family members"),
    (7, "lemma3", 60, "transverse intersection, rank 12"),
    (8, "lemma4", 60, "family membership of G2-composed structures"),
    (9, "hitchin", 10, "Hitchin invariants and the lambda family"),
    (10, "pde", 120, "cone SU(3)-structure and nearly Kaehler equations"),
]

RESULTS = []


def _record(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)


@pytest.mark.parametrize("number,suite,limit,desc", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, suite, limit, desc):
    cfg = verify.RunConfig()  # seed 42, samples 200, h 1e-4: the stated scale
    checks, notes, seconds = verify.run_suite(suite, cfg)
    failed = [c for c in checks if not c.passed]
    ok = not failed and seconds < limit
    detail = f"{desc} [{suite}] {len(checks) - len(failed)}/{len(checks)} checks, {seconds:.1f}s < {limit}s"
    if failed:
        detail += " | failing: " + ", ".join(f"{c.name}={c.residual:.3e}" for c in failed)
    _record(number, ok, detail)
    assert not failed, detail
    assert seconds < limit, detail


def test_criterion_11_cli_determinism(tmp_path):
    start = time.perf_counter()
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    code_a = main(["verify", "all", "--seed", "42", "--out", str(first)])
    code_b = main(["verify", "all", "--seed", "42", "--out", str(second)])
    seconds = time.perf_counter() - start
    identical = first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text())
    # exit-code contract: 0 on pass, 1 on a failing check, 2 on usage errors
    code_fail = main(["verify", "lemma1", "--samples", "10", "--tol-fix", "1e-300", "--out", str(tmp_path / "f.json")])
    code_usage = main(["gen", "--count", "0"])
    contract = code_a == 0 and report["pass"] and code_fail == 1 and code_usage == 2
    ok = identical and contract and code_b == 0 and seconds < 300
    _record(11, ok, f"verify all twice identical={identical}, exit codes {code_a}/{code_fail}/{code_usage}, "
                    f"{seconds:.1f}s for two full runs < 300s")
    assert identical
    assert contract
    assert seconds < 300


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    failures = 0
    for args in CRITERIA:
        try:
            test_criterion(*args)
        except AssertionError:
            failures += 1
    with tempfile.TemporaryDirectory() as tmp:
        try:
            test_criterion_11_cli_determinism(Path(tmp))
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
