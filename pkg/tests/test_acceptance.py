"""The eleven acceptance criteria, one pass/fail line each.

Run directly (``python3 tests/test_acceptance.py``) or under pytest; the
lines are printed even when pytest captures output.
"""
import sys

import pytest

from dessins import suite

RUNTIME_LIMITS = {1: 1.0, 2: 300.0, 4: 120.0, 10: 60.0}


@pytest.mark.parametrize("fn", suite.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(fn, capsys):
    res = fn()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
    limit = RUNTIME_LIMITS.get(res.number)
    if limit is not None:
        assert res.seconds < limit, f"criterion {res.number} took {res.seconds:.1f}s (limit {limit}s)"


if __name__ == "__main__":
    results = suite.run_all(echo=print)
    sys.exit(0 if all(r.passed for r in results) else 1)
