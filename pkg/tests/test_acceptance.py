"""Acceptance criteria 1-9 at full size; one PASS/FAIL line per criterion."""

import pytest

from semitoric.acceptance import CRITERIA

RESULTS = []


@pytest.mark.parametrize("idx", range(1, len(CRITERIA) + 1), ids=lambda i: f"criterion_{i}")
def test_criterion(idx, capsys):
    r = CRITERIA[idx - 1](quick=False)
    RESULTS.append(r)
    with capsys.disabled():
        print("\n" + r.line())
    assert r.runtime <= r.budget, f"over budget: {r.runtime:.1f}s > {r.budget}s"
    failed = [k for k, ok in r.checks.items() if not ok]
    assert not failed, f"criterion {idx} failed checks {failed}; details {r.details}"
