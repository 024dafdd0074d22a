"""One test per acceptance criterion, each printing a PASS/FAIL line."""

import json

import pytest

from dilation_lab.acceptance import SUITES, run_suite

CRITERIA = sorted(SUITES.values(), key=lambda s: s.criterion)


@pytest.mark.parametrize("suite", CRITERIA, ids=[f"criterion{s.criterion:02d}-{s.name}" for s in CRITERIA])
def test_criterion(suite, capsys):
    rep, elapsed = run_suite(suite.name)
    verdict = "PASS" if rep.passed else "FAIL"
    limit = f" (limit {suite.time_limit:g} s)" if suite.time_limit is not None else ""
    with capsys.disabled():
        print(f"\ncriterion {suite.criterion} {suite.title}: {verdict} in {elapsed:.1f} s{limit}")
    if suite.time_limit is not None:
        assert elapsed <= suite.time_limit
    assert rep.passed, json.dumps(rep.to_dict(), sort_keys=True)
