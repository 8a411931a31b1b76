"""Acceptance gate: run every verification criterion at its stated
tolerance and report one pass/fail line each."""
import pytest

from lorkam.verify import _CRITERIA, run_criterion


@pytest.mark.parametrize("index", sorted(_CRITERIA))
def test_criterion(index):
    result = run_criterion(index, seed=7)
    mark = "PASS" if result.ok else "FAIL"
    line = (f"[{mark}] criterion {result.index:2d} ({result.name}): "
            f"{result.detail} [{result.elapsed:.1f}s]")
    print(line)
    assert result.ok, line
