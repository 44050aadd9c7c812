"""Tests for pywsep.selftest."""

import pytest

from pywsep.selftest import CHECKS, run_selftest


def test_run_selftest_subset():
    """Test running a subset of the checks."""
    df = run_selftest(checks=["potential at origin", "config defaults"])
    assert list(df.columns) == ["check", "passed", "detail"]
    assert list(df["check"]) == ["potential at origin", "config defaults"]
    assert df["passed"].all()


def test_check_names_unique():
    """Test that every check has a distinct name."""
    names = [name for name, _ in CHECKS]
    assert len(names) == len(set(names))
    assert run_selftest(checks=[]).empty


def test_monochromatic_ladder_check():
    """Test that neighbouring members of the monochromatic ladder are 2 pi F apart."""
    df = run_selftest(checks=["monochromatic ladder spacing"])
    assert df["passed"].all(), df["detail"].iloc[0]


@pytest.mark.slow
def test_run_selftest_all():
    """Test that every check passes."""
    df = run_selftest()
    assert len(df) == len(CHECKS)
    failed = df.loc[~df["passed"], ["check", "detail"]]
    assert failed.empty, failed.to_string()
