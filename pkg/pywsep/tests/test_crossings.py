"""Tests for pywsep.crossings."""

import numpy as np
import pytest

from pywsep.crossings import classify_crossing
from pywsep.results import CrossingReport

F = np.linspace(0.2, 0.3, 11)
SLOPE = F - 0.25


@pytest.mark.parametrize(
    "mu1,mu2,expected",
    [
        # real parts stay apart while decay rates cross
        (0.5 - 0.5j * (0.1 + SLOPE), 0.3 - 0.5j * (0.1 - SLOPE), "type-I"),
        # real parts cross while decay rates stay apart
        (SLOPE - 0.05j, -SLOPE - 0.15j, "type-II"),
        # both cross
        (SLOPE - 0.5j * (0.1 + SLOPE), -SLOPE - 0.5j * (0.1 - SLOPE), "degenerate"),
        # neither crosses
        (0.5 - 0.05j + 0 * F, 0.3 - 0.15j + 0 * F, "avoided"),
    ],
)
def test_classify_crossing(mu1, mu2, expected):
    """Test the four crossing types on synthetic tracks."""
    report = classify_crossing(F, mu1, mu2, g=0.1)
    assert isinstance(report, CrossingReport)
    assert report.type == expected
    assert report.g == 0.1
    assert report.F_range == (0.2, 0.3)

    # the labels do not depend on which track is called first
    assert classify_crossing(F, mu2, mu1).type == expected
    # nor on the scan direction
    assert classify_crossing(F[::-1], mu1[::-1], mu2[::-1]).type == expected


def test_classify_crossing_closest_approach():
    """Test the reported closest approaches."""
    mu1 = SLOPE - 0.05j
    mu2 = -SLOPE - 0.15j
    report = classify_crossing(F, mu1, mu2)
    assert np.isclose(report.closest_approach_real, 0.0, atol=1e-12)
    assert np.isclose(report.F_closest_real, 0.25)
    assert np.isclose(report.closest_approach_imag, 0.2)
    d = report.to_dict()
    assert d["F_range"] == [0.2, 0.3]
    assert d["type"] == "type-II"


def test_classify_crossing_threshold():
    """Test that a near miss below the threshold counts as a crossing."""
    mu1 = 0.5 + 0.001 + 0 * F - 0.05j
    mu2 = 0.5 + 0 * F - 0.15j
    assert classify_crossing(F, mu1, mu2).type == "type-II"
    assert classify_crossing(F, mu1, mu2, real_threshold=1e-4).type == "avoided"


@pytest.mark.parametrize(
    "F_values,mu1,mu2",
    [
        (F, np.zeros(11), np.zeros(10)),
        (F[:1], np.zeros(1), np.zeros(1)),
        (np.r_[F[:5], F[3:9]], np.zeros(11), np.zeros(11)),
        (np.ones(11), np.zeros(11), np.zeros(11)),
    ],
)
def test_classify_crossing_errors(F_values, mu1, mu2):
    """Test that malformed scans raise ValueError."""
    with pytest.raises(ValueError):
        classify_crossing(F_values, mu1, mu2)


def test_crossing_report_type():
    """Test that unknown crossing types are rejected."""
    with pytest.raises(ValueError, match="crossing type"):
        CrossingReport(0.0, (0.1, 0.2), "type-III", 0.0, 0.0, 0.1, 0.1)
