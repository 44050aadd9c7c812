"""Tests for pywsep.results."""

import numpy as np
import pytest

from pywsep.io import dumps
from pywsep.lattice import GridSpec, LatticeParams
from pywsep.loops import LoopSpec
from pywsep.results import (
    EPCandidate,
    EPCurve,
    LoopFamilyReport,
    LoopTrace,
    PetermannScan,
    Resonance,
    SpectrumSlice,
)
from pywsep.utils import TWO_PI

CENTER = LatticeParams.from_inverse_field(3.769, delta=1.0, phi=-2.991)


def _resonance(mu, site=0, alpha=None):
    vec = np.zeros(8, dtype=complex)
    vec[site % 8] = 1.0
    return Resonance(
        eigenvalue=mu,
        energy=mu.real,
        gamma=-2.0 * mu.imag,
        right_vector=vec,
        site_index=site,
        localization_center=TWO_PI * site,
        cap_leakage=0.0,
        residual=0.0,
        ladder_index=alpha,
    )


def _trace(permutations, signs, steps=32):
    spec = LoopSpec(CENTER, 0.05, steps=steps, cycles=len(permutations))
    betas = spec.betas()
    e1 = 0.2 - 0.01j + 0.01 * np.exp(1j * betas)
    e2 = 0.1 - 0.05j + 0.01 * np.exp(1j * betas)
    components = [np.ones_like(e1), np.ones_like(e2)]
    return LoopTrace(spec, betas, [e1, e2], components, permutations, signs, n_solves=steps)


def test_spectrum_slice():
    """Test sorting, ladder access and the tracked pair."""
    states = [
        _resonance(0.3 - 0.05j, site=0, alpha=2),
        _resonance(0.1 - 0.01j, site=1, alpha=1),
        _resonance(0.1 - 0.01j, site=0, alpha=1),
        _resonance(0.5 - 0.3j, site=0, alpha=None),
    ]
    spectrum = SpectrumSlice(CENTER, GridSpec(), states, eta_used=8.0)
    assert len(spectrum) == 4
    assert [r.gamma for r in spectrum] == sorted(r.gamma for r in states)
    assert spectrum.ladders == [1, 2]
    assert [r.site_index for r in spectrum.ladder(1)] == [0, 1]

    first, second = spectrum.tracked_pair()
    assert first.site_index == 0 and first.ladder_index == 1
    assert second.ladder_index == 2

    df = spectrum.to_df()
    assert df.shape == (4, 11)
    assert spectrum.to_records()[0]["eta_used"] == 8.0

    with pytest.raises(ValueError, match="at least one"):
        SpectrumSlice(CENTER, GridSpec(), [], eta_used=8.0)


def test_tracked_pair_fallback():
    """Test the fallback to the two smallest-Gamma states."""
    states = [_resonance(0.3 - 0.05j), _resonance(0.1 - 0.01j), _resonance(0.2 - 0.2j)]
    spectrum = SpectrumSlice(CENTER, GridSpec(), states, eta_used=8.0)
    with pytest.warns(UserWarning, match="smallest-Gamma"):
        pair, fallback = spectrum.tracked_pair(return_flag=True)
    assert fallback
    assert np.isclose(pair[0].gamma, 0.02)
    assert np.isclose(pair[1].gamma, 0.1)

    single = SpectrumSlice(CENTER, GridSpec(), states[:1], eta_used=8.0)
    with pytest.raises(ValueError, match="two resonances"):
        single.tracked_pair()


def test_resonance_to_dict():
    """Test the resonance summary."""
    d = _resonance(0.1 - 0.01j, site=2, alpha=1).to_dict()
    assert d["alpha"] == 1
    assert d["n"] == 2
    assert np.isclose(d["Gamma"], 0.02)
    assert d["K"] == 1.0
    assert not d["saturated"]
    assert "right_vector" not in d

    # psi^T psi = 0 at coalescence
    vec = np.array([1.0, 1j, 0, 0, 0, 0, 0, 0])
    d = _resonance(0.1 - 0.01j).replace(right_vector=vec).to_dict()
    assert d["K"] is None
    assert d["saturated"]
    assert "Infinity" not in dumps(d)

    ep = EPCandidate(CENTER, 0.0, 1.0, np.inf, True)
    assert ep.to_dict()["petermann_min"] is None


def test_ep_curve():
    """Test folds and plane crossings of a synthetic curve."""
    deltas = [1.0, 1.5, 2.0, 2.5, 2.0, 1.5]
    points = [
        EPCandidate(CENTER.replace(delta=d, phi=-3.0 + 0.1 * i), 0.0, 1.0, 1e4, True)
        for i, d in enumerate(deltas)
    ]
    curve = EPCurve(points, 0.1, "max-points")
    assert len(curve) == 6
    assert curve.coordinates.shape == (6, 3)
    assert curve.folds == [3]
    assert curve.radii == [0.1] * 5

    crossings = curve.plane_crossings(2.251)
    assert crossings.shape == (2, 3)
    assert np.allclose(crossings[:, 1], 2.251)
    assert curve.to_df().shape == (6, 9)

    with pytest.raises(ValueError, match="termination reason"):
        EPCurve(points, 0.1, "done")


def test_petermann_scan():
    """Test the peak and width of a synthetic Petermann curve."""
    inv_F = np.linspace(3.0, 4.0, 11)
    K = 1.0 / (1.0 - 0.9 * np.exp(-(((inv_F - 3.5) / 0.2) ** 2)))
    mu = np.full(11, 0.1 - 0.01j)
    scan = PetermannScan(inv_F, K, K, mu, mu)
    peak_inv_F, peak_K = scan.peak()
    assert np.isclose(peak_inv_F, 3.5)
    assert np.isclose(peak_K, 10.0)
    assert np.isclose(scan.peak_width(), 0.2)
    assert np.allclose(scan.F, 1.0 / inv_F)

    df = scan.to_df()
    assert df.shape == (11, 11)
    assert np.allclose(df["Gamma1"], 0.02)


def test_loop_trace_closure():
    """Test cycle counting of a double-swapping loop."""
    trace = _trace(["swap", "identity", "swap", "identity"], [(1, 1), (-1, -1), (1, 1), (1, 1)])
    assert trace.encloses_ep
    assert trace.eigenvalue_closure_cycles == 2
    assert trace.closure_cycles == 4
    assert not trace.needs_review

    verdict = trace.verdict()
    assert verdict["component_signs"][1] == [-1, -1]
    assert trace.to_df().shape == (len(trace.beta_samples), 9)


def test_loop_trace_identity():
    """Test the diagnostics of a loop that encloses nothing."""
    trace = _trace(["identity"], [(1, 1)])
    assert not trace.encloses_ep
    assert trace.closure_cycles == 1
    assert trace.winding_numbers() == [1, 1]
    assert trace.tracks_disjoint()
    assert not trace.needs_review
    assert np.isclose(trace.max_jump_ratio(), 1.0)

    open_trace = _trace(["swap"], [(1, -1)])
    assert open_trace.closure_cycles is None
    assert open_trace.eigenvalue_closure_cycles is None


def test_loop_family_report():
    """Test the family summary."""
    traces = [_trace(["identity"], [(1, 1)]), _trace(["swap"], [(1, 1)])]
    report = LoopFamilyReport(traces, [True])
    assert report.n_swaps == 1
    assert report.enclosing == [1]

    df = report.to_df()
    assert df.shape == (2, 7)
    assert list(df["interchanged_with_next"]) == [True, None]
    assert np.isclose(df["inv_F"].iloc[0], 3.769)
