"""Tests for pywsep.cli."""

import argparse
import json
import os.path as op

import pytest

from pywsep import __version__
from pywsep.cli import THREADS_ENV, _attach_values, _threads, run_command
from pywsep.config import RunConfig
from pywsep.io import MANIFEST_NAME, read_jsonl

SMALL_CONFIG = """
grid.periods_left = 6
grid.periods_right = 4
grid.points_per_period = 32
"""


@pytest.fixture
def config_file(tmp_path):
    """Write a configuration with a coarse grid."""
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_CONFIG)
    return str(path)


def _spectrum_args(config_file, output_dir):
    return [
        "--config",
        config_file,
        "--output-dir",
        output_dir,
        "spectrum",
        "--invF",
        "5",
        "--delta",
        "0.5",
        "--phi",
        "0.7",
    ]


def test_help(capsys):
    """Test that --help exits successfully and lists the defaults."""
    assert run_command(["--help"]) == 0
    out = capsys.readouterr().out
    assert "find-ep" in out
    assert "lattice.delta = 1.0" in out


def test_version(capsys):
    """Test the --version flag."""
    assert run_command(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["braid"],
        ["scan", "--fix", "delta=1", "--range-invF", "12:1:200", "--range-phi", "-3:3:3"],
        ["scan", "--fix", "gamma=1", "--range-invF", "1:12:20", "--range-phi", "-3:3:3"],
        ["find-ep", "--guess", "3.8,1"],
        ["find-ep", "--guess", "-1,1,-3"],
        ["find-ep", "--freeze", "gamma"],
        ["nonlinear", "--scan-F", "0.26:0.27:5"],
    ],
)
def test_usage_errors(tmp_path, argv):
    """Test that usage errors exit with code 2."""
    assert run_command(["--output-dir", str(tmp_path)] + argv) == 2


def test_spectrum(tmp_path, config_file):
    """Test that spectrum writes the tracked pair and a manifest."""
    out = str(tmp_path / "out")
    assert run_command(_spectrum_args(config_file, out)) == 0

    path = op.join(out, "spectrum.jsonl")
    with open(path) as fo:
        assert json.loads(fo.readline()) == {"manifest": MANIFEST_NAME}
    records = read_jsonl(path)
    assert len(records) == 2
    assert sorted(r["alpha"] for r in records) == [1, 2]
    assert records[0]["params"]["delta"] == 0.5
    assert records[0]["eta_used"] == 8.0

    with open(op.join(out, MANIFEST_NAME)) as fo:
        manifest = json.load(fo)
    assert manifest["command"] == "spectrum"
    assert manifest["outputs"] == ["spectrum.jsonl"]
    assert manifest["config"]["grid"]["points_per_period"] == 32


def test_spectrum_deterministic(tmp_path, config_file):
    """Test that identical invocations give byte-identical data files."""
    outputs = []
    for name in ("a", "b"):
        out = str(tmp_path / name)
        assert run_command(_spectrum_args(config_file, out)) == 0
        with open(op.join(out, "spectrum.jsonl"), "rb") as fo:
            outputs.append(fo.read())
    assert outputs[0] == outputs[1]


def test_domain_errors(tmp_path, config_file):
    """Test that domain errors exit with code 1 and still write a manifest."""
    out = str(tmp_path / "out")
    argv = ["--config", config_file, "--output-dir", out, "find-ep", "--guess", "20,1,-3"]
    assert run_command(argv) == 1
    assert op.isfile(op.join(out, MANIFEST_NAME))

    argv = ["--config", config_file, "--output-dir", out, "scan", "--fix", "delta=1"]
    assert run_command(argv) == 1

    bad = tmp_path / "bad.cfg"
    bad.write_text("grid.points_per_period = -4\n")
    assert run_command(["--config", str(bad), "--output-dir", out, "selftest"]) == 1


def test_attach_values():
    """Test that span values starting with a minus sign stay attached to their flag."""
    argv = ["scan", "--fix", "delta=1", "--range-phi", "-3.14:3.14:200", "--range-invF", "1:12:5"]
    assert _attach_values(argv) == [
        "scan",
        "--fix",
        "delta=1",
        "--range-phi=-3.14:3.14:200",
        "--range-invF",
        "1:12:5",
    ]
    assert _attach_values(["loop", "--center"]) == ["loop", "--center"]


def test_threads(monkeypatch):
    """Test the precedence of the thread-count sources."""
    config = RunConfig(threads=3)
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert _threads(argparse.Namespace(threads=None), config) == 3
    assert _threads(argparse.Namespace(threads=2), config) == 2

    monkeypatch.setenv(THREADS_ENV, "5")
    assert _threads(argparse.Namespace(threads=2), config) == 5


def test_selftest(tmp_path):
    """Test that the self-test passes on a clean checkout."""
    assert run_command(["--output-dir", str(tmp_path), "selftest"]) == 0
    assert op.isfile(op.join(str(tmp_path), "selftest.csv"))
