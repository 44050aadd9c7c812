"""Run configuration: defaults, parsing and serialization."""

import dataclasses
import json
import os.path as op
from dataclasses import dataclass, field

from .exceptions import ConfigError
from .lattice import GridSpec, LatticeParams
from .utils import get_resource_path

SECTIONS = ("lattice", "grid", "tolerances", "run")


def _load_defaults():
    path = op.join(get_resource_path(), "defaults.json")
    with open(path, "r") as fo:
        defaults = json.load(fo)

    missing = [s for s in SECTIONS if s not in defaults]
    if missing:
        raise RuntimeError(f"defaults.json lacks the sections {missing}.")
    return defaults


# Key descriptions are read once at import time
DEFAULTS = _load_defaults()


def _section_defaults(section):
    return {key: entry["default"] for key, entry in DEFAULTS[section].items()}


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the solvers, searches and loops.

    Every field is documented in ``resources/defaults.json``; all values must be positive.
    """

    leak_threshold: float = 0.5
    energy_window: float = 4.0
    residual_tol: float = 1e-8
    degeneracy_tol: float = 1e-8
    ladder_tol: float = 1e-4
    translation_tol: float = 0.9
    gap_tol: float = 1e-6
    overlap_tol: float = 0.999
    petermann_tol: float = 1e3
    simplex_edge: float = 0.05
    xatol: float = 1e-5
    max_iter: int = 400
    shell_radius: float = 0.1
    perturbation_radius: float = 0.1
    seed_threshold: float = 1e-2
    loop_overlap_tol: float = 0.8
    tie_tol: float = 1e-3
    max_refinements: int = 3
    relaxation: float = 0.3
    sc_tol: float = 1e-9
    sc_max_iter: int = 500
    branch_overlap: float = 0.5
    crossing_threshold: float = 5e-3

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ConfigError(f"tolerances.{f.name} must be > 0, got {value}.")

    def linear_kwargs(self):
        """Get keyword arguments for :obj:`~pywsep.solvers.ResonanceSolver`."""
        return {
            "leak_threshold": self.leak_threshold,
            "energy_window": self.energy_window,
            "residual_tol": self.residual_tol,
            "degeneracy_tol": self.degeneracy_tol,
            "ladder_tol": self.ladder_tol,
            "translation_tol": self.translation_tol,
        }

    def certify_kwargs(self):
        """Get the EP certification thresholds."""
        return {
            "gap_tol": self.gap_tol,
            "overlap_tol": self.overlap_tol,
            "petermann_tol": self.petermann_tol,
        }

    def search_kwargs(self):
        """Get keyword arguments for :func:`~pywsep.search.find_ep`."""
        kwargs = self.certify_kwargs()
        kwargs.update(simplex_edge=self.simplex_edge, xatol=self.xatol, max_iter=self.max_iter)
        return kwargs

    def loop_kwargs(self):
        """Get keyword arguments for :func:`~pywsep.loops.run_loop`."""
        return {
            "overlap_tol": self.loop_overlap_tol,
            "tie_tol": self.tie_tol,
            "max_refinements": self.max_refinements,
        }

    def nonlinear_kwargs(self):
        """Get keyword arguments for :obj:`~pywsep.solvers.NonlinearSolver`."""
        return {
            "relaxation": self.relaxation,
            "sc_tol": self.sc_tol,
            "max_iter": self.sc_max_iter,
            "branch_overlap": self.branch_overlap,
        }


@dataclass(frozen=True)
class RunConfig:
    """Complete configuration of one invocation.

    Parameters
    ----------
    lattice : :obj:`~pywsep.lattice.LatticeParams`
    grid : :obj:`~pywsep.lattice.GridSpec`
    tolerances : :obj:`Tolerances`
    seed : :obj:`int`
    output_dir : :obj:`str`
    threads : :obj:`int`
    """

    lattice: LatticeParams = field(default_factory=LatticeParams)
    grid: GridSpec = field(default_factory=GridSpec)
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    output_dir: str = "."
    threads: int = 1

    def replace(self, **kwargs):
        """Return a copy with the given fields replaced."""
        return dataclasses.replace(self, **kwargs)

    def to_dict(self):
        """Convert to a nested dictionary keyed by section."""
        fields = [f.name for f in dataclasses.fields(self.grid) if f.init]
        grid = {name: getattr(self.grid, name) for name in fields}
        return {
            "lattice": {key: getattr(self.lattice, key) for key in DEFAULTS["lattice"]},
            "grid": grid,
            "tolerances": dataclasses.asdict(self.tolerances),
            "run": {"seed": self.seed, "output_dir": self.output_dir, "threads": self.threads},
        }


def _coerce(section, key, value):
    """Check a value against its entry in the defaults table."""
    entry = DEFAULTS[section][key]
    name = f"{section}.{key}"
    kind = entry["type"]

    if kind == "int":
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer, got {value!r}.")
    elif kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}.")
        value = float(value)
    elif not isinstance(value, str):
        raise ConfigError(f"{name} must be a string, got {value!r}.")

    if "choices" in entry and value not in entry["choices"]:
        raise ConfigError(f"{name} must be one of {entry['choices']}, got {value!r}.")
    if "gt" in entry and not value > entry["gt"]:
        raise ConfigError(f"{name} must be > {entry['gt']}, got {value!r}.")
    if "min" in entry and not value >= entry["min"]:
        raise ConfigError(f"{name} must be >= {entry['min']}, got {value!r}.")
    if "max" in entry and not value <= entry["max"]:
        raise ConfigError(f"{name} must be <= {entry['max']}, got {value!r}.")
    return value


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config(text):
    """Parse configuration text into a :obj:`RunConfig`.

    Each non-empty line holds ``section.key = value`` where value is a JSON literal or a bare
    string. Text after ``#`` is a comment. Missing keys take their defaults.

    Parameters
    ----------
    text : :obj:`str`

    Returns
    -------
    :obj:`RunConfig`

    Raises
    ------
    :obj:`~pywsep.exceptions.ConfigError`
        On malformed lines, unknown or repeated keys and out-of-range values.
    """
    values = {section: _section_defaults(section) for section in SECTIONS}
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Line {lineno}: expected 'section.key = value', got '{line}'.")

        name, raw = (s.strip() for s in line.split("=", 1))
        section, _, key = name.partition(".")
        if section not in SECTIONS or key not in DEFAULTS.get(section, {}):
            raise ConfigError(f"Line {lineno}: unknown configuration key '{name}'.")
        if name in seen:
            raise ConfigError(f"Line {lineno}: key '{name}' is set twice.")
        seen.add(name)
        values[section][key] = _coerce(section, key, _parse_value(raw))

    try:
        lattice = LatticeParams(**values["lattice"])
        grid = GridSpec(**values["grid"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return RunConfig(
        lattice=lattice,
        grid=grid,
        tolerances=Tolerances(**values["tolerances"]),
        **values["run"],
    )


def load_config(path=None):
    """Read a configuration file, or return the defaults if ``path`` is None."""
    if path is None:
        return parse_config("")
    with open(path, "r") as fo:
        return parse_config(fo.read())


def serialize_config(config):
    """Write a :obj:`RunConfig` as configuration text.

    Every key is written, in the order of the defaults table, so the result parses back to an
    identical configuration.

    Parameters
    ----------
    config : :obj:`RunConfig`

    Returns
    -------
    :obj:`str`
    """
    values = config.to_dict()
    lines = []
    for section in SECTIONS:
        for key in DEFAULTS[section]:
            lines.append(f"{section}.{key} = {json.dumps(values[section][key])}")
    return "\n".join(lines) + "\n"


def describe_defaults():
    """Get a plain-text table of every configuration key and its default."""
    lines = ["configuration keys (section.key = default):"]
    for section in SECTIONS:
        for key, entry in DEFAULTS[section].items():
            lines.append(f"  {section}.{key} = {json.dumps(entry['default'])}  {entry['help']}")
    return "\n".join(lines)
