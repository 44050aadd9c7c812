"""Run provenance and output writers."""

import datetime
import json
import logging
import os
import os.path as op
from dataclasses import dataclass, field

import numpy as np

LOGGER = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def _to_json(obj):
    """Convert numpy and complex values for :func:`json.dumps`."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable.")


def _finite(obj):
    """Replace non-finite floats, which JSON cannot represent, by None."""
    if isinstance(obj, dict):
        return {key: _finite(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(value) for value in obj]
    if isinstance(obj, np.ndarray) and obj.dtype.kind == "f":
        return _finite(obj.tolist())
    if isinstance(obj, (float, np.floating)) and not np.isfinite(obj):
        return None
    return obj


def dumps(record):
    """Serialize one record as compact JSON with shortest round-trip floats.

    Infinite and NaN values are written as null.
    """
    return json.dumps(_finite(record), default=_to_json, separators=(", ", ": "))


@dataclass
class RunManifest:
    """Provenance of one invocation, written once next to its outputs.

    Parameters
    ----------
    command : :obj:`str`
        Subcommand name.
    arguments : :obj:`dict`
        Echo of the parsed command-line arguments.
    config : :obj:`dict`
        Configuration snapshot, as :meth:`~pywsep.config.RunConfig.to_dict`.
    version : :obj:`str`
    started : :obj:`str`, optional
        ISO timestamp; set on construction.
    finished : None or :obj:`str`, optional
    outputs : :obj:`list` of :obj:`str`, optional
        Files written during the run.
    """

    command: str
    arguments: dict
    config: dict
    version: str
    started: str = field(default_factory=lambda: _now())
    finished: str = None
    outputs: list = field(default_factory=list)

    def to_dict(self):
        """Convert to a JSON-compatible dictionary."""
        return {
            "command": self.command,
            "arguments": self.arguments,
            "config": self.config,
            "version": self.version,
            "started": self.started,
            "finished": self.finished,
            "outputs": self.outputs,
        }

    def write(self, output_dir):
        """Write ``manifest.json`` into ``output_dir`` and return its path."""
        self.finished = _now()
        path = op.join(output_dir, MANIFEST_NAME)
        with open(path, "w") as fo:
            json.dump(_finite(self.to_dict()), fo, indent=2, default=_to_json)
        LOGGER.info("Wrote %s", path)
        return path


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _prepare(path, manifest):
    directory = op.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    if manifest is not None:
        manifest.outputs.append(op.basename(path))


def write_jsonl(path, records, manifest=None):
    """Write records as JSON lines, preceded by a reference to the manifest.

    Parameters
    ----------
    path : :obj:`str`
    records : iterable of :obj:`dict`
    manifest : None or :obj:`RunManifest`, optional
        Registers the file in the manifest's outputs.

    Returns
    -------
    :obj:`str`
        The path written.
    """
    _prepare(path, manifest)
    with open(path, "w") as fo:
        fo.write(dumps({"manifest": MANIFEST_NAME}) + "\n")
        for record in records:
            fo.write(dumps(record) + "\n")
    return path


def read_jsonl(path):
    """Read records written by :func:`write_jsonl`, without the manifest reference."""
    with open(path, "r") as fo:
        records = [json.loads(line) for line in fo if line.strip()]
    if records and set(records[0]) == {"manifest"}:
        records = records[1:]
    return records


def write_grid_csv(path, df, manifest=None):
    """Write a dense grid as CSV with a leading manifest comment line.

    Parameters
    ----------
    path : :obj:`str`
    df : :obj:`pandas.DataFrame`
        Long-format grid; its columns become the header row.
    manifest : None or :obj:`RunManifest`, optional

    Returns
    -------
    :obj:`str`
    """
    _prepare(path, manifest)
    with open(path, "w") as fo:
        fo.write(f"# manifest={MANIFEST_NAME}\n")
        df.to_csv(fo, index=False)
    return path


def dump_states(path, states, grid, manifest=None):
    """Write eigenvectors as little-endian complex doubles with a JSON sidecar.

    Parameters
    ----------
    path : :obj:`str`
        Binary file; the sidecar is ``path + ".json"``.
    states : :obj:`list`
        Objects with ``right_vector`` and ``to_dict()``.
    grid : :obj:`~pywsep.lattice.GridSpec`
    manifest : None or :obj:`RunManifest`, optional

    Returns
    -------
    :obj:`str`
        Path of the sidecar.
    """
    _prepare(path, manifest)
    vectors = np.array([s.right_vector for s in states], dtype="<c16")
    vectors.tofile(path)

    sidecar = path + ".json"
    _prepare(sidecar, manifest)
    meta = {
        "manifest": MANIFEST_NAME,
        "dtype": "<c16",
        "shape": list(vectors.shape),
        "x_min": grid.x_min,
        "dx": grid.dx,
        "states": [s.to_dict() for s in states],
    }
    with open(sidecar, "w") as fo:
        fo.write(dumps(meta) + "\n")
    return sidecar


def load_states(path):
    """Read eigenvectors written by :func:`dump_states`.

    Returns
    -------
    vectors : :obj:`numpy.ndarray` of shape (n_states, N)
    metadata : :obj:`dict`
    """
    with open(path + ".json", "r") as fo:
        metadata = json.load(fo)
    vectors = np.fromfile(path, dtype=metadata["dtype"]).reshape(metadata["shape"])
    return vectors, metadata
