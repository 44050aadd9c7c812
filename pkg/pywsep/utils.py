"""Miscellaneous utility functions."""

import os.path as op

import numpy as np

TWO_PI = 2.0 * np.pi


def get_resource_path():
    """Return the path to general resources, terminated with separator.

    Resources are kept in the package's "resources" folder.
    """
    return op.abspath(op.join(op.dirname(__file__), "resources") + op.sep)


def _listify(obj):
    """Wrap all non-list or tuple objects in a list.

    This provides a simple way to accept flexible arguments.
    """
    return obj if isinstance(obj, (list, tuple, type(None), np.ndarray)) else [obj]


def wrap_phase(phi):
    """Map an angle (or array of angles) onto the half-open interval (-pi, pi].

    Angles already inside the interval are returned bit-for-bit.
    """
    phi = np.asarray(phi, dtype=float)
    inside = (phi > -np.pi) & (phi <= np.pi)
    return np.where(inside, phi, np.pi - np.mod(np.pi - phi, TWO_PI))


def _check_inputs_shape(param1, param2, param1_name, param2_name):
    """Check whether 'param1' and 'param2' have the same length.

    Parameters
    ----------
    param1 : array
    param2 : array
    param1_name : str
    param2_name : str
    """
    if (param1 is not None) and (param2 is not None):
        shape1 = np.shape(param1)[0]
        shape2 = np.shape(param2)[0]
        if shape1 != shape2:
            raise ValueError(
                f"{param1_name} and {param2_name} should have the same length. "
                f"You provided {param1_name} with shape {np.shape(param1)} and {param2_name} "
                f"with shape {np.shape(param2)}."
            )


def parse_range(text):
    """Parse a ``start:stop:count`` string into a tuple.

    Parameters
    ----------
    text : :obj:`str`
        Range specification, e.g. ``"1:12:200"``.

    Returns
    -------
    :obj:`tuple` of (:obj:`float`, :obj:`float`, :obj:`int`)
    """
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValueError(f"Range '{text}' must have the form start:stop:count.")

    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if not stop > start:
        raise ValueError(f"Range '{text}' is inverted or empty (stop must exceed start).")
    if count < 2:
        raise ValueError(f"Range '{text}' needs a count of at least 2.")

    return start, stop, count
