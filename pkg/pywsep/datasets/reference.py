"""Published reference values for the tilted bichromatic lattice."""

import json
import os.path as op

import pandas as pd

from pywsep.lattice import LatticeParams
from pywsep.utils import get_resource_path


def _load(name):
    dataset_dir = op.join(get_resource_path(), "datasets")
    df = pd.read_table(op.join(dataset_dir, f"{name}.tsv"))
    with open(op.join(dataset_dir, f"{name}.json"), "r") as fo:
        metadata = json.load(fo)
    return df, metadata


def exceptional_points():
    """Load the published exceptional points of the two most stable resonances.

    Returns
    -------
    df : :obj:`~pandas.DataFrame`
        A dataframe with the following columns:

        - ``"label"``: short name ("ep1", "ep2", "ep3")
        - ``"inv_F"``: inverse field strength
        - ``"delta"``: second-harmonic strength
        - ``"phi"``: second-harmonic phase
        - ``"source"``: how the point was located

    metadata : :obj:`dict`
        A dictionary with metadata about the columns in the dataset.
    """
    return _load("exceptional_points")


def reference_resonances():
    """Load published energies and decay rates of the two most stable resonances.

    Returns
    -------
    df : :obj:`~pandas.DataFrame`
        One row per configuration with columns ``inv_F``, ``delta``, ``phi``, ``E1``,
        ``Gamma1``, ``E2`` and ``Gamma2``. The second row is an exceptional point.
    metadata : :obj:`dict`
    """
    return _load("resonances")


def reference_params(label):
    """Get the lattice parameters of a published exceptional point.

    Parameters
    ----------
    label : {"ep1", "ep2", "ep3"}

    Returns
    -------
    :obj:`~pywsep.lattice.LatticeParams`
    """
    df, _ = exceptional_points()
    row = df.loc[df["label"] == label]
    if row.empty:
        raise ValueError(f"Unknown exceptional point '{label}'; choose from {list(df['label'])}.")
    row = row.iloc[0]
    return LatticeParams.from_inverse_field(row["inv_F"], delta=row["delta"], phi=row["phi"])
