#!/usr/bin/env python
"""PyWSEP setup script."""
import re
from pathlib import Path

from setuptools import setup


def get_version():
    """Read the version string from the package without importing it."""
    text = (Path(__file__).parent / "pywsep" / "__init__.py").read_text()
    return re.search(r'^__version__ = "([^"]+)"', text, re.M).group(1)


if __name__ == "__main__":
    setup(
        name="PyWSEP",
        version=get_version(),
        zip_safe=False,
    )
