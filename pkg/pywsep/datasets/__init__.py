"""Reference datasets."""

from .reference import exceptional_points, reference_params, reference_resonances

__all__ = [
    "exceptional_points",
    "reference_params",
    "reference_resonances",
]
