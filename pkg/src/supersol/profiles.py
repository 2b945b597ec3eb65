"""Sampled radial functions."""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline


@dataclass(frozen=True)
class RadialProfile:
    """Values and derivatives of a function of one radial (or angular) variable."""

    radii: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "derivatives", np.asarray(self.derivatives, dtype=float))
        if r.ndim != 1 or r.size < 1:
            raise ValueError("radii must be a non-empty 1-D array")
        if np.any(np.diff(r) <= 0):
            raise ValueError("radii must be strictly increasing")
        if self.values.shape != r.shape or self.derivatives.shape != r.shape:
            raise ValueError("values and derivatives must match radii")

    def __len__(self):
        return self.radii.size

    def __call__(self, r):
        """Cubic Hermite interpolation inside the sampled range."""
        if self.radii.size == 1:
            return np.full(np.shape(r), self.values[0])
        spline = CubicHermiteSpline(self.radii, self.values, self.derivatives, extrapolate=False)
        return spline(r)
