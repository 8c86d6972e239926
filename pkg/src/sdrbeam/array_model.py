"""Uniform linear array: steering vectors and beampatterns.

Angles are in degrees at every public boundary. Element 0 is the phase
reference, so the first entry of every steering vector is exactly 1.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: Floor applied to every power value reported in dB.
DB_FLOOR = -100.0


@dataclass(frozen=True)
class ArrayGeometry:
    """A uniform linear array of `num_elements` sensors.

    Parameters
    ----------
    num_elements : int
        Number of sensors M (at least 2).
    spacing_wavelengths : float
        Inter-element spacing in wavelengths.
    """

    num_elements: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 2:
            raise DomainError(f"num_elements must be an integer >= 2, got {self.num_elements!r}")
        if not self.spacing_wavelengths > 0:
            raise DomainError(f"spacing_wavelengths must be positive, got {self.spacing_wavelengths!r}")

    @property
    def M(self):
        return int(self.num_elements)


def _check_angles(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any(np.abs(theta) > 90.0):
        raise DomainError("angles must lie in [-90, 90] degrees")
    return theta


def steering(geometry, theta):
    """Steering vector d(theta) of the array.

    Entry m is exp(j 2 pi spacing m sin(theta)). If `theta` is an array of
    angles, the result has one column per angle.
    """
    theta = _check_angles(theta)
    m = np.arange(geometry.M)
    phase = 2j * np.pi * geometry.spacing_wavelengths * np.multiply.outer(m, np.sin(np.deg2rad(theta)))
    return np.exp(phase)


def power_db(x):
    """10 log10(x) with the package floor applied."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(np.maximum(x, 0.0))
    return np.maximum(out, DB_FLOOR)


def beampattern(geometry, w, grid, normalize=False):
    """Array power response |w^H d(theta)|^2 in dB over `grid`.

    Parameters
    ----------
    geometry : ArrayGeometry
    w : array_like
        Length-M weight vector.
    grid : sequence of float
        Angles in degrees.
    normalize : bool
        If true, the maximum over the grid is shifted to 0 dB.

    Returns
    -------
    list of (float, float)
        (angle, power in dB) pairs, floored at ``DB_FLOOR``.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise DomainError("beampattern grid is empty")
    w = np.asarray(w, dtype=complex)
    if w.shape != (geometry.M,):
        raise DomainError(f"weight vector must have shape ({geometry.M},)")
    # column-wise sum rather than a BLAS product, so each value depends only on
    # its own angle and not on the size of the grid
    response = np.abs(np.sum(np.conj(w)[:, None] * steering(geometry, grid), axis=0)) ** 2
    if normalize:
        peak = response.max()
        if peak > 0:
            response = response / peak
    return list(zip(grid.tolist(), power_db(response).tolist()))
