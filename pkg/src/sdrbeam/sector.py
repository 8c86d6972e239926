"""Angular-sector matrices and the out-of-sector constraint threshold.

C is the integral of d(theta) d(theta)^H over the signal sector, C~ the
same integral over its complement within [-90, 90] degrees. Both integrals
use the midpoint rule with the angle measured in radians.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .array_model import steering
from .errors import DomainError
from .linalg import eigh_sorted, symmetrize

DEFAULT_STEP = 0.5
DEFAULT_NUM_BASIS = 6


@dataclass(frozen=True)
class AngularSector:
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if not (-90.0 <= self.theta_min < self.theta_max <= 90.0):
            raise DomainError(
                f"invalid sector [{self.theta_min}, {self.theta_max}]: need -90 <= min < max <= 90")

    @classmethod
    def around(cls, center, halfwidth):
        """Sector [center - halfwidth, center + halfwidth] clipped to the visible region."""
        return cls(max(-90.0, center - halfwidth), min(90.0, center + halfwidth))

    def contains(self, theta):
        return self.theta_min <= theta <= self.theta_max

    def complement(self):
        """The complement within [-90, 90] as a list of sectors (possibly empty)."""
        parts = []
        if self.theta_min > -90.0:
            parts.append(AngularSector(-90.0, self.theta_min))
        if self.theta_max < 90.0:
            parts.append(AngularSector(self.theta_max, 90.0))
        return parts


class Feasibility(Enum):
    STRICTLY_FEASIBLE = "strictly_feasible"
    BOUNDARY = "boundary"
    INFEASIBLE = "infeasible"


def _midpoints(sector, step):
    width = sector.theta_max - sector.theta_min
    n = max(1, int(np.ceil(width / step - 1e-9)))
    h = width / n
    return sector.theta_min + h * (np.arange(n) + 0.5), h


def sector_matrix(geometry, intervals, step=DEFAULT_STEP):
    """Midpoint-rule approximation of the integral of d d^H over `intervals`.

    Parameters
    ----------
    geometry : ArrayGeometry
    intervals : AngularSector or list of AngularSector
        Disjoint intervals (touching endpoints are allowed).
    step : float
        Nominal quadrature step in degrees; each interval is split into
        ceil(width / step) equal cells.

    Returns
    -------
    ndarray
        Hermitian M x M matrix.
    """
    if isinstance(intervals, AngularSector):
        intervals = [intervals]
    if not step > 0:
        raise DomainError("quadrature step must be positive")
    ordered = sorted(intervals, key=lambda s: s.theta_min)
    for a, b in zip(ordered, ordered[1:]):
        if b.theta_min < a.theta_max:
            raise DomainError(f"overlapping intervals {a} and {b}")
    M = geometry.M
    C = np.zeros((M, M), dtype=complex)
    for sec in ordered:
        theta, h = _midpoints(sec, step)
        D = steering(geometry, theta)
        C += np.deg2rad(h) * (D @ D.conj().T)
    return symmetrize(C)


def constraint_term(geometry, c_tilde, theta):
    """d^H(theta) C~ d(theta) for each angle in `theta`."""
    D = steering(geometry, np.atleast_1d(theta))
    return np.real(np.einsum("mk,mn,nk->k", D.conj(), c_tilde, D))


def sector_grid(sector, step=DEFAULT_STEP):
    """Angles from theta_min to theta_max inclusive at (at most) `step` spacing."""
    width = sector.theta_max - sector.theta_min
    n = max(1, int(np.ceil(width / step - 1e-9)))
    return np.linspace(sector.theta_min, sector.theta_max, n + 1)


def delta0(geometry, sector, c_tilde, step=DEFAULT_STEP):
    """Largest value of d^H C~ d over a grid on the sector, endpoints included.

    Ties go to the smallest angle.
    """
    values = constraint_term(geometry, c_tilde, sector_grid(sector, step))
    return float(values[int(np.argmax(values))])


def dominant_basis(c_matrix, L):
    """The L dominant eigenvectors of `c_matrix`, strongest first."""
    M = c_matrix.shape[0]
    if int(L) != L or not 1 <= L <= M:
        raise DomainError(f"L must be an integer in [1, {M}], got {L!r}")
    _, V = eigh_sorted(c_matrix, descending=True)
    return V[:, :int(L)]


def feasibility_check(c_tilde, delta0_value, M):
    """Classify Delta0 against the smallest eigenvalue of C~.

    The tolerance is 1e-9 times the largest eigenvalue of C~.
    """
    lam = np.linalg.eigvalsh(symmetrize(c_tilde))
    if lam[-1] <= 0 and delta0_value >= 0:
        # C~ = 0: the constraint is vacuous
        return Feasibility.STRICTLY_FEASIBLE
    tol = 1e-9 * abs(lam[-1])
    slack = delta0_value / M - lam[0]
    if abs(slack) <= tol:
        return Feasibility.BOUNDARY
    if slack > tol:
        return Feasibility.STRICTLY_FEASIBLE
    return Feasibility.INFEASIBLE


@dataclass(frozen=True, eq=False)
class SectorModel:
    """Everything the estimators need to know about the signal sector.

    Build with :meth:`SectorModel.build`.
    """

    sector: AngularSector
    c_matrix: np.ndarray
    c_tilde: np.ndarray
    delta0: float
    u_basis: np.ndarray
    step: float = DEFAULT_STEP

    @classmethod
    def build(cls, geometry, sector, num_basis=DEFAULT_NUM_BASIS, step=DEFAULT_STEP, delta0_value=None):
        """Quadrature matrices, threshold and basis for `sector`.

        `delta0_value` replaces the default threshold (the largest
        constraint term over the sector grid) when given.
        """
        c = sector_matrix(geometry, [sector], step)
        comp = sector.complement()
        if comp:
            ct = sector_matrix(geometry, comp, step)
        else:
            ct = np.zeros_like(c)
        d0 = delta0(geometry, sector, ct, step) if delta0_value is None else float(delta0_value)
        return cls(sector, c, ct, d0, dominant_basis(c, num_basis), step)

    @property
    def M(self):
        return self.c_matrix.shape[0]

    @property
    def projector(self):
        """Projector I - U U^H onto the complement of the dominant subspace of C."""
        return np.eye(self.M) - self.u_basis @ self.u_basis.conj().T

    def feasibility(self):
        return feasibility_check(self.c_tilde, self.delta0, self.M)
