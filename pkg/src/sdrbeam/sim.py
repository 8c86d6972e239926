"""Snapshot simulation for the three steering-vector mismatch scenarios.

Random streams are Philox generators keyed by (seed, run index, stream id),
so each Monte-Carlo run can be regenerated on its own.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np

from .array_model import ArrayGeometry, steering
from .errors import DomainError, SingularCovarianceError
from .linalg import eigh_sorted, symmetrize
from .sector import AngularSector

STREAM_MISMATCH = 0
STREAM_SNAPSHOTS = 1


def make_rng(seed, run=0, stream=0):
    """Counter-based generator for one (seed, run, stream) triple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(run), int(stream)])))


def db2pow(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def complex_gaussian(rng, shape, power=1.0):
    """Circular complex Gaussian samples with E|x|^2 = power."""
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return np.sqrt(power / 2.0) * z


@dataclass(frozen=True)
class Exact:
    """The actual steering vector equals the presumed one."""


@dataclass(frozen=True)
class PhaseDistortion:
    """Wavefront distortion: cumulative Gaussian phase increments along the array."""

    variance: float = 0.04

    def __post_init__(self):
        if self.variance < 0:
            raise DomainError("phase variance must be nonnegative")


@dataclass(frozen=True)
class CoherentScattering:
    """Direct path plus `num_paths` coherently scattered plane waves.

    Path phases are uniform on [0, 2 pi). Path angles have mean
    `angle_mean` (the presumed DOA when None) and standard deviation
    `angle_std`; `angle_distribution` is "uniform" or "normal".
    """

    num_paths: int = 4
    angle_mean: Optional[float] = None
    angle_std: float = 1.0
    angle_distribution: str = "uniform"

    def __post_init__(self):
        if self.num_paths < 1:
            raise DomainError("num_paths must be >= 1")
        if self.angle_std < 0:
            raise DomainError("angle_std must be nonnegative")
        if self.angle_distribution not in ("uniform", "normal"):
            raise DomainError("angle_distribution must be 'uniform' or 'normal'")


MismatchModel = Union[Exact, PhaseDistortion, CoherentScattering]


@dataclass(frozen=True)
class Interferer:
    doa: float
    inr_db: float


@dataclass(frozen=True)
class Scenario:
    """One experimental condition.

    Defaults reproduce the common setup of the simulations: ten
    half-wavelength elements, presumed DOA 3 deg, interferers at 30 and
    50 deg with INR 30 dB, SNR 20 dB, K = 30 and a +-5 deg sector.
    """

    geometry: ArrayGeometry = field(default_factory=lambda: ArrayGeometry(10, 0.5))
    presumed_doa: float = 3.0
    snr_db: float = 20.0
    interferers: Tuple[Interferer, ...] = (Interferer(30.0, 30.0), Interferer(50.0, 30.0))
    num_snapshots: int = 30
    mismatch: MismatchModel = Exact()
    sector_halfwidth: float = 5.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "interferers", tuple(
            i if isinstance(i, Interferer) else Interferer(*i) for i in self.interferers))
        if int(self.num_snapshots) != self.num_snapshots or self.num_snapshots < 1:
            raise DomainError("num_snapshots must be a positive integer")
        if not -90.0 <= self.presumed_doa <= 90.0:
            raise DomainError("presumed_doa must lie in [-90, 90]")
        if not self.sector_halfwidth > 0:
            raise DomainError("sector_halfwidth must be positive")
        sec = self.sector
        for i in self.interferers:
            if sec.contains(i.doa):
                raise DomainError(f"interferer at {i.doa} deg lies inside the signal sector")
            if not -90.0 <= i.doa <= 90.0:
                raise DomainError("interferer DOA must lie in [-90, 90]")
        if self.seed < 0:
            raise DomainError("seed must be nonnegative")

    @property
    def sector(self):
        return AngularSector.around(self.presumed_doa, self.sector_halfwidth)

    @property
    def signal_power(self):
        return float(db2pow(self.snr_db))

    @property
    def presumed_steering(self):
        return steering(self.geometry, self.presumed_doa)

    def with_(self, **changes):
        return replace(self, **changes)


def draw_actual_steering(scenario, rng):
    """Draw the actual signal steering vector for one run, scaled to norm sqrt(M)."""
    p = scenario.presumed_steering
    M = scenario.geometry.M
    mm = scenario.mismatch
    if isinstance(mm, Exact):
        a = p
    elif isinstance(mm, PhaseDistortion):
        inc = rng.normal(0.0, np.sqrt(mm.variance), M - 1)
        phi = np.concatenate(([0.0], np.cumsum(inc)))
        a = p * np.exp(1j * phi)
    elif isinstance(mm, CoherentScattering):
        mean = scenario.presumed_doa if mm.angle_mean is None else mm.angle_mean
        psi = rng.uniform(0.0, 2 * np.pi, mm.num_paths)
        if mm.angle_distribution == "uniform":
            half = np.sqrt(3.0) * mm.angle_std
            theta = rng.uniform(mean - half, mean + half, mm.num_paths)
        else:
            theta = rng.normal(mean, mm.angle_std, mm.num_paths)
        theta = np.clip(theta, -90.0, 90.0)
        a = p + steering(scenario.geometry, theta) @ np.exp(1j * psi)
    else:
        raise DomainError(f"unknown mismatch model {mm!r}")
    return np.sqrt(M) * a / np.linalg.norm(a)


def generate_snapshots(scenario, actual_steering, rng, waveform=None, noise_power=1.0):
    """Training snapshots x(k) = s(k) a + sum_j i_j(k) d(theta_j) + n(k).

    Parameters
    ----------
    scenario : Scenario
    actual_steering : ndarray
        Signal steering vector (norm sqrt(M)).
    rng : numpy.random.Generator
    waveform : array_like, optional
        Fixed signal waveform s(k); drawn as circular Gaussian with the
        scenario's signal power when omitted.
    noise_power : float
        Per-element noise power (1 in all experiments).

    Returns
    -------
    ndarray
        M x K complex snapshot matrix.
    """
    M, K = scenario.geometry.M, scenario.num_snapshots
    a = np.asarray(actual_steering, dtype=complex)
    if waveform is None:
        s = complex_gaussian(rng, K, scenario.signal_power)
    else:
        s = np.broadcast_to(np.asarray(waveform, dtype=complex), (K,))
    X = np.outer(a, s)
    if scenario.interferers:
        doas = [i.doa for i in scenario.interferers]
        pw = db2pow([i.inr_db for i in scenario.interferers])
        B = steering(scenario.geometry, doas)
        X = X + B @ (np.sqrt(pw)[:, None] * complex_gaussian(rng, (len(doas), K)))
    if noise_power > 0:
        X = X + complex_gaussian(rng, (M, K), noise_power)
    return X


@dataclass(frozen=True, eq=False)
class SampleCovariance:
    """Sample covariance R^ = (1/K) sum x x^H with a cached eigendecomposition.

    `loading` is a diagonal-loading level added before inversion; it is 0
    unless explicitly enabled.
    """

    matrix: np.ndarray
    num_snapshots: int
    loading: float = 0.0

    @property
    def M(self):
        return self.matrix.shape[0]

    @property
    def singular(self):
        """True when K < M and the matrix cannot be full rank."""
        return self.num_snapshots < self.M

    @cached_property
    def eig(self):
        """(eigenvalues ascending, eigenvectors) of R^ + loading I."""
        w, V = eigh_sorted(self.matrix)
        return w + self.loading, V

    @cached_property
    def inverse(self):
        w, V = self.eig
        if self.loading <= 0:
            if self.singular:
                raise SingularCovarianceError(
                    f"K={self.num_snapshots} < M={self.M}; enable diagonal loading to invert")
        if w[0] <= 1e-12 * w[-1]:
            raise SingularCovarianceError(
                f"sample covariance is numerically singular (lambda_min={w[0]:.3e}, lambda_max={w[-1]:.3e})")
        return symmetrize((V / w) @ V.conj().T)

    def loaded(self, level):
        """Copy with diagonal loading `level` enabled."""
        return SampleCovariance(self.matrix, self.num_snapshots, float(level))


def sample_covariance(snapshots, loading=0.0):
    """Form R^ from an M x K snapshot matrix."""
    X = np.asarray(snapshots, dtype=complex)
    if X.ndim == 1:
        X = X[:, None]
    K = X.shape[1]
    if K < 1:
        raise DomainError("need at least one snapshot")
    return SampleCovariance(symmetrize(X @ X.conj().T / K), K, float(loading))


def true_interference_plus_noise_covariance(scenario, noise_power=1.0):
    """R_{i+n} = noise_power I + sum_j INR_j d(theta_j) d(theta_j)^H."""
    M = scenario.geometry.M
    R = noise_power * np.eye(M, dtype=complex)
    for i in scenario.interferers:
        d = steering(scenario.geometry, i.doa)
        R += db2pow(i.inr_db) * np.outer(d, d.conj())
    return symmetrize(R)
