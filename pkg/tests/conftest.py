import numpy as np
import pytest

from sdrbeam.array_model import ArrayGeometry, steering
from sdrbeam.sector import AngularSector, SectorModel


def random_hpd(rng, M, cond=100.0):
    """Random Hermitian positive-definite matrix with eigenvalues in [1, cond]."""
    Z = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    Q, _ = np.linalg.qr(Z)
    lam = np.exp(rng.uniform(0.0, np.log(cond), M))
    H = (Q * lam) @ Q.conj().T
    return 0.5 * (H + H.conj().T)


def random_psd(rng, M, rank=None):
    rank = M if rank is None else rank
    Z = rng.standard_normal((M, rank)) + 1j * rng.standard_normal((M, rank))
    H = Z @ Z.conj().T / rank
    return 0.5 * (H + H.conj().T)


def random_instance(rng, M, active_bias=0.5):
    """Strictly feasible (Ri, Ct, Delta0).

    Delta0 / M is drawn between lambda_min(Ct) and the value of the
    unconstrained minimizer, so a fraction of instances has an active
    constraint.
    """
    r_inv = random_hpd(rng, M)
    c_tilde = random_psd(rng, M, rank=int(rng.integers(1, M + 1)))
    lam = np.linalg.eigvalsh(c_tilde)
    _, V = np.linalg.eigh(r_inv)
    free = M * np.real(np.vdot(V[:, 0], c_tilde @ V[:, 0]))
    lo = M * lam[0]
    t = rng.uniform(0.02, 1.0) if rng.uniform() < active_bias else rng.uniform(1.0, 1.5)
    delta0 = lo + t * (free - lo) + 1e-3 * M * (lam[-1] - lam[0])
    return r_inv, c_tilde, float(delta0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ula10():
    return ArrayGeometry(10, 0.5)


@pytest.fixture(scope="session")
def example_model(ula10):
    """Sector model for theta_p = 3 deg, half-width 5 deg."""
    return SectorModel.build(ula10, AngularSector.around(3.0, 5.0))


def orthogonal_partner_angle(M, theta_p=3.0, spacing=0.5):
    """Angle whose ULA steering vector is exactly orthogonal to d(theta_p)."""
    return float(np.degrees(np.arcsin(np.sin(np.radians(theta_p)) - 1.0 / (M * spacing))))


def degenerate_instance(M, snr=100.0, halfwidth=None, theta_p=3.0):
    """Incoherent two-path instance with a two-dimensional optimal set.

    R = I + snr (p p^H + b b^H) with p, b orthogonal steering vectors inside
    the sector, so both are minimal eigenvectors of Ri. The default sector
    reaches 3 deg past the scattered path.
    """
    g = ArrayGeometry(M, 0.5)
    tb = orthogonal_partner_angle(M, theta_p)
    if halfwidth is None:
        halfwidth = abs(theta_p - tb) + 3.0
    p, b = steering(g, theta_p), steering(g, tb)
    R = np.eye(M) + snr * (np.outer(p, p.conj()) + np.outer(b, b.conj()))
    model = SectorModel.build(g, AngularSector.around(theta_p, halfwidth), num_basis=min(6, M))
    return np.linalg.inv(R), model, p, b
