"""Beamformer weight vectors: the estimator-based beamformer and the baselines.

Each builder takes a :class:`~sdrbeam.sim.SampleCovariance`. Apart from the
worst-case beamformer, whose weights are the exact solution of its
second-order cone program, every method is scaled to unit response at its
own steering estimate (w^H a_est = 1).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, InfeasibleError
from .linalg import fix_phase, min_eigvec
from .svest import DEFAULT_TOL, estimate_steering

METHODS = ("proposed", "mv_smi", "worst_case", "eigenspace", "subspace", "sir_infinite")


@dataclass(frozen=True, eq=False)
class BeamWeights:
    w: np.ndarray
    method: str
    steering: Optional[np.ndarray] = None
    diagnostics: dict = field(default_factory=dict)


def _capon(r_inv, a, method, **diag):
    """w = Ri a / (a^H Ri a)."""
    z = r_inv @ a
    w = z / np.vdot(a, z).real
    return BeamWeights(w, method, np.asarray(a), diag)


def proposed(r_hat, sector_model, solver_tol=DEFAULT_TOL):
    """Beamformer built on the globally optimal steering-vector estimate."""
    r_inv = r_hat.inverse
    est = estimate_steering(r_inv, sector_model.c_tilde, sector_model.delta0, r_hat.M, tol=solver_tol)
    a = est.a_hat
    if est.constraint_inactive and est.dual.null_dim == 1:
        # the estimate is then the principal eigenvector of R^; take it from
        # R^'s own eigendecomposition, which is better conditioned than the
        # null vector of Ri - gamma1 I
        _, V = r_hat.eig
        a = fix_phase(np.sqrt(r_hat.M) * V[:, -1])
    return _capon(r_inv, a, "proposed", estimate=est)


def mv_smi(r_hat, presumed):
    """Sample-matrix-inversion MVDR beamformer for the presumed steering vector."""
    return _capon(r_hat.inverse, np.asarray(presumed, dtype=complex), "mv_smi")


def _secular_root(f, lo, hi, tol=1e-15, maxiter=200):
    """Root of an increasing function on [lo, hi] by safeguarded bisection."""
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def worst_case(r_hat, presumed, epsilon):
    """Worst-case robust beamformer.

    Solves ``min w^H R w  s.t.  epsilon ||w|| <= w^H p - 1``. The optimum is
    w = c (R + xi I)^{-1} p where xi > 0 solves
    ``xi ||(R + xi I)^{-1} p|| = epsilon`` (monotone in xi, solved on the
    eigenbasis of R) and c = 1 / (z^H p - epsilon ||z||) makes the
    constraint active.

    Raises
    ------
    InfeasibleError
        If epsilon >= ||p||.
    """
    p = np.asarray(presumed, dtype=complex)
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    if epsilon >= np.linalg.norm(p):
        raise InfeasibleError(f"epsilon={epsilon} >= ||p||={np.linalg.norm(p):.6g}: worst-case problem infeasible")
    if epsilon == 0:
        out = mv_smi(r_hat, p)
        return BeamWeights(out.w, "worst_case", None, {"loading": 0.0})
    lam, V = r_hat.eig
    r_hat.inverse  # raises on a singular covariance
    pp = np.abs(V.conj().T @ p) ** 2

    def h(xi):
        # (xi ||(R + xi I)^{-1} p||)^2 - epsilon^2, increasing in xi
        return xi * xi * np.sum(pp / (lam + xi) ** 2) - epsilon ** 2

    hi = 1.0
    while h(hi) < 0:
        hi *= 2.0
    xi = _secular_root(h, 0.0, hi)
    z = V @ ((V.conj().T @ p) / (lam + xi))
    w = z / (np.vdot(z, p).real - epsilon * np.linalg.norm(z))
    return BeamWeights(w, "worst_case", None, {"loading": xi})


def eigenspace(r_hat, presumed, subspace_dim):
    """Eigenspace-based beamformer using the top `subspace_dim` eigenvectors of R^."""
    M = r_hat.M
    if int(subspace_dim) != subspace_dim or not 1 <= subspace_dim <= M:
        raise DomainError(f"subspace_dim must be an integer in [1, {M}]")
    r_hat.inverse
    lam, V = r_hat.eig
    E = V[:, M - int(subspace_dim):]
    L = lam[M - int(subspace_dim):]
    p = np.asarray(presumed, dtype=complex)
    c = E.conj().T @ p
    a_est = E @ c
    w = E @ (c / L)
    w = w / np.vdot(w, a_est).conj()
    return BeamWeights(w, "eigenspace", a_est)


def subspace_closed_form(r_hat, u_basis):
    """Beamformer with the steering estimate restricted to range(U)."""
    r_inv = r_hat.inverse
    U = np.asarray(u_basis, dtype=complex)
    v = min_eigvec(U.conj().T @ r_inv @ U)
    a = fix_phase(np.sqrt(r_hat.M) * (U @ v))
    return _capon(r_inv, a, "subspace")


def sir_infinite(r_hat):
    """Beamformer with the unconstrained estimate a = sqrt(M) rho{Ri}."""
    r_inv = r_hat.inverse
    _, V = r_hat.eig
    # smallest eigenvector of Ri is the dominant eigenvector of R^
    a = fix_phase(np.sqrt(r_hat.M) * V[:, -1])
    return _capon(r_inv, a, "sir_infinite")


@dataclass(frozen=True)
class MethodSettings:
    """Parameters that baselines need beyond the covariance."""

    epsilon: Optional[float] = None     # None means 0.3 M
    subspace_dim: Optional[int] = None  # None means 1 + number of interferers
    solver_tol: float = DEFAULT_TOL


def build_weights(method, r_hat, presumed, sector_model, settings=MethodSettings(), num_interferers=2):
    """Dispatch on a method name from :data:`METHODS`."""
    M = r_hat.M
    if method == "proposed":
        return proposed(r_hat, sector_model, settings.solver_tol)
    if method == "mv_smi":
        return mv_smi(r_hat, presumed)
    if method == "worst_case":
        eps = 0.3 * M if settings.epsilon is None else settings.epsilon
        return worst_case(r_hat, presumed, eps)
    if method == "eigenspace":
        dim = num_interferers + 1 if settings.subspace_dim is None else settings.subspace_dim
        return eigenspace(r_hat, presumed, dim)
    if method == "subspace":
        return subspace_closed_form(r_hat, sector_model.u_basis)
    if method == "sir_infinite":
        return sir_infinite(r_hat)
    raise DomainError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
