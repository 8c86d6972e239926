"""Steering-vector estimation by strong duality.

The estimate solves

    min  a^H Ri a   subject to  ||a||^2 = M,  a^H Ct a <= Delta0

where Ri is the inverse sample covariance and Ct the out-of-sector matrix.
Its Lagrange dual has only two variables; for fixed gamma2 the best
gamma1 is the smallest eigenvalue of Ri + gamma2 Ct, which leaves the
one-dimensional concave problem

    g(gamma2) = M lambda_min(Ri + gamma2 Ct) - gamma2 Delta0,   gamma2 >= 0.

`solve_dual` maximizes g by bracketing and bisection on a supergradient and
`recover_primal` turns the dual optimum into a primal vector through the
null space of the certificate matrix Ri - gamma1 I + gamma2 Ct. Strong
duality makes the recovered vector globally optimal.

`rank_one_extract` and `relaxed_to_feasible_point` work on solutions of the
lifted problem in A = a a^H (trace constraint, PSD constraint, rank dropped)
and are independent of the dual route.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (BoundaryFeasibleError, ExtractionError, InconsistencyError,
                     InfeasibleError)
from .linalg import eigh_sorted, fix_phase, quad, symmetrize
from .sector import Feasibility, feasibility_check

DEFAULT_TOL = 1e-12
NULL_TOL = 1e-8
GAMMA2_CAP = 1e12


@dataclass(frozen=True)
class DualSolution:
    gamma1: float
    gamma2: float
    dual_value: float
    null_dim: int
    iterations: int = 0


@dataclass(frozen=True)
class KKTResiduals:
    """Optimality residuals of a candidate steering vector.

    stationarity is ||(Ri - g1 I + g2 Ct) a|| / ||a||, norm_gap is
    |a^H a - M| / M, slackness is |g2 (a^H Ct a - Delta0)| and
    constraint_margin is a^H Ct a - Delta0 (nonpositive when feasible).
    """

    stationarity: float
    norm_gap: float
    slackness: float
    constraint_margin: float

    def ok(self, tol=1e-6, delta0=1.0):
        return (self.stationarity <= tol and self.norm_gap <= tol and self.slackness <= tol
                and self.constraint_margin <= tol * max(1.0, abs(delta0)))


@dataclass(frozen=True, eq=False)
class SvEstimate:
    a_hat: np.ndarray
    objective: float
    dual: DualSolution
    kkt_residuals: KKTResiduals
    case: str = ""

    @property
    def duality_gap(self):
        return abs(self.objective - self.dual.dual_value)

    @property
    def constraint_inactive(self):
        """True when the out-of-sector constraint plays no role at the optimum."""
        return self.dual.gamma2 == 0.0 and self.kkt_residuals.constraint_margin < 0


@dataclass(frozen=True, eq=False)
class RelaxedSolution:
    """A feasible point A = Y Y^H of the lifted (rank-relaxed) problem."""

    a_matrix: np.ndarray
    rank: int
    factor: np.ndarray

    @classmethod
    def from_matrix(cls, A, rank_tol=1e-9):
        """Factor a Hermitian PSD matrix, dropping eigenvalues below rank_tol * lambda_max."""
        A = symmetrize(np.asarray(A, dtype=complex))
        w, V = eigh_sorted(A, descending=True)
        keep = w > rank_tol * max(w[0], 0.0)
        if not np.any(keep):
            raise ExtractionError("relaxed solution is the zero matrix")
        Y = V[:, keep] * np.sqrt(w[keep])
        return cls(A, int(keep.sum()), Y)

    @classmethod
    def from_factor(cls, Y):
        Y = np.asarray(Y, dtype=complex)
        if Y.ndim == 1:
            Y = Y[:, None]
        return cls(symmetrize(Y @ Y.conj().T), Y.shape[1], Y)


def _min_eigpair(H, c_tilde, degeneracy_tol=1e-12):
    """Smallest eigenvalue of H and, within its eigenspace, the unit vector
    minimizing u^H Ct u."""
    w, V = eigh_sorted(H)
    scale = max(abs(w[0]), abs(w[-1]), 1e-300)
    mult = int(np.sum(w - w[0] <= degeneracy_tol * scale))
    if mult == 1:
        return w[0], V[:, 0]
    F = V[:, :mult]
    _, G = eigh_sorted(F.conj().T @ c_tilde @ F)
    return w[0], fix_phase(F @ G[:, 0])


def dual_objective(gamma2, r_inv, c_tilde, delta0, M):
    """Value of the reduced dual function at `gamma2`.

    Returns
    -------
    value : float
        M * gamma1 - gamma2 * Delta0.
    gamma1 : float
        Smallest eigenvalue of Ri + gamma2 Ct.
    subgradient : float
        M u^H Ct u - Delta0 for the returned unit minimal eigenvector u.
    u : ndarray
        The minimal eigenvector (the one minimizing u^H Ct u when the
        smallest eigenvalue is repeated).
    """
    if gamma2 < 0:
        raise ValueError("gamma2 must be nonnegative")
    gamma1, u = _min_eigpair(r_inv + gamma2 * c_tilde, c_tilde)
    gamma1 = float(gamma1)
    return M * gamma1 - gamma2 * delta0, gamma1, M * quad(c_tilde, u) - delta0, u


def null_dimension(r_inv, c_tilde, gamma1, gamma2, null_tol=NULL_TOL):
    """Number of (numerically) zero eigenvalues of Ri - gamma1 I + gamma2 Ct.

    Eigenvalues up to null_tol times the largest eigenvalue of
    Ri + gamma2 Ct count as zero.
    """
    H = symmetrize(r_inv + gamma2 * c_tilde)
    w = np.linalg.eigvalsh(H)
    thr = null_tol * max(abs(w[-1]), 1e-300)
    return max(1, int(np.sum(w - gamma1 <= thr)))


def _check_feasible(c_tilde, delta0, M):
    status = feasibility_check(c_tilde, delta0, M)
    lam_min = float(np.linalg.eigvalsh(symmetrize(c_tilde))[0])
    if status is Feasibility.BOUNDARY:
        raise BoundaryFeasibleError(
            f"Delta0/M = {delta0 / M:.6g} equals lambda_min(C~) = {lam_min:.6g}: the feasible set is "
            "finite; enumerate sqrt(M) times the unit minimal eigenvectors of C~ instead of solving the dual")
    if status is Feasibility.INFEASIBLE:
        raise InfeasibleError(
            f"Delta0/M = {delta0 / M:.6g} is below lambda_min(C~) = {lam_min:.6g}: no steering vector "
            "satisfies the sector constraint")


def solve_dual(r_inv, c_tilde, delta0, M, tol=DEFAULT_TOL, null_tol=NULL_TOL):
    """Maximize the reduced dual function over gamma2 >= 0.

    The bracket starts at [0, 1] and doubles until the supergradient turns
    negative, then bisection shrinks it to tol * (1 + gamma2). The right
    end of the final bracket is returned.

    Raises
    ------
    BoundaryFeasibleError
        Delta0 / M equals lambda_min(Ct) within tolerance.
    InfeasibleError
        Delta0 / M is below lambda_min(Ct).
    """
    r_inv = symmetrize(np.asarray(r_inv, dtype=complex))
    c_tilde = symmetrize(np.asarray(c_tilde, dtype=complex))
    _check_feasible(c_tilde, delta0, M)

    def g(x):
        return dual_objective(x, r_inv, c_tilde, delta0, M)

    it = 0
    val0, g1_0, sub0, _ = g(0.0)
    if sub0 <= 0:
        q = null_dimension(r_inv, c_tilde, g1_0, 0.0, null_tol)
        return DualSolution(g1_0, 0.0, val0, q, it)

    lo, hi = 0.0, 1.0
    while True:
        it += 1
        _, _, sub, _ = g(hi)
        if sub <= 0:
            break
        lo, hi = hi, 2.0 * hi
        if hi > GAMMA2_CAP:
            raise InfeasibleError("gamma2 bracket exceeded its cap; the instance is not strictly feasible")

    while hi - lo > tol * (1.0 + lo):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        it += 1
        _, _, sub, _ = g(mid)
        if sub > 0:
            lo = mid
        else:
            hi = mid

    # the right end has a nonpositive supergradient, so its minimal
    # eigenvector satisfies the sector constraint; the dual value lost
    # against the left end is below tol
    g2 = hi
    val, g1, _, _ = g(g2)
    q = null_dimension(r_inv, c_tilde, g1, g2, null_tol)
    return DualSolution(g1, g2, val, q, it)


def kkt_check(a_hat, gamma1, gamma2, r_inv, c_tilde, delta0, M):
    """Residuals of the four optimality conditions at `a_hat`."""
    a = np.asarray(a_hat, dtype=complex)
    cert = r_inv - gamma1 * np.eye(M) + gamma2 * c_tilde
    na = np.linalg.norm(a)
    ct = quad(c_tilde, a)
    return KKTResiduals(
        stationarity=float(np.linalg.norm(cert @ a) / na) if na > 0 else float("inf"),
        norm_gap=abs(na ** 2 - M) / M,
        slackness=abs(gamma2 * (ct - delta0)),
        constraint_margin=ct - delta0,
    )


def recover_primal(dual, r_inv, c_tilde, delta0, M, null_tol=NULL_TOL, margin_tol=1e-9):
    """Primal steering vector from the dual optimum.

    With a one-dimensional null space of the certificate matrix the
    estimate is sqrt(M) times its null vector. Otherwise it is built in the
    null space F from the extreme eigenvectors of F^H Ct F: the minimal one
    when gamma2 = 0, and the blend that puts the sector constraint exactly
    at Delta0 when gamma2 > 0.

    Raises
    ------
    InconsistencyError
        gamma2 > 0 but no null-space direction reaches Delta0 / M.
    """
    r_inv = symmetrize(np.asarray(r_inv, dtype=complex))
    c_tilde = symmetrize(np.asarray(c_tilde, dtype=complex))
    g1, g2 = dual.gamma1, dual.gamma2
    cert = r_inv - g1 * np.eye(M) + g2 * c_tilde
    _, V = eigh_sorted(cert)
    q = dual.null_dim
    if q == 1:
        a = np.sqrt(M) * V[:, 0]
        case = "single"
    else:
        F = V[:, :q]
        mu, Fv = eigh_sorted(F.conj().T @ c_tilde @ F)
        target = delta0 / M
        if g2 == 0.0:
            coeffs = np.sqrt(M) * Fv[:, 0]
            case = "degenerate-inactive"
        else:
            tol = margin_tol * max(abs(mu[-1]), abs(target), 1e-300)
            if mu[-1] < target - tol or mu[0] > target + tol:
                raise InconsistencyError(
                    "null-space constraint range does not contain Delta0/M",
                    {"mu_min": float(mu[0]), "mu_max": float(mu[-1]), "delta0_over_M": target,
                     "gamma1": g1, "gamma2": g2, "null_dim": q})
            span = mu[-1] - mu[0]
            theta = 0.0 if span <= 0 else float(np.clip((target - mu[0]) / span, 0.0, 1.0))
            coeffs = np.sqrt(M) * (np.sqrt(1.0 - theta) * Fv[:, 0] + np.sqrt(theta) * Fv[:, -1])
            case = "degenerate-active"
        a = F @ coeffs
    a = fix_phase(a)
    res = kkt_check(a, g1, g2, r_inv, c_tilde, delta0, M)
    return SvEstimate(a, quad(r_inv, a), dual, res, case)


def estimate_steering(r_inv, c_tilde, delta0, M, tol=DEFAULT_TOL, null_tol=NULL_TOL):
    """Solve the estimation problem end to end (dual search plus recovery)."""
    dual = solve_dual(r_inv, c_tilde, delta0, M, tol=tol, null_tol=null_tol)
    return recover_primal(dual, r_inv, c_tilde, delta0, M, null_tol=null_tol)


def extraction_matrix(Y, c_tilde, M):
    """The r x r matrix (1/M) Y^H Y - Y^H Ct Y / Tr(Y^H Ct Y).

    Its trace is zero whenever Tr(Y Y^H) = M.
    """
    YCY = symmetrize(Y.conj().T @ c_tilde @ Y)
    return symmetrize(Y.conj().T @ Y / M - YCY / np.real(np.trace(YCY)))


def rank_one_extract(relaxed, c_tilde, M, rtol=1e-6):
    """Vector x = Y v with x^H x = Tr(A) and x^H Ct x = Tr(Ct A).

    For an optimal relaxed solution A = Y Y^H, x is optimal for the
    original problem. v is the sum of the (phase-fixed) eigenvectors of the
    extraction matrix D, scaled so that ||Y v||^2 = M; since v^H D v equals
    the trace of D (zero), the second equality follows.

    Raises
    ------
    ExtractionError
        Neither the eigenvector sum nor the two-eigenvector fallback meets
        both equalities within `rtol`.
    """
    Y = relaxed.factor
    A = relaxed.a_matrix
    target_c = float(np.real(np.trace(c_tilde @ A)))
    if relaxed.rank == 1:
        x = Y[:, 0]
        return fix_phase(np.sqrt(M) * x / np.linalg.norm(x))

    def scaled(v):
        x = Y @ v
        return np.sqrt(M) * x / np.linalg.norm(x)

    def good(x):
        return abs(quad(c_tilde, x) - target_c) <= rtol * max(abs(target_c), 1e-12 * M)

    YCY = symmetrize(Y.conj().T @ c_tilde @ Y)
    if np.real(np.trace(YCY)) <= 1e-14 * M * max(1.0, np.linalg.norm(c_tilde)):
        # Ct vanishes on range(Y): every x in range(Y) meets both equalities
        return fix_phase(scaled(np.ones(relaxed.rank, dtype=complex)))

    lam, E = eigh_sorted(extraction_matrix(Y, c_tilde, M))
    x = scaled(E.sum(axis=1))
    if good(x):
        return fix_phase(x)
    # fallback: weight one positive and one negative eigenvector so v^H D v = 0
    i_neg, i_pos = 0, len(lam) - 1
    if lam[i_pos] > 0 > lam[i_neg]:
        v = np.sqrt(-lam[i_neg]) * E[:, i_pos] + np.sqrt(lam[i_pos]) * E[:, i_neg]
        x = scaled(v)
        if good(x):
            return fix_phase(x)
    raise ExtractionError("rank-one extraction failed", {
        "eigenvalues_D": lam.tolist(), "target_c": target_c, "achieved_c": quad(c_tilde, x)})


def relaxed_to_feasible_point(a_matrix, c_tilde, M, rank_tol=1e-9, cluster_tol=1e-9):
    """Map a relaxed-feasible A to a vector feasible for the original problem.

    Among the eigenvectors b of A with nonzero eigenvalue, take the one with
    the smallest b^H Ct b and return sqrt(M) b. Then ||a||^2 = M and
    a^H Ct a <= Tr(Ct A). Inside a repeated eigenvalue the eigenvector is
    chosen to minimize b^H Ct b over the whole eigenspace.
    """
    A = symmetrize(np.asarray(a_matrix, dtype=complex))
    c_tilde = symmetrize(np.asarray(c_tilde, dtype=complex))
    w, V = eigh_sorted(A, descending=True)
    scale = max(w[0], 1e-300)
    support = int(np.sum(w > rank_tol * scale))
    best = None
    i = 0
    while i < support:
        j = i + 1
        while j < support and w[i] - w[j] <= cluster_tol * scale:
            j += 1
        F = V[:, i:j]
        mu, G = eigh_sorted(F.conj().T @ c_tilde @ F)
        if best is None or mu[0] < best[0]:
            best = (mu[0], F @ G[:, 0])
        i = j
    b = best[1]
    return fix_phase(np.sqrt(M) * b / np.linalg.norm(b))
