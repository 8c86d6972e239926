"""Brute-force checks for the estimator, independent of its dual route.

* `grid_dual_oracle` evaluates the reduced dual function on a dense grid.
* `multistart_primal_oracle` searches the original non-convex problem
  directly: penalized projected gradient on the sphere from many starts,
  then a local SLSQP polish of every start in real coordinates.

Both are meant for small instances (the primal search requires M <= 6).
"""

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, InfeasibleError
from .linalg import eigh_sorted, quad, symmetrize

MAX_ORACLE_DIM = 6


def grid_dual_oracle(r_inv, c_tilde, delta0, M, bracket, step, chunk=4096):
    """Maximize the reduced dual function over a uniform grid on `bracket`.

    The grid is evaluated `chunk` points at a time to bound memory.

    Returns
    -------
    (gamma2_best, value_best)
    """
    lo, hi = bracket
    if hi < lo or step <= 0:
        raise DomainError("need lo <= hi and step > 0")
    n = int(np.floor((hi - lo) / step + 1e-9))
    grid = lo + step * np.arange(n + 1)
    if grid[-1] < hi:
        grid = np.append(grid, hi)
    R, C = symmetrize(r_inv), symmetrize(c_tilde)
    vals = np.empty(grid.size)
    for s in range(0, grid.size, chunk):
        g = grid[s:s + chunk]
        lam = np.linalg.eigvalsh(R[None] + g[:, None, None] * C[None])[:, 0]
        vals[s:s + chunk] = M * lam - g * delta0
    k = int(np.argmax(vals))
    return float(grid[k]), float(vals[k])


def _real_form(H):
    """Real 2M x 2M matrix Q with x^T Q x = a^H H a for x = [Re a, Im a]."""
    A, B = H.real, H.imag
    return np.block([[A, -B], [B, A]])


def _to_complex(x):
    m = x.size // 2
    return x[:m] + 1j * x[m:]


def _to_real(a):
    return np.concatenate([a.real, a.imag])


def _restore(a, c_tilde, delta0, M, u_min):
    """Nearest-feasible repair: rescale to the sphere, then slide toward the
    minimal eigenvector of Ct until the sector constraint holds."""
    a = np.sqrt(M) * a / np.linalg.norm(a)
    if quad(c_tilde, a) <= delta0:
        return a
    ph = np.vdot(u_min, a)
    u = u_min * (ph / abs(ph) if abs(ph) > 0 else 1.0)

    def at(t):
        v = (1 - t) * a + t * np.sqrt(M) * u
        return np.sqrt(M) * v / np.linalg.norm(v)

    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if quad(c_tilde, at(mid)) <= delta0:
            hi = mid
        else:
            lo = mid
    return at(hi)


def _penalized_descent(starts, r_inv, c_tilde, delta0, M, iters_per_round=60):
    """Projected gradient on ||a||^2 = M with penalty rho * max(0, a^H Ct a - Delta0)^2.

    The penalty weight grows x10 per round from 1 to 1e6. Runs all starts
    at once (rows of `starts`).
    """
    A = starts.copy()
    lr = np.linalg.eigvalsh(r_inv)[-1]
    lc = np.linalg.eigvalsh(c_tilde)[-1]
    for rho in 10.0 ** np.arange(0, 7):
        lip = 2 * lr + 4 * rho * lc * (2 * M * lc + max(delta0, 1e-12))
        eta = 1.0 / lip
        for _ in range(iters_per_round):
            ca = A @ c_tilde.T
            h = np.maximum(np.real(np.sum(A.conj() * ca, axis=1)) - delta0, 0.0)
            grad = 2 * A @ r_inv.T + 4 * rho * h[:, None] * ca
            # drop the radial component, step, retract to the sphere
            radial = np.real(np.sum(A.conj() * grad, axis=1)) / M
            A = A - eta * (grad - radial[:, None] * A)
            A = np.sqrt(M) * A / np.linalg.norm(A, axis=1, keepdims=True)
    return A


def multistart_primal_oracle(r_inv, c_tilde, delta0, M, starts=16, seed=0, feas_tol=1e-10):
    """Best local minimum of the original problem found from many starts.

    Starts are `starts` random points plus sqrt(M) rho{Ri} and sqrt(M) times
    the minimal eigenvector of Ct. Ties go to the smallest start index.

    Returns
    -------
    (a_best, objective_best)

    Raises
    ------
    DomainError
        M exceeds the desk-scale limit.
    InfeasibleError
        No start ends at a feasible point.
    """
    if M > MAX_ORACLE_DIM:
        raise DomainError(f"primal oracle limited to M <= {MAX_ORACLE_DIM}")
    r_inv = symmetrize(np.asarray(r_inv, dtype=complex))
    c_tilde = symmetrize(np.asarray(c_tilde, dtype=complex))
    rng = np.random.default_rng(seed)
    _, Vr = eigh_sorted(r_inv)
    _, Vc = eigh_sorted(c_tilde)
    u_min = Vc[:, 0]
    init = [np.sqrt(M) * Vr[:, 0], np.sqrt(M) * u_min]
    Z = rng.standard_normal((starts, M)) + 1j * rng.standard_normal((starts, M))
    init.extend(np.sqrt(M) * z / np.linalg.norm(z) for z in Z)
    A0 = _penalized_descent(np.array(init), r_inv, c_tilde, delta0, M)

    Q = _real_form(r_inv)
    C = _real_form(c_tilde)
    cons = [
        {"type": "eq", "fun": lambda x: x @ x - M, "jac": lambda x: 2 * x},
        {"type": "ineq", "fun": lambda x: delta0 - x @ C @ x, "jac": lambda x: -2 * C @ x},
    ]
    scale = max(np.linalg.eigvalsh(r_inv)[-1], 1e-300)
    best = None
    for a0 in A0:
        res = minimize(lambda x: x @ Q @ x / scale, _to_real(a0), jac=lambda x: 2 * Q @ x / scale,
                       constraints=cons, method="SLSQP", options={"ftol": 1e-16, "maxiter": 500})
        a = _restore(_to_complex(res.x), c_tilde, delta0, M, u_min)
        if quad(c_tilde, a) - delta0 > feas_tol * max(1.0, abs(delta0)):
            continue
        f = quad(r_inv, a)
        if best is None or f < best[1]:
            best = (a, f)
    if best is None:
        raise InfeasibleError("no feasible local minimum found")
    return best
