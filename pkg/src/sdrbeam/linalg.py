"""Small Hermitian linear-algebra helpers shared by the other modules.

Every eigenvector returned from here follows one phase convention: the
entry of largest modulus is rotated onto the positive real axis (first
such entry on ties), so results do not depend on the LAPACK backend.
"""

import numpy as np


def herm(A):
    """Conjugate transpose."""
    return np.conj(np.swapaxes(A, -1, -2))


def symmetrize(A):
    """Return (A + A^H) / 2, which is exactly Hermitian."""
    A = np.asarray(A)
    return 0.5 * (A + herm(A))


def fix_phase(v):
    """Rotate the column(s) of `v` so their largest-modulus entry is real positive."""
    v = np.array(v, dtype=complex, copy=True)
    if v.ndim == 1:
        k = int(np.argmax(np.abs(v)))
        r = abs(v[k])
        if r > 0:
            v *= np.conj(v[k]) / r
            v[k] = r  # exactly real after rounding
        return v
    for j in range(v.shape[1]):
        v[:, j] = fix_phase(v[:, j])
    return v


def eigh_sorted(A, descending=False):
    """Hermitian eigendecomposition with phase-fixed eigenvectors.

    Eigenvalues are ascending unless `descending` is set.
    """
    w, V = np.linalg.eigh(symmetrize(A))
    if descending:
        w = w[::-1]
        V = V[:, ::-1]
    return w, fix_phase(V)


def min_eigvec(A):
    """Unit eigenvector for the smallest eigenvalue of Hermitian `A`."""
    w, V = eigh_sorted(A)
    return V[:, 0]


def max_eigvec(A):
    w, V = eigh_sorted(A)
    return V[:, -1]


def quad(A, x):
    """Real part of x^H A x."""
    return float(np.real(np.vdot(x, A @ x)))


def align_phase(x, ref):
    """Rotate `x` by a global phase so that ref^H x is real nonnegative."""
    c = np.vdot(ref, x)
    if abs(c) == 0:
        return np.asarray(x, dtype=complex)
    return x * np.conj(c) / abs(c)


def phase_distance(x, y):
    """min over phi of ||x e^{j phi} - y|| / ||y||."""
    x = np.asarray(x)
    y = np.asarray(y)
    return float(np.linalg.norm(align_phase(x, y) - y) / np.linalg.norm(y))
