"""Dense Hermitian linear algebra for the small matrices used here (dim <= 8)."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, NonHermitian, NotPSD

HERMITIAN_TOL = 1e-10
OFFDIAG_TOL = 1e-13
MAX_SWEEPS = 100

_PAULI = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class EigenSystem(NamedTuple):
    values: np.ndarray  # real, descending
    vectors: np.ndarray  # columns are eigenvectors


def pauli(k: int) -> np.ndarray:
    """Return sigma_k, with sigma_0 the 2x2 identity."""
    if k not in (0, 1, 2, 3):
        raise IndexError(f"Pauli index must be in 0..3, got {k}")
    return _PAULI[k].copy()


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    err = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if err > tol:
        raise NonHermitian(f"matrix deviates from Hermitian by {err:.3e}")
    return 0.5 * (m + m.conj().T)


def hermitian_eig(m: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot element, then applies the
    real symmetric Jacobi rotation that annihilates it. Sweeps stop once the
    off-diagonal Frobenius norm drops below ``1e-13`` (scaled by the matrix norm
    when that exceeds one). Eigenvalues are returned in descending order.
    """
    a = check_hermitian(m).tolist()
    n = len(a)
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    scale = max(1.0, math.sqrt(sum(abs(x) ** 2 for row in a for x in row)))
    tol = OFFDIAG_TOL * scale

    for _ in range(MAX_SWEEPS):
        off = math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                g = abs(apq)
                if g < 1e-300:
                    continue
                ph = apq / g
                app = a[p][p].real
                aqq = a[q][q].real
                theta = (aqq - app) / (2.0 * g)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # G = [[c, s], [-s*conj(ph), c*conj(ph)]] on the (p, q) plane
                phc = ph.conjugate()
                g10 = -s * phc
                g11 = c * phc
                # columns: A <- A G
                for row in a:
                    xp, xq = row[p], row[q]
                    row[p] = xp * c + xq * g10
                    row[q] = xp * s + xq * g11
                # rows: A <- G^H A
                rp, rq = a[p], a[q]
                cg10, cg11 = g10.conjugate(), g11.conjugate()
                for j in range(n):
                    xp, xq = rp[j], rq[j]
                    rp[j] = c * xp + cg10 * xq
                    rq[j] = s * xp + cg11 * xq
                a[p][q] = 0j
                a[q][p] = 0j
                a[p][p] = complex(a[p][p].real, 0.0)
                a[q][q] = complex(a[q][q].real, 0.0)
                for row in v:
                    xp, xq = row[p], row[q]
                    row[p] = xp * c + xq * g10
                    row[q] = xp * s + xq * g11
    else:
        raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")

    values = np.array([a[i][i].real for i in range(n)])
    vectors = np.array(v, dtype=complex)
    order = np.argsort(-values, kind="stable")
    return EigenSystem(values[order], vectors[:, order])


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues down to -1e-8 are accepted and clamped to zero.
    """
    vals, vecs = hermitian_eig(m)
    if vals[-1] < -1e-8:
        raise NotPSD(f"minimum eigenvalue {vals[-1]:.3e}")
    root = np.sqrt(np.clip(vals, 0.0, None))
    r = (vecs * root) @ vecs.conj().T
    return 0.5 * (r + r.conj().T)


def max_eigenvalue_sym(m: np.ndarray) -> float:
    """Largest eigenvalue of a real symmetric (or Hermitian) matrix."""
    return float(hermitian_eig(m).values[0])


def min_eigenvalue_sym(m: np.ndarray) -> float:
    """Smallest eigenvalue of a real symmetric (or Hermitian) matrix."""
    return float(hermitian_eig(m).values[-1])
